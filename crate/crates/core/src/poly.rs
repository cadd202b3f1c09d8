//! Sparse multivariate polynomials over an exact coefficient ring, plus the
//! symmetric invariants `q_{2i}`, `q'_n`, `p_i` and Newton's identities.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Family, GroupType};
use crate::report::{Status, VerificationReport};
use crate::scalar::Scalar;

pub const MAX_VARS: usize = 16;
pub const MAX_DEGREE: usize = 255;

/// Exponent vector packed one byte per variable, `e_1` in the most
/// significant byte. Ordered graded-lexicographically.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    bits: u128,
    deg: u16,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { bits: 0, deg: 0 };

    fn shift(v: usize) -> u32 {
        ((MAX_VARS - 1 - v) * 8) as u32
    }

    pub fn from_exps<E: Copy + Into<u64>>(exps: &[E]) -> Self {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut bits = 0u128;
        let mut deg = 0usize;
        for (v, &e) in exps.iter().enumerate() {
            let e: u64 = e.into();
            assert!(e as usize <= MAX_DEGREE, "exponent {e} too large");
            bits |= (e as u128) << Self::shift(v);
            deg += e as usize;
        }
        assert!(deg <= MAX_DEGREE, "total degree {deg} too large");
        Monomial { bits, deg: deg as u16 }
    }

    pub fn var(v: usize) -> Self {
        assert!(v < MAX_VARS);
        Monomial { bits: 1u128 << Self::shift(v), deg: 1 }
    }

    pub fn exp(&self, v: usize) -> u32 {
        ((self.bits >> Self::shift(v)) & 0xff) as u32
    }

    pub fn exps(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }

    pub fn degree(&self) -> usize {
        self.deg as usize
    }

    pub fn first_var(&self) -> Option<usize> {
        (self.bits != 0).then(|| (self.bits.leading_zeros() / 8) as usize)
    }

    /// `self / x_v`; the caller guarantees `x_v` divides.
    pub fn div_var(&self, v: usize) -> Self {
        debug_assert!(self.exp(v) > 0);
        Monomial { bits: self.bits - (1u128 << Self::shift(v)), deg: self.deg - 1 }
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        // Exponents never exceed the total degree, so a bounded total rules
        // out carries between bytes.
        let deg = self.deg + rhs.deg;
        assert!(deg as usize <= MAX_DEGREE, "total degree {deg} too large");
        Monomial { bits: self.bits + rhs.bits, deg }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which variables a polynomial is written in: `e_1..e_n` or `omega_1..omega_n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "e")]
    E,
    #[serde(rename = "omega")]
    Omega,
}

impl Basis {
    fn var_prefix(&self) -> &'static str {
        match self {
            Basis::E => "e",
            Basis::Omega => "w",
        }
    }
}

/// Sparse polynomial: terms sorted by monomial, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<C> {
    nvars: usize,
    basis: Basis,
    terms: Vec<(Monomial, C)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exps: Vec<u32>,
    pub num: String,
    pub den: String,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(nvars: usize, basis: Basis) -> Self {
        assert!(nvars <= MAX_VARS);
        Polynomial { nvars, basis, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, basis: Basis, c: C) -> Self {
        Self::from_terms(nvars, basis, [(Monomial::ONE, c)])
    }

    pub fn one(nvars: usize, basis: Basis) -> Self {
        Self::constant(nvars, basis, C::one())
    }

    pub fn var(nvars: usize, basis: Basis, v: usize) -> Self {
        assert!(v < nvars);
        Self::from_terms(nvars, basis, [(Monomial::var(v), C::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, basis: Basis, terms: I) -> Self {
        let mut map: FxHashMap<Monomial, C> = FxHashMap::default();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            map.entry(m).and_modify(|acc| *acc += &c).or_insert(c);
        }
        Self::from_map(nvars, basis, map)
    }

    fn from_map(nvars: usize, basis: Basis, map: FxHashMap<Monomial, C>) -> Self {
        let mut terms: Vec<(Monomial, C)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|a| a.0);
        Polynomial { nvars, basis, terms }
    }

    /// Linear form `sum coeffs[v] x_v`.
    pub fn linear(basis: Basis, coeffs: &[C]) -> Self {
        Self::from_terms(coeffs.len(), basis, coeffs.iter().enumerate().map(|(v, c)| (Monomial::var(v), c.clone())))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        match self.terms.binary_search_by(|(t, _)| t.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.last().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.iter().all(|(m, _)| m.degree() == d)
    }

    pub fn homogeneous_component(&self, d: usize) -> Self {
        Polynomial {
            nvars: self.nvars,
            basis: self.basis,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).cloned().collect(),
        }
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        Polynomial {
            nvars: self.nvars,
            basis: self.basis,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= max_degree).cloned().collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.basis);
        }
        Polynomial {
            nvars: self.nvars,
            basis: self.basis,
            terms: self.terms.iter().map(|(m, v)| (*m, v.clone() * c.clone())).collect(),
        }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.basis, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Relabel the variable basis without changing coefficients.
    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.basis, other.basis, "arithmetic across variable bases");
        assert_eq!(self.nvars, other.nvars, "arithmetic across variable counts");
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        self.check_compatible(other);
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = std::mem::take(&mut self.terms).into_iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => out.push(a.next().unwrap()),
                    Ordering::Greater => {
                        let (m, v) = b.next().unwrap();
                        out.push((*m, v.clone() * c.clone()));
                    }
                    Ordering::Equal => {
                        let (m, mut v) = a.next().unwrap();
                        let (_, w) = b.next().unwrap();
                        v += &(w.clone() * c.clone());
                        if !v.is_zero() {
                            out.push((m, v));
                        }
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (m, v) = b.next().unwrap();
                    out.push((*m, v.clone() * c.clone()));
                }
                (None, None) => break,
            }
        }
        self.terms = out;
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.nvars, self.basis);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replace each variable `x_v` by `images[v]` (all in one target basis).
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| (p.nvars, p.basis)).unwrap_or((0, self.basis));
        let mut memo: FxHashMap<Monomial, Polynomial<C>> = FxHashMap::default();
        memo.insert(Monomial::ONE, Polynomial::one(target.0, target.1));
        let mut out = Polynomial::zero(target.0, target.1);
        for (m, c) in &self.terms {
            let img = monomial_image(*m, images, &mut memo);
            out.add_scaled(&img, c);
        }
        out
    }

    /// Polynomial with variables permuted: `x_v -> x_{perm[v]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0u32; self.nvars];
            for (v, p) in perm.iter().enumerate() {
                exps[*p] = m.exp(v);
            }
            (Monomial::from_exps(&exps), c.clone())
        });
        Self::from_terms(self.nvars, self.basis, terms)
    }

    /// Polynomial with `x_v -> -x_v` for each listed variable.
    pub fn flip_signs(&self, vars: &[usize]) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let odd = vars.iter().map(|&v| m.exp(v)).sum::<u32>() % 2 == 1;
            (*m, if odd { -c.clone() } else { c.clone() })
        });
        Self::from_terms(self.nvars, self.basis, terms)
    }

    pub fn term_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let (num, den) = c.num_den();
                TermRecord { exps: m.exps(self.nvars), num, den }
            })
            .collect()
    }
}

fn monomial_image<C: Scalar>(m: Monomial, images: &[Polynomial<C>], memo: &mut FxHashMap<Monomial, Polynomial<C>>) -> Polynomial<C> {
    if let Some(p) = memo.get(&m) {
        return p.clone();
    }
    let v = m.first_var().expect("constant monomial is memoized");
    let rest = monomial_image(m.div_var(v), images, memo);
    let img = &rest * &images[v];
    memo.insert(m, img.clone());
    img
}

impl<C: Scalar> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out.add_scaled(rhs, &C::one());
        out
    }
}

impl<C: Scalar> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out.add_scaled(rhs, &(-C::one()));
        out
    }
}

impl<C: Scalar> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&(-C::one()))
    }
}

impl<C: Scalar> AddAssign<&Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &Polynomial<C>) {
        self.add_scaled(rhs, &C::one());
    }
}

impl<C: Scalar> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.check_compatible(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.nvars, self.basis);
        }
        if self.terms.len() == 1 || rhs.terms.len() == 1 {
            // Single-term factor keeps the order; no hashing needed.
            let (single, other) = if self.terms.len() == 1 { (self, rhs) } else { (rhs, self) };
            let (m0, c0) = &single.terms[0];
            return Polynomial {
                nvars: self.nvars,
                basis: self.basis,
                terms: other.terms.iter().map(|(m, c)| (*m0 * *m, c0.clone() * c.clone())).collect(),
            };
        }
        let mut map: FxHashMap<Monomial, C> = FxHashMap::default();
        map.reserve(self.terms.len() * rhs.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let prod = ca.clone() * cb.clone();
                match map.entry(*ma * *mb) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &prod,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        Polynomial::from_map(self.nvars, self.basis, map)
    }
}

impl<C: Scalar> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let prefix = self.basis.var_prefix();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for v in 0..self.nvars {
                match m.exp(v) {
                    0 => {}
                    1 => factors.push(format!("{prefix}{}", v + 1)),
                    e => factors.push(format!("{prefix}{}^{e}", v + 1)),
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

pub type QPoly = Polynomial<BigRational>;
pub type ZPoly = Polynomial<BigInt>;

pub fn to_rational(p: &ZPoly) -> QPoly {
    p.map_coeffs(|c| BigRational::from_integer(c.clone()))
}

/// All exponent vectors of total degree `d` in `n` variables, in monomial order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    monomials: Vec<Monomial>,
    index: FxHashMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        let mut monomials = Vec::new();
        let mut cur = vec![0u32; nvars];
        // Recursion order (first exponent outermost, ascending) is already grlex.
        compositions(degree as u32, 0, &mut cur, &mut |e| monomials.push(Monomial::from_exps(e)));
        debug_assert!(monomials.windows(2).all(|w| w[0] < w[1]));
        let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        MonomialBasis { nvars, degree, monomials, index }
    }

    /// Process-wide cached instance.
    pub fn shared(nvars: usize, degree: usize) -> Arc<MonomialBasis> {
        static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().expect("basis cache poisoned").get(&(nvars, degree)) {
            return b.clone();
        }
        let b = Arc::new(MonomialBasis::new(nvars, degree));
        cache.write().expect("basis cache poisoned").entry((nvars, degree)).or_insert(b).clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn to_dense<C: Scalar>(&self, p: &Polynomial<C>) -> Result<Vec<C>> {
        let mut out = vec![C::zero(); self.len()];
        for (m, c) in p.terms() {
            let i = self
                .index_of(m)
                .ok_or_else(|| Error::Precondition(format!("polynomial is not homogeneous of degree {}", self.degree)))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn to_poly<C: Scalar>(&self, dense: &[C], basis: Basis) -> Polynomial<C> {
        Polynomial::from_terms(self.nvars, basis, self.monomials.iter().copied().zip(dense.iter().cloned()))
    }
}

impl PartialEq for MonomialBasis {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.degree == other.degree
    }
}

impl Eq for MonomialBasis {}

fn compositions(rest: u32, v: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    let n = cur.len();
    if n == 0 {
        if rest == 0 {
            f(cur);
        }
        return;
    }
    if v == n - 1 {
        cur[v] = rest;
        f(cur);
        cur[v] = 0;
        return;
    }
    for e in 0..=rest {
        cur[v] = e;
        compositions(rest - e, v + 1, cur, f);
    }
    cur[v] = 0;
}

/// `q_{2i} = e_1^{2i} + ... + e_n^{2i}`.
pub fn q(n: usize, i: usize) -> Result<QPoly> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    Ok(power_sum_of_squares(n, i))
}

fn power_sum_of_squares(n: usize, i: usize) -> QPoly {
    QPoly::from_terms(
        n,
        Basis::E,
        (0..n).map(|v| {
            let mut e = vec![0u32; n];
            e[v] = 2 * i as u32;
            (Monomial::from_exps(&e), BigRational::one())
        }),
    )
}

/// `q'_n = e_1 ... e_n`, type D only.
pub fn q_prime(g: &GroupType) -> Result<QPoly> {
    if g.family() != Family::D {
        return Err(Error::FamilyMismatch { expected: Family::D });
    }
    let n = g.rank();
    Ok(QPoly::from_terms(n, Basis::E, [(Monomial::from_exps(&vec![1u32; n]), BigRational::one())]))
}

/// Elementary symmetric polynomial of degree `i` in `e_1^2, ..., e_n^2`;
/// `p_0 = 1` and `p_i = 0` for `i > n`.
pub fn p_elem(n: usize, i: usize) -> QPoly {
    let mut terms = Vec::new();
    let mut chosen = Vec::new();
    subsets(n, i, 0, &mut chosen, &mut |s| {
        let mut e = vec![0u32; n];
        for &v in s {
            e[v] = 2;
        }
        terms.push((Monomial::from_exps(&e), BigRational::one()));
    });
    QPoly::from_terms(n, Basis::E, terms)
}

pub(crate) fn subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for v in start..n {
        if n - v < k - chosen.len() {
            break;
        }
        chosen.push(v);
        subsets(n, k, v + 1, chosen, f);
        chosen.pop();
    }
}

/// Index convention used in the Newton sum `sum_j (-1)^{j-1} p_? q_{2j}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NewtonIndex {
    /// `p_{i-j}`
    Classical,
    /// `p_{i-1-j}`
    Shifted,
}

/// Right side `i p_i - sum_{j=1}^{i-1} (-1)^{j-1} p_{idx} q_{2j}` minus the
/// left side `(-1)^{i-1} q_{2i}`.
pub fn newton_difference(n: usize, i: usize, index: NewtonIndex) -> QPoly {
    let lhs = power_sum_of_squares(n, i).scale(&BigRational::from_integer(if i % 2 == 1 { 1.into() } else { (-1).into() }));
    let mut rhs = p_elem(n, i).scale(&BigRational::from_integer(BigInt::from(i)));
    for j in 1..i {
        let idx = match index {
            NewtonIndex::Classical => i - j,
            NewtonIndex::Shifted => i - 1 - j,
        };
        let term = &p_elem(n, idx) * &power_sum_of_squares(n, j);
        let sign = if j % 2 == 1 { -1 } else { 1 };
        rhs.add_scaled(&term, &BigRational::from_integer(BigInt::from(sign)));
    }
    &rhs - &lhs
}

/// Checks Newton's identity for power sums of `e_j^2` under both index
/// conventions; passes when the classical form holds.
pub fn newton_verify(n: usize, i: usize) -> Result<VerificationReport> {
    if i == 0 || i > n || n > MAX_VARS {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let start = std::time::Instant::now();
    let classical = newton_difference(n, i, NewtonIndex::Classical);
    let shifted = newton_difference(n, i, NewtonIndex::Shifted);
    let status = Status::from_bool(classical.is_zero());
    let mut report = VerificationReport::new("polyring.newton", status, &classical)
        .param("n", n)
        .param("i", i)
        .param("classical_holds", classical.is_zero())
        .param("shifted_holds", shifted.is_zero());
    report.note(format!(
        "classical index p_(i-j): {}; printed index p_(i-1-j): {}",
        if classical.is_zero() { "holds" } else { "fails" },
        if shifted.is_zero() { "holds" } else { "fails" }
    ));
    if !shifted.is_zero() {
        report.note(format!("printed-index witness: {shifted}"));
    }
    Ok(report.timed(start))
}
