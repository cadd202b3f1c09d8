//! The group ring `Z[Lambda]`, orbit sums, augmentation and the truncated
//! characteristic map `phi^(i)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, partitions, pow2, Partition};
use crate::error::Result;
use crate::lattice::{Family, GroupType, Weight, WeightRecord};
use crate::poly::{to_rational, Basis, Monomial, MonomialBasis, QPoly, ZPoly};
use crate::weyl::orbit;

/// Finite integer combination of `e^lambda`; no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    group: GroupType,
    terms: BTreeMap<Weight, BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingTerm {
    pub weight: WeightRecord,
    pub coeff: String,
}

impl GroupRingElement {
    pub fn zero(g: &GroupType) -> Self {
        GroupRingElement { group: *g, terms: BTreeMap::new() }
    }

    pub fn one(g: &GroupType) -> Self {
        Self::monomial(g, Weight::zero(g.rank()), BigInt::one())
    }

    /// `c * e^w`.
    pub fn monomial(g: &GroupType, w: Weight, c: BigInt) -> Self {
        let mut x = Self::zero(g);
        x.add_term(w, c);
        x
    }

    pub fn from_terms<I: IntoIterator<Item = (Weight, BigInt)>>(g: &GroupType, terms: I) -> Self {
        let mut x = Self::zero(g);
        for (w, c) in terms {
            x.add_term(w, c);
        }
        x
    }

    pub fn add_term(&mut self, w: Weight, c: BigInt) {
        assert_eq!(w.rank(), self.group.rank(), "weight rank mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn group(&self) -> &GroupType {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Weight, BigInt> {
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

    pub fn coefficient(&self, w: &Weight) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(&self.group, self.terms.iter().map(|(w, v)| (w.clone(), v * c)))
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn records(&self) -> Vec<GroupRingTerm> {
        self.terms
            .iter()
            .map(|(w, c)| GroupRingTerm { weight: self.group.record(w), coeff: c.to_string() })
            .collect()
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.group, rhs.group);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.group, rhs.group);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.group, rhs.group);
        let mut out = GroupRingElement::zero(&self.group);
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u + v, a * b);
            }
        }
        out
    }
}

/// `rho(lambda)`: the sum of `e^mu` over the orbit of `lambda`.
pub fn rho(g: &GroupType, lambda: &Weight) -> Result<GroupRingElement> {
    let o = orbit(g, lambda)?;
    Ok(GroupRingElement::from_terms(g, o.weights().iter().map(|w| (w.clone(), BigInt::one()))))
}

pub fn rho_fundamental(g: &GroupType, k: usize) -> Result<GroupRingElement> {
    rho(g, &g.fundamental_weight(k)?)
}

/// `rho(lambda) - |W lambda| e^0`, which lies in the invariant augmentation ideal.
pub fn augmented_rho(g: &GroupType, lambda: &Weight) -> Result<GroupRingElement> {
    let r = rho(g, lambda)?;
    let aug = r.augmentation();
    Ok(&r - &GroupRingElement::one(g).scale(&aug))
}

/// Dominant weights `sum a_j omega_j` with `a_j >= 0`, `1 <= sum a_j <= max_level`.
pub fn dominant_weights(g: &GroupType, max_level: usize) -> Vec<Weight> {
    let n = g.rank();
    let mut out = Vec::new();
    for level in 1..=max_level {
        let basis = MonomialBasis::new(n, level);
        for m in basis.monomials() {
            out.push(Weight::new(m.exps(n).into_iter().map(i64::from).collect()));
        }
    }
    out
}

/// Generators `rho(lambda) - |W lambda|`: the fundamental ones, or with
/// `Some(level)` every dominant weight up to that level.
pub fn ikw_generators(g: &GroupType, grid: Option<usize>) -> Result<Vec<GroupRingElement>> {
    let weights = match grid {
        None => (1..=g.rank()).map(|k| g.fundamental_weight(k)).collect::<Result<Vec<_>>>()?,
        Some(level) => dominant_weights(g, level),
    };
    weights.iter().map(|w| augmented_rho(g, w)).collect()
}

/// Number of compositions of `r` into `parts` nonnegative parts.
fn composition_count(r: usize, parts: usize) -> usize {
    if parts == 0 {
        return usize::from(r == 0);
    }
    let mut c: u128 = 1;
    for k in 0..parts as u128 - 1 {
        c = c * (r as u128 + k + 1) / (k + 1);
    }
    c as usize
}

/// Coefficients of `(1 - x)^{-a}` up to `x^d`: `C(a+k-1, k)`.
fn series_i128(a: i64, d: usize) -> Option<Vec<i128>> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(1i128);
    for k in 1..=d {
        let prev = out[k - 1];
        let v = prev.checked_mul(a as i128 + k as i128 - 1)? / k as i128;
        out.push(v);
    }
    Some(out)
}

fn series_big(a: i64, d: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(BigInt::one());
    for k in 1..=d {
        let v = &out[k - 1] * BigInt::from(a + k as i64 - 1) / BigInt::from(k);
        out.push(v);
    }
    out
}

trait DenseCoeff: Clone {
    fn is_nil(&self) -> bool;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn add_to(&self, acc: &mut Self) -> Option<()>;
}

impl DenseCoeff for i128 {
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn add_to(&self, acc: &mut Self) -> Option<()> {
        *acc = acc.checked_add(*self)?;
        Some(())
    }
}

impl DenseCoeff for BigInt {
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn add_to(&self, acc: &mut Self) -> Option<()> {
        *acc += self;
        Some(())
    }
}

/// Adds `c * [degree-d part of prod_j (1 - w_j)^{-a_j}]` to `out`, indexed
/// like `MonomialBasis::new(n, d)`.
fn accumulate_weight<T: DenseCoeff>(series: &[Vec<T>], d: usize, c: &T, out: &mut [T]) -> Option<()> {
    fn rec<T: DenseCoeff>(series: &[Vec<T>], v: usize, rest: usize, prod: &T, idx: &mut usize, out: &mut [T]) -> Option<()> {
        let n = series.len();
        if v + 1 == n {
            let s = &series[v][rest];
            if !s.is_nil() {
                prod.mul(s)?.add_to(&mut out[*idx])?;
            }
            *idx += 1;
            return Some(());
        }
        for b in 0..=rest {
            let s = &series[v][b];
            if s.is_nil() {
                *idx += composition_count(rest - b, n - v - 1);
                continue;
            }
            rec(series, v + 1, rest - b, &prod.mul(s)?, idx, out)?;
        }
        Some(())
    }
    if series.is_empty() {
        return Some(());
    }
    let mut idx = 0;
    rec(series, 0, d, c, &mut idx, out)
}

fn phi_dense_i128(x: &GroupRingElement, d: usize, len: usize) -> Option<Vec<i128>> {
    let mut out = vec![0i128; len];
    for (w, c) in x.terms() {
        let series = w.omega().iter().map(|&a| series_i128(a, d)).collect::<Option<Vec<_>>>()?;
        accumulate_weight(&series, d, &c.to_i128()?, &mut out)?;
    }
    Some(out)
}

fn phi_dense_big(x: &GroupRingElement, d: usize, len: usize) -> Vec<BigInt> {
    let mut out = vec![<BigInt as Zero>::zero(); len];
    for (w, c) in x.terms() {
        let series: Vec<_> = w.omega().iter().map(|&a| series_big(a, d)).collect();
        accumulate_weight(&series, d, c, &mut out).expect("big arithmetic is total");
    }
    out
}

/// `phi^(d)(x)` as a dense integer vector over `MonomialBasis::new(n, d)`
/// in omega-variables.
pub fn phi_omega_dense(x: &GroupRingElement, d: usize) -> Vec<BigInt> {
    let n = x.group().rank();
    let len = MonomialBasis::shared(n, d).len();
    match phi_dense_i128(x, d, len) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => phi_dense_big(x, d, len),
    }
}

/// `phi^(d)(x)` in omega-variables (integer coefficients).
pub fn phi_omega(x: &GroupRingElement, d: usize) -> ZPoly {
    let n = x.group().rank();
    let basis = MonomialBasis::shared(n, d);
    basis.to_poly(&phi_omega_dense(x, d), Basis::Omega)
}

/// `phi^(0..=d)(x)` summed, in omega-variables.
pub fn phi_truncated(x: &GroupRingElement, d: usize) -> ZPoly {
    let mut acc = ZPoly::zero(x.group().rank(), Basis::Omega);
    for k in 0..=d {
        acc += &phi_omega(x, k);
    }
    acc
}

/// `phi^(d)(x)` in e-variables.
pub fn phi(x: &GroupRingElement, d: usize) -> QPoly {
    omega_to_e(x.group(), &to_rational(&phi_omega(x, d)))
}

/// Doubled omega_j as an integer linear form in e-variables.
fn twice_omega_forms(g: &GroupType) -> Vec<ZPoly> {
    (1..=g.rank())
        .map(|k| {
            let t = g.twice_e_coords(&g.fundamental_weight(k).unwrap());
            ZPoly::linear(Basis::E, &t.into_iter().map(BigInt::from).collect::<Vec<_>>())
        })
        .collect()
}

type ImageCache = RwLock<FxHashMap<Monomial, Arc<ZPoly>>>;

fn image_cache(g: &GroupType) -> Arc<ImageCache> {
    static CACHES: OnceLock<RwLock<HashMap<(Family, usize), Arc<ImageCache>>>> = OnceLock::new();
    let caches = CACHES.get_or_init(Default::default);
    let key = (g.family(), g.rank());
    if let Some(c) = caches.read().expect("image cache poisoned").get(&key) {
        return c.clone();
    }
    caches.write().expect("image cache poisoned").entry(key).or_default().clone()
}

/// Image of `2^deg * m` (m an omega-monomial) in e-variables.
fn doubled_image(g: &GroupType, forms: &[ZPoly], cache: &ImageCache, m: Monomial) -> Arc<ZPoly> {
    if let Some(p) = cache.read().expect("image cache poisoned").get(&m) {
        return p.clone();
    }
    let img = match m.first_var() {
        None => ZPoly::one(g.rank(), Basis::E),
        Some(v) => &*doubled_image(g, forms, cache, m.div_var(v)) * &forms[v],
    };
    let img = Arc::new(img);
    cache.write().expect("image cache poisoned").insert(m, img.clone());
    img
}

/// Rewrite an omega-basis polynomial in e-variables.
pub fn omega_to_e(g: &GroupType, p: &QPoly) -> QPoly {
    assert_eq!(p.basis(), Basis::Omega, "expected an omega-basis polynomial");
    let forms = twice_omega_forms(g);
    let cache = image_cache(g);
    let mut out = QPoly::zero(g.rank(), Basis::E);
    // Group by denominators so the doubled images stay integral.
    let mut dens: BTreeMap<(usize, BigInt), ZPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let img = doubled_image(g, &forms, &cache, *m);
        let acc = dens.entry((m.degree(), c.denom().clone())).or_insert_with(|| ZPoly::zero(g.rank(), Basis::E));
        acc.add_scaled(&img, c.numer());
    }
    for ((deg, den), poly) in dens {
        let scale = BigRational::new(BigInt::one(), pow2(deg) * den);
        out.add_scaled(&to_rational(&poly), &scale);
    }
    out
}

/// Rewrite an e-basis polynomial in omega-variables (`e_i` is integral in omega).
pub fn e_to_omega(g: &GroupType, p: &QPoly) -> QPoly {
    assert_eq!(p.basis(), Basis::E, "expected an e-basis polynomial");
    let n = g.rank();
    let images: Vec<QPoly> = (0..n)
        .map(|i| {
            let c: Vec<BigRational> =
                g.e_in_omega(i).into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect();
            QPoly::linear(Basis::Omega, &c)
        })
        .collect();
    p.substitute(&images)
}

/// Coefficients `i!/z_mu` of `prod_m lambda(m)` in `i! phi^(i)(e^lambda)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionExpansion {
    pub i: usize,
    pub coefficients: Vec<(Partition, BigInt)>,
}

impl PartitionExpansion {
    pub fn coefficient(&self, parts: &[usize]) -> Option<&BigInt> {
        self.coefficients.iter().find(|(p, _)| p.parts() == parts).map(|(_, c)| c)
    }
}

pub fn partition_expansion(i: usize) -> PartitionExpansion {
    let fact = factorial(i);
    let coefficients = partitions(i).into_iter().map(|p| {
        let z = p.z();
        (p, &fact / z)
    });
    PartitionExpansion { i, coefficients: coefficients.collect() }
}

/// `lambda(m) = sum_j a_j omega_j^m` scaled by `2^m`, in e-variables.
fn doubled_lambda_m(forms: &[ZPoly], a: &[i64], m: usize) -> ZPoly {
    let mut acc = ZPoly::zero(forms[0].nvars(), Basis::E);
    for (j, &aj) in a.iter().enumerate() {
        if aj != 0 {
            acc.add_scaled(&forms[j].pow(m), &BigInt::from(aj));
        }
    }
    acc
}

/// `phi^(i)(e^lambda)` through the exponential formula
/// `prod (1 - w_j)^{-a_j} = exp(sum_m lambda(m)/m)`, computed directly in
/// e-variables.
pub fn phi_via_partitions(g: &GroupType, i: usize, lambda: &Weight) -> Result<QPoly> {
    g.check(lambda)?;
    let n = g.rank();
    if i == 0 {
        return Ok(QPoly::one(n, Basis::E));
    }
    let forms = twice_omega_forms(g);
    let lam: Vec<ZPoly> = (0..=i).map(|m| if m == 0 { ZPoly::zero(n, Basis::E) } else { doubled_lambda_m(&forms, lambda.omega(), m) }).collect();
    let mut total = ZPoly::zero(n, Basis::E);
    for (p, coeff) in partition_expansion(i).coefficients {
        let mut mult = vec![0usize; i + 1];
        for &m in p.parts() {
            mult[m] += 1;
        }
        let mut prod = ZPoly::one(n, Basis::E);
        for (m, &k) in mult.iter().enumerate() {
            if k > 0 {
                prod = &prod * &lam[m].pow(k);
            }
        }
        total.add_scaled(&prod, &coeff);
    }
    let scale = BigRational::new(BigInt::one(), factorial(i) * pow2(i));
    Ok(to_rational(&total).scale(&scale))
}

/// Sum of `phi^(degree)` images weighted by e-basis multipliers.
pub fn weighted_phi_omega(g: &GroupType, terms: &[(QPoly, usize, GroupRingElement)]) -> QPoly {
    let mut acc = QPoly::zero(g.rank(), Basis::Omega);
    for (mult, d, x) in terms {
        let image = to_rational(&phi_omega(x, *d));
        acc += &(&e_to_omega(g, mult) * &image);
    }
    acc
}
