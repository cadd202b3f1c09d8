//! Dense integer matrices, Hermite and Smith normal forms, and Z-submodule
//! bookkeeping (span, membership, quotient exponents).

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::scalar::IntegerScalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntegerScalar> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: nrows, cols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| T::from_int(v)).collect()).collect();
        Self::from_rows(rows).expect("ragged literal matrix")
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.to_rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                    a[i][j] = v / prev.clone();
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

impl<T> Index<(usize, usize)> for IntMatrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for IntMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: IntegerScalar> Mul for &IntMatrix<T> {
    type Output = IntMatrix<T>;
    fn mul(self, rhs: &IntMatrix<T>) -> IntMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] += &prod;
                }
            }
        }
        out
    }
}

impl<T: fmt::Display> fmt::Display for IntMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|c| self.data[r * self.cols + c].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `(g, x, y)` with `x a + y b = g = gcd(a, b) >= 0`.
pub fn ext_gcd<T: IntegerScalar>(a: &T, b: &T) -> (T, T, T) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (T::one(), T::zero());
    let (mut t0, mut t1) = (T::zero(), T::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = r0 - q.clone() * r1.clone();
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = s0 - q.clone() * s1.clone();
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = t0 - q * t1.clone();
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn axpy<T: IntegerScalar>(target: &mut [T], q: &T, src: &[T]) {
    // target -= q * src
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            let prod = q.clone() * s.clone();
            *t -= &prod;
        }
    }
}

fn combine<T: IntegerScalar>(rows: &mut [Vec<T>], p: usize, r: usize, coeffs: [&T; 4]) {
    // (row_p, row_r) <- (x row_p + y row_r, u row_p + v row_r)
    let [x, y, u, v] = coeffs;
    let width = rows[p].len();
    for c in 0..width {
        let a = rows[p][c].clone();
        let b = rows[r][c].clone();
        if a.is_zero() && b.is_zero() {
            continue;
        }
        rows[p][c] = x.clone() * a.clone() + y.clone() * b.clone();
        rows[r][c] = u.clone() * a + v.clone() * b;
    }
}

/// Row-style Hermite normal form in place: nonzero rows first, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`. Returns the
/// pivot columns. The same row operations are replayed on `transform`.
fn hnf_rows<T: IntegerScalar>(rows: &mut [Vec<T>], mut transform: Option<&mut [Vec<T>]>) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut p = 0;
    for col in 0..ncols {
        if p == nrows {
            break;
        }
        let Some(first) = (p..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(p, first);
        if let Some(u) = transform.as_deref_mut() {
            u.swap(p, first);
        }
        for r in p + 1..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            let a = rows[p][col].clone();
            let b = rows[r][col].clone();
            if b.is_multiple_of(&a) {
                let q = b / a;
                let (head, tail) = rows.split_at_mut(r);
                axpy(&mut tail[0], &q, &head[p]);
                if let Some(u) = transform.as_deref_mut() {
                    let (uh, ut) = u.split_at_mut(r);
                    axpy(&mut ut[0], &q, &uh[p]);
                }
            } else {
                let (g, x, y) = ext_gcd(&a, &b);
                let u_coef = -(b / g.clone());
                let v_coef = a / g;
                combine(rows, p, r, [&x, &y, &u_coef, &v_coef]);
                if let Some(u) = transform.as_deref_mut() {
                    combine(u, p, r, [&x, &y, &u_coef, &v_coef]);
                }
            }
        }
        if rows[p][col].is_negative() {
            for v in rows[p].iter_mut() {
                *v = -v.clone();
            }
            if let Some(u) = transform.as_deref_mut() {
                for v in u[p].iter_mut() {
                    *v = -v.clone();
                }
            }
        }
        let pivot = rows[p][col].clone();
        for r in 0..p {
            let q = rows[r][col].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(p);
            axpy(&mut head[r], &q, &tail[0]);
            if let Some(u) = transform.as_deref_mut() {
                let (uh, ut) = u.split_at_mut(p);
                axpy(&mut uh[r], &q, &ut[0]);
            }
        }
        pivots.push(col);
        p += 1;
    }
    pivots
}

#[derive(Clone, Debug)]
pub struct Hnf<T> {
    pub h: IntMatrix<T>,
    pub u: IntMatrix<T>,
    pub pivots: Vec<usize>,
}

impl<T> Hnf<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Row Hermite normal form `H = U M` with `U` unimodular.
pub fn hnf<T: IntegerScalar>(m: &IntMatrix<T>) -> Hnf<T> {
    let mut rows = m.to_rows();
    let mut u = IntMatrix::<T>::identity(m.nrows()).to_rows();
    let pivots = hnf_rows(&mut rows, Some(&mut u));
    let h = if rows.is_empty() { IntMatrix::zeros(0, m.ncols()) } else { IntMatrix::from_rows(rows).unwrap() };
    Hnf { h, u: IntMatrix::from_rows(u).unwrap_or_else(|_| IntMatrix::zeros(0, 0)), pivots }
}

/// Elementary divisors `d_1 | d_2 | ... | d_r` (all positive, `r` = rank).
pub fn snf<T: IntegerScalar>(m: &IntMatrix<T>) -> Vec<T> {
    // Alternate row and column Hermite reductions until the matrix is
    // diagonal, then repair the divisibility chain with gcd/lcm swaps.
    let mut rows = m.to_rows();
    loop {
        let pivots = hnf_rows(&mut rows, None);
        let rank = pivots.len();
        rows.truncate(rank);
        let diagonal_shape = pivots.iter().enumerate().all(|(i, &c)| c == i)
            && rows.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| j == i || v.is_zero()));
        if diagonal_shape {
            break;
        }
        let width = rows.first().map_or(0, |r| r.len());
        rows = transpose_rows(&rows, width);
    }
    let mut diag: Vec<T> = rows.iter().enumerate().map(|(i, r)| r[i].abs()).collect();
    let r = diag.len();
    for i in 0..r {
        for j in i + 1..r {
            if !diag[j].is_multiple_of(&diag[i]) {
                let g = diag[i].gcd(&diag[j]);
                let l = diag[i].lcm(&diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    diag
}

fn transpose_rows<T: IntegerScalar>(rows: &[Vec<T>], width: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![T::zero(); rows.len()]; width];
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            out[j][i] = v.clone();
        }
    }
    out
}

/// Z-basis of `{x : A x = 0}`, saturated.
pub fn integer_kernel<T: IntegerScalar>(a: &IntMatrix<T>) -> Vec<Vec<T>> {
    let mut rows = a.transpose().to_rows();
    let mut u = IntMatrix::<T>::identity(a.ncols()).to_rows();
    let rank = hnf_rows(&mut rows, Some(&mut u)).len();
    u.split_off(rank)
}

/// A Z-submodule of `Z^dim`, stored as its row-HNF basis (canonical).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice<T> {
    dim: usize,
    basis: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: IntegerScalar> Lattice<T> {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_generators<I>(dim: usize, gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<T>>,
    {
        let mut lat = Self::zero(dim);
        lat.extend(gens)?;
        Ok(lat)
    }

    /// Add generators; processed in batches against the current basis.
    pub fn extend<I>(&mut self, gens: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<T>>,
    {
        const BATCH: usize = 256;
        let mut pending: Vec<Vec<T>> = Vec::new();
        for g in gens {
            if g.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: g.len() });
            }
            if g.iter().all(|v| v.is_zero()) {
                continue;
            }
            pending.push(g);
            if pending.len() >= BATCH {
                self.absorb(std::mem::take(&mut pending));
            }
        }
        if !pending.is_empty() {
            self.absorb(pending);
        }
        Ok(())
    }

    fn absorb(&mut self, mut gens: Vec<Vec<T>>) {
        gens.retain(|g| !self.contains(g));
        if gens.is_empty() {
            return;
        }
        let mut rows = std::mem::take(&mut self.basis);
        rows.extend(gens);
        let pivots = hnf_rows(&mut rows, None);
        rows.truncate(pivots.len());
        self.basis = rows;
        self.pivots = pivots;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Integer coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[T]) -> Option<Vec<T>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for (row, &col) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = rest[col].div_mod_floor(&row[col]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                axpy(&mut rest, &q, row);
            }
            coords.push(q);
        }
        rest.iter().all(|x| x.is_zero()).then_some(coords)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice<T>) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }
}

/// Exponent of a finite quotient, or `Infinite` when the quotient has
/// positive rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientExponent {
    pub exponent: Exponent,
    /// Nontrivial elementary divisors of `(span A + span M) / span M`.
    pub divisors: Vec<BigInt>,
    /// Prime decomposition of the exponent.
    pub primes: Vec<(BigInt, u32)>,
}

/// Smallest `N >= 1` with `N a` in `span_Z(M)` for every `a` in `A`.
pub fn module_exponent<T: IntegerScalar>(a: &[Vec<T>], m: &[Vec<T>]) -> Result<QuotientExponent> {
    let dim = a.first().or(m.first()).map_or(0, |v| v.len());
    let sub = Lattice::from_generators(dim, m.iter().cloned())?;
    let mut total = sub.clone();
    total.extend(a.iter().cloned())?;
    quotient_exponent(&total, &sub)
}

/// Exponent of `outer / inner`; `inner` must be contained in `outer`.
pub fn quotient_exponent<T: IntegerScalar>(outer: &Lattice<T>, inner: &Lattice<T>) -> Result<QuotientExponent> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch { expected: outer.dim, got: inner.dim });
    }
    if outer.rank() > inner.rank() {
        return Ok(QuotientExponent { exponent: Exponent::Infinite, divisors: Vec::new(), primes: Vec::new() });
    }
    if outer.rank() == 0 {
        return Ok(QuotientExponent { exponent: Exponent::Finite(BigInt::one()), divisors: Vec::new(), primes: Vec::new() });
    }
    let coords: Vec<Vec<T>> = inner
        .basis
        .iter()
        .map(|b| outer.coordinates(b).ok_or_else(|| Error::Precondition("inner lattice is not contained in outer".into())))
        .collect::<Result<_>>()?;
    let divisors: Vec<BigInt> = snf(&IntMatrix::from_rows(coords)?).iter().map(|d| d.to_bigint()).collect();
    // Prime by prime: the exponent's p-part is the largest p-power among the divisors.
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    for d in &divisors {
        for (p, e) in factorize(d) {
            match primes.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 = entry.1.max(e),
                None => primes.push((p, e)),
            }
        }
    }
    primes.sort();
    let exponent = primes.iter().fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e));
    Ok(QuotientExponent {
        exponent: Exponent::Finite(exponent),
        divisors: divisors.into_iter().filter(|d| !d.is_one()).collect(),
        primes,
    })
}

#[cfg(test)]
mod tests {
    use num_traits::{Signed, Zero};

    use super::*;

    type M = IntMatrix<BigInt>;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn is_echelon(h: &M, pivots: &[usize]) -> bool {
        for (i, &c) in pivots.iter().enumerate() {
            if h[(i, c)] <= BigInt::zero() {
                return false;
            }
            for r in 0..h.nrows() {
                if r > i && !h[(r, c)].is_zero() {
                    return false;
                }
                if r < i && (h[(r, c)] < BigInt::zero() || h[(r, c)] >= h[(i, c)]) {
                    return false;
                }
            }
            if (0..c).any(|cc| !h[(i, cc)].is_zero()) {
                return false;
            }
        }
        (pivots.len()..h.nrows()).all(|r| h.row(r).iter().all(|v| v.is_zero()))
    }

    #[test]
    fn hnf_small() {
        let m = M::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let res = hnf(&m);
        assert_eq!(&res.u * &m, res.h);
        assert_eq!(res.u.det().abs(), BigInt::one());
        assert!(is_echelon(&res.h, &res.pivots));
        let again = hnf(&res.h);
        assert_eq!(again.h, res.h);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&M::diagonal(&big(&[2, 3]))), big(&[1, 6]));
        assert_eq!(snf(&M::identity(3)), big(&[1, 1, 1]));
        assert_eq!(snf(&M::diagonal(&big(&[2, 4]))), big(&[2, 4]));
        assert_eq!(snf(&M::diagonal(&big(&[4, 6]))), big(&[2, 12]));
        let m = M::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(snf(&m), big(&[2, 6, 12]));
        assert_eq!(snf(&M::zeros(2, 3)), Vec::<BigInt>::new());
    }

    #[test]
    fn snf_brute_force_2x2() {
        // For 2x2 the divisors are gcd of entries and |det| / gcd.
        for a in -4i64..=4 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    for d in [-5i64, 0, 2, 7] {
                        let m = M::from_i64_rows(&[&[a, b], &[c, d]]);
                        let det = BigInt::from(a * d - b * c).abs();
                        let g = [a, b, c, d].iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
                        let got = snf(&m);
                        let expect = match (g, det.is_zero()) {
                            (0, _) => vec![],
                            (g, true) => big(&[g]),
                            (g, false) => vec![BigInt::from(g), det / BigInt::from(g)],
                        };
                        assert_eq!(got, expect, "{a} {b} {c} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_is_saturated() {
        let a = M::from_i64_rows(&[&[2, 4, 6]]);
        let ker = integer_kernel(&a);
        assert_eq!(ker.len(), 2);
        let lat = Lattice::from_generators(3, ker).unwrap();
        assert!(lat.contains(&big(&[2, -1, 0])));
        assert!(lat.contains(&big(&[3, 0, -1])));
        assert!(!lat.contains(&big(&[1, 0, 0])));
    }

    #[test]
    fn module_exponent_examples() {
        let e = module_exponent(&[big(&[1, 0])], &[big(&[2, 0]), big(&[0, 1])]).unwrap();
        assert_eq!(e.exponent, Exponent::Finite(BigInt::from(2)));
        let gens = vec![big(&[1, 2]), big(&[3, 5])];
        assert_eq!(module_exponent(&gens, &gens).unwrap().exponent, Exponent::Finite(BigInt::one()));
        let e = module_exponent(&[big(&[1, 1])], &[big(&[3, 0]), big(&[0, 3])]).unwrap();
        assert_eq!(e.exponent, Exponent::Finite(BigInt::from(3)));
        assert_eq!(e.divisors, big(&[3]));
        let e = module_exponent(&[big(&[0, 1])], &[big(&[1, 0])]).unwrap();
        assert_eq!(e.exponent, Exponent::Infinite);
        assert!(module_exponent(&[big(&[0, 1, 0])], &[big(&[1, 0])]).is_err());
    }

    #[test]
    fn module_exponent_brute_force() {
        // Enumerate N = 1, 2, 3 and test membership directly.
        let m = vec![big(&[3, 0]), big(&[0, 3])];
        let lat = Lattice::from_generators(2, m.clone()).unwrap();
        let a = big(&[1, 1]);
        let first = (1..=3i64)
            .find(|&n| lat.contains(&a.iter().map(|x| x * BigInt::from(n)).collect::<Vec<_>>()))
            .unwrap();
        assert_eq!(first, 3);
        assert_eq!(module_exponent(&[a], &m).unwrap().exponent, Exponent::Finite(BigInt::from(first)));
    }

    #[test]
    fn generic_over_machine_integers() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[4, 6], &[6, 9]]);
        assert_eq!(snf(&m), vec![1]);
        let r = hnf(&m);
        assert_eq!(&r.u * &m, r.h);
    }
}
