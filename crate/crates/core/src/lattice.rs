//! Weight lattices of `Spin(2n+1)` (family B) and `Spin(2n)` (family D).
//!
//! Weights are stored by their fundamental-weight coordinates `a_j` in
//! `lambda = sum a_j omega_j`. Coordinates in the standard basis `e_1..e_n`
//! have denominator at most 2, so internally they are carried doubled.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, pow2};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Largest rank accepted; monomials pack one byte per variable into 128 bits.
pub const MAX_RANK: usize = 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    B,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::B => "B",
            Family::D => "D",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "B" | "b" => Ok(Family::B),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Parse(format!("unknown family {other:?}, expected B or D"))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupType {
    family: Family,
    n: usize,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.n)
    }
}

/// Weight in fundamental-weight coordinates. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(omega: Vec<i64>) -> Self {
        Weight(omega)
    }

    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn omega(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// `lambda(0) = sum a_j`.
    pub fn level(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        assert_eq!(self.0.len(), rhs.0.len());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        assert_eq!(self.0.len(), rhs.0.len());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

/// JSON form `{"family":"B|D","n":int,"omega":[ints]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub family: Family,
    pub n: usize,
    pub omega: Vec<i64>,
}

impl GroupType {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let min = match family {
            Family::B => 3,
            Family::D => 4,
        };
        if n < min || n > MAX_RANK {
            return Err(Error::InvalidRank { family, n });
        }
        Ok(GroupType { family, n })
    }

    pub fn b(n: usize) -> Result<Self> {
        Self::new(Family::B, n)
    }

    pub fn d(n: usize) -> Result<Self> {
        Self::new(Family::D, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn weyl_order(&self) -> BigInt {
        let signs = match self.family {
            Family::B => pow2(self.n),
            Family::D => pow2(self.n - 1),
        };
        signs * factorial(self.n)
    }

    /// Largest `k` for which `W(omega_k)` consists of the vectors
    /// `±e_{i_1} ± ... ± e_{i_k}`.
    pub fn max_small_k(&self) -> usize {
        match self.family {
            Family::B => self.n - 1,
            Family::D => self.n - 2,
        }
    }

    pub fn record(&self, w: &Weight) -> WeightRecord {
        WeightRecord { family: self.family, n: self.n, omega: w.0.clone() }
    }

    pub fn from_record(rec: &WeightRecord) -> Result<(GroupType, Weight)> {
        let g = GroupType::new(rec.family, rec.n)?;
        g.check(&Weight(rec.omega.clone()))?;
        Ok((g, Weight(rec.omega.clone())))
    }

    pub fn check(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: w.rank() });
        }
        Ok(())
    }

    pub fn fundamental_weight(&self, k: usize) -> Result<Weight> {
        if k == 0 || k > self.n {
            return Err(Error::IndexOutOfRange { index: k, max: self.n });
        }
        let mut a = vec![0; self.n];
        a[k - 1] = 1;
        Ok(Weight(a))
    }

    /// Doubled e-coordinates `2 c_i` of `sum a_j omega_j`.
    pub fn twice_e_coords(&self, w: &Weight) -> Vec<i64> {
        let n = self.n;
        let a = &w.0;
        debug_assert_eq!(a.len(), n);
        let mut t = vec![0i64; n];
        match self.family {
            Family::B => {
                // omega_j = e_1 + ... + e_j (j < n), omega_n = (e_1 + ... + e_n)/2
                let mut suffix = a[n - 1];
                t[n - 1] = suffix;
                for i in (0..n - 1).rev() {
                    suffix += 2 * a[i];
                    t[i] = suffix;
                }
            }
            Family::D => {
                // omega_{n-1} = (e_1 + ... + e_{n-1} - e_n)/2, omega_n = (e_1 + ... + e_n)/2
                let spin = a[n - 2] + a[n - 1];
                t[n - 1] = a[n - 1] - a[n - 2];
                let mut suffix = spin;
                t[n - 2] = suffix;
                for i in (0..n - 2).rev() {
                    suffix += 2 * a[i];
                    t[i] = suffix;
                }
            }
        }
        t
    }

    pub fn to_e_coords(&self, w: &Weight) -> Vec<BigRational> {
        self.twice_e_coords(w)
            .into_iter()
            .map(|t| BigRational::new(BigInt::from(t), BigInt::from(2)))
            .collect()
    }

    pub fn from_twice_e_coords(&self, t: &[i64]) -> Result<Weight> {
        let n = self.n;
        if t.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.len() });
        }
        let half = |coord: usize, v: i64| -> Result<i64> {
            if v % 2 != 0 {
                Err(Error::NotInLattice { coord, value: format!("{v}/2") })
            } else {
                Ok(v / 2)
            }
        };
        let mut a = vec![0i64; n];
        match self.family {
            Family::B => {
                for i in 0..n - 1 {
                    a[i] = half(i + 1, t[i] - t[i + 1])?;
                }
                a[n - 1] = t[n - 1];
            }
            Family::D => {
                for i in 0..n - 2 {
                    a[i] = half(i + 1, t[i] - t[i + 1])?;
                }
                a[n - 2] = half(n - 1, t[n - 2] - t[n - 1])?;
                a[n - 1] = half(n, t[n - 2] + t[n - 1])?;
            }
        }
        Ok(Weight(a))
    }

    pub fn from_e_coords(&self, v: &[BigRational]) -> Result<Weight> {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut t = Vec::with_capacity(v.len());
        for (i, c) in v.iter().enumerate() {
            let d = c * &two;
            if !d.is_integer() {
                return Err(Error::NotInLattice { coord: i + 1, value: c.to_string() });
            }
            let d = d.to_integer();
            let d: i64 = d.try_into().map_err(|_| Error::NotInLattice { coord: i + 1, value: c.to_string() })?;
            t.push(d);
        }
        if t.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: t.len() });
        }
        self.from_twice_e_coords(&t)
    }

    /// Rows are the e-coordinates of `omega_1..omega_n`.
    pub fn fundamental_table(&self) -> Vec<Vec<BigRational>> {
        (1..=self.n).map(|k| self.to_e_coords(&self.fundamental_weight(k).unwrap())).collect()
    }

    /// Omega coordinates of the basis vector `e_i` (always integral).
    pub fn e_in_omega(&self, i: usize) -> Vec<i64> {
        let mut t = vec![0i64; self.n];
        t[i] = 2;
        self.from_twice_e_coords(&t).expect("e_i lies in the weight lattice").0
    }

    /// Applies the `s`-th simple reflection to doubled e-coordinates.
    pub fn reflect_twice_e(&self, s: usize, t: &mut [i64]) {
        let n = self.n;
        if s + 1 < n {
            t.swap(s, s + 1);
        } else {
            match self.family {
                Family::B => t[n - 1] = -t[n - 1],
                Family::D => {
                    let (x, y) = (t[n - 2], t[n - 1]);
                    t[n - 2] = -y;
                    t[n - 1] = -x;
                }
            }
        }
    }

    /// Simple reflections acting on omega coordinates: column `j` of the
    /// `s`-th matrix is `s(omega_j)`.
    pub fn simple_reflection_matrices(&self) -> Vec<IntMatrix<i64>> {
        let n = self.n;
        (0..n)
            .map(|s| {
                let mut m = IntMatrix::zeros(n, n);
                for j in 0..n {
                    let mut t = self.twice_e_coords(&self.fundamental_weight(j + 1).unwrap());
                    self.reflect_twice_e(s, &mut t);
                    let image = self.from_twice_e_coords(&t).expect("reflections preserve the lattice");
                    for (i, v) in image.0.iter().enumerate() {
                        m[(i, j)] = *v;
                    }
                }
                m
            })
            .collect()
    }
}

pub(crate) fn apply_matrix(m: &IntMatrix<i64>, a: &[i64]) -> Vec<i64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * a[j]).sum()).collect()
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

pub fn rational_vec(v: &[i64], den: i64) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::new(BigInt::from(x), BigInt::from(den))).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use num_traits::Zero;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn rank_ranges() {
        assert!(GroupType::b(2).is_err());
        assert!(GroupType::b(3).is_ok());
        assert!(GroupType::d(3).is_err());
        assert!(GroupType::d(4).is_ok());
        assert!(GroupType::b(17).is_err());
    }

    #[test]
    fn fundamental_weights_match_table() {
        let b3 = GroupType::b(3).unwrap();
        assert_eq!(b3.to_e_coords(&b3.fundamental_weight(3).unwrap()), rational_vec(&[1, 1, 1], 2));
        let d4 = GroupType::d(4).unwrap();
        assert_eq!(d4.to_e_coords(&d4.fundamental_weight(3).unwrap()), rational_vec(&[1, 1, 1, -1], 2));
        assert_eq!(d4.to_e_coords(&d4.fundamental_weight(4).unwrap()), rational_vec(&[1, 1, 1, 1], 2));
        let b5 = GroupType::b(5).unwrap();
        assert_eq!(b5.to_e_coords(&b5.fundamental_weight(1).unwrap()), rational_vec(&[1, 0, 0, 0, 0], 1));
        assert!(b5.fundamental_weight(0).is_err());
        assert!(b5.fundamental_weight(6).is_err());
        for k in 1..5 {
            let mut expect = vec![0; 5];
            expect[..k].fill(1);
            assert_eq!(b5.to_e_coords(&b5.fundamental_weight(k).unwrap()), rational_vec(&expect, 1));
        }
    }

    #[test]
    fn coordinate_examples() {
        let b3 = GroupType::b(3).unwrap();
        assert_eq!(b3.to_e_coords(&Weight::zero(3)), rational_vec(&[0, 0, 0], 1));
        assert_eq!(b3.to_e_coords(&Weight::new(vec![0, 1, 0])), rational_vec(&[1, 1, 0], 1));
        let d4 = GroupType::d(4).unwrap();
        assert_eq!(d4.to_e_coords(&Weight::new(vec![0, 0, 1, 1])), rational_vec(&[1, 1, 1, 0], 1));
    }

    #[test]
    fn from_e_coords_rejects_non_lattice() {
        let d4 = GroupType::d(4).unwrap();
        // Mixed integer / half-integer coordinates are not in the D lattice.
        let v = vec![half(), half(), BigRational::zero(), BigRational::zero()];
        assert!(matches!(d4.from_e_coords(&v), Err(Error::NotInLattice { .. })));
        let b3 = GroupType::b(3).unwrap();
        let v = vec![half(), BigRational::zero(), BigRational::zero()];
        assert!(matches!(b3.from_e_coords(&v), Err(Error::NotInLattice { coord: 1, .. })));
    }

    #[test]
    fn reflections_are_lattice_involutions() {
        for g in [GroupType::b(3), GroupType::b(4), GroupType::d(4), GroupType::d(5)] {
            let g = g.unwrap();
            let mats = g.simple_reflection_matrices();
            assert_eq!(mats.len(), g.rank());
            for m in &mats {
                assert_eq!(&(m * m), &IntMatrix::identity(g.rank()));
                assert_eq!(m.det().abs(), 1);
            }
        }
    }

    #[test]
    fn generated_group_orders() {
        for (fam, n) in [(Family::B, 3), (Family::B, 4), (Family::B, 5), (Family::D, 4), (Family::D, 5)] {
            let g = GroupType::new(fam, n).unwrap();
            let gens = g.simple_reflection_matrices();
            let mut seen: HashSet<IntMatrix<i64>> = HashSet::new();
            let id = IntMatrix::identity(n);
            let mut frontier = vec![id.clone()];
            seen.insert(id);
            while let Some(m) = frontier.pop() {
                for s in &gens {
                    let next = s * &m;
                    if seen.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
            assert_eq!(BigInt::from(seen.len()), g.weyl_order(), "{g}");
        }
    }

    fn any_group() -> impl Strategy<Value = GroupType> {
        prop_oneof![
            (3usize..=7).prop_map(|n| GroupType::b(n).unwrap()),
            (4usize..=7).prop_map(|n| GroupType::d(n).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_and_additivity(g in any_group(), a in prop::collection::vec(-6i64..=6, 7), b in prop::collection::vec(-6i64..=6, 7)) {
            let n = g.rank();
            let w1 = Weight::new(a[..n].to_vec());
            let w2 = Weight::new(b[..n].to_vec());
            let e1 = g.to_e_coords(&w1);
            prop_assert_eq!(g.from_e_coords(&e1).unwrap(), w1.clone());
            let sum = g.to_e_coords(&(&w1 + &w2));
            let e2 = g.to_e_coords(&w2);
            let expect: Vec<BigRational> = e1.iter().zip(&e2).map(|(x, y)| x + y).collect();
            prop_assert_eq!(sum, expect);
            let twice = g.twice_e_coords(&w1);
            if g.family() == Family::D {
                let parity = twice[0].rem_euclid(2);
                prop_assert!(twice.iter().all(|t| t.rem_euclid(2) == parity));
            }
        }
    }
}
