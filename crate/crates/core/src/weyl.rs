//! Weyl groups as signed permutations, orbit enumeration and the half
//! orbits `W_+(omega_k)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply_matrix, Family, GroupType, Weight, WeightRecord};

/// Signed permutation acting on e-coordinates by
/// `(w c)_i = signs[i] * c[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl WeylElement {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: signs.len() });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation);
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidPermutation);
        }
        Ok(WeylElement { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        WeylElement { perm: (0..n).collect(), signs: vec![1; n] }
    }

    /// Flips the signs of the given (0-based) coordinates.
    pub fn sign_flip(n: usize, coords: &[usize]) -> Self {
        let mut signs = vec![1; n];
        for &c in coords {
            signs[c] = -signs[c];
        }
        WeylElement { perm: (0..n).collect(), signs }
    }

    pub fn negative_signs(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn act(&self, g: &GroupType, w: &Weight) -> Result<Weight> {
        g.check(w)?;
        if self.perm.len() != g.rank() {
            return Err(Error::DimensionMismatch { expected: g.rank(), got: self.perm.len() });
        }
        if g.family() == Family::D && self.negative_signs() % 2 == 1 {
            return Err(Error::ParityViolation);
        }
        let t = g.twice_e_coords(w);
        let image: Vec<i64> = (0..t.len()).map(|i| self.signs[i] as i64 * t[self.perm[i]]).collect();
        g.from_twice_e_coords(&image)
    }
}

/// Every element of `W` (only sensible for small rank).
pub fn all_elements(g: &GroupType) -> Vec<WeylElement> {
    let n = g.rank();
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect::<Vec<_>>(), 0, &mut perms);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if g.family() == Family::D && mask.count_ones() % 2 == 1 {
            continue;
        }
        let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        for p in &perms {
            out.push(WeylElement { perm: p.clone(), signs: signs.clone() });
        }
    }
    out
}

fn permutations(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Sorted, duplicate-free set of weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    weights: Vec<Weight>,
}

impl Orbit {
    pub fn from_weights(mut weights: Vec<Weight>) -> Self {
        weights.sort();
        weights.dedup();
        Orbit { weights }
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, w: &Weight) -> bool {
        self.weights.binary_search(w).is_ok()
    }

    pub fn negated(&self) -> Orbit {
        Orbit::from_weights(self.weights.iter().map(|w| -w).collect())
    }

    pub fn records(&self, g: &GroupType) -> Vec<WeightRecord> {
        self.weights.iter().map(|w| g.record(w)).collect()
    }
}

/// `W(lambda)` by breadth-first closure under the simple reflections.
pub fn orbit(g: &GroupType, lambda: &Weight) -> Result<Orbit> {
    g.check(lambda)?;
    let gens = g.simple_reflection_matrices();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(lambda.omega().to_vec());
    let mut frontier = vec![lambda.omega().to_vec()];
    while let Some(cur) = frontier.pop() {
        for s in &gens {
            let next = apply_matrix(s, &cur);
            if !seen.contains(&next) {
                seen.insert(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(Orbit::from_weights(seen.into_iter().map(Weight::new).collect()))
}

pub fn fundamental_orbit(g: &GroupType, k: usize) -> Result<Orbit> {
    orbit(g, &g.fundamental_weight(k)?)
}

/// `W_+(omega_k)`: orbit elements whose lowest-index nonzero e-coordinate
/// is positive. Defined for `k` up to `n-1` (B) / `n-2` (D), and for the two
/// spin weights of D when `n` is even.
pub fn half_orbit_plus(g: &GroupType, k: usize) -> Result<Orbit> {
    let n = g.rank();
    let defined = (1..=g.max_small_k()).contains(&k)
        || (g.family() == Family::D && n.is_multiple_of(2) && (k == n - 1 || k == n));
    if !defined {
        return Err(Error::UndefinedHalfOrbit { family: g.family(), n, k });
    }
    let full = fundamental_orbit(g, k)?;
    let plus = full
        .weights
        .iter()
        .filter(|w| g.twice_e_coords(w).into_iter().find(|&t| t != 0).is_some_and(|t| t > 0))
        .cloned()
        .collect();
    Ok(Orbit::from_weights(plus))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegationCheck {
    pub family: Family,
    pub n: usize,
    pub orbit_size: usize,
    pub holds: bool,
}

/// Checks `W(omega_n) = -W(omega_{n-1})` for type D with odd `n`.
pub fn orbit_negation_check(g: &GroupType) -> Result<NegationCheck> {
    let n = g.rank();
    if g.family() != Family::D {
        return Err(Error::FamilyMismatch { expected: Family::D });
    }
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("orbit negation check needs odd n, got {n}")));
    }
    let spin = fundamental_orbit(g, n)?;
    let cospin = fundamental_orbit(g, n - 1)?;
    Ok(NegationCheck { family: g.family(), n, orbit_size: spin.len(), holds: spin == cospin.negated() })
}
