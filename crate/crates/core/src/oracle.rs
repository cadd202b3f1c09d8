//! Brute-force exponent `tau_i`: the least `N` with
//! `N * (I_CH^W)^(i)` inside `phi^(i)(I_K^W)`, both as Z-submodules of
//! `S^i` written over the omega-monomial basis.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupring::{augmented_rho, dominant_weights, e_to_omega, phi_omega_dense, GroupRingElement};
use crate::lattice::{Family, GroupType, Weight};
use crate::matrix::{integer_kernel, module_exponent, Exponent, IntMatrix, Lattice};
use crate::poly::{q, Basis, Monomial, MonomialBasis, ZPoly};

/// A Z-submodule of `S^degree` in omega-monomial coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasis {
    pub degree: usize,
    pub ambient: Arc<MonomialBasis>,
    pub lattice: Lattice<BigInt>,
}

impl ModuleBasis {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn contains_poly(&self, p: &ZPoly) -> Result<bool> {
        Ok(self.lattice.contains(&self.ambient.to_dense(p)?))
    }
}

/// Matrix of a linear substitution of omega-variables on `S^j`; column `c`
/// is the image of the `c`-th monomial.
fn induced_matrix(basis: &MonomialBasis, forms: &[ZPoly]) -> Result<IntMatrix<BigInt>> {
    let n = basis.nvars();
    let mut m = IntMatrix::zeros(basis.len(), basis.len());
    for (c, mono) in basis.monomials().iter().enumerate() {
        let x = ZPoly::from_terms(n, Basis::Omega, [(*mono, BigInt::from(1))]);
        let image = basis.to_dense(&x.substitute(forms))?;
        for (r, v) in image.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

fn reflection_forms(g: &GroupType) -> Vec<Vec<ZPoly>> {
    g.simple_reflection_matrices()
        .iter()
        .map(|s| {
            (0..g.rank())
                .map(|l| ZPoly::linear(Basis::Omega, &(0..g.rank()).map(|i| BigInt::from(s[(i, l)])).collect::<Vec<_>>()))
                .collect()
        })
        .collect()
}

/// Z-basis of the degree-`j` Weyl invariants: the kernel of the stacked `R_s - I`.
pub fn invariant_module(g: &GroupType, j: usize) -> Result<ModuleBasis> {
    if j == 0 {
        return Err(Error::Precondition("invariant degree must be positive".into()));
    }
    let ambient = MonomialBasis::shared(g.rank(), j);
    let d = ambient.len();
    let mut stacked = Vec::with_capacity(g.rank() * d);
    for forms in reflection_forms(g) {
        let r = induced_matrix(&ambient, &forms)?;
        for i in 0..d {
            let mut row = r.row(i).to_vec();
            row[i] -= 1;
            stacked.push(row);
        }
    }
    let kernel = integer_kernel(&IntMatrix::from_rows(stacked)?);
    Ok(ModuleBasis { degree: j, ambient: ambient.clone(), lattice: Lattice::from_generators(d, kernel)? })
}

/// Multiply a dense degree-`j` vector by an omega-monomial, landing in `target`.
fn shift_dense(src: &MonomialBasis, v: &[BigInt], m: Monomial, target: &MonomialBasis) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); target.len()];
    for (idx, c) in v.iter().enumerate() {
        if c.sign() != num_bigint::Sign::NoSign {
            let t = target.index_of(&(src.monomials()[idx] * m)).expect("degree matches");
            out[t] += c;
        }
    }
    out
}

/// `(I_CH^W)^(i)`: span of `m * f` for invariants `f` of degree `1..=i`.
pub fn ich_w_module(g: &GroupType, i: usize) -> Result<ModuleBasis> {
    if i < 1 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let n = g.rank();
    let ambient = MonomialBasis::shared(n, i);
    let mut lattice = Lattice::zero(ambient.len());
    for j in 1..=i {
        let inv = invariant_module(g, j)?;
        let cofactors = MonomialBasis::shared(n, i - j);
        let gens: Vec<Vec<BigInt>> = inv
            .lattice
            .basis()
            .iter()
            .flat_map(|f| cofactors.monomials().iter().map(|m| shift_dense(&inv.ambient, f, *m, &ambient)).collect::<Vec<_>>())
            .collect();
        lattice.extend(gens)?;
    }
    Ok(ModuleBasis { degree: i, ambient, lattice })
}

/// Grid for the ideal image: multipliers `e^mu` with `|mu_j| <= box_bound`,
/// generators `rho(lambda) - |W lambda|` with `lambda` dominant of level at most `level_bound`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub box_bound: usize,
    pub level_bound: usize,
}

impl Grid {
    pub fn new(box_bound: usize, level_bound: usize) -> Self {
        Grid { box_bound, level_bound }
    }

    /// Default schedule: both bounds run from `i` to `i + 3`.
    pub fn default_schedule(i: usize) -> Vec<Grid> {
        (0..4).map(|s| Grid::new(i + s, i + s)).collect()
    }
}

/// Span of truncated graded tuples, kept as one lattice per component layout.
fn concat_dense(parts: &[Vec<BigInt>]) -> Vec<BigInt> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn split_dense(v: &[BigInt], lens: &[usize]) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(lens.len());
    let mut at = 0;
    for &l in lens {
        out.push(v[at..at + l].to_vec());
        at += l;
    }
    out
}

/// Span of `(phi^(0)(e^mu), ..., phi^(i-1)(e^mu))` over the box.
///
/// The `r`-th entry at monomial `beta` is `prod_j C(mu_j + beta_j - 1, beta_j)`,
/// so the span is the truncated tensor product of the one-variable spans of
/// `(C(a + k - 1, k))_{k < i}`, `|a| <= box_bound`.
fn multiplier_span(n: usize, i: usize, box_bound: usize) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let b = box_bound as i64;
    let series: Vec<Vec<BigInt>> =
        (-b..=b).map(|a| (0..i).map(|k| crate::arith::multichoose(a, k)).collect()).collect();
    let one_var = Lattice::from_generators(i, series)?;
    let lens: Vec<usize> = (0..i).map(|r| MonomialBasis::shared(n, r).len()).collect();
    // Pure tensors of basis vectors, one per variable, truncated to degree < i.
    let mut out = Vec::new();
    let rows = one_var.basis();
    let mut choice = vec![0usize; n];
    loop {
        let mut parts = Vec::with_capacity(i);
        for r in 0..i {
            let basis = MonomialBasis::shared(n, r);
            let v: Vec<BigInt> = basis
                .monomials()
                .iter()
                .map(|m| (0..n).fold(BigInt::from(1), |acc, j| acc * &rows[choice[j]][m.exp(j) as usize]))
                .collect();
            parts.push(v);
        }
        out.push(parts);
        let mut j = 0;
        loop {
            if j == n {
                let lat = Lattice::from_generators(lens.iter().sum(), out.iter().map(|p| concat_dense(p)))?;
                return Ok(lat.basis().iter().map(|v| split_dense(v, &lens)).collect());
            }
            choice[j] += 1;
            if choice[j] < rows.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// Graded tuples `(phi^(1)(x), ..., phi^(i)(x))` of generators `x`.
fn generator_tuples(gens: &[GroupRingElement], i: usize) -> Vec<Vec<Vec<BigInt>>> {
    gens.par_iter().map(|x| (1..=i).map(|d| phi_omega_dense(x, d)).collect()).collect()
}

fn graded_lens(n: usize, degrees: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    degrees.map(|d| MonomialBasis::shared(n, d).len()).collect()
}

fn dense_mul(n: usize, a: &[BigInt], da: usize, b: &[BigInt], db: usize, out: &mut [BigInt]) {
    let ba = MonomialBasis::shared(n, da);
    let bb = MonomialBasis::shared(n, db);
    let target = MonomialBasis::shared(n, da + db);
    for (ia, ca) in a.iter().enumerate() {
        if ca.sign() == num_bigint::Sign::NoSign {
            continue;
        }
        for (ib, cb) in b.iter().enumerate() {
            if cb.sign() == num_bigint::Sign::NoSign {
                continue;
            }
            let t = target.index_of(&(ba.monomials()[ia] * bb.monomials()[ib])).expect("degree matches");
            out[t] += ca * cb;
        }
    }
}

/// Incrementally grown `phi^(i)(I_K^W)` for one group and degree.
struct IdealImage {
    g: GroupType,
    i: usize,
    level: usize,
    box_bound: usize,
    generators: Lattice<BigInt>,
    multipliers: Vec<Vec<Vec<BigInt>>>,
}

impl IdealImage {
    fn new(g: &GroupType, i: usize) -> Self {
        let n = g.rank();
        let total: usize = graded_lens(n, 1..=i).iter().sum();
        IdealImage { g: *g, i, level: 0, box_bound: 0, generators: Lattice::zero(total), multipliers: Vec::new() }
    }

    fn grow(&mut self, grid: Grid) -> Result<()> {
        let n = self.g.rank();
        if grid.level_bound > self.level {
            let fresh: Vec<Weight> =
                dominant_weights(&self.g, grid.level_bound).into_iter().filter(|w| w.level() as usize > self.level).collect();
            let gens = fresh.iter().map(|w| augmented_rho(&self.g, w)).collect::<Result<Vec<_>>>()?;
            self.generators.extend(generator_tuples(&gens, self.i).iter().map(|t| concat_dense(t)))?;
            self.level = grid.level_bound;
        }
        if grid.box_bound > self.box_bound || self.multipliers.is_empty() {
            self.multipliers = multiplier_span(n, self.i, grid.box_bound)?;
            self.box_bound = grid.box_bound;
        }
        Ok(())
    }

    /// `span { sum_r v_r u_{i-r} }` over the two bases.
    fn module(&self) -> Result<ModuleBasis> {
        let n = self.g.rank();
        let i = self.i;
        let ambient = MonomialBasis::shared(n, i);
        let lens = graded_lens(n, 1..=i);
        let width = ambient.len();
        let us: Vec<Vec<Vec<BigInt>>> = self.generators.basis().iter().map(|u| split_dense(u, &lens)).collect();
        let vectors: Vec<Vec<BigInt>> = self
            .multipliers
            .par_iter()
            .flat_map_iter(|v| {
                us.iter().map(move |u| {
                    let mut out = vec![BigInt::from(0); width];
                    for r in 0..i {
                        // v_r has degree r, u_{i-r} sits at index i-r-1.
                        dense_mul(n, &v[r], r, &u[i - r - 1], i - r, &mut out);
                    }
                    out
                })
            })
            .collect();
        Ok(ModuleBasis { degree: i, ambient: ambient.clone(), lattice: Lattice::from_generators(ambient.len(), vectors)? })
    }
}

/// `phi^(i)(I_K^W)` for one grid, computed from scratch.
pub fn phi_ikw_module(g: &GroupType, i: usize, grid: Grid) -> Result<ModuleBasis> {
    if i < 2 {
        return Err(Error::Precondition("the ideal image is computed for i >= 2".into()));
    }
    let mut image = IdealImage::new(g, i);
    image.grow(grid)?;
    image.module()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridStep {
    pub grid: Grid,
    pub ich_rank: usize,
    pub phi_rank: usize,
    pub phi_changed: bool,
    pub tau: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauResult {
    pub family: Family,
    pub n: usize,
    pub i: usize,
    /// Decimal exponent, `"infinite"`, or `"not stabilized"`.
    pub tau: String,
    pub divisors: Vec<String>,
    pub grid: Vec<GridStep>,
    pub stabilized: bool,
    /// `tau * g` lies in the ideal image for every invariant-ideal basis vector.
    pub membership_verified: bool,
    /// `tau | 2`, when the run stabilized with a finite exponent.
    pub divides_two: Option<bool>,
    pub millis: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TauResult {
    pub fn tau_value(&self) -> Option<BigInt> {
        self.tau.parse().ok()
    }
}

/// Rank range for the divisibility statement: `n >= floor(i/2) + 1` (B),
/// `floor(i/2) + 2` (D).
pub fn in_divisibility_range(g: &GroupType, i: usize) -> bool {
    let extra = match g.family() {
        Family::B => 1,
        Family::D => 2,
    };
    i >= 3 && g.rank() >= i / 2 + extra
}

/// Runs the schedule until the ideal image is unchanged for two consecutive
/// enlargements (the invariant side does not depend on the grid).
pub fn tau(g: &GroupType, i: usize, schedule: &[Grid]) -> Result<TauResult> {
    if i < 2 {
        return Err(Error::Precondition("tau_i is defined for i >= 2".into()));
    }
    let start = Instant::now();
    let ich = ich_w_module(g, i)?;
    let mut image = IdealImage::new(g, i);
    let mut steps: Vec<GridStep> = Vec::new();
    let mut prev: Option<ModuleBasis> = None;
    let mut unchanged = 0usize;
    let mut last = None;
    for grid in schedule {
        image.grow(*grid)?;
        let module = image.module()?;
        let changed = match &prev {
            Some(p) => {
                if !module.lattice.contains_lattice(&p.lattice) {
                    return Err(Error::Precondition(format!("ideal image shrank at grid {grid:?}")));
                }
                module.lattice != p.lattice
            }
            None => true,
        };
        let q = module_exponent(ich.lattice.basis(), module.lattice.basis())?;
        steps.push(GridStep {
            grid: *grid,
            ich_rank: ich.rank(),
            phi_rank: module.rank(),
            phi_changed: changed,
            tau: q.exponent.to_string(),
        });
        unchanged = if changed { 0 } else { unchanged + 1 };
        last = Some(q);
        prev = Some(module);
        if unchanged >= 2 {
            break;
        }
    }
    let stabilized = unchanged >= 2;
    let q = last.ok_or_else(|| Error::Precondition("empty grid schedule".into()))?;
    let module = prev.expect("at least one step");
    let mut notes = Vec::new();
    let (tau_str, membership, divides) = match (&q.exponent, stabilized) {
        (_, false) => ("not stabilized".to_string(), false, None),
        (Exponent::Infinite, true) => {
            notes.push("invariant ideal is not in the rational span of the image".into());
            ("infinite".to_string(), false, None)
        }
        (Exponent::Finite(t), true) => {
            let ok = ich.lattice.basis().iter().all(|b| {
                let scaled: Vec<BigInt> = b.iter().map(|x| x * t).collect();
                module.lattice.contains(&scaled)
            });
            (t.to_string(), ok, Some((BigInt::from(2) % t).sign() == num_bigint::Sign::NoSign))
        }
    };
    if i == 3 && stabilized && tau_str != "1" {
        notes.push(format!("reference value tau_3 = 1; oracle gives {tau_str}"));
    }
    if in_divisibility_range(g, i) && divides == Some(false) {
        notes.push(format!("tau_{i} = {tau_str} does not divide 2"));
    }
    Ok(TauResult {
        family: g.family(),
        n: g.rank(),
        i,
        tau: tau_str,
        divisors: q.divisors.iter().map(|d| d.to_string()).collect(),
        grid: steps,
        stabilized,
        membership_verified: membership,
        divides_two: divides,
        millis: Some(start.elapsed().as_millis() as u64),
        notes,
    })
}

/// `q_2` written over the omega-monomial basis.
pub fn q2_omega(g: &GroupType) -> Result<ZPoly> {
    let p = e_to_omega(g, &q(g.rank(), 1)?);
    Ok(ZPoly::from_terms(g.rank(), Basis::Omega, p.terms().iter().map(|(m, c)| (*m, c.to_integer()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::{rho, phi_omega};

    #[test]
    fn invariant_examples() {
        for g in [GroupType::b(3).unwrap(), GroupType::d(4).unwrap()] {
            assert_eq!(invariant_module(&g, 1).unwrap().rank(), 0);
            let inv2 = invariant_module(&g, 2).unwrap();
            assert_eq!(inv2.rank(), 1);
            assert!(inv2.contains_poly(&q2_omega(&g).unwrap()).unwrap());
        }
        let b3 = GroupType::b(3).unwrap();
        assert_eq!(invariant_module(&b3, 4).unwrap().rank(), 2);
        assert_eq!(invariant_module(&b3, 3).unwrap().rank(), 0);
        // D4 has q'_4 in degree 4: q_4, q_2^2, e_1 e_2 e_3 e_4.
        assert_eq!(invariant_module(&GroupType::d(4).unwrap(), 4).unwrap().rank(), 3);
    }

    #[test]
    fn invariants_are_fixed() {
        let g = GroupType::b(3).unwrap();
        let inv = invariant_module(&g, 4).unwrap();
        for forms in reflection_forms(&g) {
            for v in inv.lattice.basis() {
                let p = inv.ambient.to_poly(v, Basis::Omega);
                assert_eq!(p.substitute(&forms), p);
            }
        }
    }

    #[test]
    fn multiplier_span_is_full_for_large_box() {
        let spans = multiplier_span(3, 3, 2).unwrap();
        // 1 + 3 + 6 coordinates, unimodular span
        assert_eq!(spans.len(), 10);
    }

    /// Direct enumeration of `phi^(i)(e^mu (rho(lambda) - |W lambda|))`.
    fn brute_force_image(g: &GroupType, i: usize, box_bound: i64, level: usize) -> Lattice<BigInt> {
        let n = g.rank();
        let ambient = MonomialBasis::new(n, i);
        let mut gens = Vec::new();
        let side = (2 * box_bound + 1) as usize;
        let gens_x: Vec<GroupRingElement> = dominant_weights(g, level).iter().map(|w| augmented_rho(g, w).unwrap()).collect();
        for code in 0..side.pow(n as u32) {
            let mu: Vec<i64> = (0..n).map(|j| (code / side.pow(j as u32) % side) as i64 - box_bound).collect();
            let e_mu = GroupRingElement::monomial(g, Weight::new(mu), BigInt::from(1));
            for x in &gens_x {
                let prod = &e_mu * x;
                gens.push(ambient.to_dense(&phi_omega(&prod, i)).unwrap());
            }
        }
        Lattice::from_generators(ambient.len(), gens).unwrap()
    }

    #[test]
    fn factored_image_matches_enumeration() {
        let g = GroupType::b(3).unwrap();
        for i in [2, 3] {
            let fast = phi_ikw_module(&g, i, Grid::new(2, 2)).unwrap();
            assert_eq!(fast.lattice, brute_force_image(&g, i, 2, 2), "i={i}");
        }
    }

    #[test]
    fn fundamental_generators_in_ich_span_at_degree_two() {
        for g in [GroupType::b(3).unwrap(), GroupType::d(4).unwrap()] {
            let ich = ich_w_module(&g, 2).unwrap();
            for k in 1..=g.rank() {
                let x = rho(&g, &g.fundamental_weight(k).unwrap()).unwrap();
                let v = phi_omega_dense(&x, 2);
                let mut t = ich.lattice.clone();
                t.extend([v]).unwrap();
                assert_eq!(t.rank(), ich.rank());
            }
        }
    }

    #[test]
    fn tau2_small() {
        let g = GroupType::b(3).unwrap();
        let r = tau(&g, 2, &Grid::default_schedule(2)).unwrap();
        assert!(r.stabilized, "{r:?}");
        assert_eq!(r.tau, "2");
        assert!(r.membership_verified);
    }
}
