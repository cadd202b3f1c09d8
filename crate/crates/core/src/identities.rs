//! Exact checks of the orbit-sum identities: vanishing of odd products,
//! the `Lambda(p,q)` decomposition, the degree-4/6 combinations, the type D
//! top-degree identity, the master combination and Newton certificates.
//!
//! Comparisons run in omega-variables, where every `phi` image is integral;
//! nonzero differences are rewritten in e-variables for the report.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial_i, factorial, pow2};
use crate::error::{Error, Result};
use crate::groupring::{augmented_rho, e_to_omega, omega_to_e, phi_omega, rho_fundamental, GroupRingElement};
use crate::lattice::{Family, GroupType, Weight};
use crate::poly::{p_elem, q, q_prime, to_rational, Basis, Monomial, QPoly, ZPoly};
use crate::report::{Status, VerificationReport};
use crate::weyl::fundamental_orbit;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Largest entry of a randomized M-tuple.
pub const MAX_M_ENTRY: usize = 3;

/// Random M-tuple of length `p` with entries in `0..=MAX_M_ENTRY`.
pub fn random_mtuple(rng: &mut ChaCha8Rng, p: usize) -> Vec<usize> {
    (0..p).map(|_| rng.gen_range(0..=MAX_M_ENTRY)).collect()
}

fn omega_zero(g: &GroupType) -> ZPoly {
    ZPoly::zero(g.rank(), Basis::Omega)
}

/// `lambda(m) = sum_j a_j omega_j^m` in omega-variables.
pub fn lambda_m(g: &GroupType, lambda: &Weight, m: usize) -> ZPoly {
    let n = g.rank();
    ZPoly::from_terms(
        n,
        Basis::Omega,
        lambda.omega().iter().enumerate().map(|(j, &a)| {
            let mut e = vec![0u32; n];
            e[j] = m as u32;
            (Monomial::from_exps(&e), BigInt::from(a))
        }),
    )
}

/// `sum_{lambda in weights} prod_t lambda(m_t)` in omega-variables.
///
/// Expands by slot assignments: each choice `(j_1..j_p)` contributes the
/// monomial `prod omega_{j_t}^{m_t}` times `sum_lambda prod a_{j_t}(lambda)`.
pub fn weights_product_sum(g: &GroupType, weights: &[Weight], ms: &[usize]) -> ZPoly {
    let n = g.rank();
    let cols: Vec<Vec<i128>> = (0..n).map(|j| weights.iter().map(|w| w.omega()[j] as i128).collect()).collect();
    let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
    let mut exps = vec![0u32; n];
    let start = vec![1i128; weights.len()];

    fn rec(
        t: usize,
        ms: &[usize],
        cols: &[Vec<i128>],
        prod: &[i128],
        exps: &mut [u32],
        acc: &mut FxHashMap<Monomial, i128>,
    ) {
        if t == ms.len() {
            let c = prod.iter().try_fold(0i128, |s, v| s.checked_add(*v)).expect("orbit moment overflow");
            if c != 0 {
                *acc.entry(Monomial::from_exps(exps)).or_insert(0) += c;
            }
            return;
        }
        for (j, col) in cols.iter().enumerate() {
            let next: Vec<i128> =
                prod.iter().zip(col).map(|(p, a)| p.checked_mul(*a).expect("orbit moment overflow")).collect();
            if next.iter().all(|v| *v == 0) {
                continue;
            }
            exps[j] += ms[t] as u32;
            rec(t + 1, ms, cols, &next, exps, acc);
            exps[j] -= ms[t] as u32;
        }
    }

    if !weights.is_empty() {
        rec(0, ms, &cols, &start, &mut exps, &mut acc);
    }
    ZPoly::from_terms(n, Basis::Omega, acc.into_iter().map(|(m, c)| (m, BigInt::from(c))))
}

/// `sum_{lambda in W(omega_k)} lambda(m_1) ... lambda(m_p)` in omega-variables.
pub fn lambda_orbit_sum_omega(g: &GroupType, k: usize, ms: &[usize]) -> Result<ZPoly> {
    let o = fundamental_orbit(g, k)?;
    Ok(weights_product_sum(g, o.weights(), ms))
}

/// Same sum in e-variables.
pub fn lambda_orbit_sum(g: &GroupType, k: usize, ms: &[usize]) -> Result<QPoly> {
    Ok(omega_to_e(g, &to_rational(&lambda_orbit_sum_omega(g, k, ms)?)))
}

/// `Lambda(p,q)(m_1..m_p)` over `W_+(omega_1) = {e_1..e_n}`: `q` distinct base
/// vectors, each used a positive even number of times across the `p` slots.
pub fn lambda_pq_omega(g: &GroupType, p: usize, q: usize, ms: &[usize]) -> Result<ZPoly> {
    if p % 2 == 1 {
        return Err(Error::Precondition(format!("Lambda(p,q) needs even p, got {p}")));
    }
    if q < 2 {
        return Err(Error::Precondition(format!("Lambda(p,q) needs q >= 2, got {q}")));
    }
    if ms.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: ms.len() });
    }
    let n = g.rank();
    if p < 2 * q || q > n {
        return Ok(omega_zero(g));
    }
    let basis: Vec<Weight> = (0..n).map(|i| Weight::new(g.e_in_omega(i))).collect();
    let mut factor_cache: FxHashMap<(usize, usize), ZPoly> = FxHashMap::default();
    let mut factor = |i: usize, m: usize| -> ZPoly {
        factor_cache.entry((i, m)).or_insert_with(|| lambda_m(g, &basis[i], m)).clone()
    };
    let mut total = omega_zero(g);
    let mut subset = Vec::new();
    let mut subsets = Vec::new();
    crate::poly::subsets(n, q, 0, &mut subset, &mut |s| subsets.push(s.to_vec()));
    for s in subsets {
        let mut assignment = vec![0usize; p];
        let mut assignments = Vec::new();
        enumerate_assignments(q, p, 0, &mut assignment, &mut assignments);
        for a in assignments {
            let mut prod = ZPoly::one(n, Basis::Omega);
            for (t, &slot) in a.iter().enumerate() {
                prod = &prod * &factor(s[slot], ms[t]);
            }
            total += &prod;
        }
    }
    Ok(total)
}

/// All maps `[p] -> [q]` hitting every value a positive even number of times.
fn enumerate_assignments(q: usize, p: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if t == p {
        let mut counts = vec![0usize; q];
        for &c in cur.iter() {
            counts[c] += 1;
        }
        if counts.iter().all(|&c| c > 0 && c % 2 == 0) {
            out.push(cur.clone());
        }
        return;
    }
    for v in 0..q {
        cur[t] = v;
        enumerate_assignments(q, p, t + 1, cur, out);
    }
}

pub fn lambda_pq(g: &GroupType, p: usize, q: usize, ms: &[usize]) -> Result<QPoly> {
    Ok(omega_to_e(g, &to_rational(&lambda_pq_omega(g, p, q, ms)?)))
}

/// Report whose witness is `diff` (omega-variables) rewritten in e-variables.
fn omega_report(g: &GroupType, id: &str, diff: &QPoly) -> VerificationReport {
    let witness = if diff.is_zero() { QPoly::zero(g.rank(), Basis::E) } else { omega_to_e(g, diff) };
    VerificationReport::from_witness(id, &witness).param("family", g.family()).param("n", g.rank())
}

fn zreport(g: &GroupType, id: &str, diff: &ZPoly) -> VerificationReport {
    omega_report(g, id, &to_rational(diff))
}

/// Which vanishing statement applies to `(G, k, p)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingClause {
    /// Small `k`, odd `p`: the orbit sum vanishes.
    OddVanishes,
    /// Type D, odd `n`, even `p`: the two spin orbits give equal sums.
    SpinEqualEven,
    /// Type D, odd `p < n`: both spin orbit sums vanish.
    SpinOddVanishes,
}

pub fn vanishing_clause(g: &GroupType, k: usize, p: usize) -> Option<VanishingClause> {
    let n = g.rank();
    if p == 0 {
        return None;
    }
    if (1..=g.max_small_k()).contains(&k) && p % 2 == 1 {
        return Some(VanishingClause::OddVanishes);
    }
    if g.family() == Family::D && (k == n - 1 || k == n) {
        if p % 2 == 1 && p < n {
            return Some(VanishingClause::SpinOddVanishes);
        }
        if p.is_multiple_of(2) && n % 2 == 1 {
            return Some(VanishingClause::SpinEqualEven);
        }
    }
    None
}

/// Randomized check of the clause governing `(G, k, p)`.
pub fn verify_vanishing(g: &GroupType, k: usize, p: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let clause = vanishing_clause(g, k, p)
        .ok_or_else(|| Error::Precondition(format!("no vanishing statement covers {g}, k={k}, p={p}")))?;
    let n = g.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::from_witness("identities.vanishing", &QPoly::zero(n, Basis::E))
        .param("family", g.family())
        .param("n", n)
        .param("k", k)
        .param("p", p)
        .param("clause", clause)
        .param("trials", trials)
        .with_seed(seed);
    let mut first_failure: Option<(Vec<usize>, ZPoly)> = None;
    for _ in 0..trials {
        let ms = random_mtuple(&mut rng, p);
        let diff = match clause {
            VanishingClause::OddVanishes => lambda_orbit_sum_omega(g, k, &ms)?,
            VanishingClause::SpinEqualEven => &lambda_orbit_sum_omega(g, n, &ms)? - &lambda_orbit_sum_omega(g, n - 1, &ms)?,
            VanishingClause::SpinOddVanishes => {
                let a = lambda_orbit_sum_omega(g, n, &ms)?;
                let b = lambda_orbit_sum_omega(g, n - 1, &ms)?;
                if a.is_zero() {
                    b
                } else {
                    a
                }
            }
        };
        if !diff.is_zero() && first_failure.is_none() {
            first_failure = Some((ms, diff));
        }
    }
    if let Some((ms, diff)) = first_failure {
        let failing = zreport(g, "identities.vanishing", &diff);
        report.status = Status::Fail;
        report.witness = failing.witness;
        report.note(format!("first failing M = {ms:?}"));
    }
    Ok(report.timed(start))
}

/// Right side of the orbit decomposition for `W(omega_k)`.
pub fn orbit_decomposition_rhs(g: &GroupType, k: usize, ms: &[usize]) -> Result<ZPoly> {
    let n = g.rank() as i64;
    let p = ms.len();
    let mut rhs = lambda_orbit_sum_omega(g, 1, ms)?.scale(&(pow2(k - 1) * binomial_i(n - 1, k - 1)));
    for j in 2..=k {
        let c = pow2(k) * binomial_i(n - j as i64, k - j);
        rhs.add_scaled(&lambda_pq_omega(g, p, j, ms)?, &c);
    }
    Ok(rhs)
}

pub fn verify_orbit_decomposition(g: &GroupType, k: usize, ms: &[usize]) -> Result<VerificationReport> {
    let start = Instant::now();
    let p = ms.len();
    if p % 2 == 1 || p == 0 {
        return Err(Error::Precondition(format!("orbit decomposition needs even p >= 2, got {p}")));
    }
    if !(1..=g.max_small_k()).contains(&k) {
        return Err(Error::IndexOutOfRange { index: k, max: g.max_small_k() });
    }
    let lhs = lambda_orbit_sum_omega(g, k, ms)?;
    let rhs = orbit_decomposition_rhs(g, k, ms)?;
    Ok(zreport(g, "identities.orbit_decomposition", &(&lhs - &rhs)).param("k", k).param("m", ms).timed(start))
}

/// Orbit decomposition on `trials` random M-tuples of length `p`.
pub fn verify_orbit_decomposition_random(g: &GroupType, k: usize, p: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::from_witness("identities.orbit_decomposition", &QPoly::zero(g.rank(), Basis::E))
        .param("family", g.family())
        .param("n", g.rank())
        .param("k", k)
        .param("p", p)
        .param("trials", trials)
        .with_seed(seed);
    for _ in 0..trials {
        let ms = random_mtuple(&mut rng, p);
        report.absorb(verify_orbit_decomposition(g, k, &ms)?);
    }
    Ok(report.timed(start))
}

/// `sum_k c_k phi^(degree)(rho(omega_k)) = target` (target in e-variables).
#[derive(Clone, Debug, PartialEq)]
pub struct Combination {
    pub id: String,
    pub degree: usize,
    /// `(coefficient, k)` pairs.
    pub terms: Vec<(BigInt, usize)>,
    pub target: QPoly,
}

impl Combination {
    pub fn left_omega(&self, g: &GroupType) -> Result<ZPoly> {
        let mut acc = omega_zero(g);
        for (c, k) in &self.terms {
            acc.add_scaled(&phi_omega(&rho_fundamental(g, *k)?, self.degree), c);
        }
        Ok(acc)
    }

    pub fn difference_omega(&self, g: &GroupType) -> Result<QPoly> {
        Ok(&to_rational(&self.left_omega(g)?) - &e_to_omega(g, &self.target))
    }

    pub fn verify(&self, g: &GroupType) -> Result<VerificationReport> {
        let start = Instant::now();
        let diff = self.difference_omega(g)?;
        let coeffs: Vec<(String, usize)> = self.terms.iter().map(|(c, k)| (c.to_string(), *k)).collect();
        Ok(omega_report(g, &self.id, &diff).param("degree", self.degree).param("terms", coeffs).timed(start))
    }

    /// Group-ring element whose `phi^(degree)` is the left side, shifted into
    /// the augmentation ideal.
    pub fn element(&self, g: &GroupType) -> Result<GroupRingElement> {
        let mut acc = GroupRingElement::zero(g);
        for (c, k) in &self.terms {
            acc = &acc + &augmented_rho(g, &g.fundamental_weight(*k)?)?.scale(c);
        }
        Ok(acc)
    }
}

fn require_small(g: &GroupType, k: usize, what: &str) -> Result<()> {
    if k > g.max_small_k() {
        return Err(Error::Precondition(format!("{what} needs omega_{k} below the spin weights of {g}")));
    }
    Ok(())
}

/// `phi^(4)(rho(omega_2)) - 2(n-1) phi^(4)(rho(omega_1)) = sum_{i<j} e_i^2 e_j^2`.
pub fn combination_deg4(g: &GroupType) -> Result<Combination> {
    require_small(g, 2, "the degree-4 identity")?;
    let n = g.rank() as i64;
    Ok(Combination {
        id: "identities.deg4".into(),
        degree: 4,
        terms: vec![(BigInt::one(), 2), (BigInt::from(-2 * (n - 1)), 1)],
        target: p_elem(g.rank(), 2),
    })
}

/// Degree-6 analogue with coefficients `1, -2(n-2), 2(n-1)(n-2)` on omega_3, omega_2, omega_1.
pub fn combination_deg6(g: &GroupType) -> Result<Combination> {
    let min = match g.family() {
        Family::B => 4,
        Family::D => 5,
    };
    if g.rank() < min {
        return Err(Error::Precondition(format!("the degree-6 identity needs n >= {min} for family {}", g.family())));
    }
    let n = g.rank() as i64;
    Ok(Combination {
        id: "identities.deg6".into(),
        degree: 6,
        terms: vec![(BigInt::one(), 3), (BigInt::from(-2 * (n - 2)), 2), (BigInt::from(2 * (n - 1) * (n - 2)), 1)],
        target: p_elem(g.rank(), 3),
    })
}

pub fn verify_example_deg4(g: &GroupType) -> Result<VerificationReport> {
    combination_deg4(g)?.verify(g)
}

pub fn verify_example_deg6(g: &GroupType) -> Result<VerificationReport> {
    combination_deg6(g)?.verify(g)
}

/// `(sum_{W(omega_n)} lambda^n - sum_{W(omega_{n-1})} lambda^n)` in e-variables.
pub fn dn_top_lhs(g: &GroupType) -> Result<QPoly> {
    if g.family() != Family::D {
        return Err(Error::FamilyMismatch { expected: Family::D });
    }
    let n = g.rank();
    let power_sum = |k: usize| -> Result<ZPoly> {
        let mut acc = ZPoly::zero(n, Basis::E);
        for w in fundamental_orbit(g, k)?.weights() {
            let t: Vec<BigInt> = g.twice_e_coords(w).into_iter().map(BigInt::from).collect();
            acc += &ZPoly::linear(Basis::E, &t).pow(n);
        }
        Ok(acc)
    };
    let diff = &power_sum(n)? - &power_sum(n - 1)?;
    Ok(to_rational(&diff).scale(&BigRational::new(BigInt::one(), pow2(n))))
}

/// The top identity with an explicit right-hand coefficient (normally `n!`).
pub fn dn_top_check(g: &GroupType, coefficient: &BigInt) -> Result<VerificationReport> {
    let start = Instant::now();
    let lhs = dn_top_lhs(g)?;
    let rhs = q_prime(g)?.scale(&BigRational::from_integer(coefficient.clone()));
    Ok(VerificationReport::from_witness("identities.dn_top", &(&lhs - &rhs))
        .param("family", g.family())
        .param("n", g.rank())
        .param("coefficient", coefficient.to_string())
        .param("lhs", lhs.term_records())
        .timed(start))
}

/// Top identity plus the equality of spin orbit sums for randomized M with `p <= n-1`.
pub fn verify_dn_top(g: &GroupType, trials: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = g.rank();
    let mut report = dn_top_check(g, &factorial(n))?.with_seed(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for p in 1..n {
        for _ in 0..trials {
            let ms = random_mtuple(&mut rng, p);
            let diff = &lambda_orbit_sum_omega(g, n, &ms)? - &lambda_orbit_sum_omega(g, n - 1, &ms)?;
            checked += 1;
            if !diff.is_zero() {
                let mut sub = zreport(g, "identities.dn_spin_equal", &diff).param("m", &ms);
                sub.status = Status::Fail;
                report.absorb(sub);
            }
        }
    }
    Ok(report.param("spin_equal_cases", checked).timed(start))
}

/// `q'_n = phi^(n)(rho(omega_n)) - phi^(n)(rho(omega_{n-1}))` for type D.
pub fn combination_qprime(g: &GroupType) -> Result<Combination> {
    let n = g.rank();
    Ok(Combination {
        id: "identities.qprime".into(),
        degree: n,
        terms: vec![(BigInt::one(), n), (-BigInt::one(), n - 1)],
        target: q_prime(g)?,
    })
}

pub fn verify_qprime_membership(n: usize) -> Result<VerificationReport> {
    let g = GroupType::d(n)?;
    combination_qprime(&g)?.verify(&g)
}

/// Solves the triangular system for `a_1..a_{i-1}` (rows `k = i-2` down to 0).
pub fn master_coefficients(n: usize, i: usize) -> Result<Vec<BigInt>> {
    if i < 2 {
        return Err(Error::Precondition(format!("master coefficients need i >= 2, got {i}")));
    }
    if n < i {
        return Err(Error::Precondition(format!("master coefficients need n >= i, got n={n}, i={i}")));
    }
    let n = n as i64;
    // a[j] holds a_j; index 0 unused.
    let mut a: Vec<BigRational> = vec![BigRational::zero(); i];
    for k in (0..=i - 2).rev() {
        let r = n - 1 - k as i64;
        let mut s = BigRational::from_integer(pow2(i) * binomial_i(r, i - 1 - k));
        for j in k + 1..=i - 2 {
            s += BigRational::from_integer(pow2(j + 1) * binomial_i(r, j - k)) * &a[j + 1];
        }
        let lead = BigRational::from_integer(pow2(k + 1));
        a[k + 1] = -s / lead;
    }
    a.into_iter()
        .enumerate()
        .skip(1)
        .map(|(j, v)| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::NonIntegralSolution { index: j, value: v.to_string() })
            }
        })
        .collect()
}

/// How solved coefficients attach to orbit images.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `a_j` multiplies `phi(rho(omega_j))`.
    Direct,
    /// `a_j` multiplies `phi(rho(omega_{i-j}))`.
    Reversed,
}

pub fn master_combination(g: &GroupType, i: usize, coeffs: &[BigInt], pairing: Pairing) -> Combination {
    let mut terms = vec![(BigInt::one(), i)];
    for (idx, c) in coeffs.iter().enumerate() {
        let j = idx + 1;
        let k = match pairing {
            Pairing::Direct => j,
            Pairing::Reversed => i - j,
        };
        terms.push((c.clone(), k));
    }
    Combination { id: "identities.master".into(), degree: 2 * i, terms, target: p_elem(g.rank(), i) }
}

#[derive(Clone, Debug)]
pub struct MasterSolution {
    pub i: usize,
    pub coefficients: Vec<BigInt>,
    pub pairing: Pairing,
    /// True when both pairings produce the same combination.
    pub pairings_coincide: bool,
    pub combination: Combination,
    pub reports: Vec<(Pairing, VerificationReport)>,
}

fn check_master_range(g: &GroupType, i: usize) -> Result<()> {
    if i < 2 || i > g.max_small_k() {
        return Err(Error::Precondition(format!(
            "master combination for i={i} needs 2 <= i <= {} on {g}",
            g.max_small_k()
        )));
    }
    Ok(())
}

fn same_terms(a: &Combination, b: &Combination) -> bool {
    let norm = |c: &Combination| {
        let mut t: Vec<(usize, BigInt)> = c.terms.iter().map(|(v, k)| (*k, v.clone())).collect();
        t.sort();
        t
    };
    norm(a) == norm(b)
}

/// Solves the coefficient system, then lets the symbolic identity decide
/// which pairing is meant.
pub fn solve_master_coeffs(g: &GroupType, i: usize) -> Result<MasterSolution> {
    check_master_range(g, i)?;
    let coefficients = master_coefficients(g.rank(), i)?;
    let direct = master_combination(g, i, &coefficients, Pairing::Direct);
    let reversed = master_combination(g, i, &coefficients, Pairing::Reversed);
    let coincide = same_terms(&direct, &reversed);
    let rd = direct.verify(g)?;
    let rr = if coincide { rd.clone() } else { reversed.verify(g)? };
    let pairing = match (rd.passed(), rr.passed()) {
        (true, _) => Pairing::Direct,
        (false, true) => Pairing::Reversed,
        (false, false) => return Err(Error::NoPairingVerified),
    };
    if !coincide && rd.passed() && rr.passed() {
        return Err(Error::Precondition("both pairings verify with distinct combinations".into()));
    }
    let combination = if pairing == Pairing::Direct { direct } else { reversed };
    Ok(MasterSolution {
        i,
        coefficients,
        pairing,
        pairings_coincide: coincide,
        combination,
        reports: vec![(Pairing::Direct, rd), (Pairing::Reversed, rr)],
    })
}

pub fn verify_master(g: &GroupType, i: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    check_master_range(g, i)?;
    let coefficients = master_coefficients(g.rank(), i)?;
    let coeff_strings: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
    let report = match solve_master_coeffs(g, i) {
        Ok(sol) => {
            let mut r = sol.reports[if sol.pairing == Pairing::Direct { 0 } else { 1 }].1.clone();
            r = r.param("i", i).param("coefficients", &coeff_strings).param("pairing", sol.pairing);
            if sol.pairings_coincide {
                r.note("both pairings give the same combination");
            } else {
                let other = &sol.reports[if sol.pairing == Pairing::Direct { 1 } else { 0 }];
                r.note(format!("{:?} pairing fails ({} witness terms)", other.0, other.1.witness.len()));
            }
            r
        }
        Err(Error::NoPairingVerified) => {
            let direct = master_combination(g, i, &coefficients, Pairing::Direct).verify(g)?;
            let reversed = master_combination(g, i, &coefficients, Pairing::Reversed).verify(g)?;
            let mut r = direct.clone().param("i", i).param("coefficients", &coeff_strings);
            r.status = Status::Fail;
            r.note(format!("neither pairing verifies; reversed witness has {} terms", reversed.witness.len()));
            r
        }
        Err(e) => return Err(e),
    };
    Ok(report.timed(start))
}

/// One summand `multiplier * phi^(degree)(element)` of a certificate.
#[derive(Clone, Debug)]
pub struct CertificateTerm {
    pub multiplier: QPoly,
    pub degree: usize,
    pub element: GroupRingElement,
}

/// Expression of `q_{2i}` through images of invariant augmentation-ideal
/// elements with polynomial multipliers.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub i: usize,
    pub terms: Vec<CertificateTerm>,
    pub target: QPoly,
}

impl Certificate {
    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|t| t.multiplier.is_homogeneous(2 * self.i - t.degree))
    }

    /// `sum multiplier * phi(element) - q_{2i}` in omega-variables.
    pub fn replay_difference(&self, g: &GroupType) -> QPoly {
        let mut acc = QPoly::zero(g.rank(), Basis::Omega);
        for t in &self.terms {
            let image = to_rational(&phi_omega(&t.element, t.degree));
            acc += &(&e_to_omega(g, &t.multiplier) * &image);
        }
        &acc - &e_to_omega(g, &self.target)
    }

    pub fn verify(&self, g: &GroupType) -> VerificationReport {
        let start = Instant::now();
        let diff = self.replay_difference(g);
        let mut r = omega_report(g, "identities.newton_certificate", &diff)
            .param("i", self.i)
            .param("terms", self.terms.len())
            .param("homogeneous", self.is_homogeneous());
        if !self.is_homogeneous() {
            r.status = Status::Fail;
        }
        r.note("classical index p_(i-j)");
        r.timed(start)
    }
}

/// Builds the certificate for `q_{2i}` inductively from `q_2 = phi^(2)(rho(omega_1))`
/// and Newton's identity `(-1)^{i-1} q_{2i} = i p_i - sum_j (-1)^{j-1} p_{i-j} q_{2j}`.
pub fn newton_certificate(g: &GroupType, i: usize) -> Result<Certificate> {
    if i == 0 || i > g.max_small_k() {
        return Err(Error::Precondition(format!("certificate for q_{} needs 1 <= i <= {} on {g}", 2 * i, g.max_small_k())));
    }
    let n = g.rank();
    let one = QPoly::one(n, Basis::E);
    let mut certs: Vec<Certificate> = Vec::with_capacity(i);
    let base = augmented_rho(g, &g.fundamental_weight(1)?)?;
    certs.push(Certificate {
        i: 1,
        terms: vec![CertificateTerm { multiplier: one.clone(), degree: 2, element: base }],
        target: q(n, 1)?,
    });
    for l in 2..=i {
        let sign_l = if (l - 1) % 2 == 0 { 1 } else { -1 };
        let sol = solve_master_coeffs(g, l)?;
        let mut terms = vec![CertificateTerm {
            multiplier: one.scale(&BigRational::from_integer(BigInt::from(sign_l * l as i64))),
            degree: 2 * l,
            element: sol.combination.element(g)?,
        }];
        for j in 1..l {
            // -(-1)^{l-1} (-1)^{j-1} p_{l-j} q_{2j}
            let sign = -sign_l * if (j - 1) % 2 == 0 { 1 } else { -1 };
            let p = p_elem(n, l - j).scale(&BigRational::from_integer(BigInt::from(sign)));
            for t in &certs[j - 1].terms {
                terms.push(CertificateTerm { multiplier: &p * &t.multiplier, degree: t.degree, element: t.element.clone() });
            }
        }
        certs.push(Certificate { i: l, terms, target: q(n, l)? });
    }
    Ok(certs.pop().expect("at least one certificate"))
}

pub fn verify_newton_certificate(g: &GroupType, i: usize) -> Result<VerificationReport> {
    Ok(newton_certificate(g, i)?.verify(g))
}
