//! The verification suite: every identity check over a range of groups,
//! run in parallel and reported in a fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::groupring::{phi, phi_via_partitions, GroupRingElement};
use crate::identities::{self, DEFAULT_SEED};
use crate::lattice::{Family, GroupType, Weight};
use crate::poly::newton_verify;
use crate::report::VerificationReport;

/// Statement families selectable by id.
pub const SUITE_IDS: &[&str] = &[
    "newton",
    "phi_crosscheck",
    "vanishing",
    "orbit_decomposition",
    "deg4",
    "deg6",
    "dn_top",
    "qprime",
    "master",
    "newton_certificate",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub groups: Vec<GroupType>,
    /// `None` runs everything.
    pub ids: Option<Vec<String>>,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { groups: default_groups(), ids: None, seed: DEFAULT_SEED, trials: 20 }
    }
}

/// B_3..B_6 and D_4..D_6.
pub fn default_groups() -> Vec<GroupType> {
    let mut gs: Vec<GroupType> = (3..=6).map(|n| GroupType::b(n).unwrap()).collect();
    gs.extend((4..=6).map(|n| GroupType::d(n).unwrap()));
    gs
}

impl SuiteConfig {
    pub fn selects(&self, id: &str) -> bool {
        self.ids.as_ref().is_none_or(|ids| ids.iter().any(|s| s == id))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(ids) = &self.ids {
            for id in ids {
                if !SUITE_IDS.contains(&id.as_str()) {
                    return Err(Error::Parse(format!("unknown suite id {id:?}; known: {}", SUITE_IDS.join(","))));
                }
            }
        }
        Ok(())
    }
}

type Job = Box<dyn Fn() -> Result<VerificationReport> + Send + Sync>;

fn phi_crosscheck(g: GroupType, trials: usize, seed: u64) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.rank();
    let mut report = VerificationReport::bare("groupring.phi_crosscheck", crate::report::Status::Pass)
        .param("family", g.family())
        .param("n", n)
        .param("trials", trials)
        .with_seed(seed);
    for _ in 0..trials {
        let w = Weight::new((0..n).map(|_| rng.gen_range(-3..=3)).collect());
        let i = rng.gen_range(1..=4);
        let x = GroupRingElement::monomial(&g, w.clone(), BigInt::from(1));
        let diff = &phi(&x, i) - &phi_via_partitions(&g, i, &w)?;
        report.absorb(VerificationReport::from_witness("groupring.phi_crosscheck", &diff).param("i", i).param("weight", w.omega()));
    }
    Ok(report.timed(start))
}

fn jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let seed = cfg.seed;
    let trials = cfg.trials;
    if cfg.selects("newton") {
        let mut ranks: Vec<usize> = cfg.groups.iter().map(|g| g.rank()).collect();
        ranks.sort();
        ranks.dedup();
        for n in ranks {
            for i in 1..=n {
                jobs.push(Box::new(move || newton_verify(n, i)));
            }
        }
    }
    for &g in &cfg.groups {
        let n = g.rank();
        let small = g.max_small_k();
        if cfg.selects("phi_crosscheck") {
            jobs.push(Box::new(move || phi_crosscheck(g, trials.min(10), seed)));
        }
        if cfg.selects("vanishing") {
            for k in 1..=n {
                for p in 1..=5 {
                    if identities::vanishing_clause(&g, k, p).is_some() {
                        jobs.push(Box::new(move || identities::verify_vanishing(&g, k, p, trials, seed)));
                    }
                }
            }
        }
        if cfg.selects("orbit_decomposition") {
            for k in 1..=small.min(4) {
                for p in [2, 4, 6] {
                    jobs.push(Box::new(move || identities::verify_orbit_decomposition_random(&g, k, p, 5, seed)));
                }
            }
        }
        if cfg.selects("deg4") {
            jobs.push(Box::new(move || identities::verify_example_deg4(&g)));
        }
        let deg6_min = if g.family() == Family::B { 4 } else { 5 };
        if cfg.selects("deg6") && n >= deg6_min {
            jobs.push(Box::new(move || identities::verify_example_deg6(&g)));
        }
        if g.family() == Family::D {
            if cfg.selects("dn_top") {
                jobs.push(Box::new(move || identities::verify_dn_top(&g, trials.min(5), seed)));
            }
            if cfg.selects("qprime") {
                jobs.push(Box::new(move || identities::verify_qprime_membership(n)));
            }
        }
        for i in 2..=small.min(4) {
            if cfg.selects("master") {
                jobs.push(Box::new(move || identities::verify_master(&g, i)));
            }
            if cfg.selects("newton_certificate") {
                jobs.push(Box::new(move || identities::verify_newton_certificate(&g, i)));
            }
        }
    }
    jobs
}

fn sort_key(r: &VerificationReport) -> (String, String) {
    (r.id.clone(), serde_json::to_string(&r.params).unwrap_or_default())
}

/// Runs the selected checks on the current rayon pool; reports are sorted
/// by statement id and parameters.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let mut reports = jobs(cfg).par_iter().map(|job| job()).collect::<Result<Vec<_>>>()?;
    reports.sort_by_key(sort_key);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig { groups: vec![GroupType::b(3).unwrap(), GroupType::d(4).unwrap()], ids: None, seed: 7, trials: 3 };
        let a = run_suite(&cfg).unwrap();
        assert!(a.iter().all(|r| r.passed()), "{}", crate::report::render_table(&a));
        let strip = |v: Vec<VerificationReport>| v.into_iter().map(|mut r| {
            r.millis = None;
            r
        }).collect::<Vec<_>>();
        assert_eq!(strip(a), strip(run_suite(&cfg).unwrap()));
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let cfg = SuiteConfig { ids: Some(vec!["nope".into()]), ..SuiteConfig::default() };
        assert!(run_suite(&cfg).is_err());
    }
}
