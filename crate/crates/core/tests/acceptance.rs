//! Acceptance run: one PASS/FAIL line per criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinexp::bounds::{bounds_table, to_csv, to_json, MTable};
use spinexp::groupring::{phi, phi_omega, phi_truncated, phi_via_partitions, GroupRingElement};
use spinexp::identities::{self as id, Pairing, DEFAULT_SEED};
use spinexp::oracle::{tau, Grid};
use spinexp::poly::newton_verify;
use spinexp::{GroupType, VerificationReport, Weight};

/// Writes to the process stdout directly so the lines survive libtest capture.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.ok = false;
            if self.detail.len() < 2000 {
                self.detail.push_str(&what());
                self.detail.push_str("; ");
            }
        }
    }

    fn report(&mut self, r: &VerificationReport, label: &str) {
        let ok = r.passed();
        self.check(ok, || format!("{label}: {} witness terms", r.witness.len()));
    }

    fn within(&mut self, t: Duration, limit: Duration, label: &str) {
        self.check(t <= limit, || format!("{label} took {t:?} (limit {limit:?})"));
    }
}

fn b(n: usize) -> GroupType {
    GroupType::b(n).unwrap()
}

fn d(n: usize) -> GroupType {
    GroupType::d(n).unwrap()
}

fn groups(bs: std::ops::RangeInclusive<usize>, ds: std::ops::RangeInclusive<usize>) -> Vec<GroupType> {
    bs.map(b).chain(ds.map(d)).collect()
}

fn bump(c: &id::Combination, j: usize) -> id::Combination {
    let mut m = c.clone();
    m.terms[j].0 += BigInt::one();
    m
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    for g in groups(3..=6, 4..=6) {
        let start = Instant::now();
        let r = id::verify_example_deg4(&g).unwrap();
        o.within(start.elapsed(), Duration::from_secs(1), &format!("deg4 {g}"));
        o.report(&r, &format!("deg4 {g}"));
    }
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    for g in groups(4..=6, 5..=6) {
        let start = Instant::now();
        let r = id::verify_example_deg6(&g).unwrap();
        o.within(start.elapsed(), Duration::from_secs(10), &format!("deg6 {g}"));
        o.report(&r, &format!("deg6 {g}"));
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let mut clauses = std::collections::BTreeSet::new();
    for g in groups(3..=6, 4..=6) {
        for k in 1..=g.rank() {
            for p in 1..=5 {
                if let Some(c) = id::vanishing_clause(&g, k, p) {
                    clauses.insert(format!("{c:?}"));
                    let r = id::verify_vanishing(&g, k, p, 20, DEFAULT_SEED).unwrap();
                    o.report(&r, &format!("vanishing {g} k={k} p={p}"));
                }
            }
        }
    }
    o.check(clauses.len() == 3, || format!("clauses exercised: {clauses:?}"));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    for g in groups(3..=6, 4..=6) {
        for k in 1..=g.max_small_k().min(4) {
            for p in [2, 4, 6] {
                let r = id::verify_orbit_decomposition_random(&g, k, p, 5, DEFAULT_SEED).unwrap();
                o.report(&r, &format!("decomposition {g} k={k} p={p}"));
            }
        }
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for n in 4..=6 {
        let g = d(n);
        let r = id::verify_dn_top(&g, 10, DEFAULT_SEED).unwrap();
        o.report(&r, &format!("top identity D{n}"));
        let lhs = id::dn_top_lhs(&g).unwrap();
        let fact: u64 = (1..=n as u64).product();
        let expected = spinexp::poly::q_prime(&g).unwrap().scale(&num_rational::BigRational::from_integer(BigInt::from(fact)));
        o.check(lhs == expected, || format!("D{n} lhs is {lhs}"));
    }
    let lhs4 = id::dn_top_lhs(&d(4)).unwrap().to_string();
    o.check(lhs4 == "24*e1*e2*e3*e4", || format!("D4 lhs printed as {lhs4}"));
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    for n in [4, 5] {
        o.report(&id::verify_qprime_membership(n).unwrap(), &format!("q' D{n}"));
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    for n in 4..=8usize {
        let n_ = n as i64;
        let c2 = id::master_coefficients(n, 2).unwrap();
        o.check(c2 == big(&[-2 * (n_ - 1)]), || format!("i=2 n={n}: {c2:?}"));
        let c3 = id::master_coefficients(n, 3).unwrap();
        let expected = big(&[-2 * (n_ - 2), 2 * (n_ - 1) * (n_ - 2)]);
        let mut sorted = c3.clone();
        sorted.sort();
        o.check(sorted == expected, || format!("i=3 n={n}: {c3:?}"));
    }
    let mut cases = 0;
    for i in 2..=4 {
        for g in groups(i + 1..=6, i + 2..=6) {
            o.report(&id::verify_master(&g, i).unwrap(), &format!("master {g} i={i}"));
            cases += 1;
        }
    }
    o.check(cases == 15, || format!("{cases} master cases"));
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    for g in groups(3..=6, 4..=6) {
        for i in 2..=g.max_small_k().min(4) {
            let r = id::verify_newton_certificate(&g, i).unwrap();
            o.report(&r, &format!("certificate {g} i={i}"));
            o.check(id::newton_certificate(&g, i).unwrap().is_homogeneous(), || format!("{g} i={i} not homogeneous"));
        }
    }
    let r = newton_verify(2, 2).unwrap();
    o.check(r.passed() && r.params["shifted_holds"] == false, || format!("printed index at n=2 i=2: {:?}", r.params));
    o
}

fn random_element(g: &GroupType, rng: &mut ChaCha8Rng) -> GroupRingElement {
    let terms: Vec<(Weight, BigInt)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let w = Weight::new((0..g.rank()).map(|_| rng.gen_range(-2..=2)).collect());
            (w, BigInt::from(rng.gen_range(-3..=3)))
        })
        .collect();
    GroupRingElement::from_terms(g, terms)
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for g in groups(3..=5, 4..=5) {
        for i in 1..=6 {
            for _ in 0..100 {
                let w = Weight::new((0..g.rank()).map(|_| rng.gen_range(-3..=3)).collect());
                let x = GroupRingElement::monomial(&g, w.clone(), BigInt::one());
                let a = phi(&x, i);
                let b = phi_via_partitions(&g, i, &w).unwrap();
                o.check(a == b, || format!("{g} i={i} weight {:?}", w.omega()));
            }
        }
    }
    for g in [b(4), d(5)] {
        for _ in 0..50 {
            let x = random_element(&g, &mut rng);
            let y = random_element(&g, &mut rng);
            let i = rng.gen_range(0..=5);
            let lhs = phi_omega(&(&x * &y), i);
            let rhs = (&phi_truncated(&x, i) * &phi_truncated(&y, i)).homogeneous_component(i);
            o.check(lhs == rhs, || format!("multiplicativity {g} i={i}"));
        }
    }
    o.within(start.elapsed(), Duration::from_secs(60), "cross-checks");
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let mut tau3 = Vec::new();
    for g in [b(3), b(4), d(4), d(5)] {
        for i in 2..=4 {
            let start = Instant::now();
            let r = tau(&g, i, &Grid::default_schedule(i)).unwrap();
            o.within(start.elapsed(), Duration::from_secs(600), &format!("tau {g} i={i}"));
            o.check(r.stabilized && r.membership_verified, || format!("{g} i={i} did not stabilize"));
            if i == 2 {
                o.check(r.tau == "2", || format!("tau_2({g}) = {}", r.tau));
            } else {
                o.check(r.divides_two == Some(true), || format!("tau_{i}({g}) = {} does not divide 2", r.tau));
            }
            if i == 3 {
                let surfaced = r.tau == "1" || r.notes.iter().any(|n| n.contains("tau_3 = 1"));
                o.check(surfaced, || format!("tau_3({g}) = {} without a note", r.tau));
                tau3.push(format!("{g}:{}", r.tau));
            }
        }
    }
    if tau3.iter().any(|s| !s.ends_with(":1")) {
        emit(&format!("NOTE criterion 10: reference tau_3 = 1, oracle gives {}", tau3.join(" ")));
    }
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let rows = bounds_table(4, &MTable::published());
    let got: Vec<(usize, String, String)> = rows.iter().map(|r| (r.i, r.g.clone(), r.t.clone())).collect();
    let want = vec![(3, "2".to_string(), "4".to_string()), (4, "3".to_string(), "7".to_string())];
    o.check(got == want, || format!("{got:?}"));
    let again = bounds_table(4, &MTable::published());
    o.check(to_csv(&rows).unwrap() == to_csv(&again).unwrap() && to_json(&rows) == to_json(&again), || "output differs between runs".into());
    o
}

fn criterion_12() -> Outcome {
    let mut o = Outcome::new();
    let mut flip = |r: VerificationReport, label: String| o.check(!r.passed(), || format!("{label} still passes"));
    for g in groups(3..=6, 4..=6) {
        let c = id::combination_deg4(&g).unwrap();
        for j in 0..c.terms.len() {
            flip(bump(&c, j).verify(&g).unwrap(), format!("deg4 {g} term {j}"));
        }
    }
    for g in groups(4..=6, 5..=6) {
        let c = id::combination_deg6(&g).unwrap();
        for j in 0..c.terms.len() {
            flip(bump(&c, j).verify(&g).unwrap(), format!("deg6 {g} term {j}"));
        }
    }
    for n in 4..=6 {
        let fact: u64 = (1..=n as u64).product();
        flip(id::dn_top_check(&d(n), &BigInt::from(fact + 1)).unwrap(), format!("top D{n}"));
    }
    for i in 2..=4 {
        for g in groups(i + 1..=6, i + 2..=6) {
            let coeffs = id::master_coefficients(g.rank(), i).unwrap();
            for j in 0..coeffs.len() {
                let mut m = coeffs.clone();
                m[j] += BigInt::one();
                let r = id::master_combination(&g, i, &m, Pairing::Direct).verify(&g).unwrap();
                flip(r, format!("master {g} i={i} a_{}", j + 1));
            }
        }
    }
    o
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("degree-4 identity", criterion_1),
        ("degree-6 identity", criterion_2),
        ("vanishing clauses", criterion_3),
        ("orbit decomposition", criterion_4),
        ("D-type top identity", criterion_5),
        ("q' membership", criterion_6),
        ("coefficient solver", criterion_7),
        ("Newton certificates", criterion_8),
        ("phi cross-checks", criterion_9),
        ("tau oracle", criterion_10),
        ("bounds table", criterion_11),
        ("mutation sensitivity", criterion_12),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        emit(&format!("{verdict} criterion {}: {name} ({:.1?})", k + 1, start.elapsed()));
        if !o.ok {
            emit(&format!("    {}", o.detail));
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
