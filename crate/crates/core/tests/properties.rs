use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use spinexp::bounds::{bounds_table, g, t, MTable};
use spinexp::matrix::{hnf, module_exponent, snf, Exponent};
use spinexp::weyl::{all_elements, orbit};
use spinexp::{GroupType, Weight, ZMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ZMatrix> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows)
        .prop_map(|r| ZMatrix::from_rows(r.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect()).unwrap())
}

fn vectors(count: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    prop::collection::vec(prop::collection::vec((-5i64..=5).prop_map(BigInt::from), dim), count)
}

fn group() -> impl Strategy<Value = GroupType> {
    prop_oneof![
        (3usize..=5).prop_map(|n| GroupType::b(n).unwrap()),
        (4usize..=5).prop_map(|n| GroupType::d(n).unwrap()),
    ]
}

fn in_span(gens: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    spinexp::ZLattice::from_generators(v.len(), gens.iter().cloned()).unwrap().contains(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hnf_is_unimodular_echelon_and_idempotent(m in matrix(4, 3)) {
        let res = hnf(&m);
        prop_assert_eq!(&(&res.u * &m), &res.h);
        prop_assert_eq!(res.u.det().abs(), BigInt::one());
        let mut last = None;
        for (r, &p) in res.pivots.iter().enumerate() {
            prop_assert!(last.is_none_or(|l| p > l));
            prop_assert!(res.h.row(r)[..p].iter().all(Zero::is_zero));
            let piv = &res.h.row(r)[p];
            prop_assert!(piv.is_positive());
            for above in 0..r {
                let x = &res.h.row(above)[p];
                prop_assert!(!x.is_negative() && x < piv);
            }
            last = Some(p);
        }
        for r in res.pivots.len()..res.h.nrows() {
            prop_assert!(res.h.row(r).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(hnf(&res.h).h, res.h);
    }

    #[test]
    fn snf_chain_and_determinant(m in matrix(3, 3)) {
        let d = snf(&m);
        for w in d.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        let det = m.det().abs();
        if !det.is_zero() {
            prop_assert_eq!(d.len(), 3);
            prop_assert_eq!(d.iter().product::<BigInt>(), det);
        } else {
            prop_assert!(d.len() < 3);
        }
    }

    #[test]
    fn module_exponent_is_minimal(a in vectors(2, 3), m in vectors(3, 3)) {
        let q = module_exponent(&a, &m).unwrap();
        if let Exponent::Finite(n) = &q.exponent {
            for v in &a {
                let scaled: Vec<BigInt> = v.iter().map(|x| x * n).collect();
                prop_assert!(in_span(&m, &scaled));
            }
            for (p, _) in &q.primes {
                let k = n / p;
                let escapes = a.iter().any(|v| !in_span(&m, &v.iter().map(|x| x * &k).collect::<Vec<_>>()));
                prop_assert!(escapes, "exponent {} not minimal at prime {}", n, p);
            }
        }
    }

    #[test]
    fn orbits_are_stable_under_the_weyl_group(gt in group(), w in prop::collection::vec(-2i64..=2, 5), pick in 0usize..1000) {
        let w = Weight::new(w[..gt.rank()].to_vec());
        let o = orbit(&gt, &w).unwrap();
        let elements = all_elements(&gt);
        let s = &elements[pick % elements.len()];
        for mu in o.weights() {
            prop_assert!(o.contains(&s.act(&gt, mu).unwrap()));
        }
        let mut sum = vec![0i64; gt.rank()];
        for mu in o.weights() {
            for (acc, x) in sum.iter_mut().zip(gt.twice_e_coords(mu)) {
                *acc += x;
            }
        }
        prop_assert!(sum.iter().all(|&x| x == 0));
    }

    #[test]
    fn bounds_are_deterministic(extra in prop::collection::vec(0u64..5, 0..4)) {
        let mut table = MTable::published();
        for (k, m) in extra.iter().enumerate() {
            table.set(5 + k, *m);
        }
        let top = 4 + extra.len();
        prop_assert_eq!(bounds_table(top, &table), bounds_table(top, &table.clone()));
        for i in 3..=top {
            prop_assert!(g(i, &table).unwrap() >= 1);
            prop_assert!(t(i, &table).unwrap() > g(i, &table).unwrap());
        }
    }
}
