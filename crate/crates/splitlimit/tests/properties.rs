use splitlimit::{BigInt, BigRational};
use proptest::prelude::*;
use splitlimit::crt::{distance_matrix, is_tree_metric, sample_kproper, sample_lengths};
use splitlimit::sampler::{replicate_rng, ExactSampler};
use splitlimit::stats::{ks_test, rayleigh_cdf};
use splitlimit::treecodec::decompose;
use splitlimit::{Family, RationalSeries};

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn series(order: usize) -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec(-20i64..20, order + 1).prop_map(move |c| {
        RationalSeries::from_coeffs(c.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect(), order)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_trees_are_reduced_and_round_trip(f in family(), n in 2usize..80, seed in any::<u64>()) {
        let s = ExactSampler::new(f, n).unwrap();
        let t = s.draw(&mut replicate_rng(seed, 0)).unwrap();
        prop_assert_eq!(t.size(), n);
        t.validate_reduced().unwrap();
        let g = t.gr().unwrap();
        prop_assert!(g.is_connected());
        prop_assert_eq!(decompose(&g).unwrap().canonical(), t.canonical());
        let back = splitlimit::treecodec::DhTree::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back.canonical(), t.canonical());
    }

    #[test]
    fn distance_is_a_metric(f in family(), n in 2usize..40, seed in any::<u64>()) {
        let t = ExactSampler::new(f, n).unwrap().draw(&mut replicate_rng(seed, 1)).unwrap();
        let ix = t.index();
        let m = n as u32 + 1;
        let d = |a: u32, b: u32| if a == b { 0 } else { ix.distance(a, b).unwrap() };
        for a in 0..m {
            for b in 0..m {
                prop_assert_eq!(d(a, b), d(b, a));
                for c in 0..m {
                    prop_assert!(d(a, c) <= d(a, b) + d(b, c));
                }
            }
        }
    }

    #[test]
    fn ks_statistic_is_a_probability(v in prop::collection::vec(0.0f64..10.0, 20..200)) {
        let r = ks_test(&v, rayleigh_cdf).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.statistic));
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn series_product_is_associative_and_commutative(a in series(8), b in series(8), c in series(8)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn series_reciprocal_inverts(a in series(8)) {
        let one = RationalSeries::one(8);
        let unit = &one + &a.shift(1).truncate(8);
        prop_assert_eq!(&unit * &unit.recip().unwrap(), one);
    }

    #[test]
    fn exp_ge_splits_by_threshold(a in series(8), r in 1usize..5) {
        let a = a.shift(1).truncate(8);
        let lower = a.exp_ge(r).unwrap();
        let upper = a.exp_ge(r + 1).unwrap();
        let term = a.pow(r).scale(&BigRational::new(1.into(), splitlimit::series::factorial(r)));
        prop_assert_eq!(&lower - &upper, term);
    }

    #[test]
    fn crt_marginals_form_tree_metrics(k in 1usize..6, seed in any::<u64>()) {
        let mut rng = replicate_rng(seed, 2);
        let t = sample_kproper(k, &mut rng);
        let l = sample_lengths(k, &mut rng);
        prop_assert_eq!(l.len(), 2 * k - 1);
        prop_assert!(l.iter().all(|&x| x > 0.0));
        let d = distance_matrix(&t, &l);
        prop_assert!(is_tree_metric(&d, 1e-9));
    }
}
