use splitlimit::crt::{chi_cdf, distance_matrix, double_factorial_odd, sample, sample_kproper, sample_lengths, KProperTree};
use splitlimit::enumeration::graphs::graph_in_family;
use splitlimit::enumeration::{count_trees, counts_csv};
use splitlimit::sampler::{replicate_rng, Sampler, SamplerConfig};
use splitlimit::stats::{ks_test, ks_two_sample};
use splitlimit::{BigInt, Family};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashMap;

const GOLDEN: &str = include_str!("../data/golden_counts.csv");

fn chi_square_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new(counts.len() as f64 - 1.0).unwrap().cdf(stat)
}

fn assert_quarter_each(freq: &HashMap<String, u64>, draws: u64) {
    assert_eq!(freq.len(), 4);
    let sigma = (0.25 * 0.75 / draws as f64).sqrt();
    for (k, &c) in freq {
        let p = c as f64 / draws as f64;
        assert!((p - 0.25).abs() <= 3.0 * sigma, "{k}: {p}");
    }
}

#[test]
fn golden_counts_match_tables() {
    let body: Vec<&str> = GOLDEN.lines().filter(|l| !l.starts_with('#')).collect();
    let fresh = counts_csv(&Family::ALL, 12);
    let fresh: Vec<&str> = fresh.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, fresh);
    for line in &body[1..] {
        let c: Vec<&str> = line.split(',').collect();
        let f: Family = c[0].parse().unwrap();
        let n: usize = c[1].parse().unwrap();
        assert_eq!(count_trees(f, n).unwrap(), c[2].parse::<BigInt>().unwrap());
    }
}

#[test]
fn exact_dh_size_two_trees_and_graphs_are_uniform() {
    let s = Sampler::new(&SamplerConfig::exact(Family::Dh, 2, 11)).unwrap();
    let mut rng = replicate_rng(11, 0);
    let draws = 100_000u64;
    let mut trees = HashMap::new();
    let mut graphs = HashMap::new();
    for _ in 0..draws {
        let t = s.draw(&mut rng).unwrap();
        *graphs.entry(format!("{:?}", t.gr().unwrap().edges())).or_insert(0) += 1;
        *trees.entry(t.canonical().to_json()).or_insert(0) += 1;
    }
    assert_quarter_each(&trees, draws);
    assert_quarter_each(&graphs, draws);
}

#[test]
fn exact_dh2c_size_two_is_the_triangle() {
    let s = Sampler::new(&SamplerConfig::exact(Family::Dh2c, 2, 5)).unwrap();
    for i in 0..200 {
        let g = s.draw_replicate(5, i).unwrap().gr().unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }
}

#[test]
fn sampled_trees_belong_to_their_family() {
    for f in Family::ALL {
        for n in [2, 5, 12, 30] {
            let s = Sampler::new(&SamplerConfig::exact(f, n, 3)).unwrap();
            for i in 0..40 {
                let t = s.draw_replicate(3, i).unwrap();
                t.validate_reduced().unwrap();
                let g = t.gr().unwrap();
                assert!(graph_in_family(f, &g.masks()), "{f} n={n} replicate {i}");
                let c = t.classify();
                assert!(c.is_2connected || f != Family::Dh2c);
                assert!(c.is_3leaf || f != Family::Leaf3);
            }
        }
    }
}

#[test]
fn dh2c_graphs_have_no_articulation_point() {
    for n in [3, 10, 40, 100] {
        let s = Sampler::new(&SamplerConfig::exact(Family::Dh2c, n, 7)).unwrap();
        for i in 0..50 {
            let g = s.draw_replicate(7, i).unwrap().gr().unwrap();
            assert!(g.articulation_points().is_empty(), "n={n} replicate {i}");
        }
    }
}

#[test]
fn boltzmann_reaches_windows_around_290_and_388() {
    for n in [290, 388] {
        let cfg = SamplerConfig::boltzmann(Family::Dh, n, 1);
        let (lo, hi) = cfg.window();
        let s = Sampler::new(&cfg).unwrap();
        for i in 0..3 {
            let t = s.draw_replicate(1, i).unwrap();
            assert!((lo..=hi).contains(&t.size()), "size {} outside [{lo},{hi}]", t.size());
        }
    }
}

#[test]
fn same_seed_gives_identical_json() {
    for f in Family::ALL {
        let cfg = SamplerConfig::exact(f, 50, 99);
        let a = Sampler::new(&cfg).unwrap().draw_replicate(99, 4).unwrap().to_json();
        let b = Sampler::new(&cfg).unwrap().draw_replicate(99, 4).unwrap().to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn crt_shapes_are_uniform_up_to_four_marks() {
    let mut rng = replicate_rng(21, 0);
    assert_eq!(sample_kproper(1, &mut rng).edge_count(), 1);
    for k in 2..=4 {
        let all = KProperTree::all(k);
        assert_eq!(all.len() as u64, double_factorial_odd(k));
        let index: HashMap<Vec<u64>, usize> = all.iter().enumerate().map(|(i, t)| (t.shape_key(), i)).collect();
        let mut counts = vec![0u64; all.len()];
        for _ in 0..100_000 {
            let t = sample_kproper(k, &mut rng);
            assert!(t.degrees()[k + 1..].iter().all(|&d| d == 3));
            counts[index[&t.shape_key()]] += 1;
        }
        assert!(counts.iter().all(|&c| c > 0));
        if counts.len() > 1 {
            assert!(chi_square_p(&counts) > 1e-3, "k={k}: {counts:?}");
        }
    }
}

#[test]
fn crt_total_length_is_chi() {
    let mut rng = replicate_rng(22, 0);
    for k in 1..=4usize {
        let s: Vec<f64> = (0..20_000).map(|_| sample_lengths(k, &mut rng).iter().sum()).collect();
        let p = ks_test(&s, |x| chi_cdf(2.0 * k as f64, x)).unwrap().p_value;
        assert!(p > 1e-3, "k={k}: p={p}");
    }
    let x0: Vec<f64> = (0..100_000).map(|_| sample_lengths(1, &mut rng)[0]).collect();
    let mean = x0.iter().sum::<f64>() / x0.len() as f64;
    let se = ((2.0 - std::f64::consts::PI / 2.0) / x0.len() as f64).sqrt();
    assert!((mean - (std::f64::consts::PI / 2.0).sqrt()).abs() < 4.0 * se);
}

#[test]
fn crt_matrices_are_exchangeable_in_the_marks() {
    let mut rng = replicate_rng(23, 0);
    let draws: Vec<_> = (0..20_000).map(|_| sample(3, &mut rng)).collect();
    let d12: Vec<f64> = draws.iter().map(|s| s.matrix[1][2]).collect();
    let d23: Vec<f64> = draws.iter().map(|s| s.matrix[2][3]).collect();
    assert!(ks_two_sample(&d12, &d23).unwrap().p_value > 1e-3);
    for s in &draws[..100] {
        assert_eq!(s.matrix, distance_matrix(&s.tree, &s.lengths));
        for a in 0..4 {
            assert_eq!(s.matrix[a][a], 0.0);
            for b in 0..4 {
                assert_eq!(s.matrix[a][b], s.matrix[b][a]);
            }
        }
    }
    let t = sample_kproper(1, &mut rng);
    assert_eq!(distance_matrix(&t, &[0.7])[0][1], 0.7);
    let t = sample_kproper(3, &mut rng);
    assert!(distance_matrix(&t, &[0.0; 5]).iter().flatten().all(|&x| x == 0.0));
}
