mod common;

use ikem::source::{min_entropy, statistical_distance, Coord, Distribution};
use ikem::JointSource;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_iid_entropy, random_source};

fn sat() -> JointSource {
    JointSource::satellite(0.1, 0.1, 0.3).unwrap()
}

#[test]
fn agreement_probability_of_satellite() {
    let s = sat();
    let agree: f64 = (0..2)
        .map(|b| (0..2).map(|z| s.prob(b, b, z)).sum::<f64>())
        .sum();
    assert!((agree - (0.9 * 0.9 + 0.1 * 0.1)).abs() < 1e-12);
    assert!((agree - 0.82).abs() < 1e-12);
}

#[test]
fn per_symbol_entropy_of_satellite() {
    let s = sat();
    let h = s.avg_cond_min_entropy(Coord::X, &[Coord::Y]).unwrap();
    assert!((h - (-(0.82f64).log2())).abs() < 1e-12);
    assert!((h - 0.2863).abs() < 5e-5);
    assert!((min_entropy(&Distribution::new(vec![0.82, 0.18]).unwrap()) - h).abs() < 1e-12);
}

#[test]
fn three_fold_product_table_is_additive() {
    let s = sat();
    let brute = brute_iid_entropy(&s, 3, true, false);
    let lib = s.iid_cond_min_entropy(Coord::X, &[Coord::Y], 3).unwrap();
    assert!((brute - lib).abs() < 1e-12);
    assert!((lib - 0.8589).abs() < 5e-5);
}

#[test]
fn surprisal_of_matching_pair() {
    let s = sat();
    let v = s.surprisal(&[0, 0], &[0, 0]).unwrap();
    assert!((v - 2.0 * -(0.82f64).log2()).abs() < 1e-12);
    assert!((v - 0.5726).abs() < 1e-4);
}

#[test]
fn bernoulli_distance() {
    let p = Distribution::new(vec![0.5, 0.5]).unwrap();
    let q = Distribution::new(vec![0.25, 0.75]).unwrap();
    assert!((statistical_distance(&p, &q).unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn empirical_agreement_rate() {
    let t = sat().sample_n(100_000, 11).unwrap();
    let agree = t.x.iter().zip(&t.y).filter(|(a, b)| a == b).count() as f64 / 1e5;
    assert!((agree - 0.82).abs() < 0.01, "{agree}");
}

#[test]
fn empirical_cell_frequencies_within_five_se() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let src = random_source(&mut rng, [3, 2, 2]);
    let n = 200_000;
    let t = src.sample_n(n, 3).unwrap();
    let mut counts = [0usize; 12];
    for i in 0..n {
        counts[(t.x[i] * 2 + t.y[i]) * 2 + t.z[i]] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let p = src.pmf()[i];
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (c as f64 / n as f64 - p).abs() <= 5.0 * se + 1e-12,
            "cell {i}"
        );
        if p == 0.0 {
            assert_eq!(c, 0);
        }
    }
}

fn sizes() -> impl Strategy<Value = [usize; 3]> {
    (1usize..4, 1usize..4, 1usize..4).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conditioning_reduces_entropy(seed in any::<u64>(), sizes in sizes()) {
        let src = random_source(&mut ChaCha8Rng::seed_from_u64(seed), sizes);
        let h_x = src.avg_cond_min_entropy(Coord::X, &[]).unwrap();
        let h_y = src.avg_cond_min_entropy(Coord::X, &[Coord::Y]).unwrap();
        let h_yz = src.avg_cond_min_entropy(Coord::X, &[Coord::Y, Coord::Z]).unwrap();
        prop_assert!(h_yz <= h_y + 1e-12);
        prop_assert!(h_y <= h_x + 1e-12);
        prop_assert!(h_yz >= 0.0);
        prop_assert!(h_x <= (sizes[0] as f64).log2() + 1e-12);
    }

    #[test]
    fn iid_entropy_matches_product_table(seed in any::<u64>(), sizes in sizes(), n in 1usize..4) {
        let src = random_source(&mut ChaCha8Rng::seed_from_u64(seed), sizes);
        let lib_y = src.iid_cond_min_entropy(Coord::X, &[Coord::Y], n).unwrap();
        let lib_z = src.iid_cond_min_entropy(Coord::X, &[Coord::Z], n).unwrap();
        prop_assert!((lib_y - brute_iid_entropy(&src, n, true, false)).abs() < 1e-9);
        prop_assert!((lib_z - brute_iid_entropy(&src, n, false, true)).abs() < 1e-9);
    }

    #[test]
    fn distance_is_a_metric(a in prop::collection::vec(0.01f64..1.0, 4), b in prop::collection::vec(0.01f64..1.0, 4), c in prop::collection::vec(0.01f64..1.0, 4)) {
        let norm = |v: Vec<f64>| {
            let s: f64 = v.iter().sum();
            Distribution::new(v.into_iter().map(|x| x / s).collect()).unwrap()
        };
        let (p, q, r) = (norm(a), norm(b), norm(c));
        let pq = statistical_distance(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert_eq!(pq, statistical_distance(&q, &p).unwrap());
        prop_assert_eq!(statistical_distance(&p, &p).unwrap(), 0.0);
        let via = statistical_distance(&p, &r).unwrap() + statistical_distance(&r, &q).unwrap();
        prop_assert!(pq <= via + 1e-12);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), n in 1usize..50) {
        let s = sat();
        prop_assert_eq!(s.sample_n(n, seed).unwrap(), s.sample_n(n, seed).unwrap());
    }
}
