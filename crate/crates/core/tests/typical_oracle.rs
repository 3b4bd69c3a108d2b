mod common;

use ikem::ikem::{enumerate_typical, TypicalSet};
use ikem::JointSource;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_surprisal, random_source, tuples};

fn brute_typical(src: &JointSource, y: &[usize], nu: f64) -> Vec<Vec<usize>> {
    tuples(src.sizes()[0], y.len())
        .into_iter()
        .filter(|x| brute_surprisal(src, x, y) <= nu)
        .collect()
}

fn defined_y<R: Rng>(src: &JointSource, n: usize, rng: &mut R) -> Vec<usize> {
    src.sample_with(n, rng).unwrap().y
}

#[test]
fn single_flip_exceeds_threshold() {
    let src = JointSource::satellite(0.1, 0.1, 0.3).unwrap();
    let got = enumerate_typical(&src.x_given_y(), &[0, 0], 0.6).unwrap();
    assert_eq!(got, vec![vec![0, 0]]);
    assert_eq!(brute_typical(&src, &[0, 0], 0.6), got);
    assert!((-(0.18f64).log2() - 2.47).abs() < 0.01);
}

#[test]
fn matches_brute_force_on_seeded_sources() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for _ in 0..40 {
        let nx: usize = rng.random_range(2..=4);
        let ny = rng.random_range(1..=3);
        let n = rng.random_range(1..=6);
        if nx.pow(n as u32) > 4096 {
            continue;
        }
        let src = random_source(&mut rng, [nx, ny, 2]);
        let model = src.x_given_y();
        for _ in 0..5 {
            let y = defined_y(&src, n, &mut rng);
            let nu = rng.random_range(0.0..(3.0 * n as f64));
            let mut lib = enumerate_typical(&model, &y, nu).unwrap();
            let brute = brute_typical(&src, &y, nu);
            let sorted = {
                let mut s = lib.clone();
                s.sort();
                s
            };
            assert_eq!(lib, sorted, "lexicographic order");
            lib.dedup();
            assert_eq!(lib, brute);
        }
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn undefined_conditioning_value_is_rejected() {
    let src = JointSource::from_cells([2, 3, 1], &[(0, 0, 0, 0.5), (1, 1, 0, 0.5)]).unwrap();
    assert!(TypicalSet::new(&src.x_given_y(), &[0, 2], 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn list_size_at_most_two_to_nu(seed in any::<u64>(), n in 1usize..7, nu in 0.0f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = random_source(&mut rng, [3, 2, 1]);
        let y = defined_y(&src, n, &mut rng);
        let list = enumerate_typical(&src.x_given_y(), &y, nu).unwrap();
        prop_assert!(list.len() as f64 <= nu.exp2() + 1e-9);
    }

    #[test]
    fn threshold_is_monotone(seed in any::<u64>(), n in 1usize..6, nu in 0.0f64..6.0, extra in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = random_source(&mut rng, [2, 2, 1]);
        let y = defined_y(&src, n, &mut rng);
        let model = src.x_given_y();
        let small = enumerate_typical(&model, &y, nu).unwrap();
        let large = enumerate_typical(&model, &y, nu + extra).unwrap();
        prop_assert!(small.iter().all(|x| large.contains(x)));
    }
}
