//! Exhaustive check that the affine hash family is pairwise independent.

use ikem::uhf::{pairwise_independence_census, UhfSeed, UhfSpec};
use ikem::Bits;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> ikem::Result<()> {
    for (w, m) in [(3, 1), (4, 2), (4, 4), (6, 3), (8, 4)] {
        let dev = pairwise_independence_census(&UhfSpec::new(w, m)?)?;
        println!("w = {w}, m = {m}: max deviation from 2^-2m = {dev}");
    }

    let spec = UhfSpec::new(4, 2)?;
    let seed = UhfSeed {
        a: Bits::from_u64(0b0010, 4),
        b: Bits::zero(4),
    };
    println!(
        "h(0b1000) = {}",
        spec.hash(&seed, &Bits::from_u64(0b1000, 4))?
    );

    let wide = UhfSpec::new(256, 32)?;
    let seed = wide.sample_seed(&mut ChaCha20Rng::seed_from_u64(7));
    let x = Bits::ones(256);
    println!("256-bit input -> {}", wide.hash(&seed, &x)?);
    Ok(())
}
