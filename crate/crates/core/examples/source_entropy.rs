//! Entropy bookkeeping for a satellite-style source.

use ikem::source::Coord;
use ikem::JointSource;

fn main() -> ikem::Result<()> {
    // a shared random bit seen through three binary symmetric channels
    let src = JointSource::satellite(0.1, 0.1, 0.3)?;

    let h_xy = src.avg_cond_min_entropy(Coord::X, &[Coord::Y])?;
    let h_xz = src.avg_cond_min_entropy(Coord::X, &[Coord::Z])?;
    println!("per symbol: H~(X|Y) = {h_xy:.4}, H~(X|Z) = {h_xz:.4}");
    for n in [1, 10, 100] {
        println!(
            "n = {n:>3}: H~(X^n|Y^n) = {:>8.4}, H~(X^n|Z^n) = {:>8.4}",
            src.iid_cond_min_entropy(Coord::X, &[Coord::Y], n)?,
            src.iid_cond_min_entropy(Coord::X, &[Coord::Z], n)?
        );
    }

    let samples = src.sample_n(100_000, 1)?;
    let agree = samples
        .x
        .iter()
        .zip(&samples.y)
        .filter(|(a, b)| a == b)
        .count();
    println!(
        "Alice and Bob agree on {:.4} of the samples",
        agree as f64 / 1e5
    );
    println!(
        "surprisal of x = y = (0, 0): {:.4} bits",
        src.surprisal(&[0, 0], &[0, 0])?
    );
    Ok(())
}
