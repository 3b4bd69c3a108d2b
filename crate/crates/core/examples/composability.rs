//! Alice's and Bob's keys together against a shared uniform key.

use ikem::harness::composability_check;
use ikem::ikem::derive_params;
use ikem::JointSource;

fn main() -> ikem::Result<()> {
    let cases = [
        ("exact copy", JointSource::satellite(0.0, 0.0, 0.5)?, 4),
        ("noisy copy", JointSource::satellite(0.02, 0.02, 0.5)?, 3),
    ];
    for (name, src, n) in cases {
        let p = derive_params(&src, n, 0.6, 0.5, 0)?;
        let r = composability_check(&src, &p)?;
        println!(
            "{name}: t = {}, ell = {}, SD = {:.4} <= eps + sigma = {:.2}: {}",
            p.t(),
            p.ell(),
            r.advantage,
            r.bound,
            r.pass
        );
    }
    Ok(())
}
