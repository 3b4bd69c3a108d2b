//! Choosing n, t and the key length for a source.

use ikem::ikem::{derive_params, ParamsBuilder};
use ikem::{Error, JointSource};

fn main() -> ikem::Result<()> {
    let src = JointSource::satellite(0.01, 0.01, 0.5)?;
    for n in [16, 32, 64, 128] {
        match derive_params(&src, n, 0.25, 1.0 / 256.0, 0) {
            Ok(p) => println!(
                "n = {n:>3}: nu = {:.3}, t = {}, ell = {}, field bits = {}",
                p.nu(),
                p.t(),
                p.ell(),
                p.field_bits()
            ),
            Err(Error::InfeasibleKeyLength { bound, .. }) => {
                println!("n = {n:>3}: infeasible (bound {bound:.2} bits)")
            }
            Err(e) => return Err(e),
        }
    }

    // the same budget against one encapsulation query
    let cea = derive_params(&src, 128, 0.25, 1.0 / 256.0, 1)?;
    println!("q_e = 1 at n = 128: ell = {}", cea.ell());

    // a fixed key length for the stream DEM
    let exact = JointSource::satellite(0.0, 0.0, 0.5)?;
    let p = ParamsBuilder::new(&exact, 300, 0.25, 1.0 / 256.0, 0)?
        .key_bits(256)
        .build()?;
    println!("stream-ready params: n = 300, ell = {}", p.ell());
    println!("{}", p.to_json());

    // a noisy link where the tag costs more than Eve's uncertainty
    let noisy = JointSource::satellite(0.05, 0.05, 0.3)?;
    if let Err(e) = derive_params(&noisy, 64, 0.25, 1.0 / 256.0, 0) {
        println!("satellite(0.05, 0.05, 0.3): {e}");
    }
    Ok(())
}
