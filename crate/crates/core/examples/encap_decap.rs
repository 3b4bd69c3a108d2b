//! One key encapsulation from correlated samples.

use ikem::ikem::{derive_params, encap, Decapsulated, Decapsulator};
use ikem::JointSource;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> ikem::Result<()> {
    let src = JointSource::satellite(0.01, 0.01, 0.5)?;
    let params = derive_params(&src, 64, 0.25, 1.0 / 256.0, 0)?;
    let dec = Decapsulator::new(&params, &src)?;
    let mut rng = ChaCha20Rng::seed_from_u64(3);

    let (mut agreed, mut wrong, mut bottom) = (0, 0, 0);
    let rounds = 200;
    for round in 0..rounds {
        let samples = src.sample_n(params.n(), round)?;
        let (ciphertext, key) = encap(&params, &samples.x, &mut rng)?;
        match dec.decap(&samples.y, &ciphertext)? {
            Decapsulated::Key(k) if k == key => agreed += 1,
            Decapsulated::Key(_) => wrong += 1,
            Decapsulated::Bottom => bottom += 1,
        }
        if round == 0 {
            println!(
                "key: {} bits, ciphertext: {} bytes",
                key.len(),
                ciphertext.to_bytes(&params).len()
            );
        }
    }
    println!("{agreed}/{rounds} agreed, {wrong} wrong keys, {bottom} bottoms");
    println!("target failure rate: {}", params.eps());
    Ok(())
}
