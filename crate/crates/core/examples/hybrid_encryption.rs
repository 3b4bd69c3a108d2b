//! Encrypting a file-sized message with both data-encapsulation schemes.

use ikem::dem::Scheme;
use ikem::hybrid::{he_decrypt, he_encrypt, he_encrypt_bytes, he_gen, Decrypted, HybridCiphertext};
use ikem::ikem::ParamsBuilder;
use ikem::{Bits, JointSource};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> ikem::Result<()> {
    let src = JointSource::satellite(0.0, 0.0, 0.5)?;
    let mut rng = ChaCha20Rng::seed_from_u64(1);

    let params = ParamsBuilder::new(&src, 300, 0.25, 1.0 / 256.0, 0)?
        .key_bits(256)
        .build()?;
    let samples = he_gen(&src, params.n(), 11)?;
    let message: Vec<u8> = (0..1024).map(|i| (i % 251) as u8).collect();
    let c = he_encrypt_bytes(&params, &samples.x, &message, &mut rng, Scheme::Stream)?;
    let wire = c.to_bytes(&params);
    println!(
        "stream: {} plaintext bytes -> {} ciphertext bytes",
        message.len(),
        wire.len()
    );
    let parsed = HybridCiphertext::from_bytes(&params, &wire)?;
    match he_decrypt(&params, &src, &samples.y, &parsed)? {
        Decrypted::Message(m) => println!("stream round trip ok: {}", m.to_be_bytes() == message),
        Decrypted::Bottom => println!("bottom"),
    }

    let otp = ParamsBuilder::new(&src, 64, 0.5, 0.25, 0)?.build()?;
    let samples = he_gen(&src, otp.n(), 12)?;
    let m = Bits::from_bit_str("1011001110001111")?;
    let c = he_encrypt(&otp, &samples.x, &m, &mut rng, Scheme::Otp)?;
    println!("otp body: {}", c.c2.body);
    let back = he_decrypt(&otp, &src, &samples.y, &c)?;
    println!("otp round trip ok: {}", back.message() == Some(&m));
    Ok(())
}
