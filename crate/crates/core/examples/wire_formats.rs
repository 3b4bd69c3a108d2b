//! Byte layouts of every file the CLI reads or writes.

use ikem::dem::{otp_encrypt, DemCiphertext};
use ikem::harness::GameReport;
use ikem::hybrid::{he_encrypt_bytes, HybridCiphertext};
use ikem::ikem::{encap, IkemCiphertext, IkemKey, ParamsBuilder};
use ikem::source::SourceSpec;
use ikem::{Bits, JointSource};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> ikem::Result<()> {
    let spec = r#"{"type":"table","alphabets":[2,2,1],"pmf":[
        {"x":0,"y":0,"z":0,"p":0.5},{"x":1,"y":1,"z":0,"p":0.5}]}"#;
    let src: JointSource = SourceSpec::from_json(spec)?;
    let params = ParamsBuilder::new(&src, 12, 0.5, 0.25, 0)?
        .key_bits(8)
        .build()?;
    println!("params: {}", params.to_json());
    println!("params digest: {}", hex::encode(params.digest()));

    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let x = vec![1; 12];
    let (c, k) = encap(&params, &x, &mut rng)?;
    let bytes = c.to_bytes(&params);
    println!(
        "ikem ciphertext ({} bytes): {}",
        bytes.len(),
        hex::encode(&bytes)
    );
    assert_eq!(IkemCiphertext::from_bytes(&params, &bytes)?, c);
    println!("key file: {}", hex::encode(k.to_file_bytes()));
    assert_eq!(IkemKey::from_file_bytes(&k.to_file_bytes())?, k);

    let dem = otp_encrypt(&Bits::from_bit_str("1010")?, &Bits::from_bit_str("011")?)?;
    println!("dem block: {}", hex::encode(dem.to_bytes()));
    assert_eq!(DemCiphertext::from_bytes(&dem.to_bytes())?, dem);

    let hybrid = he_encrypt_bytes(&params, &x, b"h", &mut rng, ikem::dem::Scheme::Otp)?;
    let bytes = hybrid.to_bytes(&params);
    println!(
        "hybrid file ({} bytes): {}",
        bytes.len(),
        hex::encode(&bytes)
    );
    assert_eq!(HybridCiphertext::from_bytes(&params, &bytes)?, hybrid);

    let report = GameReport {
        game: "ot-bound".into(),
        exact: true,
        trials: 256,
        advantage: 0.125,
        bound: 0.25,
        pass: true,
        seed: 0,
    };
    println!("report: {}", report.to_json());
    Ok(())
}
