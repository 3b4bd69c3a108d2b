//! Key encapsulation from correlated samples.
//!
//! Alice hashes her string `x` twice with fresh seeds: a `t`-bit tag
//! `g = h_s(x)` that lets Bob locate `x` among his candidates, and the
//! `ell`-bit key `k = h'_s'(x)`. The ciphertext is `(g, s', s)`. Bob lists
//! every `x^` with `-log2 P(x^ | y) <= nu` and accepts only if exactly one
//! of them carries the tag.

mod params;
mod typical;

use rand::Rng;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::source::{ConditionalModel, JointSource, Symbol};
use crate::uhf::UhfSeed;

pub use params::{
    derive_params, key_length, key_length_bound, symbol_bits, tag_length, IkemParams, ParamsBuilder,
};
pub use typical::{enumerate_typical, TypicalSet};

pub const CIPHERTEXT_MAGIC: &[u8; 4] = b"IKM1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IkemCiphertext {
    /// `t`-bit tag `h_s(x)`.
    pub g: Bits,
    /// Seed of the key family.
    pub s_prime: UhfSeed,
    /// Seed of the tag family.
    pub s: UhfSeed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IkemKey {
    bits: Bits,
}

/// Outcome of decapsulation: a key, or the protocol-level failure symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decapsulated {
    Key(IkemKey),
    Bottom,
}

impl Decapsulated {
    pub fn key(&self) -> Option<&IkemKey> {
        match self {
            Decapsulated::Key(k) => Some(k),
            Decapsulated::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Decapsulated::Bottom)
    }
}

impl IkemKey {
    pub fn new(bits: Bits) -> Self {
        IkemKey { bits }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `u16` big-endian bit length, then the key bytes.
    pub fn to_file_bytes(&self) -> Vec<u8> {
        let mut out = (self.bits.len() as u16).to_be_bytes().to_vec();
        out.extend(self.bits.to_be_bytes());
        out
    }

    pub fn from_file_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 2 {
            return Err(Error::Format("key file too short".into()));
        }
        let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
        if len == 0 {
            return Err(Error::Format("zero-length key".into()));
        }
        Ok(IkemKey {
            bits: Bits::from_be_bytes(&bytes[2..], len)?,
        })
    }
}

impl IkemCiphertext {
    pub fn check_shape(&self, params: &IkemParams) -> Result<()> {
        let w = params.field_bits();
        let checks = [
            (params.t() as usize, self.g.len()),
            (w, self.s.a.len()),
            (w, self.s.b.len()),
            (w, self.s_prime.a.len()),
            (w, self.s_prime.b.len()),
        ];
        for (expected, actual) in checks {
            if expected != actual {
                return Err(Error::LengthMismatch { expected, actual });
            }
        }
        Ok(())
    }

    /// `IKM1 | params digest (8) | t (u16 BE) | g | s' | s`.
    pub fn to_bytes(&self, params: &IkemParams) -> Vec<u8> {
        let mut out = CIPHERTEXT_MAGIC.to_vec();
        out.extend(params.digest());
        out.extend((self.g.len() as u16).to_be_bytes());
        out.extend(self.g.to_be_bytes());
        out.extend(self.s_prime.to_bytes());
        out.extend(self.s.to_bytes());
        out
    }

    pub fn encoded_len(params: &IkemParams) -> usize {
        4 + 8 + 2 + (params.t() as usize).div_ceil(8) + 2 * params.key_family().seed_byte_len()
    }

    /// Parses a ciphertext block; a digest mismatch is a format error.
    pub fn from_bytes(params: &IkemParams, bytes: &[u8]) -> Result<Self> {
        let expected = Self::encoded_len(params);
        if bytes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: bytes.len(),
            });
        }
        if &bytes[..4] != CIPHERTEXT_MAGIC {
            return Err(Error::Format("bad ciphertext magic".into()));
        }
        if bytes[4..12] != params.digest() {
            return Err(Error::DigestMismatch);
        }
        let t = u16::from_be_bytes([bytes[12], bytes[13]]) as usize;
        if t != params.t() as usize {
            return Err(Error::Format(format!(
                "tag length {t}, params say {}",
                params.t()
            )));
        }
        let g_end = 14 + t.div_ceil(8);
        let seed_len = params.key_family().seed_byte_len();
        let g = Bits::from_be_bytes(&bytes[14..g_end], t)?;
        let s_prime = UhfSeed::from_bytes(&params.key_family(), &bytes[g_end..g_end + seed_len])?;
        let s = UhfSeed::from_bytes(&params.tag_family(), &bytes[g_end + seed_len..])?;
        Ok(IkemCiphertext { g, s_prime, s })
    }
}

/// Encapsulates with fresh seeds drawn from `rng`.
pub fn encap<R: Rng + ?Sized>(
    params: &IkemParams,
    x: &[Symbol],
    rng: &mut R,
) -> Result<(IkemCiphertext, IkemKey)> {
    let encoded = params.encode(x)?;
    let key_family = params.key_family();
    let tag_family = params.tag_family();
    let s_prime = key_family.sample_seed(rng);
    let s = tag_family.sample_seed(rng);
    let g = tag_family.hash(&s, &encoded)?;
    let key = key_family.hash(&s_prime, &encoded)?;
    Ok((IkemCiphertext { g, s_prime, s }, IkemKey { bits: key }))
}

/// Bob's side, holding the conditional model of his source.
#[derive(Debug, Clone)]
pub struct Decapsulator {
    params: IkemParams,
    model: ConditionalModel,
}

impl Decapsulator {
    pub fn new(params: &IkemParams, source: &JointSource) -> Result<Self> {
        params.check_source(source)?;
        Ok(Decapsulator {
            params: params.clone(),
            model: source.x_given_y(),
        })
    }

    pub fn params(&self) -> &IkemParams {
        &self.params
    }

    /// Unique tag match within the candidate list, or `None`.
    pub fn recover(&self, y: &[Symbol], ctxt: &IkemCiphertext) -> Result<Option<Vec<Symbol>>> {
        if y.len() != self.params.n() {
            return Err(Error::LengthMismatch {
                expected: self.params.n(),
                actual: y.len(),
            });
        }
        ctxt.check_shape(&self.params)?;
        let tag_family = self.params.tag_family();
        let mut found: Option<Vec<Symbol>> = None;
        for candidate in TypicalSet::new(&self.model, y, self.params.nu())? {
            let encoded = self.params.encode(&candidate)?;
            if tag_family.hash(&ctxt.s, &encoded)? == ctxt.g {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some(candidate);
            }
        }
        Ok(found)
    }

    pub fn decap(&self, y: &[Symbol], ctxt: &IkemCiphertext) -> Result<Decapsulated> {
        Ok(match self.recover(y, ctxt)? {
            Some(x_hat) => {
                let encoded = self.params.encode(&x_hat)?;
                let key = self.params.key_family().hash(&ctxt.s_prime, &encoded)?;
                Decapsulated::Key(IkemKey { bits: key })
            }
            None => Decapsulated::Bottom,
        })
    }
}

pub fn decap(
    params: &IkemParams,
    source: &JointSource,
    y: &[Symbol],
    ctxt: &IkemCiphertext,
) -> Result<Decapsulated> {
    Decapsulator::new(params, source)?.decap(y, ctxt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn noiseless() -> (JointSource, IkemParams) {
        let src = JointSource::satellite(0.0, 0.0, 0.5).unwrap();
        let params = derive_params(&src, 24, 0.5, 0.25, 0).unwrap();
        (src, params)
    }

    #[test]
    fn round_trip_under_deterministic_correlation() {
        let (src, params) = noiseless();
        let dec = Decapsulator::new(&params, &src).unwrap();
        for seed in 0..50 {
            let triple = src.sample_n(24, seed).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let (c, k) = encap(&params, &triple.x, &mut rng).unwrap();
            assert_eq!(dec.decap(&triple.y, &c).unwrap(), Decapsulated::Key(k));
        }
    }

    #[test]
    fn tampered_tag_is_rejected() {
        let (src, params) = noiseless();
        let triple = src.sample_n(24, 1).unwrap();
        let (mut c, _) = encap(&params, &triple.x, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        c.g = c.g.xor(&Bits::from_u64(1, c.g.len())).unwrap();
        assert!(decap(&params, &src, &triple.y, &c).unwrap().is_bottom());
    }

    #[test]
    fn encapsulation_is_reproducible_and_shaped() {
        let src = JointSource::satellite(0.0, 0.0, 0.5).unwrap();
        let params = ParamsBuilder::new(&src, 24, 0.5, 0.25, 0)
            .unwrap()
            .key_bits(1)
            .build()
            .unwrap();
        let x = src.sample_n(24, 3).unwrap().x;
        let a = encap(&params, &x, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = encap(&params, &x, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.len(), 1);
        assert_eq!(a.0.g.len(), params.t() as usize);
        assert!(encap(&params, &x[..5], &mut ChaCha20Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn ciphertext_bytes_round_trip() {
        let (src, params) = noiseless();
        let x = src.sample_n(24, 4).unwrap().x;
        let (c, _) = encap(&params, &x, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let bytes = c.to_bytes(&params);
        assert_eq!(bytes.len(), IkemCiphertext::encoded_len(&params));
        assert_eq!(&bytes[..4], b"IKM1");
        assert_eq!(IkemCiphertext::from_bytes(&params, &bytes).unwrap(), c);

        let other = ParamsBuilder::new(&src, 24, 0.5, 0.25, 0)
            .unwrap()
            .key_bits(3)
            .build()
            .unwrap();
        assert!(matches!(
            IkemCiphertext::from_bytes(&other, &bytes),
            Err(Error::DigestMismatch)
        ));
    }

    #[test]
    fn key_file_round_trip() {
        let key = IkemKey::new(Bits::from_bit_str("10110").unwrap());
        let bytes = key.to_file_bytes();
        assert_eq!(bytes, vec![0, 5, 0b10110]);
        assert_eq!(IkemKey::from_file_bytes(&bytes).unwrap(), key);
        assert!(IkemKey::from_file_bytes(&[0, 5]).is_err());
    }

    #[test]
    fn decapsulator_rejects_other_sources() {
        let (_, params) = noiseless();
        let other = JointSource::satellite(0.0, 0.1, 0.5).unwrap();
        assert!(matches!(
            Decapsulator::new(&params, &other),
            Err(Error::DigestMismatch)
        ));
    }
}
