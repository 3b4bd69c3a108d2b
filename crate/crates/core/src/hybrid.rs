//! Hybrid encryption: encapsulate a fresh key from Alice's samples, then
//! encrypt the message under it with a one-time DEM.

use rand::Rng;

use crate::bits::Bits;
use crate::dem::{self, DemCiphertext, Scheme};
use crate::error::{Error, Result};
use crate::ikem::{encap, Decapsulated, Decapsulator, IkemCiphertext, IkemParams};
use crate::source::{JointSource, SampleTriple, Symbol};

pub const HYBRID_MAGIC: &[u8; 4] = b"IHE1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridCiphertext {
    pub c1: IkemCiphertext,
    pub c2: DemCiphertext,
}

/// Plaintext or decapsulation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decrypted {
    Message(Bits),
    Bottom,
}

impl Decrypted {
    pub fn message(&self) -> Option<&Bits> {
        match self {
            Decrypted::Message(m) => Some(m),
            Decrypted::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Decrypted::Bottom)
    }
}

impl HybridCiphertext {
    pub fn to_bytes(&self, params: &IkemParams) -> Vec<u8> {
        let mut out = HYBRID_MAGIC.to_vec();
        out.extend(self.c1.to_bytes(params));
        out.extend(self.c2.to_bytes());
        out
    }

    pub fn from_bytes(params: &IkemParams, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != HYBRID_MAGIC {
            return Err(Error::Format("bad hybrid ciphertext magic".into()));
        }
        let split = 4 + IkemCiphertext::encoded_len(params);
        if bytes.len() < split {
            return Err(Error::Format("truncated ikem block".into()));
        }
        let c1 = IkemCiphertext::from_bytes(params, &bytes[4..split])?;
        let c2 = DemCiphertext::from_bytes(&bytes[split..])?;
        Ok(HybridCiphertext { c1, c2 })
    }
}

/// Draws the preprocessing triple.
pub fn he_gen(source: &JointSource, n: usize, seed: u64) -> Result<SampleTriple> {
    source.sample_n(n, seed)
}

pub fn he_encrypt<R: Rng + ?Sized>(
    params: &IkemParams,
    x: &[Symbol],
    message: &Bits,
    rng: &mut R,
    scheme: Scheme,
) -> Result<HybridCiphertext> {
    check_message(params, message, scheme)?;
    let (c1, key) = encap(params, x, rng)?;
    let c2 = match scheme {
        Scheme::Otp => dem::otp_encrypt(key.bits(), message)?,
        Scheme::Stream => dem::stream_encrypt(key.bits(), &message.to_be_bytes())?,
    };
    Ok(HybridCiphertext { c1, c2 })
}

pub fn he_encrypt_bytes<R: Rng + ?Sized>(
    params: &IkemParams,
    x: &[Symbol],
    message: &[u8],
    rng: &mut R,
    scheme: Scheme,
) -> Result<HybridCiphertext> {
    he_encrypt(params, x, &Bits::from_bytes(message), rng, scheme)
}

fn check_message(params: &IkemParams, message: &Bits, scheme: Scheme) -> Result<()> {
    let ell = params.ell() as usize;
    match scheme {
        Scheme::Otp if message.len() > ell => Err(Error::KeyTooShort {
            key_bits: ell,
            message_bits: message.len(),
        }),
        Scheme::Stream if ell != dem::STREAM_KEY_BITS => Err(Error::BadKeyLength(ell)),
        Scheme::Stream if !message.len().is_multiple_of(8) => {
            Err(Error::Format("stream messages must be whole bytes".into()))
        }
        _ => Ok(()),
    }
}

/// Bob's side; reuses one [`Decapsulator`].
pub fn he_decrypt_with(
    dec: &Decapsulator,
    y: &[Symbol],
    ctxt: &HybridCiphertext,
) -> Result<Decrypted> {
    let key = match dec.decap(y, &ctxt.c1)? {
        Decapsulated::Key(k) => k,
        Decapsulated::Bottom => return Ok(Decrypted::Bottom),
    };
    let message = match ctxt.c2.scheme {
        Scheme::Otp => dem::otp_decrypt(key.bits(), &ctxt.c2)?,
        Scheme::Stream => Bits::from_bytes(&dem::stream_decrypt(key.bits(), &ctxt.c2)?),
    };
    Ok(Decrypted::Message(message))
}

pub fn he_decrypt(
    params: &IkemParams,
    source: &JointSource,
    y: &[Symbol],
    ctxt: &HybridCiphertext,
) -> Result<Decrypted> {
    he_decrypt_with(&Decapsulator::new(params, source)?, y, ctxt)
}
