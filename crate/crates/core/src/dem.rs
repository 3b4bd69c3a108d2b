//! One-time data encapsulation keyed by an encapsulated key.
//!
//! Two schemes share one ciphertext container:
//! - `Otp` XORs the message with the top bits of the key; messages are
//!   bit strings no longer than the key.
//! - `Stream` XORs the message with the ChaCha20 keystream under a 256-bit
//!   key, a zero nonce and counter 0. Each key is used once.

use std::fmt;
use std::str::FromStr;

use chacha20::cipher::StreamCipher;
use chacha20::{ChaCha20, KeyIvInit};

use crate::bits::Bits;
use crate::error::{Error, Result};

pub const STREAM_KEY_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Otp,
    Stream,
}

impl Scheme {
    pub fn tag(self) -> u8 {
        match self {
            Scheme::Otp => 0x01,
            Scheme::Stream => 0x02,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0x01 => Ok(Scheme::Otp),
            0x02 => Ok(Scheme::Stream),
            other => Err(Error::Format(format!("unknown scheme tag {other:#04x}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Otp => "otp",
            Scheme::Stream => "stream",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "otp" => Ok(Scheme::Otp),
            "stream" => Ok(Scheme::Stream),
            other => Err(Error::Format(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemCiphertext {
    pub scheme: Scheme,
    pub body: Bits,
}

impl DemCiphertext {
    /// `tag | u32 BE body length in bits | body bytes`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.scheme.tag()];
        out.extend((self.body.len() as u32).to_be_bytes());
        out.extend(self.body.to_be_bytes());
        out
    }

    /// Parses one block and returns it with the number of bytes consumed.
    pub fn read_prefix(bytes: &[u8]) -> Result<(Self, usize)> {
        if bytes.len() < 5 {
            return Err(Error::Format("truncated DEM header".into()));
        }
        let scheme = Scheme::from_tag(bytes[0])?;
        let bits = u32::from_be_bytes([bytes[1], bytes[2], bytes[3], bytes[4]]) as usize;
        if scheme == Scheme::Stream && !bits.is_multiple_of(8) {
            return Err(Error::Format("stream body is not whole bytes".into()));
        }
        let end = 5 + bits.div_ceil(8);
        if bytes.len() < end {
            return Err(Error::Format("truncated DEM body".into()));
        }
        let body = Bits::from_be_bytes(&bytes[5..end], bits)?;
        Ok((DemCiphertext { scheme, body }, end))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (ctxt, used) = Self::read_prefix(bytes)?;
        if used != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes after DEM block",
                bytes.len() - used
            )));
        }
        Ok(ctxt)
    }
}

fn otp_pad(key: &Bits, message: &Bits) -> Result<Bits> {
    if message.len() > key.len() {
        return Err(Error::KeyTooShort {
            key_bits: key.len(),
            message_bits: message.len(),
        });
    }
    message.xor(&key.top(message.len()))
}

pub fn otp_encrypt(key: &Bits, message: &Bits) -> Result<DemCiphertext> {
    Ok(DemCiphertext {
        scheme: Scheme::Otp,
        body: otp_pad(key, message)?,
    })
}

pub fn otp_decrypt(key: &Bits, ctxt: &DemCiphertext) -> Result<Bits> {
    expect_scheme(ctxt, Scheme::Otp)?;
    otp_pad(key, &ctxt.body)
}

fn stream_cipher(key: &Bits) -> Result<ChaCha20> {
    if key.len() != STREAM_KEY_BITS {
        return Err(Error::BadKeyLength(key.len()));
    }
    let key_bytes: [u8; 32] = key.to_be_bytes().try_into().expect("256-bit key");
    Ok(ChaCha20::new(&key_bytes.into(), &[0u8; 12].into()))
}

/// The first `len` keystream bytes under `key`.
pub fn keystream(key: &Bits, len: usize) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; len];
    stream_cipher(key)?.apply_keystream(&mut buf);
    Ok(buf)
}

pub fn stream_encrypt(key: &Bits, message: &[u8]) -> Result<DemCiphertext> {
    let mut buf = message.to_vec();
    stream_cipher(key)?.apply_keystream(&mut buf);
    Ok(DemCiphertext {
        scheme: Scheme::Stream,
        body: Bits::from_bytes(&buf),
    })
}

pub fn stream_decrypt(key: &Bits, ctxt: &DemCiphertext) -> Result<Vec<u8>> {
    expect_scheme(ctxt, Scheme::Stream)?;
    let mut buf = ctxt.body.to_be_bytes();
    stream_cipher(key)?.apply_keystream(&mut buf);
    Ok(buf)
}

/// Encrypts a byte message under either scheme.
pub fn encrypt_bytes(scheme: Scheme, key: &Bits, message: &[u8]) -> Result<DemCiphertext> {
    match scheme {
        Scheme::Otp => otp_encrypt(key, &Bits::from_bytes(message)),
        Scheme::Stream => stream_encrypt(key, message),
    }
}

pub fn decrypt_bytes(key: &Bits, ctxt: &DemCiphertext) -> Result<Vec<u8>> {
    match ctxt.scheme {
        Scheme::Otp => {
            if !ctxt.body.len().is_multiple_of(8) {
                return Err(Error::Format("OTP body is not whole bytes".into()));
            }
            Ok(otp_decrypt(key, ctxt)?.to_be_bytes())
        }
        Scheme::Stream => stream_decrypt(key, ctxt),
    }
}

fn expect_scheme(ctxt: &DemCiphertext, scheme: Scheme) -> Result<()> {
    if ctxt.scheme != scheme {
        return Err(Error::Format(format!(
            "expected a {scheme} ciphertext, got {}",
            ctxt.scheme
        )));
    }
    Ok(())
}
