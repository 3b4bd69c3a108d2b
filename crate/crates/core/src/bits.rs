//! Fixed-length bit strings.
//!
//! A [`Bits`] value of length `len` is read as an unsigned integer below
//! `2^len`; the first bit of the string is the most significant one. Byte
//! serialization is big-endian over `ceil(len / 8)` bytes with the unused
//! high bits of the first byte set to zero.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    // little-endian limbs, always exactly `ceil(len / 64)` of them
    limbs: Vec<u64>,
}

fn limb_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn zero(len: usize) -> Self {
        Bits {
            len,
            limbs: vec![0; limb_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = Bits {
            len,
            limbs: vec![u64::MAX; limb_count(len)],
        };
        bits.mask_top();
        bits
    }

    /// Panics if `value` does not fit in `len` bits.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(
            len >= 64 || value >> len == 0,
            "value {value:#x} does not fit in {len} bits"
        );
        let mut limbs = vec![0; limb_count(len)];
        if let Some(first) = limbs.first_mut() {
            *first = value;
        }
        Bits { len, limbs }
    }

    /// Parses a string of `0`/`1` characters, most significant bit first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut out = Bits::zero(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(s.len() - 1 - i, true),
                _ => return Err(Error::Format(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(out)
    }

    pub(crate) fn from_limbs(mut limbs: Vec<u64>, len: usize) -> Self {
        limbs.resize(limb_count(len), 0);
        let mut bits = Bits { len, limbs };
        bits.mask_top();
        bits
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let limbs = (0..limb_count(len)).map(|_| rng.random::<u64>()).collect();
        Bits::from_limbs(limbs, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Bit of weight `2^i` in the integer reading.
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.limbs[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    /// Integer value, if the string is at most 64 bits long.
    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Bits {
            len: self.len,
            limbs,
        })
    }

    /// The `m` most significant bits.
    pub fn top(&self, m: usize) -> Bits {
        assert!(
            m <= self.len,
            "cannot take {m} bits of a {}-bit string",
            self.len
        );
        self.shr(self.len - m, m)
    }

    /// Zero-extends (or truncates high bits) to a new length.
    pub fn resize(&self, len: usize) -> Bits {
        Bits::from_limbs(self.limbs.clone(), len)
    }

    fn shr(&self, shift: usize, len: usize) -> Bits {
        let word = shift / 64;
        let bit = shift % 64;
        let mut limbs = vec![0u64; limb_count(len)];
        for (i, out) in limbs.iter_mut().enumerate() {
            let lo = self.limbs.get(i + word).copied().unwrap_or(0);
            let hi = self.limbs.get(i + word + 1).copied().unwrap_or(0);
            *out = if bit == 0 {
                lo
            } else {
                lo >> bit | hi << (64 - bit)
            };
        }
        Bits::from_limbs(limbs, len)
    }

    pub fn byte_len(&self) -> usize {
        self.len.div_ceil(8)
    }

    pub fn to_be_bytes(&self) -> Vec<u8> {
        let n = self.byte_len();
        (0..n)
            .map(|i| {
                let k = n - 1 - i;
                (self.limbs[k / 8] >> (8 * (k % 8))) as u8
            })
            .collect()
    }

    /// Inverse of [`Bits::to_be_bytes`]; rejects nonzero padding bits.
    pub fn from_be_bytes(bytes: &[u8], len: usize) -> Result<Bits> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::LengthMismatch {
                expected: len.div_ceil(8),
                actual: bytes.len(),
            });
        }
        let mut limbs = vec![0u64; limb_count(len)];
        for (i, &byte) in bytes.iter().rev().enumerate() {
            limbs[i / 8] |= (byte as u64) << (8 * (i % 8));
        }
        let padding = bytes.len() * 8 - len;
        if padding > 0 && bytes[0] >> (8 - padding) != 0 {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        Ok(Bits { len, limbs })
    }

    /// Bit string from whole bytes, first byte most significant.
    pub fn from_bytes(bytes: &[u8]) -> Bits {
        Bits::from_be_bytes(bytes, bytes.len() * 8).expect("whole bytes carry no padding")
    }

    fn mask_top(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_string_reads_msb_first() {
        let b = Bits::from_bit_str("1000").unwrap();
        assert_eq!(b.to_u64(), Some(8));
        assert_eq!(b.to_string(), "1000");
    }

    #[test]
    fn top_takes_high_bits() {
        let b = Bits::from_u64(0b1011_0110, 8);
        assert_eq!(b.top(3).to_u64(), Some(0b101));
        assert_eq!(b.top(0).len(), 0);
        let wide = Bits::from_limbs(vec![0, 0b11], 66);
        assert_eq!(wide.top(2).to_u64(), Some(0b11));
    }

    #[test]
    fn padding_bits_are_rejected() {
        assert!(Bits::from_be_bytes(&[0b0001_0000], 4).is_err());
        assert_eq!(
            Bits::from_be_bytes(&[0b0000_1010], 4).unwrap().to_u64(),
            Some(10)
        );
    }

    #[test]
    fn empty_string() {
        let b = Bits::zero(0);
        assert!(b.is_empty());
        assert!(b.to_be_bytes().is_empty());
        assert_eq!(b.to_u64(), Some(0));
    }

    proptest! {
        #[test]
        fn byte_serialization_round_trips(len in 0usize..200, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = Bits::random(len, &mut rng);
            let bytes = b.to_be_bytes();
            prop_assert_eq!(bytes.len(), len.div_ceil(8));
            prop_assert_eq!(Bits::from_be_bytes(&bytes, len).unwrap(), b);
        }
    }
}
