//! Strongly universal hashing over GF(2^w).
//!
//! The family is `h_(a,b)(x) = msb_m(a * x + b)` with `a, b, x` in GF(2^w)
//! (see [`crate::gf2`] for the fixed moduli). For `x != x'` the map
//! `(a, b) -> (a*x + b, a*x' + b)` is a bijection on GF(2^w)^2, so every
//! pair of `m`-bit outputs occurs for exactly `2^(2(w-m))` seeds.

use std::sync::Arc;

use rand::Rng;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::BinaryField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UhfSpec {
    input_bits: usize,
    output_bits: usize,
}

/// Seed `(a, b)`; both halves are `input_bits` long.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UhfSeed {
    pub a: Bits,
    pub b: Bits,
}

impl UhfSpec {
    pub fn new(input_bits: usize, output_bits: usize) -> Result<Self> {
        if input_bits == 0 || output_bits == 0 || output_bits > input_bits {
            return Err(Error::InvalidParameter(format!(
                "hash family needs 1 <= m <= w, got w = {input_bits}, m = {output_bits}"
            )));
        }
        Ok(UhfSpec {
            input_bits,
            output_bits,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn field(&self) -> Arc<BinaryField> {
        BinaryField::of_width(self.input_bits)
    }

    pub fn sample_seed<R: Rng + ?Sized>(&self, rng: &mut R) -> UhfSeed {
        let a = Bits::random(self.input_bits, rng);
        let b = Bits::random(self.input_bits, rng);
        UhfSeed { a, b }
    }

    pub fn hash(&self, seed: &UhfSeed, x: &Bits) -> Result<Bits> {
        for len in [x.len(), seed.a.len(), seed.b.len()] {
            if len != self.input_bits {
                return Err(Error::LengthMismatch {
                    expected: self.input_bits,
                    actual: len,
                });
            }
        }
        let ax = self.field().mul(&seed.a, x);
        Ok(ax.xor(&seed.b)?.top(self.output_bits))
    }

    /// Integer form of [`UhfSpec::hash`] for widths up to 64.
    pub fn hash_u64(&self, field: &BinaryField, a: u64, b: u64, x: u64) -> u64 {
        debug_assert_eq!(field.width(), self.input_bits);
        (field.mul_u64(a, x) ^ b) >> (self.input_bits - self.output_bits)
    }

    pub fn seed_byte_len(&self) -> usize {
        2 * self.input_bits.div_ceil(8)
    }
}

impl UhfSeed {
    /// `a` then `b`, each big-endian over `ceil(w/8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.a.to_be_bytes();
        out.extend(self.b.to_be_bytes());
        out
    }

    pub fn from_bytes(spec: &UhfSpec, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != spec.seed_byte_len() {
            return Err(Error::LengthMismatch {
                expected: spec.seed_byte_len(),
                actual: bytes.len(),
            });
        }
        let (a, b) = bytes.split_at(bytes.len() / 2);
        Ok(UhfSeed {
            a: Bits::from_be_bytes(a, spec.input_bits)?,
            b: Bits::from_be_bytes(b, spec.input_bits)?,
        })
    }
}

const CENSUS_WORK_LIMIT: u64 = 1 << 30;

/// Exhaustive check of strong universality.
///
/// Returns `max |#{s : h_s(x) = u, h_s(x') = v} / |S| - 2^(-2m)|` over all
/// `x != x'` and all `(u, v)`. For a fixed `a`, as `b` ranges over the field
/// the pair `(h(x), h(x'))` takes every value `(u, u ^ d)` exactly
/// `2^(w-m)` times, with `d = msb_m(a*x ^ a*x')`; the census counts the
/// offsets in closed form and enumerates everything else.
pub fn pairwise_independence_census(spec: &UhfSpec) -> Result<f64> {
    let w = spec.input_bits;
    let m = spec.output_bits;
    if w > 12 {
        return Err(Error::RegimeTooLarge(format!(
            "census needs w <= 12, got {w}"
        )));
    }
    let size = 1u64 << w;
    let work = size * size * (size + (1 << (2 * m)));
    if work > CENSUS_WORK_LIMIT {
        return Err(Error::RegimeTooLarge(format!(
            "census of w = {w}, m = {m} needs {work} steps"
        )));
    }
    let field = spec.field();
    let shift = w - m;
    let outputs = 1usize << m;
    let per_offset = 1u64 << shift;
    let target = 1.0 / (outputs * outputs) as f64;
    let seeds = (size * size) as f64;

    let mut worst = 0.0f64;
    let mut hist = vec![0u64; outputs];
    for x in 0..size {
        for x2 in 0..size {
            if x == x2 {
                continue;
            }
            hist.iter_mut().for_each(|h| *h = 0);
            for a in 0..size {
                let d = (field.mul_u64(a, x) ^ field.mul_u64(a, x2)) >> shift;
                hist[d as usize] += 1;
            }
            for u in 0..outputs {
                for v in 0..outputs {
                    let count = hist[u ^ v] * per_offset;
                    worst = worst.max((count as f64 / seeds - target).abs());
                }
            }
        }
    }
    Ok(worst)
}
