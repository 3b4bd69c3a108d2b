//! Operating points `(n, t, ell, nu)` from the correctness and secrecy bounds.
//!
//! * list threshold `nu = 2 H~(X^n | Y^n) / eps`
//! * tag length `t = ceil(nu - log2 eps - 1)` (at least 1)
//! * one-time key bound `ell <= H~(X^n | Z^n) - t + 2 log2 sigma + 2`
//! * with `q_e >= 1` encapsulation queries
//!   `ell <= (2 + 2 log2 sigma + H~(X^n | Z^n)) / (q_e + 1) - t - log2(q_e / sigma)`,
//!   which certifies `2 sigma` indistinguishability.
//!
//! `t` rounds up and `ell` rounds down.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::source::{Coord, JointSource, Symbol};
use crate::uhf::UhfSpec;

const ROUNDING_SLACK: f64 = 1e-9;

fn ceil_tol(v: f64) -> f64 {
    if (v - v.round()).abs() < ROUNDING_SLACK {
        v.round()
    } else {
        v.ceil()
    }
}

fn floor_tol(v: f64) -> f64 {
    if (v - v.round()).abs() < ROUNDING_SLACK {
        v.round()
    } else {
        v.floor()
    }
}

/// `(nu, t)` for a conditional min-entropy `h_xy` of Alice's string given
/// Bob's and failure target `eps`.
pub fn tag_length(h_xy: f64, eps: f64) -> Result<(f64, u32)> {
    check_unit("eps", eps)?;
    let nu = 2.0 * h_xy / eps;
    let t = ceil_tol(nu - eps.log2() - 1.0).max(1.0);
    Ok((nu, t as u32))
}

/// Real-valued upper bound on the key length (before flooring).
pub fn key_length_bound(h_xz: f64, t: u32, sigma: f64, q_e: u32) -> Result<f64> {
    check_unit("sigma", sigma)?;
    let t = t as f64;
    Ok(if q_e == 0 {
        h_xz - t + 2.0 * sigma.log2() + 2.0
    } else {
        let q = q_e as f64;
        (2.0 + 2.0 * sigma.log2() + h_xz) / (q + 1.0) - t - (q / sigma).log2()
    })
}

/// Largest admissible integer key length, or `InfeasibleKeyLength`.
pub fn key_length(h_xz: f64, t: u32, sigma: f64, q_e: u32) -> Result<u32> {
    let bound = key_length_bound(h_xz, t, sigma, q_e)?;
    let ell = floor_tol(bound);
    if ell < 1.0 {
        return Err(Error::InfeasibleKeyLength { bound, t });
    }
    Ok(ell.min(u32::MAX as f64) as u32)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

/// Bits per symbol in the fixed-width encoding of Alice's string.
pub fn symbol_bits(alphabet: usize) -> usize {
    if alphabet <= 1 {
        0
    } else {
        (usize::BITS - (alphabet - 1).leading_zeros()) as usize
    }
}

/// A fully determined operating point bound to one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkemParams {
    n: usize,
    t: u32,
    ell: u32,
    nu: f64,
    eps: f64,
    sigma: f64,
    q_e: u32,
    h_xy: f64,
    h_xz: f64,
    x_alphabet: usize,
    symbol_bits: usize,
    field_bits: usize,
    source_digest: String,
    /// Set when any of `t`, `ell`, `nu` was overridden, so the
    /// correctness/secrecy bounds no longer certify this point.
    forced: bool,
}

/// Honest derivation with optional overrides for stress testing.
#[derive(Debug, Clone)]
pub struct ParamsBuilder {
    n: usize,
    eps: f64,
    sigma: f64,
    q_e: u32,
    h_xy: f64,
    h_xz: f64,
    x_alphabet: usize,
    source_digest: String,
    key_bits: Option<u32>,
    t: Option<u32>,
    ell: Option<u32>,
    nu: Option<f64>,
    field_bits: Option<usize>,
}

impl ParamsBuilder {
    pub fn new(source: &JointSource, n: usize, eps: f64, sigma: f64, q_e: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        check_unit("eps", eps)?;
        check_unit("sigma", sigma)?;
        Ok(ParamsBuilder {
            n,
            eps,
            sigma,
            q_e,
            h_xy: source.iid_cond_min_entropy(Coord::X, &[Coord::Y], n)?,
            h_xz: source.iid_cond_min_entropy(Coord::X, &[Coord::Z], n)?,
            x_alphabet: source.alphabet(Coord::X),
            source_digest: hex::encode(source.digest()),
            key_bits: None,
            t: None,
            ell: None,
            nu: None,
            field_bits: None,
        })
    }

    /// Request a specific key length; fails if it exceeds the bound.
    pub fn key_bits(mut self, ell: u32) -> Self {
        self.key_bits = Some(ell);
        self
    }

    /// Overrides the tag length (marks the result as forced).
    pub fn force_t(mut self, t: u32) -> Self {
        self.t = Some(t);
        self
    }

    /// Overrides the key length (marks the result as forced).
    pub fn force_ell(mut self, ell: u32) -> Self {
        self.ell = Some(ell);
        self
    }

    /// Overrides the list threshold (marks the result as forced).
    pub fn force_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    /// Widens the hash field beyond the minimum needed.
    pub fn field_bits(mut self, w: usize) -> Self {
        self.field_bits = Some(w);
        self
    }

    /// Honest `(nu, t)` for this builder's source and `eps`.
    pub fn honest_tag(&self) -> (f64, u32) {
        tag_length(self.h_xy, self.eps).expect("eps validated")
    }

    pub fn build(self) -> Result<IkemParams> {
        let (honest_nu, honest_t) = self.honest_tag();
        let nu = self.nu.unwrap_or(honest_nu);
        let t = self.t.unwrap_or(honest_t);
        if t == 0 {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        let ell = match self.ell {
            Some(0) => return Err(Error::InvalidParameter("ell must be positive".into())),
            Some(ell) => ell,
            None => {
                let max = key_length(self.h_xz, t, self.sigma, self.q_e)?;
                match self.key_bits {
                    Some(want) if want > max => {
                        return Err(Error::InfeasibleKeyLength {
                            bound: key_length_bound(self.h_xz, t, self.sigma, self.q_e)?,
                            t,
                        })
                    }
                    Some(0) => return Err(Error::InvalidParameter("ell must be positive".into())),
                    Some(want) => want,
                    None => max,
                }
            }
        };
        let symbol_bits = symbol_bits(self.x_alphabet);
        let min_width = (self.n * symbol_bits)
            .max(t as usize)
            .max(ell as usize)
            .max(1);
        let field_bits = match self.field_bits {
            Some(w) if w < min_width => {
                return Err(Error::InvalidParameter(format!(
                    "field width {w} below the required {min_width}"
                )))
            }
            Some(w) => w,
            None => min_width,
        };
        Ok(IkemParams {
            n: self.n,
            t,
            ell,
            nu,
            eps: self.eps,
            sigma: self.sigma,
            q_e: self.q_e,
            h_xy: self.h_xy,
            h_xz: self.h_xz,
            x_alphabet: self.x_alphabet,
            symbol_bits,
            field_bits,
            source_digest: self.source_digest,
            forced: self.t.is_some() || self.ell.is_some() || self.nu.is_some(),
        })
    }
}

/// Derives the maximal-key operating point for `n` samples.
pub fn derive_params(
    source: &JointSource,
    n: usize,
    eps: f64,
    sigma: f64,
    q_e: u32,
) -> Result<IkemParams> {
    ParamsBuilder::new(source, n, eps, sigma, q_e)?.build()
}

impl IkemParams {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn q_e(&self) -> u32 {
        self.q_e
    }

    /// `H~(X^n | Y^n)` of the bound source.
    pub fn h_xy(&self) -> f64 {
        self.h_xy
    }

    /// `H~(X^n | Z^n)` of the bound source.
    pub fn h_xz(&self) -> f64 {
        self.h_xz
    }

    pub fn x_alphabet(&self) -> usize {
        self.x_alphabet
    }

    pub fn symbol_bits(&self) -> usize {
        self.symbol_bits
    }

    /// Width `w` of the hash field; inputs are zero-extended to it.
    pub fn field_bits(&self) -> usize {
        self.field_bits
    }

    pub fn source_digest(&self) -> &str {
        &self.source_digest
    }

    pub fn is_forced(&self) -> bool {
        self.forced
    }

    /// Real-valued key-length bound for this point's `t`, `sigma`, `q_e`;
    /// NaN once the targets were overridden out of range.
    pub fn key_length_bound(&self) -> f64 {
        key_length_bound(self.h_xz, self.t, self.sigma, self.q_e).unwrap_or(f64::NAN)
    }

    /// Same operating point judged against other targets. The result is
    /// marked forced; `t`, `ell` and `nu` are kept.
    pub fn with_targets(&self, eps: f64, sigma: f64) -> IkemParams {
        IkemParams {
            eps,
            sigma,
            forced: true,
            ..self.clone()
        }
    }

    /// Indistinguishability level certified by the bounds: `sigma` for
    /// one-time use, `2 sigma` against `q_e >= 1` encapsulation queries.
    pub fn certified_distance(&self) -> f64 {
        if self.q_e == 0 {
            self.sigma
        } else {
            2.0 * self.sigma
        }
    }

    pub fn tag_family(&self) -> UhfSpec {
        UhfSpec::new(self.field_bits, self.t as usize).expect("t <= field width")
    }

    pub fn key_family(&self) -> UhfSpec {
        UhfSpec::new(self.field_bits, self.ell as usize).expect("ell <= field width")
    }

    /// First 8 bytes of a SHA-256 over the source digest and every value
    /// that affects encapsulation or decapsulation.
    pub fn digest(&self) -> [u8; 8] {
        let mut h = Sha256::new();
        h.update(b"ikem-params-v1");
        h.update(self.source_digest.as_bytes());
        for v in [
            self.n as u64,
            self.x_alphabet as u64,
            self.t as u64,
            self.ell as u64,
            self.field_bits as u64,
            self.symbol_bits as u64,
        ] {
            h.update(v.to_be_bytes());
        }
        h.update(self.nu.to_bits().to_be_bytes());
        let full: [u8; 32] = h.finalize().into();
        full[..8].try_into().unwrap()
    }

    pub fn check_source(&self, source: &JointSource) -> Result<()> {
        if hex::encode(source.digest()) == self.source_digest {
            Ok(())
        } else {
            Err(Error::DigestMismatch)
        }
    }

    /// Fixed-width big-endian encoding of a symbol string, zero-extended
    /// to the field width.
    pub fn encode(&self, x: &[Symbol]) -> Result<Bits> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let sb = self.symbol_bits;
        let mut out = Bits::zero(self.field_bits);
        for (i, &sym) in x.iter().enumerate() {
            if sym >= self.x_alphabet {
                return Err(Error::Format(format!(
                    "symbol {sym} outside alphabet of size {}",
                    self.x_alphabet
                )));
            }
            let base = (self.n - 1 - i) * sb;
            for j in 0..sb {
                if sym >> j & 1 == 1 {
                    out.set(base + j, true);
                }
            }
        }
        Ok(out)
    }

    /// [`IkemParams::encode`] as an integer, for field widths up to 64.
    pub fn encode_u64(&self, x: &[Symbol]) -> u64 {
        debug_assert!(self.field_bits <= 64);
        x.iter().fold(0u64, |acc, &s| {
            if self.symbol_bits == 0 {
                acc
            } else {
                acc << self.symbol_bits | s as u64
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: IkemParams = serde_json::from_str(text)?;
        if p.t == 0
            || p.ell == 0
            || (p.t as usize) > p.field_bits
            || (p.ell as usize) > p.field_bits
        {
            return Err(Error::Format("inconsistent parameter file".into()));
        }
        if p.x_alphabet == 0
            || symbol_bits(p.x_alphabet) != p.symbol_bits
            || p.n * p.symbol_bits > p.field_bits
        {
            return Err(Error::Format(
                "field narrower than the encoded samples".into(),
            ));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_derived_tag_length() {
        let (nu, t) = tag_length(2.0, 0.5).unwrap();
        assert_eq!(nu, 8.0);
        assert_eq!(t, 8);
    }

    #[test]
    fn hand_derived_key_lengths() {
        let sigma = 2f64.powi(-4);
        assert_eq!(key_length(40.0, 8, sigma, 0).unwrap(), 26);
        assert_eq!(key_length(40.0, 8, sigma, 1).unwrap(), 5);
    }

    #[test]
    fn infeasible_key_length() {
        let err = key_length(10.0, 8, 2f64.powi(-4), 0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleKeyLength { t: 8, .. }));
    }

    #[test]
    fn targets_must_be_in_unit_interval() {
        assert!(tag_length(1.0, 0.0).is_err());
        assert!(tag_length(1.0, 1.0).is_err());
        assert!(key_length_bound(1.0, 1, 1.5, 0).is_err());
    }

    #[test]
    fn symbol_widths() {
        assert_eq!(symbol_bits(1), 0);
        assert_eq!(symbol_bits(2), 1);
        assert_eq!(symbol_bits(3), 2);
        assert_eq!(symbol_bits(4), 2);
        assert_eq!(symbol_bits(5), 3);
    }

    #[test]
    fn derive_from_a_source() {
        // |X| = 4 uniform, independent of Y and Z: H~(X|Y) = H~(X|Z) = 2 bits
        let src = JointSource::from_table([4, 1, 1], vec![0.25; 4], "u4").unwrap();
        let p = ParamsBuilder::new(&src, 1, 0.5, 0.5, 0).unwrap();
        assert_eq!(p.honest_tag(), (8.0, 8));
        assert!(matches!(p.build(), Err(Error::InfeasibleKeyLength { .. })));

        // X = Y, Z independent: t is clamped to 1 and every bit is secret from Eve
        let sat = JointSource::satellite(0.0, 0.0, 0.5).unwrap();
        let p = derive_params(&sat, 40, 0.5, 2f64.powi(-4), 0).unwrap();
        assert_eq!(p.t(), 1);
        assert_eq!(p.ell(), 40 - 1 - 8 + 2);
        assert_eq!(p.field_bits(), 40);
        assert!(!p.is_forced());
    }

    #[test]
    fn requested_key_bits() {
        let sat = JointSource::satellite(0.0, 0.0, 0.5).unwrap();
        let p = ParamsBuilder::new(&sat, 40, 0.5, 2f64.powi(-4), 0)
            .unwrap()
            .key_bits(16)
            .build()
            .unwrap();
        assert_eq!(p.ell(), 16);
        assert!(!p.is_forced());
        let err = ParamsBuilder::new(&sat, 40, 0.5, 2f64.powi(-4), 0)
            .unwrap()
            .key_bits(34)
            .build();
        assert!(matches!(err, Err(Error::InfeasibleKeyLength { .. })));
    }

    #[test]
    fn field_width_covers_tag_and_key() {
        let sat = JointSource::satellite(0.05, 0.05, 0.3).unwrap();
        let p = ParamsBuilder::new(&sat, 8, 0.25, 0.5, 0)
            .unwrap()
            .force_ell(1)
            .build()
            .unwrap();
        assert_eq!(p.t(), 11);
        assert_eq!(p.field_bits(), 11);
        assert!(p.is_forced());
    }

    #[test]
    fn encoding_is_big_endian_per_symbol() {
        let src = JointSource::from_table([3, 1, 1], vec![0.5, 0.25, 0.25], "t").unwrap();
        let p = ParamsBuilder::new(&src, 3, 0.9, 0.9, 0)
            .unwrap()
            .force_ell(1)
            .force_t(1)
            .build()
            .unwrap();
        assert_eq!(p.symbol_bits(), 2);
        assert_eq!(p.field_bits(), 6);
        let e = p.encode(&[2, 0, 1]).unwrap();
        assert_eq!(e.to_string(), "100001");
        assert_eq!(p.encode_u64(&[2, 0, 1]), 0b100001);
        assert!(p.encode(&[3, 0, 0]).is_err());
        assert!(p.encode(&[0, 0]).is_err());
    }

    #[test]
    fn digest_tracks_parameters() {
        let sat = JointSource::satellite(0.0, 0.0, 0.5).unwrap();
        let a = derive_params(&sat, 40, 0.5, 2f64.powi(-4), 0).unwrap();
        let b = ParamsBuilder::new(&sat, 40, 0.5, 2f64.powi(-4), 0)
            .unwrap()
            .key_bits(20)
            .build()
            .unwrap();
        assert_ne!(a.digest(), b.digest());
        let back = IkemParams::from_json(&a.to_json()).unwrap();
        assert_eq!(back.digest(), a.digest());
        assert!(a.check_source(&sat).is_ok());
        assert!(matches!(
            a.check_source(&JointSource::satellite(0.0, 0.1, 0.5).unwrap()),
            Err(Error::DigestMismatch)
        ));
    }
}
