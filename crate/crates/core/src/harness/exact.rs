//! Exact statistical distances by exhaustive enumeration.
//!
//! Two routes are provided. The materialized route builds the full joint
//! distribution of Eve's view, seeds included, and only fits tiny fields.
//! The reduced route enumerates the hash multipliers only: replacing an
//! offset `b` by `b ^ d` XORs the same mask into a hash output in both the
//! real and the reference world, so the distance conditioned on the seeds
//! does not depend on the offsets.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::BinaryField;
use crate::ikem::{enumerate_typical, IkemParams};
use crate::source::{statistical_distance, Distribution, JointSource, Symbol};

/// Cap on `|X|^n` times the enumerated seed space, and on outcome cells.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;
/// Widest field the enumerators accept.
pub const MAX_ENUMERATION_WIDTH: usize = 12;

// `index`-th tuple of `0..base` of length `n`, first position most significant.
pub(crate) fn tuple_at(mut index: usize, base: usize, n: usize) -> Vec<Symbol> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

fn checked_count(base: usize, n: usize) -> Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .filter(|&c| c as u64 <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::RegimeTooLarge(format!("{base}^{n} outcomes per coordinate")))
}

fn pow_sat(base: u128, e: u32) -> u128 {
    base.checked_pow(e).unwrap_or(u128::MAX)
}

fn guard(what: &str, count: u128) -> Result<()> {
    if count > ENUMERATION_LIMIT as u128 {
        return Err(Error::RegimeTooLarge(format!(
            "{what} needs {count} steps; use micro parameters (small n, w <= {MAX_ENUMERATION_WIDTH})"
        )));
    }
    Ok(())
}

/// A micro instance: the field plus the support of the samples.
struct Micro {
    w: usize,
    t: usize,
    ell: usize,
    field: Arc<BinaryField>,
    x_count: usize,
    z_count: usize,
    // (encoded x, y index, z index, probability)
    support: Vec<(u64, usize, usize, f64)>,
}

impl Micro {
    fn new(source: &JointSource, params: &IkemParams, with_y: bool) -> Result<Self> {
        params.check_source(source)?;
        let w = params.field_bits();
        if w > MAX_ENUMERATION_WIDTH {
            return Err(Error::RegimeTooLarge(format!(
                "field width {w} exceeds {MAX_ENUMERATION_WIDTH}; exact checks need micro parameters"
            )));
        }
        let n = params.n();
        let [nx, ny, nz] = source.sizes();
        let x_count = checked_count(nx, n)?;
        let y_count = if with_y { checked_count(ny, n)? } else { 1 };
        let z_count = checked_count(nz, n)?;
        guard(
            "sample support",
            (x_count * y_count) as u128 * z_count as u128,
        )?;

        let mut support = Vec::new();
        for xi in 0..x_count {
            let x = tuple_at(xi, nx, n);
            let enc = params.encode_u64(&x);
            for yi in 0..y_count {
                let y = if with_y {
                    Some(tuple_at(yi, ny, n))
                } else {
                    None
                };
                for zi in 0..z_count {
                    let z = tuple_at(zi, nz, n);
                    let p: f64 = (0..n)
                        .map(|i| match &y {
                            Some(y) => source.prob(x[i], y[i], z[i]),
                            None => (0..ny).map(|yy| source.prob(x[i], yy, z[i])).sum(),
                        })
                        .product();
                    if p > 0.0 {
                        support.push((enc, yi, zi, p));
                    }
                }
            }
        }
        Ok(Micro {
            w,
            t: params.t() as usize,
            ell: params.ell() as usize,
            field: BinaryField::of_width(w),
            x_count,
            z_count,
            support,
        })
    }

    fn field_size(&self) -> usize {
        1 << self.w
    }

    fn hash(&self, a: u64, b: u64, x: u64, m: usize) -> u64 {
        (self.field.mul_u64(a, x) ^ b) >> (self.w - m)
    }

    // per multiplier, the offset-free hash of every support entry
    fn hash_table(&self, m: usize) -> Vec<Vec<u64>> {
        (0..self.field_size() as u64)
            .map(|a| {
                self.support
                    .iter()
                    .map(|s| self.hash(a, 0, s.0, m))
                    .collect()
            })
            .collect()
    }
}

// Outcome table for one seed tuple, reset in time proportional to the
// entries actually written. Cells are grouped into blocks of `block_len`
// whose reference values sum to the block mass.
struct SparseBlocks {
    values: Vec<f64>,
    mass: Vec<f64>,
    touched: Vec<usize>,
    blocks: Vec<usize>,
    block_len: usize,
}

impl SparseBlocks {
    fn new(cells: usize, block_len: usize) -> Self {
        SparseBlocks {
            values: vec![0.0; cells],
            mass: vec![0.0; cells / block_len],
            touched: Vec::new(),
            blocks: Vec::new(),
            block_len,
        }
    }

    fn add(&mut self, idx: usize, p: f64) {
        if self.values[idx] == 0.0 {
            self.touched.push(idx);
        }
        self.values[idx] += p;
        let b = idx / self.block_len;
        if self.mass[b] == 0.0 {
            self.blocks.push(b);
        }
        self.mass[b] += p;
    }

    // L1 distance to the reference, then clears the table. `reference`
    // maps an offset within a block and the block mass to the reference cell.
    fn drain_l1(&mut self, reference: impl Fn(usize, f64) -> f64) -> f64 {
        let mut l1 = 0.0;
        for &idx in &self.touched {
            let m = self.mass[idx / self.block_len];
            let r = reference(idx % self.block_len, m);
            l1 += (self.values[idx] - r).abs() - r;
            self.values[idx] = 0.0;
        }
        for &b in &self.blocks {
            l1 += self.mass[b];
            self.mass[b] = 0.0;
        }
        self.touched.clear();
        self.blocks.clear();
        l1
    }
}

/// Real and reference distributions of Eve's view over a shared outcome
/// index.
#[derive(Debug, Clone)]
pub struct ViewDistributions {
    pub real: Distribution,
    pub ideal: Distribution,
    /// Number of `(sample, seed)` pairs visited.
    pub enumerated: u64,
}

impl ViewDistributions {
    pub fn distance(&self) -> f64 {
        statistical_distance(&self.real, &self.ideal).expect("shared outcome index")
    }
}

// Reference world: the key digit at `stride` is replaced by a uniform value.
fn reference(real: &[f64], stride: usize, ell: usize) -> Vec<f64> {
    let keys = 1usize << ell;
    let block = stride * keys;
    let scale = 1.0 / keys as f64;
    let mut ideal = vec![0.0; real.len()];
    for base in (0..real.len()).step_by(block) {
        for low in 0..stride {
            let mass: f64 = (0..keys).map(|k| real[base + k * stride + low]).sum();
            for k in 0..keys {
                ideal[base + k * stride + low] = mass * scale;
            }
        }
    }
    ideal
}

/// Joint distribution of `(Z, C*, K*)` against `(Z, C*, U)` with every
/// seed enumerated.
///
/// Outcomes are indexed by `z`, then the seeds `(a', b', a, b)`, then the
/// tag `g`, then the key.
pub fn exact_challenge_distribution(
    source: &JointSource,
    params: &IkemParams,
) -> Result<ViewDistributions> {
    let micro = Micro::new(source, params, false)?;
    let size = micro.field_size();
    let (t, ell) = (micro.t, micro.ell);
    let seed_count = pow_sat(size as u128, 4);
    guard(
        "challenge enumeration",
        seed_count.saturating_mul(micro.support.len() as u128),
    )?;
    guard(
        "challenge outcomes",
        seed_count
            .saturating_mul(micro.z_count as u128)
            .saturating_mul(pow_sat(2, (t + ell) as u32)),
    )?;
    let seeds = size.pow(4);

    let weight = 1.0 / seeds as f64;
    let mut real = vec![0.0; (micro.z_count * seeds) << (t + ell)];
    for &(x, _, z, p) in &micro.support {
        let q = p * weight;
        for kp_a in 0..size {
            for kp_b in 0..size {
                let k = micro.hash(kp_a as u64, kp_b as u64, x, ell) as usize;
                for tag_a in 0..size {
                    for tag_b in 0..size {
                        let g = micro.hash(tag_a as u64, tag_b as u64, x, t) as usize;
                        let seed = ((kp_a * size + kp_b) * size + tag_a) * size + tag_b;
                        let idx = (((z * seeds + seed) << t | g) << ell) | k;
                        real[idx] += q;
                    }
                }
            }
        }
    }
    let ideal = reference(&real, 1, ell);
    Ok(ViewDistributions {
        real: Distribution::new(real)?,
        ideal: Distribution::new(ideal)?,
        enumerated: micro.support.len() as u64 * seeds as u64,
    })
}

/// As [`exact_challenge_distribution`] with `q_e` encapsulation-oracle
/// responses `(c_j, k_j)` on the same `x` appended to the view.
///
/// Each response adds its seeds, tag and key as further digits after the
/// challenge key, so `q_e = 0` reproduces the challenge layout.
pub fn cea_transcript_distribution(
    source: &JointSource,
    params: &IkemParams,
    q_e: u32,
) -> Result<ViewDistributions> {
    let micro = Micro::new(source, params, false)?;
    let size = micro.field_size();
    let (t, ell) = (micro.t, micro.ell);
    let encaps = q_e as usize + 1;
    let per_encap = pow_sat(size as u128, 4).saturating_mul(pow_sat(2, (t + ell) as u32));
    let seed_tuples = pow_sat(size as u128, 4 * encaps as u32);
    guard(
        "transcript enumeration",
        seed_tuples.saturating_mul(micro.support.len() as u128),
    )?;
    guard(
        "transcript outcomes",
        pow_sat(per_encap, encaps as u32).saturating_mul(micro.z_count as u128),
    )?;

    let per_encap = per_encap as usize;
    let seeds = size.pow(4);
    let seed_tuples = seed_tuples as usize;
    let oracle_stride = per_encap.pow(q_e);
    let weight = 1.0 / seed_tuples as f64;

    let mut real = vec![0.0; micro.z_count * per_encap * oracle_stride];
    for &(x, _, z, p) in &micro.support {
        let q = p * weight;
        for tuple in 0..seed_tuples {
            // challenge seeds are the most significant digits of `tuple`
            let mut rest = tuple;
            let mut digits = Vec::with_capacity(encaps);
            for _ in 0..encaps {
                digits.push(rest % seeds);
                rest /= seeds;
            }
            digits.reverse();
            let mut idx = z;
            for &seed in &digits {
                let [kp_a, kp_b, tag_a, tag_b] = [
                    seed / size.pow(3),
                    seed / size.pow(2) % size,
                    seed / size % size,
                    seed % size,
                ];
                let k = micro.hash(kp_a as u64, kp_b as u64, x, ell) as usize;
                let g = micro.hash(tag_a as u64, tag_b as u64, x, t) as usize;
                idx = (((idx * seeds + seed) << t | g) << ell) | k;
            }
            real[idx] += q;
        }
    }
    let ideal = reference(&real, oracle_stride, ell);
    Ok(ViewDistributions {
        real: Distribution::new(real)?,
        ideal: Distribution::new(ideal)?,
        enumerated: micro.support.len() as u64 * seed_tuples as u64,
    })
}

/// Exact distance between Eve's real and reference views after `q_e`
/// oracle responses, enumerating multipliers only.
pub fn transcript_distance(
    source: &JointSource,
    params: &IkemParams,
    q_e: u32,
) -> Result<(f64, u64)> {
    let micro = Micro::new(source, params, false)?;
    let size = micro.field_size();
    let (t, ell) = (micro.t, micro.ell);
    let encaps = q_e as usize + 1;
    let tuples = pow_sat(size as u128, 2 * encaps as u32);
    let cells = pow_sat(2, ((t + ell) * encaps) as u32).saturating_mul(micro.z_count as u128);
    guard(
        "reduced transcript enumeration",
        tuples.saturating_mul(micro.x_count as u128),
    )?;
    guard("reduced transcript outcomes", cells)?;

    let tags = micro.hash_table(t);
    let keys = micro.hash_table(ell);
    let inner = size.pow(2 * encaps as u32 - 1);
    let cells = cells as usize;
    let key_count = 1usize << ell;
    let scale = 1.0 / key_count as f64;

    let partial: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|challenge_tag_a| {
            let mut table = SparseBlocks::new(cells, key_count);
            let mut acc = 0.0;
            for rest in 0..inner {
                // digits: challenge key multiplier, then (tag, key) per query
                let mut digits = Vec::with_capacity(2 * encaps);
                let mut r = rest;
                for _ in 0..2 * encaps - 1 {
                    digits.push(r % size);
                    r /= size;
                }
                digits.reverse();
                let challenge_key_a = digits[0];
                for (i, &(_, _, z, p)) in micro.support.iter().enumerate() {
                    let mut oracle = 0usize;
                    for j in 0..q_e as usize {
                        let g_j = tags[digits[1 + 2 * j]][i] as usize;
                        let k_j = keys[digits[2 + 2 * j]][i] as usize;
                        oracle = ((oracle << t | g_j) << ell) | k_j;
                    }
                    let g = tags[challenge_tag_a][i] as usize;
                    let k = keys[challenge_key_a][i] as usize;
                    let idx = ((((z << ((t + ell) * q_e as usize)) | oracle) << t | g) << ell) | k;
                    table.add(idx, p);
                }
                acc += 0.5 * table.drain_l1(|_, mass| mass * scale);
            }
            acc
        })
        .collect();
    let distance = partial.iter().sum::<f64>() / tuples as f64;
    Ok((
        distance.clamp(0.0, 1.0),
        (tuples * micro.support.len() as u128) as u64,
    ))
}

/// `H~(X | Z, S, h_S(X))` for the tag family, averaged over the seed.
pub fn tag_conditioned_min_entropy(source: &JointSource, params: &IkemParams) -> Result<f64> {
    let micro = Micro::new(source, params, false)?;
    let size = micro.field_size();
    guard(
        "tag leakage enumeration",
        size as u128 * micro.support.len() as u128,
    )?;
    let t = micro.t;
    let tags = micro.hash_table(t);
    let cells = micro.z_count << t;
    let mut total = 0.0;
    let mut best = vec![0.0f64; cells];
    for row in &tags {
        best.fill(0.0);
        // max over x of P(x, z) within each (z, g) class; support lists each
        // (x, z) pair once
        for (i, &(_, _, z, p)) in micro.support.iter().enumerate() {
            let cell = z << t | row[i] as usize;
            best[cell] = best[cell].max(p);
        }
        total += best.iter().sum::<f64>();
    }
    Ok(-(total / size as f64).log2())
}

/// `1/2 sqrt(2^(t + ell - h))`, the leftover-hash bound after `t` bits of
/// leakage from a source with `h` bits of average min-entropy.
pub fn lhl_bound(t: u32, ell: u32, h: f64) -> f64 {
    0.5 * ((t as f64 + ell as f64 - h) / 2.0).exp2()
}

/// Exact distance of `(Z, C*, K_A, K_B)` from `(Z, C*, U, U)`, where `K_B`
/// is Bob's decapsulation and `bottom` an extra symbol.
pub fn composability_distance(source: &JointSource, params: &IkemParams) -> Result<(f64, u64)> {
    let micro = Micro::new(source, params, true)?;
    let size = micro.field_size();
    let (t, ell) = (micro.t, micro.ell);
    let tuples = (size * size) as u128;
    guard("composability enumeration", tuples * micro.x_count as u128)?;
    let key_count = 1usize << ell;
    let kb_count = key_count + 1;
    let bottom = key_count;
    let block = key_count * kb_count;
    let cells = (micro.z_count << t) * block;
    guard("composability outcomes", cells as u128)?;

    // candidate lists per y index
    let n = params.n();
    let ny = source.sizes()[1];
    let model = source.x_given_y();
    let mut candidates: Vec<Vec<u64>> = vec![Vec::new(); checked_count(ny, n)?];
    let mut seen = vec![false; candidates.len()];
    for &(_, y, _, _) in &micro.support {
        if !seen[y] {
            seen[y] = true;
            let y_vec = tuple_at(y, ny, n);
            candidates[y] = enumerate_typical(&model, &y_vec, params.nu())?
                .iter()
                .map(|c| params.encode_u64(c))
                .collect();
        }
    }
    const NONE: u64 = u64::MAX;
    const MANY: u64 = u64::MAX - 1;

    let tags = micro.hash_table(t);
    let scale = 1.0 / key_count as f64;
    let partial: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|tag_a| {
            // unique tag match per (y, g)
            let matches: Vec<Vec<u64>> = candidates
                .iter()
                .map(|list| {
                    let mut found = vec![NONE; 1 << t];
                    for &c in list {
                        let g = micro.hash(tag_a as u64, 0, c, t) as usize;
                        found[g] = if found[g] == NONE { c } else { MANY };
                    }
                    found
                })
                .collect();
            let mut table = SparseBlocks::new(cells, block);
            let mut acc = 0.0;
            for key_a in 0..size as u64 {
                for (i, &(x, y, z, p)) in micro.support.iter().enumerate() {
                    let g = tags[tag_a][i] as usize;
                    let ka = micro.hash(key_a, 0, x, ell) as usize;
                    let kb = match matches[y][g] {
                        NONE | MANY => bottom,
                        x_hat => micro.hash(key_a, 0, x_hat, ell) as usize,
                    };
                    table.add(((z << t | g) * key_count + ka) * kb_count + kb, p);
                }
                acc += 0.5
                    * table.drain_l1(|offset, mass| {
                        if offset / kb_count == offset % kb_count {
                            mass * scale
                        } else {
                            0.0
                        }
                    });
            }
            acc
        })
        .collect();
    let distance = partial.iter().sum::<f64>() / tuples as f64;
    Ok((
        distance.clamp(0.0, 1.0),
        (tuples * micro.support.len() as u128) as u64,
    ))
}
