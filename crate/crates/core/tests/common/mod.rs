#![allow(dead_code)]

use std::collections::HashMap;

use ikem::ikem::{IkemCiphertext, IkemParams, ParamsBuilder};
use ikem::uhf::UhfSeed;
use ikem::{Bits, JointSource, Symbol};
use rand::Rng;

/// Random table over `sizes`; roughly a fifth of the cells are zero.
pub fn random_source<R: Rng>(rng: &mut R, sizes: [usize; 3]) -> JointSource {
    let cells = sizes.iter().product::<usize>();
    loop {
        let weights: Vec<f64> = (0..cells)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(0.05..1.0)
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            continue;
        }
        let pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        if let Ok(src) = JointSource::from_table(sizes, pmf, "random") {
            return src;
        }
    }
}

/// All tuples of `0..base` of length `n`, lexicographic.
pub fn tuples(base: usize, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..base).map(move |s| {
                    let mut t = prefix.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
    }
    out
}

/// `P(x, y, z)` of `n` IID copies.
pub fn product_prob(src: &JointSource, x: &[Symbol], y: &[Symbol], z: &[Symbol]) -> f64 {
    (0..x.len()).map(|i| src.prob(x[i], y[i], z[i])).product()
}

/// Support of `(x, y, z)` over `n` copies with probabilities.
pub fn support(src: &JointSource, n: usize) -> Vec<(Vec<Symbol>, Vec<Symbol>, Vec<Symbol>, f64)> {
    let [nx, ny, nz] = src.sizes();
    let mut out = Vec::new();
    for x in tuples(nx, n) {
        for y in tuples(ny, n) {
            for z in tuples(nz, n) {
                let p = product_prob(src, &x, &y, &z);
                if p > 0.0 {
                    out.push((x.clone(), y.clone(), z.clone(), p));
                }
            }
        }
    }
    out
}

/// Support of `(x, z)` over `n` copies.
pub fn xz_support(src: &JointSource, n: usize) -> Vec<(Vec<Symbol>, Vec<Symbol>, f64)> {
    let mut acc: HashMap<(Vec<Symbol>, Vec<Symbol>), f64> = HashMap::new();
    for (x, _, z, p) in support(src, n) {
        *acc.entry((x, z)).or_default() += p;
    }
    let mut out: Vec<_> = acc.into_iter().map(|((x, z), p)| (x, z, p)).collect();
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out
}

pub fn all_seeds(width: usize) -> Vec<UhfSeed> {
    let size = 1u64 << width;
    let mut out = Vec::new();
    for a in 0..size {
        for b in 0..size {
            out.push(UhfSeed {
                a: Bits::from_u64(a, width),
                b: Bits::from_u64(b, width),
            });
        }
    }
    out
}

/// Half L1 distance between two sparse distributions.
pub fn sparse_distance<K: std::hash::Hash + Eq + Clone>(
    p: &HashMap<K, f64>,
    q: &HashMap<K, f64>,
) -> f64 {
    let mut total = 0.0;
    for (k, v) in p {
        total += (v - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, v) in q {
        if !p.contains_key(k) {
            total += v.abs();
        }
    }
    0.5 * total
}

type Encap = (Vec<u8>, Vec<u8>, u64, u64);

/// One encapsulation of `x` under explicit seeds: `(s' bytes, s bytes, g, k)`.
pub fn encap_with(params: &IkemParams, x: &[Symbol], s_prime: &UhfSeed, s: &UhfSeed) -> Encap {
    let enc = params.encode(x).unwrap();
    let g = params.tag_family().hash(s, &enc).unwrap();
    let k = params.key_family().hash(s_prime, &enc).unwrap();
    (
        s_prime.to_bytes(),
        s.to_bytes(),
        g.to_u64().unwrap(),
        k.to_u64().unwrap(),
    )
}

/// Brute-force distance of `(Z, C*, K*)` from `(Z, C*, U)`, every seed
/// enumerated through the bit-string hash.
pub fn brute_challenge_distance(src: &JointSource, params: &IkemParams) -> f64 {
    let w = params.field_bits();
    let seeds = all_seeds(w);
    let weight = 1.0 / (seeds.len() * seeds.len()) as f64;
    let keys = 1u64 << params.ell();
    let mut real: HashMap<(Vec<Symbol>, Encap), f64> = HashMap::new();
    let mut view: HashMap<(Vec<Symbol>, Vec<u8>, Vec<u8>, u64), f64> = HashMap::new();
    for (x, z, p) in xz_support(src, params.n()) {
        for sp in &seeds {
            for s in &seeds {
                let e = encap_with(params, &x, sp, s);
                *view
                    .entry((z.clone(), e.0.clone(), e.1.clone(), e.2))
                    .or_default() += p * weight;
                *real.entry((z.clone(), e)).or_default() += p * weight;
            }
        }
    }
    let mut ideal = HashMap::new();
    for ((z, sp, s, g), p) in view {
        for k in 0..keys {
            ideal.insert((z.clone(), (sp.clone(), s.clone(), g, k)), p / keys as f64);
        }
    }
    sparse_distance(&real, &ideal)
}

/// Brute-force transcript distance with one oracle encapsulation of the
/// same `x`.
pub fn brute_one_query_distance(src: &JointSource, params: &IkemParams) -> f64 {
    let w = params.field_bits();
    let seeds = all_seeds(w);
    let count = seeds.len() as u128;
    let weight = 1.0 / (count as f64).powi(2);
    let keys = 1u128 << params.ell();
    let tags = 1u128 << params.t();
    // one encapsulation packed as ((seed' * |S| + seed) * 2^t + g) * 2^ell + k
    let per_encap = count * count * tags * keys;
    let mut zs: Vec<Vec<Symbol>> = Vec::new();
    let mut real: HashMap<u128, f64> = HashMap::new();
    for (x, z, p) in xz_support(src, params.n()) {
        let zi = match zs.iter().position(|v| *v == z) {
            Some(i) => i,
            None => {
                zs.push(z);
                zs.len() - 1
            }
        } as u128;
        let mut encs = Vec::with_capacity((count * count) as usize);
        for (i, sp) in seeds.iter().enumerate() {
            for (j, s) in seeds.iter().enumerate() {
                let (_, _, g, k) = encap_with(params, &x, sp, s);
                encs.push(
                    (((i as u128 * count + j as u128) * tags + g as u128) * keys) + k as u128,
                );
            }
        }
        for &c in &encs {
            for &q in &encs {
                *real
                    .entry((zi * per_encap + c) * per_encap + q)
                    .or_default() += p * weight * weight;
            }
        }
    }
    let mut ideal: HashMap<u128, f64> = HashMap::new();
    for (&key, &p) in &real {
        let q = key % per_encap;
        let c = key / per_encap % per_encap;
        let zi = key / per_encap / per_encap;
        let base = c - c % keys;
        for k in 0..keys {
            *ideal
                .entry((zi * per_encap + base + k) * per_encap + q)
                .or_default() += p / keys as f64;
        }
    }
    sparse_distance(&real, &ideal)
}

/// Brute-force distance of `(Z, C*, K_A, K_B)` from `(Z, C*, U, U)` using
/// the library's decapsulation for `K_B`; `None` stands for bottom.
pub fn brute_composability_distance(src: &JointSource, params: &IkemParams) -> f64 {
    use ikem::ikem::{Decapsulated, Decapsulator};
    let dec = Decapsulator::new(params, src).unwrap();
    let w = params.field_bits();
    let seeds = all_seeds(w);
    let weight = 1.0 / (seeds.len() * seeds.len()) as f64;
    let keys = 1u64 << params.ell();
    type View = (Vec<Symbol>, Vec<u8>, Vec<u8>, u64);
    let mut real: HashMap<(View, u64, Option<u64>), f64> = HashMap::new();
    let mut view: HashMap<View, f64> = HashMap::new();
    for (x, y, z, p) in support(src, params.n()) {
        for sp in &seeds {
            for s in &seeds {
                let e = encap_with(params, &x, sp, s);
                let c = IkemCiphertext {
                    g: Bits::from_u64(e.2, params.t() as usize),
                    s_prime: sp.clone(),
                    s: s.clone(),
                };
                let kb = match dec.decap(&y, &c).unwrap() {
                    Decapsulated::Key(k) => Some(k.bits().to_u64().unwrap()),
                    Decapsulated::Bottom => None,
                };
                let v = (z.clone(), e.0, e.1, e.2);
                *view.entry(v.clone()).or_default() += p * weight;
                *real.entry((v, e.3, kb)).or_default() += p * weight;
            }
        }
    }
    let mut ideal = HashMap::new();
    for (v, p) in view {
        for k in 0..keys {
            ideal.insert((v.clone(), k, Some(k)), p / keys as f64);
        }
    }
    sparse_distance(&real, &ideal)
}

/// Honest parameters, or `None` when the key-length bound is infeasible or
/// the field is wider than `max_width`.
pub fn honest_params(
    src: &JointSource,
    n: usize,
    eps: f64,
    sigma: f64,
    q_e: u32,
    max_width: usize,
) -> Option<IkemParams> {
    let p = ParamsBuilder::new(src, n, eps, sigma, q_e)
        .ok()?
        .build()
        .ok()?;
    (p.field_bits() <= max_width).then_some(p)
}

/// Conditional surprisal `-log2 P(x | y)` summed per symbol, straight from
/// the joint table.
pub fn brute_surprisal(src: &JointSource, x: &[Symbol], y: &[Symbol]) -> f64 {
    let [_, _, nz] = src.sizes();
    let [nx, _, _] = src.sizes();
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let joint: f64 = (0..nz).map(|z| src.prob(a, b, z)).sum();
            let marginal: f64 = (0..nx)
                .flat_map(|xx| (0..nz).map(move |z| (xx, z)))
                .map(|(xx, z)| src.prob(xx, b, z))
                .sum();
            -(joint / marginal).log2()
        })
        .sum()
}

/// `H~(target^n | given^n)` by enumerating the `n`-fold product table.
pub fn brute_iid_entropy(src: &JointSource, n: usize, given_y: bool, given_z: bool) -> f64 {
    let mut best: HashMap<(Vec<Symbol>, Vec<Symbol>), HashMap<Vec<Symbol>, f64>> = HashMap::new();
    for (x, y, z, p) in support(src, n) {
        let key = (
            if given_y { y } else { vec![] },
            if given_z { z } else { vec![] },
        );
        *best.entry(key).or_default().entry(x).or_default() += p;
    }
    let guess: f64 = best
        .values()
        .map(|row| row.values().copied().fold(0.0, f64::max))
        .sum();
    -guess.log2()
}

/// `X` near uniform on `nx` symbols, `Y` a noisy copy (flip rate `noise`),
/// `Z` a leaky copy (revealed with probability `leak`, else uniform).
pub fn channel_source<R: Rng>(
    rng: &mut R,
    nx: usize,
    nz: usize,
    noise: f64,
    leak: f64,
) -> JointSource {
    let px: Vec<f64> = {
        let w: Vec<f64> = (0..nx).map(|_| rng.random_range(0.8..1.2)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    };
    let mut cells = Vec::new();
    for x in 0..nx {
        for y in 0..nx {
            let py = if x == y {
                1.0 - noise
            } else {
                noise / (nx - 1) as f64
            };
            for z in 0..nz {
                let revealed = if nz == nx && x == z { leak } else { 0.0 };
                let pz = revealed + (1.0 - if nz == nx { leak } else { 0.0 }) / nz as f64;
                let p = px[x] * py * pz;
                if p > 0.0 {
                    cells.push((x, y, z, p));
                }
            }
        }
    }
    JointSource::from_cells([nx, nx, nz], &cells).unwrap()
}

/// Seeded micro instances whose parameters come straight from the bounds.
pub fn honest_micro_cases(
    seed: u64,
    count: usize,
    q_e: u32,
    max_width: usize,
) -> Vec<(JointSource, IkemParams)> {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 100_000,
            "generator found only {} instances",
            out.len()
        );
        let nx: usize = rng.random_range(2..=8);
        let nz = if rng.random_bool(0.5) { nx } else { 1 };
        let noise = if rng.random_bool(0.3) {
            0.0
        } else {
            rng.random_range(0.0..0.1)
        };
        let leak = rng.random_range(0.0..0.4);
        let src = channel_source(&mut rng, nx, nz, noise, leak);
        let n = rng.random_range(1..=3);
        let eps = rng.random_range(0.3..0.95);
        let sigma = rng.random_range(0.2..0.95);
        if let Some(p) = honest_params(&src, n, eps, sigma, q_e, max_width) {
            out.push((src, p));
        }
    }
    out
}
