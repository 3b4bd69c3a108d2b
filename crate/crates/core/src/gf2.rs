//! Arithmetic in GF(2^w) for arbitrary `w`.
//!
//! Every width uses one fixed low-weight irreducible modulus: the trinomial
//! `x^w + x^k + 1` with the smallest `k` when one exists, otherwise the
//! pentanomial `x^w + x^k3 + x^k2 + x^k1 + 1` minimizing `k3`, then `k2`,
//! then `k1`. This reproduces the usual published choices, e.g.
//!
//! | w   | modulus                     |
//! |-----|-----------------------------|
//! | 3   | x^3 + x + 1                 |
//! | 4   | x^4 + x + 1                 |
//! | 8   | x^8 + x^4 + x^3 + x + 1     |
//! | 64  | x^64 + x^4 + x^3 + x + 1    |
//! | 128 | x^128 + x^7 + x^2 + x + 1   |
//!
//! `w = 1` is GF(2) itself with modulus `x + 1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bits::Bits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryField {
    degree: usize,
    // exponents of the modulus below x^w, descending; always ends with 0
    low_terms: Vec<usize>,
}

impl BinaryField {
    /// The field of the given width with its canonical modulus.
    pub fn of_width(width: usize) -> Arc<BinaryField> {
        assert!(width >= 1, "field width must be positive");
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BinaryField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(field) = cache.lock().unwrap().get(&width) {
            return field.clone();
        }
        let field = Arc::new(BinaryField {
            degree: width,
            low_terms: find_modulus(width),
        });
        cache.lock().unwrap().insert(width, field.clone());
        field
    }

    pub fn width(&self) -> usize {
        self.degree
    }

    /// Exponents of the modulus with nonzero coefficients, descending.
    pub fn modulus_exponents(&self) -> Vec<usize> {
        std::iter::once(self.degree)
            .chain(self.low_terms.iter().copied())
            .collect()
    }

    /// Product of two field elements of this width.
    pub fn mul(&self, a: &Bits, b: &Bits) -> Bits {
        assert_eq!(a.len(), self.degree);
        assert_eq!(b.len(), self.degree);
        if self.degree <= 64 {
            let p = self.mul_u64(a.to_u64().unwrap(), b.to_u64().unwrap());
            return Bits::from_u64(p, self.degree);
        }
        let mut prod = vec![0u64; 2 * a.limbs().len() + 1];
        for (i, &limb) in a.limbs().iter().enumerate() {
            let mut word = limb;
            while word != 0 {
                let j = word.trailing_zeros() as usize;
                xor_shifted(&mut prod, b.limbs(), 64 * i + j);
                word &= word - 1;
            }
        }
        self.reduce(&mut prod, 2 * self.degree - 1);
        Bits::from_limbs(prod, self.degree)
    }

    /// Product for widths up to 64, on raw integers.
    pub fn mul_u64(&self, a: u64, b: u64) -> u64 {
        debug_assert!(self.degree <= 64);
        let mut p: u128 = 0;
        let mut word = a;
        while word != 0 {
            let j = word.trailing_zeros();
            p ^= (b as u128) << j;
            word &= word - 1;
        }
        let w = self.degree;
        if w == 0 {
            return 0;
        }
        for i in (w..2 * w).rev() {
            if p >> i & 1 == 1 {
                p ^= 1u128 << i;
                for &tau in &self.low_terms {
                    p ^= 1u128 << (i - w + tau);
                }
            }
        }
        p as u64
    }

    fn reduce(&self, poly: &mut [u64], bit_len: usize) {
        reduce_sparse(poly, bit_len, self.degree, &self.low_terms);
    }
}

fn xor_shifted(acc: &mut [u64], src: &[u64], shift: usize) {
    let word = shift / 64;
    let bit = shift % 64;
    for (i, &limb) in src.iter().enumerate() {
        acc[i + word] ^= limb << bit;
        if bit != 0 {
            acc[i + word + 1] ^= limb >> (64 - bit);
        }
    }
}

fn get_bit(poly: &[u64], i: usize) -> bool {
    poly.get(i / 64).is_some_and(|l| l >> (i % 64) & 1 == 1)
}

fn flip_bit(poly: &mut [u64], i: usize) {
    poly[i / 64] ^= 1 << (i % 64);
}

/// Reduces `poly` (degree below `bit_len`) modulo `x^degree + sum x^low_terms`.
fn reduce_sparse(poly: &mut [u64], bit_len: usize, degree: usize, low_terms: &[usize]) {
    for i in (degree..bit_len).rev() {
        if get_bit(poly, i) {
            flip_bit(poly, i);
            for &tau in low_terms {
                flip_bit(poly, i - degree + tau);
            }
        }
    }
}

fn candidates(width: usize) -> impl Iterator<Item = Vec<usize>> {
    let trinomials = (1..width).map(|k| vec![k, 0]);
    let pentanomials = (3..width)
        .flat_map(|k3| (2..k3).flat_map(move |k2| (1..k2).map(move |k1| vec![k3, k2, k1, 0])));
    trinomials.chain(pentanomials)
}

fn find_modulus(width: usize) -> Vec<usize> {
    if width == 1 {
        return vec![0];
    }
    if width == 2 {
        return vec![1, 0];
    }
    candidates(width)
        .find(|low| is_irreducible(width, low))
        .unwrap_or_else(|| panic!("no low-weight irreducible polynomial of degree {width}"))
}

fn square_mod(poly: &[u64], degree: usize, low_terms: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; 2 * poly.len() + 1];
    for (i, &limb) in poly.iter().enumerate() {
        out[2 * i] = spread(limb as u32);
        out[2 * i + 1] = spread((limb >> 32) as u32);
    }
    reduce_sparse(&mut out, 2 * degree - 1, degree, low_terms);
    out.truncate(degree.div_ceil(64));
    out
}

fn spread(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | x << 16) & 0x0000_FFFF_0000_FFFF;
    x = (x | x << 8) & 0x00FF_00FF_00FF_00FF;
    x = (x | x << 4) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | x << 2) & 0x3333_3333_3333_3333;
    x = (x | x << 1) & 0x5555_5555_5555_5555;
    x
}

/// `x^(2^k) mod f` for each `k` in `1..=degree`, returned only at the
/// requested exponents.
fn frobenius_powers(
    degree: usize,
    low_terms: &[usize],
    wanted: &[usize],
) -> HashMap<usize, Vec<u64>> {
    let limbs = degree.div_ceil(64);
    let mut cur = vec![0u64; limbs];
    flip_bit(&mut cur, 1);
    let mut out = HashMap::new();
    let max = wanted.iter().copied().max().unwrap_or(0);
    for k in 1..=max {
        cur = square_mod(&cur, degree, low_terms);
        if wanted.contains(&k) {
            out.insert(k, cur.clone());
        }
    }
    out
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn degree_of(poly: &[u64]) -> Option<usize> {
    poly.iter()
        .enumerate()
        .rev()
        .find(|(_, &l)| l != 0)
        .map(|(i, &l)| 64 * i + 63 - l.leading_zeros() as usize)
}

fn poly_rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let db = degree_of(b).expect("division by zero polynomial");
    while let Some(da) = degree_of(&a) {
        if da < db {
            break;
        }
        let shift = da - db;
        a.resize(a.len().max(b.len() + shift / 64 + 1), 0);
        xor_shifted(&mut a, b, shift);
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    while degree_of(&b).is_some() {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test for `x^degree + sum x^low_terms`.
fn is_irreducible(degree: usize, low_terms: &[usize]) -> bool {
    let factors = prime_factors(degree);
    let mut wanted: Vec<usize> = factors.iter().map(|p| degree / p).collect();
    wanted.push(degree);
    let powers = frobenius_powers(degree, low_terms, &wanted);

    let mut x = vec![0u64; degree.div_ceil(64)];
    flip_bit(&mut x, 1);
    if powers[&degree] != x {
        return false;
    }

    let mut modulus = vec![0u64; (degree + 1).div_ceil(64)];
    flip_bit(&mut modulus, degree);
    for &tau in low_terms {
        flip_bit(&mut modulus, tau);
    }
    factors.iter().all(|p| {
        let mut diff = powers[&(degree / p)].clone();
        flip_bit(&mut diff, 1);
        let g = poly_gcd(modulus.clone(), diff);
        degree_of(&g) == Some(0)
    })
}
