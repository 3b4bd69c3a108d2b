//! Finite three-party sources `P_XYZ`, IID sampling, and the entropy
//! quantities used to size tags and keys.
//!
//! All logarithms are base 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` for probability tables.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

pub type Symbol = usize;

/// One of the three correlated variables: Alice's `X`, Bob's `Y`, Eve's `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    X,
    Y,
    Z,
}

impl Coord {
    fn index(self) -> usize {
        match self {
            Coord::X => 0,
            Coord::Y => 1,
            Coord::Z => 2,
        }
    }
}

/// Neumaier-compensated sum.
pub(crate) fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if let Some((index, &value)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !(**p >= 0.0) || !p.is_finite())
    {
        return Err(Error::NegativeProbability { index, value });
    }
    let sum = stable_sum(probs.iter().copied());
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// A probability vector over `0..support_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySupport);
        }
        validate_probs(&probs)?;
        Ok(Distribution { probs })
    }

    /// Uniform over `size` outcomes; `uniform(1 << l)` is the reference `U_l`.
    pub fn uniform(size: usize) -> Self {
        assert!(size > 0);
        Distribution {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Distribution { probs }
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `-log2 max_i p_i`.
pub fn min_entropy(dist: &Distribution) -> f64 {
    let max = dist.probs.iter().copied().fold(0.0, f64::max);
    (-max.log2()).max(0.0)
}

/// Total variation distance `1/2 sum |p_i - q_i|`, which equals the
/// largest gap `Pr[P in W] - Pr[Q in W]` over events `W`.
pub fn statistical_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.support_size() != q.support_size() {
        return Err(Error::SupportMismatch(p.support_size(), q.support_size()));
    }
    Ok(half_l1(&p.probs, &q.probs))
}

pub(crate) fn half_l1(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * stable_sum(p.iter().zip(q).map(|(a, b)| (a - b).abs()))).clamp(0.0, 1.0)
}

/// Joint distribution of one variable against a tuple of others, laid out
/// as `rows` given-values by `cols` target-values.
#[derive(Debug, Clone)]
pub struct PairTable {
    pub rows: usize,
    pub cols: usize,
    pub probs: Vec<f64>,
}

impl PairTable {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.probs[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mass(&self, r: usize) -> f64 {
        self.row(r).iter().sum()
    }

    /// `-log2 sum_r max_c P(c, r)`.
    pub fn avg_cond_min_entropy(&self) -> f64 {
        let guess =
            stable_sum((0..self.rows).map(|r| self.row(r).iter().copied().fold(0.0, f64::max)));
        (-guess.log2()).max(0.0)
    }
}

/// Finite joint distribution `P_XYZ`, stored densely in `(x, y, z)`
/// row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSource {
    sizes: [usize; 3],
    pmf: Vec<f64>,
    label: String,
}

impl JointSource {
    /// Validates a dense table of `|X| * |Y| * |Z|` probabilities.
    pub fn from_table(sizes: [usize; 3], pmf: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "alphabet sizes {sizes:?} must be positive"
            )));
        }
        let cells = sizes.iter().product::<usize>();
        if pmf.len() != cells {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for alphabets {sizes:?} ({cells} cells)",
                pmf.len()
            )));
        }
        validate_probs(&pmf)?;
        Ok(JointSource {
            sizes,
            pmf,
            label: label.into(),
        })
    }

    /// Builds a table from sparse `(x, y, z, p)` cells; unlisted cells are 0.
    pub fn from_cells(sizes: [usize; 3], cells: &[(Symbol, Symbol, Symbol, f64)]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "alphabet sizes {sizes:?} must be positive"
            )));
        }
        let mut pmf = vec![0.0; sizes.iter().product()];
        for &(x, y, z, p) in cells {
            if x >= sizes[0] || y >= sizes[1] || z >= sizes[2] {
                return Err(Error::DimensionMismatch(format!(
                    "cell ({x},{y},{z}) outside alphabets {sizes:?}"
                )));
            }
            pmf[(x * sizes[1] + y) * sizes[2] + z] += p;
        }
        let label = format!("table{}x{}x{}", sizes[0], sizes[1], sizes[2]);
        Self::from_table(sizes, pmf, label)
    }

    /// Uniform beacon bit seen through three independent binary symmetric
    /// channels with crossover probabilities `p_a`, `p_b`, `p_e`.
    pub fn satellite(p_a: f64, p_b: f64, p_e: f64) -> Result<Self> {
        for p in [p_a, p_b, p_e] {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::ProbabilityOutOfRange(p));
            }
        }
        let flip = |out: usize, beacon: usize, p: f64| if out == beacon { 1.0 - p } else { p };
        let mut pmf = Vec::with_capacity(8);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let p = (0..2)
                        .map(|b| 0.5 * flip(x, b, p_a) * flip(y, b, p_b) * flip(z, b, p_e))
                        .sum::<f64>();
                    pmf.push(p);
                }
            }
        }
        Self::from_table([2, 2, 2], pmf, format!("satellite({p_a},{p_b},{p_e})"))
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn alphabet(&self, coord: Coord) -> usize {
        self.sizes[coord.index()]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn prob(&self, x: Symbol, y: Symbol, z: Symbol) -> f64 {
        self.pmf[(x * self.sizes[1] + y) * self.sizes[2] + z]
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Cells in row-major order as `((x, y, z), p)`.
    pub fn cells(&self) -> impl Iterator<Item = ([Symbol; 3], f64)> + '_ {
        let [_, ny, nz] = self.sizes;
        self.pmf
            .iter()
            .enumerate()
            .map(move |(i, &p)| ([i / (ny * nz), (i / nz) % ny, i % nz], p))
    }

    /// SHA-256 over the alphabet sizes and the exact bit patterns of the
    /// probabilities. The label is not bound.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"ikem-source-v1");
        for s in self.sizes {
            h.update((s as u64).to_be_bytes());
        }
        for p in &self.pmf {
            h.update(p.to_bits().to_be_bytes());
        }
        h.finalize().into()
    }

    /// Marginal over the listed coordinates, row-major in the listed order.
    pub fn marginal(&self, coords: &[Coord]) -> Result<Vec<f64>> {
        check_distinct(coords)?;
        let len = coords.iter().map(|c| self.alphabet(*c)).product();
        let mut out = vec![0.0; len];
        for (sym, p) in self.cells() {
            out[self.flat_index(&sym, coords)] += p;
        }
        Ok(out)
    }

    fn flat_index(&self, sym: &[Symbol; 3], coords: &[Coord]) -> usize {
        coords
            .iter()
            .fold(0, |acc, c| acc * self.alphabet(*c) + sym[c.index()])
    }

    /// Joint table of `target` against the tuple `given`.
    pub fn pair_table(&self, target: Coord, given: &[Coord]) -> Result<PairTable> {
        check_distinct(given)?;
        if given.contains(&target) {
            return Err(Error::InvalidCoordinate(format!(
                "target {target:?} also appears among the conditioning coordinates"
            )));
        }
        let cols = self.alphabet(target);
        let rows = given.iter().map(|c| self.alphabet(*c)).product();
        let mut probs = vec![0.0; rows * cols];
        for (sym, p) in self.cells() {
            probs[self.flat_index(&sym, given) * cols + sym[target.index()]] += p;
        }
        Ok(PairTable { rows, cols, probs })
    }

    /// `H~(T | G) = -log2 sum_g max_t P(t, g)`; empty `given` yields the
    /// min-entropy of the marginal.
    pub fn avg_cond_min_entropy(&self, target: Coord, given: &[Coord]) -> Result<f64> {
        Ok(self.pair_table(target, given)?.avg_cond_min_entropy())
    }

    /// Average conditional min-entropy of `n` IID copies; additive in `n`.
    pub fn iid_cond_min_entropy(&self, target: Coord, given: &[Coord], n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(n as f64 * self.avg_cond_min_entropy(target, given)?)
    }

    /// Per-symbol conditional model of `X` given `Y`.
    pub fn x_given_y(&self) -> ConditionalModel {
        let [nx, ny, _] = self.sizes;
        let mut joint = vec![0.0; ny * nx];
        for ([x, y, _], p) in self.cells() {
            joint[y * nx + x] += p;
        }
        let mut surprisal = vec![f64::INFINITY; ny * nx];
        let mut defined = vec![false; ny];
        for y in 0..ny {
            let row = &joint[y * nx..(y + 1) * nx];
            let py: f64 = row.iter().sum();
            if py > 0.0 {
                defined[y] = true;
                for x in 0..nx {
                    let p = row[x] / py;
                    surprisal[y * nx + x] = if p > 0.0 {
                        (-p.log2()).max(0.0)
                    } else {
                        f64::INFINITY
                    };
                }
            }
        }
        ConditionalModel {
            nx,
            surprisal,
            defined,
        }
    }

    /// `sum_i -log2 P(x_i | y_i)`; infinite when some conditional is zero.
    pub fn surprisal(&self, x: &[Symbol], y: &[Symbol]) -> Result<f64> {
        self.x_given_y().surprisal(x, y)
    }

    /// `n` IID draws, a deterministic function of `seed`.
    pub fn sample_n(&self, n: usize, seed: u64) -> Result<SampleTriple> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<SampleTriple> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let sampler = CellSampler::new(self);
        let mut triple = SampleTriple {
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
        };
        for _ in 0..n {
            let [x, y, z] = sampler.draw(rng);
            triple.x.push(x);
            triple.y.push(y);
            triple.z.push(z);
        }
        Ok(triple)
    }
}

fn check_distinct(coords: &[Coord]) -> Result<()> {
    for (i, c) in coords.iter().enumerate() {
        if coords[..i].contains(c) {
            return Err(Error::InvalidCoordinate(format!("{c:?} listed twice")));
        }
    }
    Ok(())
}

struct CellSampler<'a> {
    source: &'a JointSource,
    cumulative: Vec<f64>,
    last_nonzero: usize,
}

impl<'a> CellSampler<'a> {
    fn new(source: &'a JointSource) -> Self {
        let mut acc = 0.0;
        let cumulative = source
            .pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_nonzero = source.pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        CellSampler {
            source,
            cumulative,
            last_nonzero,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> [Symbol; 3] {
        let u: f64 = rng.random();
        let i = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_nonzero);
        let [_, ny, nz] = self.source.sizes;
        [i / (ny * nz), (i / nz) % ny, i % nz]
    }
}

/// Precomputed `-log2 P(x | y)` per symbol pair.
#[derive(Debug, Clone)]
pub struct ConditionalModel {
    nx: usize,
    // indexed [y][x]
    surprisal: Vec<f64>,
    defined: Vec<bool>,
}

impl ConditionalModel {
    pub fn x_alphabet(&self) -> usize {
        self.nx
    }

    pub fn symbol_surprisal(&self, x: Symbol, y: Symbol) -> f64 {
        self.surprisal[y * self.nx + x]
    }

    pub fn check_defined(&self, y: &[Symbol]) -> Result<()> {
        match y
            .iter()
            .position(|&s| s >= self.defined.len() || !self.defined[s])
        {
            Some(position) => Err(Error::UndefinedConditional { position }),
            None => Ok(()),
        }
    }

    pub fn surprisal(&self, x: &[Symbol], y: &[Symbol]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                actual: x.len(),
            });
        }
        self.check_defined(y)?;
        if let Some(&bad) = x.iter().find(|&&s| s >= self.nx) {
            return Err(Error::Format(format!("symbol {bad} outside X alphabet")));
        }
        Ok(x.iter()
            .zip(y)
            .map(|(&a, &b)| self.symbol_surprisal(a, b))
            .sum())
    }
}

/// `n` IID samples `(x_i, y_i, z_i)` for Alice, Bob and Eve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTriple {
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub z: Vec<Symbol>,
}

impl SampleTriple {
    pub fn n(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub x: Symbol,
    pub y: Symbol,
    pub z: Symbol,
    pub p: f64,
}

/// JSON description of a source.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Table {
        alphabets: [usize; 3],
        pmf: Vec<CellSpec>,
    },
    Satellite {
        pa: f64,
        pb: f64,
        pe: f64,
    },
}

impl SourceSpec {
    pub fn build(&self) -> Result<JointSource> {
        match self {
            SourceSpec::Table { alphabets, pmf } => {
                let cells: Vec<_> = pmf.iter().map(|c| (c.x, c.y, c.z, c.p)).collect();
                JointSource::from_cells(*alphabets, &cells)
            }
            SourceSpec::Satellite { pa, pb, pe } => JointSource::satellite(*pa, *pb, *pe),
        }
    }

    pub fn from_json(text: &str) -> Result<JointSource> {
        serde_json::from_str::<SourceSpec>(text)?.build()
    }
}
