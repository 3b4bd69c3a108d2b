//! Security and correctness measurements.
//!
//! Exact checks enumerate micro instances (see [`exact`]); games and the
//! correctness estimate are seeded Monte Carlo runs.

mod exact;
mod games;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ikem::{encap, Decapsulated, Decapsulator, IkemParams};
use crate::source::JointSource;

pub use exact::{
    cea_transcript_distribution, composability_distance, exact_challenge_distribution, lhl_bound,
    tag_conditioned_min_entropy, transcript_distance, ViewDistributions, ENUMERATION_LIMIT,
    MAX_ENUMERATION_WIDTH,
};
pub use games::{
    play_ikem_round, run_he_game, run_ikem_game, BestGuess, ChallengeView, EncapOracle,
    EncryptOracle, HeAdversary, HeBestGuess, HeChallengeView, HeOmniscient, HeRandomGuess,
    IkemAdversary, Omniscient, QueryThenGuess, RandomGuess, Transcript,
};

/// Outcome of one measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game: String,
    pub exact: bool,
    /// Monte Carlo trials, or the number of enumerated `(sample, seed)`
    /// pairs for exact reports.
    pub trials: u64,
    /// Adversary advantage, exact distance, or failure rate.
    pub advantage: f64,
    pub bound: f64,
    pub pass: bool,
    pub seed: u64,
}

impl GameReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Generator for trial `index`; each trial gets its own ChaCha stream.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Binomial standard error of a proportion.
pub fn binomial_se(p_hat: f64, trials: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
}

/// Half-width of the Wilson score interval at `z` standard errors.
pub fn wilson_half_width(p_hat: f64, trials: u64, z: f64) -> f64 {
    let n = trials as f64;
    let z2 = z * z;
    z / (1.0 + z2 / n) * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Exact one-time check: distance of `(Z, C*, K*)` from `(Z, C*, U)`
/// against `sigma`.
pub fn ot_bound_check(source: &JointSource, params: &IkemParams) -> Result<GameReport> {
    let (distance, enumerated) = transcript_distance(source, params, 0)?;
    Ok(exact_report(
        "ot-bound",
        distance,
        params.sigma(),
        enumerated,
    ))
}

/// Exact check with `q_e` encapsulation-oracle responses against
/// `2 sigma`, or `sigma` when `q_e = 0`.
pub fn cea_bound_check(source: &JointSource, params: &IkemParams, q_e: u32) -> Result<GameReport> {
    let (distance, enumerated) = transcript_distance(source, params, q_e)?;
    let bound = if q_e == 0 {
        params.sigma()
    } else {
        2.0 * params.sigma()
    };
    Ok(exact_report("cea-bound", distance, bound, enumerated))
}

/// Exact distance of `(Z, C*, K_A, K_B)` from `(Z, C*, U, U)` against
/// `eps + sigma`.
pub fn composability_check(source: &JointSource, params: &IkemParams) -> Result<GameReport> {
    let (distance, enumerated) = composability_distance(source, params)?;
    Ok(exact_report(
        "composability",
        distance,
        params.eps() + params.sigma(),
        enumerated,
    ))
}

fn exact_report(game: &str, distance: f64, bound: f64, enumerated: u64) -> GameReport {
    GameReport {
        game: game.into(),
        exact: true,
        trials: enumerated,
        advantage: distance,
        bound,
        pass: distance <= bound,
        seed: 0,
    }
}

/// Monte Carlo estimate of `Pr[decap(y, c) != k]`; passes when the rate is
/// within three Wilson half-widths of `eps`.
pub fn correctness_mc(
    source: &JointSource,
    params: &IkemParams,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "correctness needs at least 1000 trials, got {trials}"
        )));
    }
    let dec = Decapsulator::new(params, source)?;
    let n = params.n();
    let failures = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut rng = trial_rng(seed, i);
            let triple = source.sample_with(n, &mut rng)?;
            let (c, k) = encap(params, &triple.x, &mut rng)?;
            Ok(u64::from(dec.decap(&triple.y, &c)? != Decapsulated::Key(k)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let rate = failures as f64 / trials as f64;
    let bound = params.eps();
    Ok(GameReport {
        game: "correctness".into(),
        exact: false,
        trials,
        advantage: rate,
        bound,
        pass: rate <= bound + 3.0 * wilson_half_width(rate, trials, 1.0),
        seed,
    })
}
