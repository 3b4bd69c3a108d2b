//! Indistinguishability games against the iKEM and the hybrid scheme.
//!
//! Adversaries are split into two phases with explicit state, like
//! `A = (A1, A2)`: phase one sees Eve's samples and may query the oracle,
//! phase two sees the challenge and outputs a bit (`true` for "random").

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::exact::tuple_at;
use super::{binomial_se, trial_rng, GameReport};
use crate::bits::Bits;
use crate::dem::{self, Scheme};
use crate::error::{Error, Result};
use crate::hybrid::{he_encrypt, HybridCiphertext};
use crate::ikem::{encap, IkemCiphertext, IkemKey, IkemParams};
use crate::source::{Coord, JointSource, Symbol};

/// Encapsulation oracle `Enc_x()` with a hard query budget.
pub struct EncapOracle<'a> {
    params: &'a IkemParams,
    x: &'a [Symbol],
    rng: &'a mut ChaCha20Rng,
    budget: usize,
    responses: Vec<(IkemCiphertext, IkemKey)>,
}

impl EncapOracle<'_> {
    pub fn query(&mut self) -> Result<(IkemCiphertext, IkemKey)> {
        if self.responses.len() >= self.budget {
            return Err(Error::QueryBudgetExceeded {
                budget: self.budget,
            });
        }
        let response = encap(self.params, self.x, self.rng)?;
        self.responses.push(response.clone());
        Ok(response)
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.responses.len()
    }
}

/// Encryption oracle `HE.Enc_x(m)` with a hard query budget.
pub struct EncryptOracle<'a> {
    params: &'a IkemParams,
    x: &'a [Symbol],
    scheme: Scheme,
    rng: &'a mut ChaCha20Rng,
    budget: usize,
    responses: Vec<(Bits, HybridCiphertext)>,
}

impl EncryptOracle<'_> {
    pub fn query(&mut self, message: &Bits) -> Result<HybridCiphertext> {
        if self.responses.len() >= self.budget {
            return Err(Error::QueryBudgetExceeded {
                budget: self.budget,
            });
        }
        let c = he_encrypt(self.params, self.x, message, self.rng, self.scheme)?;
        self.responses.push((message.clone(), c.clone()));
        Ok(c)
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.responses.len()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

/// What the iKEM adversary sees in phase two.
pub struct ChallengeView<'a> {
    pub z: &'a [Symbol],
    pub oracle_responses: &'a [(IkemCiphertext, IkemKey)],
    pub ciphertext: &'a IkemCiphertext,
    pub key: &'a IkemKey,
    /// Alice's samples, only for adversaries that ask for them.
    pub alice_x: Option<&'a [Symbol]>,
}

/// What the hybrid-encryption adversary sees in phase two.
pub struct HeChallengeView<'a> {
    pub z: &'a [Symbol],
    pub oracle_responses: &'a [(Bits, HybridCiphertext)],
    pub ciphertext: &'a HybridCiphertext,
    pub alice_x: Option<&'a [Symbol]>,
}

/// One round of the iKEM game.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub z: Vec<Symbol>,
    pub oracle_responses: Vec<(IkemCiphertext, IkemKey)>,
    pub challenge: (IkemCiphertext, IkemKey),
    pub hidden_bit: bool,
}

pub trait IkemAdversary {
    type State;

    fn name(&self) -> &str;

    /// Debug adversaries that read Alice's samples return `true`.
    fn requires_alice_input(&self) -> bool {
        false
    }

    fn phase1(
        &mut self,
        z: &[Symbol],
        oracle: &mut EncapOracle<'_>,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self::State>;

    fn phase2(
        &mut self,
        state: Self::State,
        view: &ChallengeView<'_>,
        rng: &mut ChaCha20Rng,
    ) -> Result<bool>;
}

pub trait HeAdversary {
    type State;

    fn name(&self) -> &str;

    fn requires_alice_input(&self) -> bool {
        false
    }

    /// Returns the state and the message pair `(m0, m1)`.
    fn phase1(
        &mut self,
        z: &[Symbol],
        oracle: &mut EncryptOracle<'_>,
        rng: &mut ChaCha20Rng,
    ) -> Result<(Self::State, Bits, Bits)>;

    fn phase2(
        &mut self,
        state: Self::State,
        view: &HeChallengeView<'_>,
        rng: &mut ChaCha20Rng,
    ) -> Result<bool>;
}

/// Plays one round of the iKEM game; returns the transcript and the guess.
pub fn play_ikem_round<A: IkemAdversary>(
    source: &JointSource,
    params: &IkemParams,
    adversary: &mut A,
    q_e: u32,
    game_rng: &mut ChaCha20Rng,
    adv_rng: &mut ChaCha20Rng,
) -> Result<(Transcript, bool)> {
    let triple = source.sample_with(params.n(), game_rng)?;
    let (state, responses) = {
        let mut oracle = EncapOracle {
            params,
            x: &triple.x,
            rng: game_rng,
            budget: q_e as usize,
            responses: Vec::new(),
        };
        let state = adversary.phase1(&triple.z, &mut oracle, adv_rng)?;
        (state, oracle.responses)
    };
    let (c, k0) = encap(params, &triple.x, game_rng)?;
    let hidden_bit: bool = game_rng.random();
    let key = if hidden_bit {
        IkemKey::new(Bits::random(params.ell() as usize, game_rng))
    } else {
        k0
    };
    let view = ChallengeView {
        z: &triple.z,
        oracle_responses: &responses,
        ciphertext: &c,
        key: &key,
        alice_x: adversary.requires_alice_input().then_some(&triple.x[..]),
    };
    let guess = adversary.phase2(state, &view, adv_rng)?;
    Ok((
        Transcript {
            z: triple.z,
            oracle_responses: responses,
            challenge: (c, key),
            hidden_bit,
        },
        guess,
    ))
}

fn game_rngs(seed: u64, trial: u64) -> (ChaCha20Rng, ChaCha20Rng) {
    (trial_rng(seed, 2 * trial), trial_rng(seed, 2 * trial + 1))
}

fn mc_report(game: String, wins: u64, trials: u64, bound: f64, seed: u64) -> GameReport {
    let rate = wins as f64 / trials as f64;
    let advantage = (rate - 0.5).abs();
    GameReport {
        game,
        exact: false,
        trials,
        advantage,
        bound,
        pass: advantage <= bound + 3.0 * binomial_se(rate, trials),
        seed,
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "games need at least one trial".into(),
        ));
    }
    Ok(())
}

/// IND-OT (`q_e = 0`) or IND-`q_e`-CEA game. The bound is `sigma`, or
/// `2 sigma` with oracle access; the run passes when the advantage is
/// within three standard errors of it.
pub fn run_ikem_game<A: IkemAdversary>(
    source: &JointSource,
    params: &IkemParams,
    adversary: &mut A,
    q_e: u32,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    check_trials(trials)?;
    params.check_source(source)?;
    let mut wins = 0;
    for i in 0..trials {
        let (mut game_rng, mut adv_rng) = game_rngs(seed, i);
        let (transcript, guess) =
            play_ikem_round(source, params, adversary, q_e, &mut game_rng, &mut adv_rng)?;
        wins += u64::from(guess == transcript.hidden_bit);
    }
    let bound = if q_e == 0 {
        params.sigma()
    } else {
        2.0 * params.sigma()
    };
    let game = format!(
        "ikem-{}/{}",
        if q_e == 0 { "ot" } else { "cea" },
        adversary.name()
    );
    Ok(mc_report(game, wins, trials, bound, seed))
}

/// IND-OT (`q_e = 0`) or IND-`q_e`-CPA game against hybrid encryption.
/// The bound is the iKEM term plus the DEM term, which is zero for the
/// one-time pad and not measured for the stream scheme.
pub fn run_he_game<A: HeAdversary>(
    source: &JointSource,
    params: &IkemParams,
    adversary: &mut A,
    q_e: u32,
    trials: u64,
    seed: u64,
    scheme: Scheme,
) -> Result<GameReport> {
    check_trials(trials)?;
    params.check_source(source)?;
    let mut wins = 0;
    for i in 0..trials {
        let (mut game_rng, mut adv_rng) = game_rngs(seed, i);
        let triple = source.sample_with(params.n(), &mut game_rng)?;
        let (state, m0, m1, responses) = {
            let mut oracle = EncryptOracle {
                params,
                x: &triple.x,
                scheme,
                rng: &mut game_rng,
                budget: q_e as usize,
                responses: Vec::new(),
            };
            let (state, m0, m1) = adversary.phase1(&triple.z, &mut oracle, &mut adv_rng)?;
            (state, m0, m1, oracle.responses)
        };
        if m0.len() != m1.len() {
            return Err(Error::InvalidParameter(
                "challenge messages differ in length".into(),
            ));
        }
        let hidden_bit: bool = game_rng.random();
        let m = if hidden_bit { &m1 } else { &m0 };
        let c = he_encrypt(params, &triple.x, m, &mut game_rng, scheme)?;
        let view = HeChallengeView {
            z: &triple.z,
            oracle_responses: &responses,
            ciphertext: &c,
            alice_x: adversary.requires_alice_input().then_some(&triple.x[..]),
        };
        let guess = adversary.phase2(state, &view, &mut adv_rng)?;
        wins += u64::from(guess == hidden_bit);
    }
    let kem_term = if q_e == 0 {
        params.sigma()
    } else {
        2.0 * params.sigma()
    };
    let game = format!(
        "he-{}-{scheme}/{}",
        if q_e == 0 { "ot" } else { "cpa" },
        adversary.name()
    );
    Ok(mc_report(game, wins, trials, kem_term, seed))
}

/// All-zeros and all-ones challenge messages sized for the scheme.
fn default_pair(params: &IkemParams, scheme: Scheme) -> (Bits, Bits) {
    let len = match scheme {
        Scheme::Otp => params.ell() as usize,
        Scheme::Stream => dem::STREAM_KEY_BITS,
    };
    (Bits::zero(len), Bits::ones(len))
}

/// Guesses uniformly at random.
#[derive(Debug, Default, Clone)]
pub struct RandomGuess;

impl IkemAdversary for RandomGuess {
    type State = ();

    fn name(&self) -> &str {
        "random"
    }

    fn phase1(&mut self, _: &[Symbol], _: &mut EncapOracle<'_>, _: &mut ChaCha20Rng) -> Result<()> {
        Ok(())
    }

    fn phase2(&mut self, _: (), _: &ChallengeView<'_>, rng: &mut ChaCha20Rng) -> Result<bool> {
        Ok(rng.random())
    }
}

/// Reads Alice's samples and recomputes the key; a debugging adversary.
#[derive(Debug, Clone)]
pub struct Omniscient {
    params: IkemParams,
}

impl Omniscient {
    pub fn new(params: &IkemParams) -> Self {
        Omniscient {
            params: params.clone(),
        }
    }
}

impl IkemAdversary for Omniscient {
    type State = ();

    fn name(&self) -> &str {
        "omniscient"
    }

    fn requires_alice_input(&self) -> bool {
        true
    }

    fn phase1(&mut self, _: &[Symbol], _: &mut EncapOracle<'_>, _: &mut ChaCha20Rng) -> Result<()> {
        Ok(())
    }

    fn phase2(&mut self, _: (), view: &ChallengeView<'_>, _: &mut ChaCha20Rng) -> Result<bool> {
        let x = view
            .alice_x
            .ok_or_else(|| Error::InvalidParameter("omniscient adversary needs x".into()))?;
        let key = self
            .params
            .key_family()
            .hash(&view.ciphertext.s_prime, &self.params.encode(x)?)?;
        Ok(key != *view.key.bits())
    }
}

/// Issues `queries` oracle queries, then guesses at random.
#[derive(Debug, Clone)]
pub struct QueryThenGuess {
    pub queries: usize,
}

impl IkemAdversary for QueryThenGuess {
    type State = ();

    fn name(&self) -> &str {
        "query-then-guess"
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncapOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<()> {
        for _ in 0..self.queries {
            oracle.query()?;
        }
        Ok(())
    }

    fn phase2(&mut self, _: (), _: &ChallengeView<'_>, rng: &mut ChaCha20Rng) -> Result<bool> {
        Ok(rng.random())
    }
}

impl HeAdversary for QueryThenGuess {
    type State = ();

    fn name(&self) -> &str {
        "query-then-guess"
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncryptOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<((), Bits, Bits)> {
        let (m0, m1) = default_pair(oracle.params, oracle.scheme);
        for _ in 0..self.queries {
            oracle.query(&m0)?;
        }
        Ok(((), m0, m1))
    }

    fn phase2(&mut self, _: (), _: &HeChallengeView<'_>, rng: &mut ChaCha20Rng) -> Result<bool> {
        Ok(rng.random())
    }
}

/// Every candidate `x` with its encoding and per-symbol weights
/// `P(x_i, z_i)`, for exact posterior computations.
#[derive(Debug, Clone)]
struct Posterior {
    params: IkemParams,
    candidates: Vec<(Vec<Symbol>, Bits)>,
    // P(x, z) per symbol, indexed [x * nz + z]
    pxz: Vec<f64>,
    nz: usize,
}

/// Largest `|X|^n` the posterior adversaries enumerate.
const POSTERIOR_LIMIT: usize = 1 << 16;

impl Posterior {
    fn new(source: &JointSource, params: &IkemParams) -> Result<Self> {
        params.check_source(source)?;
        let [nx, _, nz] = source.sizes();
        let n = params.n();
        let count = u32::try_from(n)
            .ok()
            .and_then(|e| nx.checked_pow(e))
            .filter(|&c| c <= POSTERIOR_LIMIT)
            .ok_or_else(|| Error::RegimeTooLarge(format!("posterior over {nx}^{n} candidates")))?;
        let candidates = (0..count)
            .map(|i| {
                let x = tuple_at(i, nx, n);
                let enc = params.encode(&x)?;
                Ok((x, enc))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Posterior {
            params: params.clone(),
            candidates,
            pxz: source.marginal(&[Coord::X, Coord::Z])?,
            nz,
        })
    }

    // unnormalized P(x | z) for every candidate
    fn weights(&self, z: &[Symbol]) -> Vec<f64> {
        self.candidates
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(z)
                    .map(|(&a, &b)| self.pxz[a * self.nz + b])
                    .product()
            })
            .collect()
    }

    fn tag(&self, c: &IkemCiphertext, enc: &Bits) -> Result<Bits> {
        self.params.tag_family().hash(&c.s, enc)
    }

    fn key(&self, c: &IkemCiphertext, enc: &Bits) -> Result<Bits> {
        self.params.key_family().hash(&c.s_prime, enc)
    }
}

fn decide(l0: f64, l1: f64, rng: &mut ChaCha20Rng) -> bool {
    if l0 > l1 {
        false
    } else if l1 > l0 {
        true
    } else {
        rng.random()
    }
}

/// Bayes-optimal distinguisher on micro instances: uses every oracle
/// query, conditions on Eve's view, and compares the likelihoods of the
/// challenge under both hidden bits.
#[derive(Debug, Clone)]
pub struct BestGuess {
    posterior: Posterior,
}

impl BestGuess {
    pub fn new(source: &JointSource, params: &IkemParams) -> Result<Self> {
        Ok(BestGuess {
            posterior: Posterior::new(source, params)?,
        })
    }
}

impl IkemAdversary for BestGuess {
    type State = ();

    fn name(&self) -> &str {
        "best-guess"
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncapOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<()> {
        while oracle.remaining() > 0 {
            oracle.query()?;
        }
        Ok(())
    }

    fn phase2(&mut self, _: (), view: &ChallengeView<'_>, rng: &mut ChaCha20Rng) -> Result<bool> {
        let post = &self.posterior;
        let weights = post.weights(view.z);
        let uniform = (-(view.key.len() as f64)).exp2();
        let (mut l0, mut l1) = (0.0, 0.0);
        'candidates: for ((_, enc), w) in post.candidates.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (c, k) in view.oracle_responses {
                if post.tag(c, enc)? != c.g || post.key(c, enc)? != *k.bits() {
                    continue 'candidates;
                }
            }
            if post.tag(view.ciphertext, enc)? != view.ciphertext.g {
                continue;
            }
            if post.key(view.ciphertext, enc)? == *view.key.bits() {
                l0 += w;
            }
            l1 += w * uniform;
        }
        Ok(decide(l0, l1, rng))
    }
}

/// Chooses all-zeros against all-ones and guesses at random.
#[derive(Debug, Default, Clone)]
pub struct HeRandomGuess;

impl HeAdversary for HeRandomGuess {
    type State = ();

    fn name(&self) -> &str {
        "random"
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncryptOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<((), Bits, Bits)> {
        let (m0, m1) = default_pair(oracle.params, oracle.scheme);
        Ok(((), m0, m1))
    }

    fn phase2(&mut self, _: (), _: &HeChallengeView<'_>, rng: &mut ChaCha20Rng) -> Result<bool> {
        Ok(rng.random())
    }
}

fn dem_decrypt(key: &Bits, c: &HybridCiphertext) -> Result<Bits> {
    Ok(match c.c2.scheme {
        Scheme::Otp => dem::otp_decrypt(key, &c.c2)?,
        Scheme::Stream => Bits::from_bytes(&dem::stream_decrypt(key, &c.c2)?),
    })
}

/// Reads Alice's samples, decrypts the challenge and compares with `m0`.
#[derive(Debug, Clone)]
pub struct HeOmniscient {
    params: IkemParams,
}

impl HeOmniscient {
    pub fn new(params: &IkemParams) -> Self {
        HeOmniscient {
            params: params.clone(),
        }
    }
}

impl HeAdversary for HeOmniscient {
    type State = Bits;

    fn name(&self) -> &str {
        "omniscient"
    }

    fn requires_alice_input(&self) -> bool {
        true
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncryptOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<(Bits, Bits, Bits)> {
        let (m0, m1) = default_pair(oracle.params, oracle.scheme);
        Ok((m0.clone(), m0, m1))
    }

    fn phase2(
        &mut self,
        m0: Bits,
        view: &HeChallengeView<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<bool> {
        let x = view
            .alice_x
            .ok_or_else(|| Error::InvalidParameter("omniscient adversary needs x".into()))?;
        let c = view.ciphertext;
        let key = self
            .params
            .key_family()
            .hash(&c.c1.s_prime, &self.params.encode(x)?)?;
        Ok(dem_decrypt(&key, c)? != m0)
    }
}

/// Bayes-optimal message distinguisher on micro instances.
#[derive(Debug, Clone)]
pub struct HeBestGuess {
    posterior: Posterior,
}

impl HeBestGuess {
    pub fn new(source: &JointSource, params: &IkemParams) -> Result<Self> {
        Ok(HeBestGuess {
            posterior: Posterior::new(source, params)?,
        })
    }
}

impl HeAdversary for HeBestGuess {
    type State = (Bits, Bits);

    fn name(&self) -> &str {
        "best-guess"
    }

    fn phase1(
        &mut self,
        _: &[Symbol],
        oracle: &mut EncryptOracle<'_>,
        _: &mut ChaCha20Rng,
    ) -> Result<((Bits, Bits), Bits, Bits)> {
        let (m0, m1) = default_pair(oracle.params, oracle.scheme);
        while oracle.remaining() > 0 {
            oracle.query(&m0)?;
        }
        Ok(((m0.clone(), m1.clone()), m0, m1))
    }

    fn phase2(
        &mut self,
        (m0, m1): (Bits, Bits),
        view: &HeChallengeView<'_>,
        rng: &mut ChaCha20Rng,
    ) -> Result<bool> {
        let post = &self.posterior;
        let weights = post.weights(view.z);
        let (mut l0, mut l1) = (0.0, 0.0);
        'candidates: for ((_, enc), w) in post.candidates.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (m, c) in view.oracle_responses {
                if post.tag(&c.c1, enc)? != c.c1.g || dem_decrypt(&post.key(&c.c1, enc)?, c)? != *m
                {
                    continue 'candidates;
                }
            }
            let c = view.ciphertext;
            if post.tag(&c.c1, enc)? != c.c1.g {
                continue;
            }
            let m = dem_decrypt(&post.key(&c.c1, enc)?, c)?;
            if m == m0 {
                l0 += w;
            }
            if m == m1 {
                l1 += w;
            }
        }
        Ok(decide(l0, l1, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ikem::ParamsBuilder;

    fn micro() -> (JointSource, IkemParams) {
        let src = JointSource::satellite(0.05, 0.05, 0.2).unwrap();
        let p = ParamsBuilder::new(&src, 3, 0.9, 0.9, 0)
            .unwrap()
            .force_t(1)
            .force_ell(2)
            .build()
            .unwrap();
        (src, p)
    }

    #[test]
    fn budget_is_enforced() {
        let (src, p) = micro();
        let mut adv = QueryThenGuess { queries: 2 };
        assert!(run_ikem_game(&src, &p, &mut adv, 2, 10, 1).is_ok());
        assert!(matches!(
            run_ikem_game(&src, &p, &mut adv, 1, 10, 1),
            Err(Error::QueryBudgetExceeded { budget: 1 })
        ));
        assert!(matches!(
            run_he_game(&src, &p, &mut adv, 1, 10, 1, Scheme::Otp),
            Err(Error::QueryBudgetExceeded { budget: 1 })
        ));
    }

    #[test]
    fn omniscient_wins_except_on_key_collisions() {
        let (src, p) = micro();
        let p = p.with_targets(0.9, 0.1);
        let r = run_ikem_game(&src, &p, &mut Omniscient::new(&p), 0, 4000, 3).unwrap();
        // 1/2 - 2^-(ell+1) = 0.375
        assert!((r.advantage - 0.375).abs() < 0.03, "{}", r.advantage);
        assert!(!r.pass);
    }

    #[test]
    fn reports_are_reproducible() {
        let (src, p) = micro();
        let a = run_ikem_game(&src, &p, &mut RandomGuess, 0, 500, 9).unwrap();
        let b = run_ikem_game(&src, &p, &mut RandomGuess, 0, 500, 9).unwrap();
        assert_eq!(a, b);
        let c = run_he_game(
            &src,
            &p,
            &mut HeBestGuess::new(&src, &p).unwrap(),
            1,
            200,
            9,
            Scheme::Otp,
        )
        .unwrap();
        let d = run_he_game(
            &src,
            &p,
            &mut HeBestGuess::new(&src, &p).unwrap(),
            1,
            200,
            9,
            Scheme::Otp,
        )
        .unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn he_omniscient_always_wins() {
        let (src, p) = micro();
        let r = run_he_game(&src, &p, &mut HeOmniscient::new(&p), 0, 300, 4, Scheme::Otp).unwrap();
        assert_eq!(r.advantage, 0.5);
    }
}
