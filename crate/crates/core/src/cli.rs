//! Command-line front end: `plan | gen | encap | decap | encrypt | decrypt | verify`.
//!
//! Exit codes: 0 success, 1 usage or format error, 2 infeasible
//! parameters, 3 decapsulation failure (prints `BOTTOM`), 4 enumeration
//! regime too large, 5 verification ran but failed its bound.
//!
//! Every randomized subcommand uses `--seed`, defaulting to
//! [`DEFAULT_SEED`]; `--random-seed` draws one from the OS instead.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::dem::Scheme;
use crate::error::{Error, Result};
use crate::harness::{self, GameReport};
use crate::hybrid::{he_decrypt, he_encrypt_bytes, Decrypted, HybridCiphertext};
use crate::ikem::{decap, encap, Decapsulated, IkemCiphertext, IkemParams, ParamsBuilder};
use crate::source::{Coord, JointSource, SampleTriple, SourceSpec};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_BOTTOM: i32 = 3;
pub const EXIT_REGIME: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "ikem",
    version,
    about = "Key encapsulation and hybrid encryption from correlated samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive parameters for a source and print the operating point.
    Plan(PlanArgs),
    /// Draw the preprocessing samples (x, y, z).
    Gen(GenArgs),
    /// Encapsulate a key from Alice's samples.
    Encap(EncapArgs),
    /// Recover the key from Bob's samples.
    Decap(DecapArgs),
    /// Hybrid-encrypt a file with Alice's samples.
    Encrypt(EncryptArgs),
    /// Decrypt a hybrid ciphertext with Bob's samples.
    Decrypt(DecryptArgs),
    /// Run a correctness or security check and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SeedArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Ignore --seed and draw a seed from the operating system.
    #[arg(long)]
    random_seed: bool,
}

impl SeedArgs {
    fn resolve(&self) -> u64 {
        if self.random_seed {
            rand::random()
        } else {
            self.seed
        }
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long = "n")]
    n: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long = "qe", default_value_t = 0)]
    qe: u32,
    /// Request a specific key length instead of the maximum.
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EncapArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[command(flatten)]
    seed: SeedArgs,
    /// Ciphertext output.
    #[arg(long)]
    out: PathBuf,
    /// Key file output.
    #[arg(long)]
    key: PathBuf,
}

#[derive(Debug, Args)]
struct DecapArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    ciphertext: PathBuf,
    /// Key file output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Otp,
    Stream,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Otp => Scheme::Otp,
            SchemeArg::Stream => Scheme::Stream,
        }
    }
}

#[derive(Debug, Args)]
struct EncryptArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SchemeArg::Stream)]
    scheme: SchemeArg,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecryptArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Correctness,
    OtBound,
    CeaBound,
    HeGame,
    Composability,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Oracle queries; defaults to the value the parameters were planned for.
    #[arg(long = "qe")]
    qe: Option<u32>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Otp)]
    scheme: SchemeArg,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Done,
    Bottom,
    CheckFailed,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Bottom) => {
            let _ = writeln!(stdout, "BOTTOM");
            EXIT_BOTTOM
        }
        Ok(Outcome::CheckFailed) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::InfeasibleKeyLength { .. } => EXIT_INFEASIBLE,
                Error::RegimeTooLarge(_) => EXIT_REGIME,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Plan(a) => plan(a, stdout),
        Command::Gen(a) => gen(a),
        Command::Encap(a) => cmd_encap(a, stderr),
        Command::Decap(a) => cmd_decap(a),
        Command::Encrypt(a) => encrypt(a, stderr),
        Command::Decrypt(a) => decrypt(a),
        Command::Verify(a) => verify(a, stdout),
    }
}

fn read_source(path: &Path) -> Result<JointSource> {
    SourceSpec::from_json(&fs::read_to_string(path)?)
}

fn read_params(path: &Path) -> Result<IkemParams> {
    IkemParams::from_json(&fs::read_to_string(path)?)
}

fn read_samples(path: &Path, params: &IkemParams) -> Result<SampleTriple> {
    let triple: SampleTriple = serde_json::from_str(&fs::read_to_string(path)?)?;
    if triple.x.len() != params.n() || triple.y.len() != params.n() || triple.z.len() != params.n()
    {
        return Err(Error::Format(format!(
            "samples file does not hold {} samples per party",
            params.n()
        )));
    }
    Ok(triple)
}

fn plan(a: PlanArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let source = read_source(&a.source)?;
    let mut builder = ParamsBuilder::new(&source, a.n, a.eps, a.sigma, a.qe)?;
    if let Some(ell) = a.ell {
        builder = builder.key_bits(ell);
    }
    let h_xy = source.iid_cond_min_entropy(Coord::X, &[Coord::Y], a.n)?;
    let h_xz = source.iid_cond_min_entropy(Coord::X, &[Coord::Z], a.n)?;
    let (nu, t) = builder.honest_tag();
    writeln!(stdout, "n            {}", a.n)?;
    writeln!(stdout, "H~(X^n|Y^n)  {h_xy:.4} bits")?;
    writeln!(stdout, "H~(X^n|Z^n)  {h_xz:.4} bits")?;
    writeln!(stdout, "nu           {nu:.4}")?;
    writeln!(stdout, "t            {t}")?;
    let params = builder.build()?;
    writeln!(
        stdout,
        "ell          {} (bound {:.4})",
        params.ell(),
        params.key_length_bound()
    )?;
    writeln!(stdout, "field bits   {}", params.field_bits())?;
    writeln!(
        stdout,
        "certified    eps = {}, distance <= {}",
        params.eps(),
        params.certified_distance()
    )?;
    if let Some(out) = a.out {
        fs::write(out, params.to_json())?;
    }
    Ok(Outcome::Done)
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let source = read_source(&a.source)?;
    let params = read_params(&a.params)?;
    params.check_source(&source)?;
    let triple = source.sample_n(params.n(), a.seed.resolve())?;
    fs::write(&a.out, serde_json::to_string(&triple)?)?;
    let _ = fs::remove_file(uses_path(&a.out));
    Ok(Outcome::Done)
}

fn uses_path(samples: &Path) -> PathBuf {
    let mut name = samples.as_os_str().to_owned();
    name.push(".uses");
    PathBuf::from(name)
}

// Counts encapsulations per samples file and warns past the q_e budget.
fn record_use(samples: &Path, params: &IkemParams, stderr: &mut dyn Write) -> Result<()> {
    let path = uses_path(samples);
    let used: u64 = fs::read_to_string(&path)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
        + 1;
    fs::write(&path, used.to_string())?;
    let allowed = u64::from(params.q_e()) + 1;
    if used > allowed {
        writeln!(
            stderr,
            "warning: these samples have now been used {used} times; the parameters cover {allowed}"
        )?;
    }
    Ok(())
}

fn cmd_encap(a: EncapArgs, stderr: &mut dyn Write) -> Result<Outcome> {
    let params = read_params(&a.params)?;
    let triple = read_samples(&a.samples, &params)?;
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed.resolve());
    let (c, k) = encap(&params, &triple.x, &mut rng)?;
    fs::write(&a.out, c.to_bytes(&params))?;
    fs::write(&a.key, k.to_file_bytes())?;
    record_use(&a.samples, &params, stderr)?;
    Ok(Outcome::Done)
}

fn cmd_decap(a: DecapArgs) -> Result<Outcome> {
    let source = read_source(&a.source)?;
    let params = read_params(&a.params)?;
    let triple = read_samples(&a.samples, &params)?;
    let c = IkemCiphertext::from_bytes(&params, &fs::read(&a.ciphertext)?)?;
    match decap(&params, &source, &triple.y, &c)? {
        Decapsulated::Key(k) => {
            fs::write(&a.out, k.to_file_bytes())?;
            Ok(Outcome::Done)
        }
        Decapsulated::Bottom => Ok(Outcome::Bottom),
    }
}

fn encrypt(a: EncryptArgs, stderr: &mut dyn Write) -> Result<Outcome> {
    let params = read_params(&a.params)?;
    let triple = read_samples(&a.samples, &params)?;
    let message = fs::read(&a.input)?;
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed.resolve());
    let c = he_encrypt_bytes(&params, &triple.x, &message, &mut rng, a.scheme.into())?;
    fs::write(&a.out, c.to_bytes(&params))?;
    record_use(&a.samples, &params, stderr)?;
    Ok(Outcome::Done)
}

fn decrypt(a: DecryptArgs) -> Result<Outcome> {
    let source = read_source(&a.source)?;
    let params = read_params(&a.params)?;
    let triple = read_samples(&a.samples, &params)?;
    let c = HybridCiphertext::from_bytes(&params, &fs::read(&a.input)?)?;
    match he_decrypt(&params, &source, &triple.y, &c)? {
        Decrypted::Message(m) => {
            if m.len() % 8 != 0 {
                return Err(Error::Format("decrypted message is not whole bytes".into()));
            }
            fs::write(&a.out, m.to_be_bytes())?;
            Ok(Outcome::Done)
        }
        Decrypted::Bottom => Ok(Outcome::Bottom),
    }
}

fn verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let source = read_source(&a.source)?;
    let params = read_params(&a.params)?;
    let seed = a.seed.resolve();
    let q_e = a.qe.unwrap_or(params.q_e());
    let report: GameReport = match a.mode {
        Mode::Correctness => harness::correctness_mc(&source, &params, a.trials, seed)?,
        Mode::OtBound => harness::ot_bound_check(&source, &params)?,
        Mode::CeaBound => harness::cea_bound_check(&source, &params, q_e)?,
        Mode::Composability => harness::composability_check(&source, &params)?,
        Mode::HeGame => {
            let mut adversary = harness::HeBestGuess::new(&source, &params)?;
            harness::run_he_game(
                &source,
                &params,
                &mut adversary,
                q_e,
                a.trials,
                seed,
                a.scheme.into(),
            )?
        }
    };
    let json = report.to_json();
    writeln!(stdout, "{json}")?;
    if let Some(out) = a.out {
        fs::write(out, &json)?;
    }
    Ok(if report.pass {
        Outcome::Done
    } else {
        Outcome::CheckFailed
    })
}
