//! Flag parsing, angle sources, and the exit-code contract.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ghz_core::{canon_angle, derive_seed, QubitAngles};

/// RNG sub-stream for angle/secret generation (shot batches use streams 1
/// and 2 inside the estimator).
pub const STREAM_ANGLES: u64 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ghz",
    about = "Collective-entanglement simulation: verification, GHZ analysis, sweeps, and secret sharing",
    long_about = None
)]
pub struct Cli {
    /// What to run.
    #[arg(long, value_enum)]
    pub command: Command,

    /// Qubit count; may be omitted when --angles lists them explicitly.
    #[arg(long)]
    pub n: Option<usize>,

    /// Angle source: an explicit radian list "t1:p1,t2:p2,..." (":p" may be
    /// omitted for in-plane states), or a distribution name
    /// "uniform-sphere" | "uniform-real-plane" drawn from --seed.
    #[arg(long)]
    pub angles: Option<String>,

    /// Root seed; all randomness derives from it through named sub-streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of random states exercised per check (verify).
    #[arg(long, default_value_t = 50)]
    pub trials: usize,

    /// Total measurement shots per party (protocol); split into two basis
    /// batches.
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,

    /// Sweep grid resolution along theta (nodes over [0, pi], inclusive).
    #[arg(long, default_value_t = 181)]
    pub grid_theta: usize,

    /// Sweep grid resolution along phi (nodes over [0, 2pi)).
    #[arg(long, default_value_t = 360)]
    pub grid_phi: usize,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; csv is supported by sweep only.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Proposition fidelity, involution, stabilizer, and exponential-route
    /// equivalence on random states.
    Verify,
    /// Build one GHZ basis state and report its verification metrics.
    Ghz,
    /// Expand a separable state over the GHZ basis at optimal projections.
    Expand,
    /// Closed-form maximal GHZ probability landscape over the Bloch sphere.
    Sweep,
    /// End-to-end secret-sharing protocol run.
    Protocol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure carrying the exit-code contract: 1 check failure, 2 usage, 3 I/O.
#[derive(Debug)]
pub enum CliError {
    Check(String),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<ghz_core::Error> for CliError {
    fn from(e: ghz_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Where the angles come from.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleSource {
    Explicit(Vec<(f64, f64)>),
    UniformSphere,
    UniformRealPlane,
}

/// Parse `--angles`: a distribution name or an explicit "t:p" list.
pub fn parse_angle_source(raw: &str) -> Result<AngleSource, CliError> {
    match raw.trim() {
        "uniform-sphere" => return Ok(AngleSource::UniformSphere),
        "uniform-real-plane" => return Ok(AngleSource::UniformRealPlane),
        _ => {}
    }
    let mut pairs = Vec::new();
    for chunk in raw.split(',') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            return Err(CliError::usage("empty entry in --angles list"));
        }
        let (t_str, p_str) = match chunk.split_once(':') {
            Some((t, p)) => (t, p),
            None => (chunk, "0"),
        };
        let theta: f64 = t_str
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad angle {t_str:?} (radians expected)")))?;
        let phi: f64 = p_str
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad angle {p_str:?} (radians expected)")))?;
        if !theta.is_finite() || !phi.is_finite() {
            return Err(CliError::usage("angles must be finite radians"));
        }
        pairs.push((theta, phi));
    }
    Ok(AngleSource::Explicit(pairs))
}

/// The hard register cap, possibly lowered (never raised) by GHZ_MAX_QUBITS.
pub fn effective_max_qubits() -> usize {
    match std::env::var("GHZ_MAX_QUBITS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n.min(ghz_core::MAX_QUBITS),
            Err(_) => ghz_core::MAX_QUBITS,
        },
        Err(_) => ghz_core::MAX_QUBITS,
    }
}

/// Resolve the angle flags into concrete Bloch pairs for `n` qubits.
pub fn resolve_angles(
    cli: &Cli,
    default_source: AngleSource,
    require_real: bool,
) -> Result<(usize, Vec<(f64, f64)>), CliError> {
    let source = match &cli.angles {
        Some(raw) => parse_angle_source(raw)?,
        None => default_source,
    };
    let (n, pairs) = match source {
        AngleSource::Explicit(pairs) => {
            if let Some(n) = cli.n {
                if n != pairs.len() {
                    return Err(CliError::usage(format!(
                        "--n {} disagrees with {} explicit angle entries",
                        n,
                        pairs.len()
                    )));
                }
            }
            (pairs.len(), pairs)
        }
        AngleSource::UniformSphere => {
            let n = cli
                .n
                .ok_or_else(|| CliError::usage("--n is required with a random angle source"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cli.seed, STREAM_ANGLES));
            (n, sphere_draws(n, &mut rng))
        }
        AngleSource::UniformRealPlane => {
            let n = cli
                .n
                .ok_or_else(|| CliError::usage("--n is required with a random angle source"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cli.seed, STREAM_ANGLES));
            (n, real_plane_draws(n, &mut rng))
        }
    };
    if require_real {
        let canon = QubitAngles::new(pairs.clone()).map_err(CliError::from)?;
        if !canon.is_real() {
            return Err(CliError::usage(
                "this command takes in-plane angles only (phi must be 0 or pi)",
            ));
        }
        return Ok((n, canon.pairs().to_vec()));
    }
    Ok((n, pairs))
}

pub fn sphere_draws<R: Rng>(n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            ((1.0 - 2.0 * u).acos(), std::f64::consts::TAU * v)
        })
        .collect()
}

pub fn real_plane_draws<R: Rng>(n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            (
                canon_angle(std::f64::consts::PI * (2.0 * u - 1.0)),
                0.0,
            )
        })
        .collect()
}
