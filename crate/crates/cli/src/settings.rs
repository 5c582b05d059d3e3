//! Defaults, config-file merging and error classification.

use std::fmt;

use nanopteron::io::RunConfig;
use nanopteron::lattice::Integrator;
use nanopteron::nanopteron_solver::{FixedPointForm, TInversion};
use nanopteron::nonlinear::QScaling;
use nanopteron::{Error, Params};

use crate::Common;

/// Every default in one place. Flags override the config file, which
/// overrides these.
///
/// | key          | default |
/// |--------------|---------|
/// | kappa        | 2       |
/// | beta         | 1       |
/// | eps          | 0.1     |
/// | a            | 1e-3    |
/// | half_length  | 60      |
/// | n            | 4096    |
/// | auto_grid    | true    |
/// | tol          | 1e-10   |
/// | max_iter     | 200     |
/// | modes        | 32      |
/// | form         | new     |
/// | inversion    | quotient|
/// | q_scaling    | one-over-kappa |
/// | samples      | 201     |
/// | sites        | 512     |
/// | dt           | 0.02    |
/// | t_final      | 20/c_ε  |
/// | snap_every   | 50      |
/// | integrator   | rk4     |
/// | threads      | 1       |
pub fn defaults() -> RunConfig {
    RunConfig {
        kappa: Some(2.0),
        beta: Some(1.0),
        eps: Some(0.1),
        a: Some(1e-3),
        half_length: Some(60.0),
        n: Some(4096),
        auto_grid: Some(true),
        tol: Some(1e-10),
        max_iter: Some(200),
        modes: Some(32),
        form: Some("new".into()),
        inversion: Some("quotient".into()),
        q_scaling: Some("one-over-kappa".into()),
        samples: Some(201),
        sites: Some(512),
        dt: Some(0.02),
        snap_every: Some(50),
        integrator: Some("rk4".into()),
        threads: Some(1),
        ..RunConfig::default()
    }
}

/// CLI-level failure.
#[derive(Debug)]
pub enum CliError {
    Solver(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(s) => write!(f, "{s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(e) => solver_exit_code(e),
            CliError::Io(_) => 2,
        }
    }
}

pub fn solver_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::Parse(_) | Error::Incompatible(_) => 2,
        Error::SingularMatrix { .. }
        | Error::RootNotBracketed { .. }
        | Error::NearSingularMode { .. }
        | Error::NoConvergence { .. }
        | Error::DegenerateSolvability(_)
        | Error::LinearSolveFailure { .. } => 1,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Defaults, then the file named by `--config`, then `flags`.
pub fn merge(common: &Common, flags: RunConfig) -> CliResult<RunConfig> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        kappa: common.kappa,
        beta: common.beta,
        out_dir: common.out_dir.clone(),
        ..flags
    };
    Ok(defaults().overlay(file).overlay(flags))
}

pub fn params(cfg: &RunConfig) -> CliResult<Params> {
    Ok(Params::quadratic(get(cfg.kappa, "kappa")?, get(cfg.beta, "beta")?)?)
}

pub fn get<T>(v: Option<T>, key: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Solver(Error::InvalidConfig(format!("missing value for {key}"))))
}

pub fn form(cfg: &RunConfig) -> CliResult<FixedPointForm> {
    match cfg.form.as_deref() {
        Some("new") | None => Ok(FixedPointForm::New),
        Some("original") => Ok(FixedPointForm::Original),
        Some(s) => Err(invalid(format!("form must be new or original, got {s:?}"))),
    }
}

pub fn inversion(cfg: &RunConfig) -> CliResult<TInversion> {
    match cfg.inversion.as_deref() {
        Some("quotient") | None => Ok(TInversion::Quotient),
        Some("band-zero") => Ok(TInversion::BandZero),
        Some(s) => Err(invalid(format!("inversion must be quotient or band-zero, got {s:?}"))),
    }
}

pub fn q_scaling(cfg: &RunConfig) -> CliResult<QScaling> {
    match cfg.q_scaling.as_deref() {
        Some("one-over-kappa") | None => Ok(QScaling::OneOverKappa),
        Some("beta-over-kappa") => Ok(QScaling::BetaOverKappa),
        Some(s) => Err(invalid(format!("q_scaling must be one-over-kappa or beta-over-kappa, got {s:?}"))),
    }
}

pub fn integrator(cfg: &RunConfig) -> CliResult<Integrator> {
    match cfg.integrator.as_deref() {
        Some("rk4") | None => Ok(Integrator::Rk4),
        Some("verlet") => Ok(Integrator::Verlet),
        Some(s) => Err(invalid(format!("integrator must be rk4 or verlet, got {s:?}"))),
    }
}

pub fn invalid(msg: String) -> CliError {
    CliError::Solver(Error::InvalidConfig(msg))
}
