use thiserror::Error;

/// Errors raised anywhere in the solver suite.
///
/// Numerical payloads are stored as `f64` regardless of the working scalar so
/// that errors stay `Send + Sync + 'static` and printable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Lattice parameters violate a standing hypothesis (κ > 1, β ≠ 0, β + κ³ ≠ 0, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Grid, solver or run configuration is unusable.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The eigenvector matrix of the linear operator degenerated.
    #[error("eigenvector matrix is singular at k = {k} (|det| = {det:e})")]
    SingularMatrix { k: f64, det: f64 },

    /// The resonance equation has no sign change on the search interval.
    #[error("resonance root not bracketed on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    RootNotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A non-resonant mode of the periodic problem is nearly resonant.
    #[error("near-singular periodic mode {mode}: |xi| = {value:e}")]
    NearSingularMode { mode: usize, value: f64 },

    /// A fixed-point or outer iteration stopped without meeting its tolerance.
    #[error("no convergence after {iterations} iterations (last change {last_change:e}, ratio {ratio})")]
    NoConvergence { iterations: usize, last_change: f64, ratio: f64 },

    /// The solvability functional applied to the correction profile vanished.
    #[error("degenerate solvability condition: |upsilon| = {0:e}")]
    DegenerateSolvability(f64),

    /// The Krylov solve for the Friesecke-Pego operator failed.
    #[error("linear solve failed after {iterations} iterations (relative residual {residual:e})")]
    LinearSolveFailure { iterations: usize, residual: f64 },

    /// Fields living on different grids or with different frequencies were combined.
    #[error("incompatible fields: {0}")]
    Incompatible(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
