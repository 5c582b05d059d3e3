//! Pseudospectral construction of nanopteron traveling waves in spring-dimer
//! FPUT lattices.
//!
//! A nanopteron is a traveling wave made of an exponentially localized core
//! plus a periodic ripple of tiny amplitude. The crate builds one in the
//! long-wave scaling `h(x) = ε² θ(εx)`, wave speed `c² = c_κ² + ε²`, by
//! writing `θ = σ + a φ^a + η` where
//!
//! * `σ` is the KdV soliton ([`kdv`]),
//! * `φ^a` is an exact periodic traveling wave ([`periodic_solver`]),
//! * `η` is a decaying corrector and `a` the ripple amplitude, both found by
//!   a contraction iteration ([`nanopteron_solver`]).
//!
//! The result can be pushed through a direct simulation of the lattice
//! equations ([`lattice`]).
//!
//! Everything numerical is generic over a [`scalar::Real`] type; the
//! parameter algebra in [`model`] also runs on exact rationals. The aliases
//! below fix the usual choices.

pub mod dispersion;
pub mod error;
pub mod fixed_point;
pub mod io;
pub mod kdv;
pub mod krylov;
pub mod lattice;
pub mod model;
pub mod nanopteron_solver;
pub mod nonlinear;
pub mod periodic_solver;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

/// Double precision parameters.
pub type Params = model::DimerParams<f64>;
/// Exact rational parameters.
pub type ExactParams = model::DimerParams<num_rational::Ratio<i64>>;
/// Double precision symbol set.
pub type Symbols = dispersion::SymbolSet<f64>;
/// Double precision resonance data.
pub type Resonance = dispersion::Resonance<f64>;
/// Double precision line grid.
pub type LineGrid = spectral::LineGrid<f64>;
/// Double precision line field.
pub type LineField = spectral::LineField<f64>;
/// Double precision cosine series.
pub type PeriodicField = spectral::PeriodicField<f64>;
/// Double precision periodic ripple.
pub type PeriodicWave = periodic_solver::PeriodicWave<f64>;
/// Double precision nanopteron unknowns.
pub type NanopteronState = nanopteron_solver::NanopteronState<f64>;
/// Double precision converged nanopteron.
pub type NanopteronSolution = nanopteron_solver::NanopteronSolution<f64>;
/// Double precision lattice initial profile.
pub type WaveProfile = lattice::WaveProfile<f64>;
/// Double precision lattice run.
pub type LatticeTrajectory = lattice::LatticeTrajectory<f64>;
