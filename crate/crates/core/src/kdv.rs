//! Leading-order long-wave objects.
//!
//! At `ε = 0` the traveling-wave problem collapses to
//!
//! ```text
//! α_κ σ″ − σ + c_κ² (κ/(κ+1))(β/κ³ + 1) σ² = 0
//! ```
//!
//! for the first diagonal component, solved by `σ(X) = A sech²(X/w)` with
//! `A = (3/(2c_κ²))((κ+1)/κ)(β/κ³+1)⁻¹` and `w = 2√α_κ`.

use std::sync::Arc;

use crate::model::DimerParams;
use crate::scalar::{lit, Real};
use crate::spectral::{LineField, LineGrid};

/// The KdV soliton `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton<T> {
    pub amplitude: T,
    pub width: T,
    alpha: T,
    /// `c_κ²(κ/(κ+1))(β/κ³+1)`.
    quad: T,
}

impl<T: Real> Soliton<T> {
    pub fn new(params: &DimerParams<T>) -> Self {
        let c_sq = params.sound_speed_sq();
        let nl = params.kdv_nonlinearity();
        let alpha = params.alpha();
        Self {
            amplitude: lit::<T>(1.5) / (c_sq * nl),
            width: lit::<T>(2.0) * alpha.sqrt(),
            alpha,
            quad: c_sq * nl,
        }
    }

    pub fn sigma(&self, x: T) -> T {
        let s = T::one() / (x / self.width).cosh();
        self.amplitude * s * s
    }

    pub fn sigma_prime(&self, x: T) -> T {
        let u = x / self.width;
        let s = T::one() / u.cosh();
        -lit::<T>(2.0) * self.amplitude / self.width * s * s * u.tanh()
    }

    pub fn sigma_field(&self, grid: &Arc<LineGrid<T>>) -> LineField<T> {
        LineField::from_fn(grid, |x| self.sigma(x))
    }

    pub fn sigma_prime_field(&self, grid: &Arc<LineGrid<T>>) -> LineField<T> {
        LineField::from_fn(grid, |x| self.sigma_prime(x))
    }

    /// `α_κ f″ − f + c_κ²(κ/(κ+1))(β/κ³+1) f²`, with a spectral second derivative.
    pub fn kdv_residual(&self, f: &LineField<T>) -> LineField<T> {
        let d2 = f.derivative(2);
        d2.zip_map(f, |a, b| self.alpha * a - b + self.quad * b * b)
    }

    /// `(σ/κ, σ)`: leading-order profiles on odd and even sites.
    pub fn leading_profiles(
        &self,
        params: &DimerParams<T>,
        grid: &Arc<LineGrid<T>>,
    ) -> (LineField<T>, LineField<T>) {
        let s = self.sigma_field(grid);
        (s.scale(T::one() / params.kappa()), s)
    }
}

/// Dispersive and nonlinear coefficients of the spring-dimer KdV
/// approximation `∓c_κ⁻¹U_T + d U_XXX + n U U_X = 0`.
pub fn gmwz_coefficients<T: Real>(params: &DimerParams<T>) -> (T, T) {
    (params.kdv_dispersion(), params.kdv_nonlinearity())
}

/// Defect of the traveling-wave reduction of the KdV approximation to the
/// profile equation: the ansatz `U = V(X ± T/(2c_κ))` turns it into
/// `2c_κ²d V″ − V + c_κ² n V² = 0`, so `α_κ` must equal `2c_κ²d`.
pub fn gmwz_reduction_defect<T: Real>(params: &DimerParams<T>) -> T {
    let (d, _) = gmwz_coefficients(params);
    (params.alpha() - lit::<T>(2.0) * params.sound_speed_sq() * d).abs()
}
