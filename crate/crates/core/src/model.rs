//! Lattice parameters, spring forces and the long-wave constants derived from them.
//!
//! The physical lattice has identical masses `m` joined by alternating springs
//!
//! ```text
//! F_j(r) = κ_j r + β_j r² + r³ N̄_j(r),   j odd -> spring 1, j even -> spring 2
//! ```
//!
//! and is reduced to two dimensionless ratios `κ = κ₁/κ₂ > 1`, `β = β₁/β₂`
//! plus rescaled cubic remainders `N_j(r) = (a₁²/κ₂) N̄_j(a₁ r)` with
//! `a₁ = κ₂/β₂`. Remainders are polynomials, so the re-expansion is done on
//! coefficients and stays exact for rational scalars.

use crate::error::{Error, Result};
use crate::scalar::{int, Field, Real};

/// Polynomial with ascending coefficients `c₀ + c₁ r + c₂ r² + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Field> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, r: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r.clone() + c.clone())
    }

    /// Coefficients of `p(s·r)`.
    pub fn compose_scale(&self, s: &T) -> Self {
        let mut power = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c.clone() * power.clone();
                power = power.clone() * s.clone();
                out
            })
            .collect();
        Self::new(coeffs)
    }

    /// Coefficients of `f·p(r)`.
    pub fn scale(&self, f: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * f.clone()).collect())
    }

    /// `∫₀^r s^shift p(s) ds`, returned as a polynomial in `r`.
    pub fn integrate_shifted(&self, shift: usize) -> Self {
        let mut coeffs = vec![T::zero(); shift + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            let power = (i + shift + 1) as i64;
            coeffs.push(c.clone() / int(power));
        }
        Self::new(coeffs)
    }
}

/// Which spring of the dimer a site carries.
///
/// Site `j` stretches spring 1 (linear coefficient κ) when `j` is odd and
/// spring 2 (linear coefficient 1) when `j` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spring {
    Odd,
    Even,
}

impl Spring {
    pub fn of_site(j: i64) -> Self {
        if j.rem_euclid(2) == 1 {
            Spring::Odd
        } else {
            Spring::Even
        }
    }
}

/// Dimensional spring data.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSprings<T> {
    pub mass: T,
    pub kappa1: T,
    pub kappa2: T,
    pub beta1: T,
    pub beta2: T,
    pub remainder1: Polynomial<T>,
    pub remainder2: Polynomial<T>,
}

impl<T: Field> PhysicalSprings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > T::zero()) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {:?}", self.mass)));
        }
        if !(self.kappa2 > T::zero()) {
            return Err(Error::InvalidParams(format!("kappa2 must be positive, got {:?}", self.kappa2)));
        }
        if !(self.kappa1 > self.kappa2) {
            return Err(Error::InvalidParams(format!(
                "need kappa1 > kappa2, got {:?} <= {:?}",
                self.kappa1, self.kappa2
            )));
        }
        if self.beta1.is_zero() || self.beta2.is_zero() {
            return Err(Error::InvalidParams("quadratic coefficients must be nonzero".into()));
        }
        Ok(())
    }
}

/// Dimensionless dimer parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DimerParams<T> {
    kappa: T,
    beta: T,
    n1: Polynomial<T>,
    n2: Polynomial<T>,
}

impl<T: Field> DimerParams<T> {
    /// Validated constructor: κ > 1, β ≠ 0 and β + κ³ ≠ 0.
    pub fn new(kappa: T, beta: T, n1: Polynomial<T>, n2: Polynomial<T>) -> Result<Self> {
        if !(kappa > T::one()) {
            return Err(Error::InvalidParams(format!("kappa must exceed 1, got {kappa:?}")));
        }
        if beta.is_zero() {
            return Err(Error::InvalidParams("beta must be nonzero".into()));
        }
        let cube = kappa.clone() * kappa.clone() * kappa.clone();
        if (beta.clone() + cube).is_zero() {
            return Err(Error::InvalidParams(format!(
                "beta + kappa^3 = 0 (kappa = {kappa:?}, beta = {beta:?}); the KdV limit degenerates"
            )));
        }
        Ok(Self { kappa, beta, n1, n2 })
    }

    /// Purely quadratic springs.
    pub fn quadratic(kappa: T, beta: T) -> Result<Self> {
        Self::new(kappa, beta, Polynomial::zero(), Polynomial::zero())
    }

    pub fn kappa(&self) -> T {
        self.kappa.clone()
    }

    pub fn beta(&self) -> T {
        self.beta.clone()
    }

    pub fn remainder(&self, spring: Spring) -> &Polynomial<T> {
        match spring {
            Spring::Odd => &self.n1,
            Spring::Even => &self.n2,
        }
    }

    /// `F(r) = k r + b r² + r³ N(r)` for the chosen spring.
    pub fn force(&self, spring: Spring, r: &T) -> T {
        let (k, b) = self.linear_quadratic(spring);
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        k * r.clone() + b * r2 + r3 * self.remainder(spring).eval(r)
    }

    /// Spring potential `V(r) = ∫₀^r F`.
    pub fn potential(&self, spring: Spring, r: &T) -> T {
        let (k, b) = self.linear_quadratic(spring);
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let tail = self.remainder(spring).integrate_shifted(3).eval(r);
        k * r2 / int(2) + b * r3 / int(3) + tail
    }

    fn linear_quadratic(&self, spring: Spring) -> (T, T) {
        match spring {
            Spring::Odd => (self.kappa.clone(), self.beta.clone()),
            Spring::Even => (T::one(), T::one()),
        }
    }

    /// `c_κ² = 2κ/(1+κ)`.
    pub fn sound_speed_sq(&self) -> T {
        int::<T>(2) * self.kappa.clone() / (T::one() + self.kappa.clone())
    }

    /// `α_κ = (c_κ²/3)(1 − κ + κ²)/(1 + κ)²`.
    pub fn alpha(&self) -> T {
        let k = self.kappa.clone();
        let one_plus = T::one() + k.clone();
        self.sound_speed_sq() / int(3) * (T::one() - k.clone() + k.clone() * k)
            / (one_plus.clone() * one_plus)
    }

    /// `(κ/(κ+1))(β/κ³ + 1)`, the coefficient of `θ²` in the leading-order
    /// nonlinearity.
    pub fn kdv_nonlinearity(&self) -> T {
        let k = self.kappa.clone();
        let cube = k.clone() * k.clone() * k.clone();
        k.clone() / (k + T::one()) * (self.beta.clone() / cube + T::one())
    }

    /// `(1/6)(1 − κ + κ²)/(1 + κ)²`, the dispersive coefficient of the
    /// spring-dimer KdV approximation.
    pub fn kdv_dispersion(&self) -> T {
        let k = self.kappa.clone();
        let one_plus = T::one() + k.clone();
        (T::one() - k.clone() + k.clone() * k) / (int::<T>(6) * one_plus.clone() * one_plus)
    }
}

impl<T: Real> DimerParams<T> {
    /// `c_κ = √(2κ/(1+κ))`.
    pub fn sound_speed(&self) -> T {
        self.sound_speed_sq().sqrt()
    }

    /// `(c_κ, α_κ)`.
    pub fn derived_constants(&self) -> (T, T) {
        (self.sound_speed(), self.alpha())
    }
}

/// Reduce physical spring data to the dimensionless dimer parameters.
pub fn nondimensionalize<T: Field>(p: &PhysicalSprings<T>) -> Result<DimerParams<T>> {
    p.validate()?;
    let kappa = p.kappa1.clone() / p.kappa2.clone();
    let beta = p.beta1.clone() / p.beta2.clone();
    let a1 = p.kappa2.clone() / p.beta2.clone();
    let prefactor = a1.clone() * a1.clone() / p.kappa2.clone();
    let rescale = |n: &Polynomial<T>| n.compose_scale(&a1).scale(&prefactor);
    DimerParams::new(kappa, beta, rescale(&p.remainder1), rescale(&p.remainder2))
}
