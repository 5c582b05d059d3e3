//! Grids, transforms and fields.
//!
//! # Conventions
//!
//! The line `[−L, L)` carries `n` nodes `X_m = −L + 2Lm/n` and the discrete
//! transform `F_k = Σ_m f(X_m) e^{−2πimk/n}`. Index `k` stands for the
//! physical wavenumber `K_k = πk/L` for `k < n/2` and `π(k − n)/L` above.
//! Multipliers only ever see `|K_k|`, so the half-node phase `e^{iKL}` that
//! separates this from the continuous transform never enters.
//!
//! Pointwise products are formed on a grid refined by a factor of two and
//! truncated back to `|k| < n/2`, which removes aliasing from products of up
//! to three band-limited factors. The Nyquist mode is dropped in the process.
//!
//! Periodic fields are even `2π`-periodic functions stored as cosine
//! coefficients, `f(Y) = Σ_{j=0}^{M} f_j cos(jY)`.

mod multiplier;
mod norms;
mod periodic;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{idx, lit, Real};

pub use multiplier::Multiplier;
pub use norms::{conjugated_multiplier, default_q, weighted_norm, NormVariant, Weight};
pub use periodic::{PeriodicField, PeriodicGrid};

/// Uniform grid on `[−L, L)` with cached transform plans.
pub struct LineGrid<T: Real> {
    half_length: T,
    n: usize,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
    fft_fine: Arc<dyn Fft<T>>,
    ifft_fine: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for LineGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineGrid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .finish()
    }
}

impl<T: Real> LineGrid<T> {
    /// Requires `n` a power of two, `n ≥ 64`, and `L ≥ 10`.
    pub fn new(half_length: T, n: usize) -> Result<Arc<Self>> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("grid size must be a power of two >= 64, got {n}")));
        }
        if !(half_length >= lit(10.0)) || !half_length.is_finite() {
            return Err(Error::InvalidConfig(format!("half-length must be >= 10, got {half_length}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            half_length,
            n,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            fft_fine: planner.plan_fft_forward(2 * n),
            ifft_fine: planner.plan_fft_inverse(2 * n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }

    pub fn spacing(&self) -> T {
        lit::<T>(2.0) * self.half_length / idx(self.n)
    }

    /// Wavenumber spacing `π/L`.
    pub fn dk(&self) -> T {
        T::PI() / self.half_length
    }

    pub fn node(&self, m: usize) -> T {
        -self.half_length + self.spacing() * idx(m)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|m| self.node(m)).collect()
    }

    /// Nodes of the doubled grid used for products.
    pub fn fine_nodes(&self) -> Vec<T> {
        let h = self.spacing() / lit(2.0);
        (0..2 * self.n).map(|m| -self.half_length + h * idx(m)).collect()
    }

    /// Signed physical wavenumber of transform index `k`.
    pub fn wavenumber(&self, k: usize) -> T {
        if k < self.n / 2 {
            self.dk() * idx(k)
        } else {
            -self.dk() * idx(self.n - k)
        }
    }

    /// `|K_k|` for every index.
    pub fn abs_wavenumbers(&self) -> Vec<T> {
        (0..self.n).map(|k| self.wavenumber(k).abs()).collect()
    }

    /// Largest resolved wavenumber `πn/(2L)`.
    pub fn nyquist(&self) -> T {
        self.dk() * idx(self.n / 2)
    }

    /// Evaluate an even symbol at `|K_k|`.
    pub fn symbol_table(&self, symbol: impl Fn(T) -> T) -> Vec<T> {
        self.abs_wavenumbers().into_iter().map(symbol).collect()
    }

    /// Index of the node mirroring `m` about the origin.
    pub fn mirror(&self, m: usize) -> usize {
        (self.n - m) % self.n
    }

    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft.process(&mut buf);
        buf
    }

    /// Inverse transform, normalized, real part.
    pub fn inverse(&self, mut spec: Vec<Complex<T>>) -> Vec<T> {
        assert_eq!(spec.len(), self.n);
        self.ifft.process(&mut spec);
        let scale = T::one() / idx(self.n);
        spec.into_iter().map(|c| c.re * scale).collect()
    }

    /// Multiply by a real symbol table.
    pub fn apply_table(&self, values: &[T], table: &[T]) -> Vec<T> {
        let mut spec = self.forward(values);
        for (c, &s) in spec.iter_mut().zip(table) {
            *c = *c * s;
        }
        self.inverse(spec)
    }

    /// `∂^r f` spectrally. The Nyquist mode is dropped for odd `r`.
    pub fn derivative(&self, values: &[T], order: u32) -> Vec<T> {
        if order == 0 {
            return values.to_vec();
        }
        let mut spec = self.forward(values);
        let i = Complex::new(T::zero(), T::one());
        for (k, c) in spec.iter_mut().enumerate() {
            if order % 2 == 1 && k == self.n / 2 {
                *c = Complex::new(T::zero(), T::zero());
                continue;
            }
            let ik = i * self.wavenumber(k);
            *c = *c * ik.powu(order);
        }
        self.inverse(spec)
    }

    /// Band-limited interpolant sampled on the doubled grid.
    pub fn to_fine(&self, spec: &[Complex<T>]) -> Vec<T> {
        let n = self.n;
        let half = n / 2;
        let zero = Complex::new(T::zero(), T::zero());
        let mut pad = vec![zero; 2 * n];
        pad[..half].copy_from_slice(&spec[..half]);
        pad[2 * n - half + 1..].copy_from_slice(&spec[half + 1..]);
        let nyq = spec[half] / lit::<T>(2.0);
        pad[half] = nyq;
        pad[2 * n - half] = nyq;
        self.ifft_fine.process(&mut pad);
        let scale = T::one() / idx(n);
        pad.into_iter().map(|c| c.re * scale).collect()
    }

    /// Transform of doubled-grid samples truncated to `|k| < n/2`.
    pub fn from_fine(&self, fine: &[T]) -> Vec<Complex<T>> {
        let n = self.n;
        let half = n / 2;
        assert_eq!(fine.len(), 2 * n);
        let mut buf: Vec<Complex<T>> = fine.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft_fine.process(&mut buf);
        let zero = Complex::new(T::zero(), T::zero());
        let mut spec = vec![zero; n];
        let h = lit::<T>(0.5);
        for k in 0..half {
            spec[k] = buf[k] * h;
        }
        for k in half + 1..n {
            spec[k] = buf[2 * n - (n - k)] * h;
        }
        spec
    }

    /// Evaluate the band-limited interpolant of `spec` at arbitrary points.
    pub fn interpolate(&self, spec: &[Complex<T>], xs: &[T]) -> Vec<T> {
        let n = self.n;
        let half = n / 2;
        let two = lit::<T>(2.0);
        let scale = T::one() / idx(n);
        xs.iter()
            .map(|&x| {
                let theta = self.dk() * (x + self.half_length);
                let step = Complex::new(theta.cos(), theta.sin());
                let mut phase = Complex::new(T::one(), T::zero());
                let mut acc = spec[0].re;
                for (m, c) in spec.iter().enumerate().take(half).skip(1) {
                    phase = phase * step;
                    if m % 64 == 0 {
                        let a = theta * idx(m);
                        phase = Complex::new(a.cos(), a.sin());
                    }
                    acc = acc + two * (c * phase).re;
                }
                let a = theta * idx(half);
                acc = acc + spec[half].re * a.cos();
                acc * scale
            })
            .collect()
    }
}

/// Real field sampled on a [`LineGrid`].
#[derive(Clone)]
pub struct LineField<T: Real> {
    grid: Arc<LineGrid<T>>,
    values: Vec<T>,
}

impl<T: Real> fmt::Debug for LineField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineField").field("grid", &self.grid).field("len", &self.values.len()).finish()
    }
}

impl<T: Real> LineField<T> {
    pub fn new(grid: Arc<LineGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Incompatible(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<LineGrid<T>>) -> Self {
        Self { values: vec![T::zero(); grid.n()], grid: Arc::clone(grid) }
    }

    pub fn from_fn(grid: &Arc<LineGrid<T>>, f: impl Fn(T) -> T) -> Self {
        Self { values: grid.nodes().into_iter().map(f).collect(), grid: Arc::clone(grid) }
    }

    pub(crate) fn from_raw(grid: &Arc<LineGrid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Arc<LineGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.n() == other.grid.n() && self.grid.half_length() == other.grid.half_length())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Trapezoid (equivalently rectangle, by periodicity) `L²` norm.
    pub fn l2_norm(&self) -> T {
        let s = self.values.iter().fold(T::zero(), |acc, &v| acc + v * v);
        (s * self.grid.spacing()).sqrt()
    }

    /// `∫ f` over the box.
    pub fn integral(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v) * self.grid.spacing()
    }

    /// `max_m |f(X_m) − f(−X_m)|`.
    pub fn symmetry_defect(&self) -> T {
        (0..self.values.len()).fold(T::zero(), |m, i| {
            m.max((self.values[i] - self.values[self.grid.mirror(i)]).abs())
        })
    }

    /// Replace by the even part.
    pub fn symmetrize(&mut self) {
        let half = lit::<T>(0.5);
        let n = self.values.len();
        for i in 1..n / 2 {
            let j = n - i;
            let avg = (self.values[i] + self.values[j]) * half;
            self.values[i] = avg;
            self.values[j] = avg;
        }
    }

    /// `max(|f(−L)|, |f(L − h)|)`, the decay at the box edge.
    pub fn boundary_value(&self) -> T {
        self.values[0].abs().max(self.values[self.values.len() - 1].abs())
    }

    pub fn spectrum(&self) -> Vec<Complex<T>> {
        self.grid.forward(&self.values)
    }

    pub fn derivative(&self, order: u32) -> Self {
        Self::from_raw(&self.grid, self.grid.derivative(&self.values, order))
    }

    pub fn apply_table(&self, table: &[T]) -> Self {
        Self::from_raw(&self.grid, self.grid.apply_table(&self.values, table))
    }

    pub fn interpolate(&self, xs: &[T]) -> Vec<T> {
        self.grid.interpolate(&self.spectrum(), xs)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert!(self.same_grid(other), "fields on different grids");
        Self::from_raw(&self.grid, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + s * b)
    }

    /// Pointwise product without dealiasing.
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Euclidean inner product scaled by the spacing.
    pub fn dot(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            * self.grid.spacing()
    }
}
