use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{idx, lit, Real};

/// Even `2π`-periodic function as cosine coefficients `f_0 .. f_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField<T> {
    coeffs: Vec<T>,
}

impl<T: Real> PeriodicField<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a cosine series needs at least the mean");
        Self { coeffs }
    }

    /// Zero series with modes `0..=m`.
    pub fn zeros(m: usize) -> Self {
        Self { coeffs: vec![T::zero(); m + 1] }
    }

    /// `cos(jY)` with modes `0..=m`.
    pub fn cos_mode(m: usize, j: usize) -> Self {
        let mut f = Self::zeros(m);
        f.coeffs[j] = T::one();
        f
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    /// Highest mode index `M`.
    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, y: T) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &c)| acc + c * (idx::<T>(j) * y).cos())
    }

    /// Pad with zeros or truncate to modes `0..=m`.
    pub fn resized(&self, m: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(m + 1, T::zero());
        Self { coeffs: c }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Root-mean-square over one period.
    pub fn rms(&self) -> T {
        let half = lit::<T>(0.5);
        let s = self
            .coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &c)| acc + if j == 0 { c * c } else { half * c * c });
        s.sqrt()
    }

    /// `|f_M|`, the size of the last retained coefficient.
    pub fn tail(&self) -> T {
        self.coeffs[self.modes()].abs()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let m = self.modes().max(other.modes());
        let (a, b) = (self.resized(m), other.resized(m));
        Self { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f(x, y)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn axpy(&self, s: T, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }
}

/// Uniform collocation grid `Y_m = 2πm/N` for products of cosine series.
pub struct PeriodicGrid<T: Real> {
    n: usize,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for PeriodicGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid").field("n", &self.n).finish()
    }
}

impl<T: Real> PeriodicGrid<T> {
    /// Grid able to hold products of up to `degree` series with `m` modes
    /// without aliasing into modes `0..=m`.
    pub fn for_modes(m: usize, degree: usize) -> Result<Self> {
        if m == 0 || degree == 0 {
            return Err(Error::InvalidConfig("periodic grid needs m >= 1 and degree >= 1".into()));
        }
        let need = (degree + 1) * m + 2;
        Self::new(need.next_power_of_two())
    }

    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidConfig(format!("periodic grid needs at least 4 points, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { n, fft: planner.plan_fft_forward(n), ifft: planner.plan_fft_inverse(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> Vec<T> {
        let h = T::TAU() / idx(self.n);
        (0..self.n).map(|m| h * idx(m)).collect()
    }

    /// Samples at the collocation nodes. Modes at or above `N/2` are ignored.
    pub fn synthesize(&self, f: &PeriodicField<T>) -> Vec<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; self.n];
        let half = lit::<T>(0.5);
        for (j, &c) in f.coeffs().iter().enumerate() {
            if j == 0 {
                buf[0] = Complex::new(c, T::zero());
            } else if 2 * j < self.n {
                buf[j] = Complex::new(c * half, T::zero());
                buf[self.n - j] = Complex::new(c * half, T::zero());
            }
        }
        self.ifft.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Cosine coefficients `0..=m` of sampled data.
    pub fn analyze(&self, samples: &[T], m: usize) -> PeriodicField<T> {
        assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft.process(&mut buf);
        let inv = T::one() / idx(self.n);
        let two = lit::<T>(2.0);
        let coeffs = (0..=m)
            .map(|j| {
                if j == 0 {
                    buf[0].re * inv
                } else if 2 * j < self.n {
                    two * buf[j].re * inv
                } else {
                    T::zero()
                }
            })
            .collect();
        PeriodicField::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesize_analyze_round_trip() {
        let f = PeriodicField::new(vec![0.3, -1.0, 0.5, 0.0, 0.125]);
        let g = PeriodicGrid::<f64>::for_modes(4, 2).unwrap();
        let s = g.synthesize(&f);
        for (y, v) in g.nodes().iter().zip(&s) {
            assert!((v - f.eval(*y)).abs() < 1e-14);
        }
        let back = g.analyze(&s, 4);
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn product_of_cosines() {
        // cos²Y = 1/2 + cos(2Y)/2
        let g = PeriodicGrid::<f64>::for_modes(8, 2).unwrap();
        let c = g.synthesize(&PeriodicField::cos_mode(8, 1));
        let sq: Vec<f64> = c.iter().map(|v| v * v).collect();
        let p = g.analyze(&sq, 8);
        assert!((p.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!((p.coeffs()[2] - 0.5).abs() < 1e-15);
        assert!(p.coeffs()[1].abs() < 1e-15);
    }

    #[test]
    fn rms_and_resize() {
        let f = PeriodicField::new(vec![1.0, 2.0]);
        assert!((f.rms() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.resized(3).coeffs(), &[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(f.add(&PeriodicField::cos_mode(2, 2)).coeffs(), &[1.0, 2.0, 1.0]);
    }
}
