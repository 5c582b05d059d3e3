use std::fmt;
use std::sync::Arc;

use super::{LineField, PeriodicField};
use crate::scalar::{idx, Real};

/// Fourier multiplier with a real even symbol.
///
/// `Multiplier::scaled(ω)` gives `μ^ω`, the multiplier with symbol `μ̃(ωk)`,
/// which satisfies `μ[f(ω·)] = (μ^ω f)(ω·)`.
#[derive(Clone)]
pub struct Multiplier<T> {
    symbol: Arc<dyn Fn(T) -> T + Send + Sync>,
    scale: T,
}

impl<T: Real> fmt::Debug for Multiplier<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier").field("scale", &self.scale).finish()
    }
}

impl<T: Real> Multiplier<T> {
    pub fn new(symbol: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { symbol: Arc::new(symbol), scale: T::one() }
    }

    pub fn identity() -> Self {
        Self::new(|_| T::one())
    }

    /// `μ^ω`.
    pub fn scaled(&self, omega: T) -> Self {
        Self { symbol: Arc::clone(&self.symbol), scale: self.scale * omega }
    }

    pub fn eval(&self, k: T) -> T {
        (self.symbol)(self.scale * k)
    }

    /// Largest `|μ̃(k) − μ̃(−k)|` over the given sample points.
    pub fn evenness_defect(&self, ks: &[T]) -> T {
        ks.iter().fold(T::zero(), |m, &k| m.max((self.eval(k) - self.eval(-k)).abs()))
    }

    pub fn apply_line(&self, f: &LineField<T>) -> LineField<T> {
        let table = f.grid().symbol_table(|k| self.eval(k));
        f.apply_table(&table)
    }

    /// Action on `f(ω·)`: mode `j` is multiplied by `μ̃(ωj)`.
    pub fn apply_periodic(&self, f: &PeriodicField<T>, omega: T) -> PeriodicField<T> {
        let coeffs =
            f.coeffs().iter().enumerate().map(|(j, &c)| c * self.eval(omega * idx(j))).collect();
        PeriodicField::new(coeffs)
    }

    /// Apply to `f + g(ω·)` part by part.
    pub fn superpose_apply(
        &self,
        f: &LineField<T>,
        g: &PeriodicField<T>,
        omega: T,
    ) -> (LineField<T>, PeriodicField<T>) {
        (self.apply_line(f), self.apply_periodic(g, omega))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::LineGrid;

    #[test]
    fn identity_leaves_fields_alone() {
        let g = LineGrid::new(20.0, 256).unwrap();
        let f = LineField::from_fn(&g, |x: f64| (-x * x).exp());
        let out = Multiplier::identity().apply_line(&f);
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        let p = PeriodicField::new(vec![0.5, 1.0, -0.25]);
        assert_eq!(Multiplier::identity().apply_periodic(&p, 3.0), p);
    }

    #[test]
    fn periodic_single_mode_action() {
        let mu = Multiplier::new(|k: f64| 1.0 + k * k);
        let p = PeriodicField::cos_mode(8, 1);
        let out = mu.apply_periodic(&p, 2.0);
        assert_eq!(out.coeffs()[1], 5.0);
        assert_eq!(mu.scaled(2.0).eval(1.0), 5.0);
    }

    #[test]
    fn projections_on_cosine() {
        // Π₁ keeps mode one, Π₂ removes it.
        let pi1 = Multiplier::new(|k: f64| if (k.abs() - 1.0).abs() < 1e-12 { 1.0 } else { 0.0 });
        let pi2 = Multiplier::new(|k: f64| if (k.abs() - 1.0).abs() < 1e-12 { 0.0 } else { 1.0 });
        let c = PeriodicField::cos_mode(8, 1);
        assert_eq!(pi1.apply_periodic(&c, 1.0), c);
        assert!(pi2.apply_periodic(&c, 1.0).coeffs().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn superposition_matches_resampled_sum() {
        let g = LineGrid::new(8.0 * std::f64::consts::PI, 512).unwrap();
        let omega = 0.75; // = 6 grid wavenumbers, so every harmonic is a grid mode
        let mu = Multiplier::new(|k: f64| 1.0 / (1.0 + 0.3 * k * k));
        let f = LineField::from_fn(&g, |x| (-(x * x) / 4.0).exp());
        let p = PeriodicField::new(vec![0.1, 1.0, 0.2, 0.05]);
        let (lf, lp) = mu.superpose_apply(&f, &p, omega);
        let total = f.add(&LineField::from_fn(&g, |x| p.eval(omega * x)));
        let direct = mu.apply_line(&total);
        for (i, &x) in g.nodes().iter().enumerate() {
            let split = lf.values()[i] + lp.eval(omega * x);
            assert!((split - direct.values()[i]).abs() < 1e-10);
        }
        let (only_f, zero_p) = mu.superpose_apply(&f, &PeriodicField::zeros(3), omega);
        assert_eq!(only_f.values(), mu.apply_line(&f).values());
        assert!(zero_p.is_zero());
    }
}
