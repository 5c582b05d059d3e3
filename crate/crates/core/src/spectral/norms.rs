//! Exponentially weighted Sobolev norms and conjugation of multipliers by
//! the weight `cosh(q·)`.

use super::{LineField, Multiplier};
use crate::scalar::{idx, lit, Real};

/// Weight function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    /// `cosh(qX)`.
    CoshOfQx,
    /// `cosh(X)^q`.
    CoshToQ,
}

/// One of the four equivalent norms on `H_q^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormVariant {
    /// `‖w f‖_{H^r}`.
    Full(Weight),
    /// `‖w f‖_{L²} + ‖w ∂^r f‖_{L²}`.
    Endpoints(Weight),
}

impl NormVariant {
    pub const ALL: [NormVariant; 4] = [
        NormVariant::Full(Weight::CoshOfQx),
        NormVariant::Full(Weight::CoshToQ),
        NormVariant::Endpoints(Weight::CoshOfQx),
        NormVariant::Endpoints(Weight::CoshToQ),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NormVariant::Full(Weight::CoshOfQx) => "full-cosh(qx)",
            NormVariant::Full(Weight::CoshToQ) => "full-cosh^q",
            NormVariant::Endpoints(Weight::CoshOfQx) => "endpoints-cosh(qx)",
            NormVariant::Endpoints(Weight::CoshToQ) => "endpoints-cosh^q",
        }
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh<T: Real>(x: T) -> T {
    let a = x.abs();
    a + (-(a + a)).exp().ln_1p() - T::LN_2()
}

fn weight_at<T: Real>(w: Weight, q: T, x: T) -> T {
    match w {
        Weight::CoshOfQx => (q * x).cosh(),
        Weight::CoshToQ => (q * ln_cosh(x)).exp(),
    }
}

/// Default decay rate `q = 1/(4√α_κ)`, half the admissible bound.
pub fn default_q<T: Real>(alpha: T) -> T {
    T::one() / (lit::<T>(4.0) * alpha.sqrt())
}

/// `‖g‖_{H^r}` computed from the spectrum: `(Σ (1+K²)^r |ĝ|²)^{1/2}`.
fn sobolev_norm<T: Real>(g: &LineField<T>, r: u32) -> T {
    let grid = g.grid();
    let spec = g.spectrum();
    let s = spec.iter().enumerate().fold(T::zero(), |acc, (k, c)| {
        let kk = grid.wavenumber(k);
        acc + (T::one() + kk * kk).powi(r as i32) * c.norm_sqr()
    });
    (s * grid.spacing() / idx(grid.n())).sqrt()
}

/// Weighted norm of `f` with decay rate `q ≥ 0` and order `r`.
pub fn weighted_norm<T: Real>(f: &LineField<T>, q: T, r: u32, variant: NormVariant) -> T {
    let nodes = f.grid().nodes();
    let weigh = |g: &LineField<T>, w: Weight| {
        let vals = g.values().iter().zip(&nodes).map(|(&v, &x)| v * weight_at(w, q, x)).collect();
        LineField::from_raw(g.grid(), vals)
    };
    match variant {
        NormVariant::Full(w) => sobolev_norm(&weigh(f, w), r),
        NormVariant::Endpoints(w) => {
            weigh(f, w).l2_norm() + weigh(&f.derivative(r), w).l2_norm()
        }
    }
}

/// `μ_q f = cosh(q·) μ[sech(q·) f]`.
pub fn conjugated_multiplier<T: Real>(mu: &Multiplier<T>, q: T, f: &LineField<T>) -> LineField<T> {
    if q == T::zero() {
        return mu.apply_line(f);
    }
    let nodes = f.grid().nodes();
    let damped: Vec<T> = f.values().iter().zip(&nodes).map(|(&v, &x)| v / (q * x).cosh()).collect();
    let out = mu.apply_line(&LineField::from_raw(f.grid(), damped));
    let vals = out.values().iter().zip(&nodes).map(|(&v, &x)| v * (q * x).cosh()).collect();
    LineField::from_raw(f.grid(), vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::LineGrid;

    #[test]
    fn zero_weight_is_plain_l2() {
        let g = LineGrid::new(30.0, 1024).unwrap();
        let f = LineField::from_fn(&g, |x: f64| (-x * x).exp());
        let plain = f.l2_norm();
        let exact = (std::f64::consts::PI / 2.0).sqrt().sqrt();
        assert!((plain - exact).abs() < 1e-12);
        for v in NormVariant::ALL {
            let n = weighted_norm(&f, 0.0, 0, v);
            let want = if matches!(v, NormVariant::Endpoints(_)) { 2.0 * plain } else { plain };
            assert!((n - want).abs() < 1e-12, "{}", v.name());
        }
    }

    #[test]
    fn ln_cosh_is_stable() {
        assert!((ln_cosh(0.5f64) - 0.5f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(800.0f64) - (800.0 - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn conjugation_at_zero_q_is_the_multiplier() {
        let g = LineGrid::new(20.0, 256).unwrap();
        let f = LineField::from_fn(&g, |x: f64| 1.0 / x.cosh());
        let mu = Multiplier::new(|k: f64| 1.0 / (1.0 + k * k));
        assert_eq!(conjugated_multiplier(&mu, 0.0, &f).values(), mu.apply_line(&f).values());
    }
}
