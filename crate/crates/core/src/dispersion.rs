//! Dispersion symbols of the diagonalized traveling-wave problem.
//!
//! With `ρ̃(k) = √((1−κ)² + 4κcos²k)` the linear part of the dimer has
//! eigenvalues `λ̃±(k) = 1 + κ ± ρ̃(k)` and eigenvector matrix
//!
//! ```text
//! J̃(k) = [ ṽ₋(k)   1    ]
//!        [   1    ṽ₊(k) ]
//! ```
//!
//! All symbols are evaluated in forms free of cancellation: `λ̃₋` through
//! `4κ sin²k / (1 + κ + ρ̃)`, the eigenvector entries after rationalizing by
//! `κ − 1 + ρ̃`, and the long-wave gap `c_κ² − λ̃₋(k)/k²` with a short series
//! near the origin.

use crate::error::{Error, Result};
use crate::model::DimerParams;
use crate::scalar::{lit, to_f64, Real};

/// Row-major 2×2 matrix.
pub type Mat2<T> = [[T; 2]; 2];

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Default switch radius for local series at removable singularities.
pub const DEFAULT_DELTA_SING: f64 = 1e-6;

/// Symbols of one parameter set.
#[derive(Debug, Clone)]
pub struct SymbolSet<T> {
    params: DimerParams<T>,
    kappa: T,
    c_kappa_sq: T,
    alpha: T,
    delta_sing: T,
}

/// Resonant frequency data for one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance<T> {
    pub eps: T,
    /// `c² = c_κ² + ε²`.
    pub c_sq: T,
    /// Positive root of `c²Ω² = λ̃₊(Ω)`.
    pub omega_c: T,
    /// `ω_ε = Ω_c / ε`.
    pub omega_eps: T,
    /// `Υ_ε = ξ̃′_c(Ω_c) = −2c²Ω_c + λ̃₊′(Ω_c)`.
    pub upsilon: T,
}

impl<T: Real> Resonance<T> {
    pub fn c(&self) -> T {
        self.c_sq.sqrt()
    }
}

impl<T: Real> SymbolSet<T> {
    pub fn new(params: DimerParams<T>) -> Result<Self> {
        Self::with_delta(params, lit(DEFAULT_DELTA_SING))
    }

    pub fn with_delta(params: DimerParams<T>, delta_sing: T) -> Result<Self> {
        if !(delta_sing > T::zero() && delta_sing < lit(1e-3)) {
            return Err(Error::InvalidConfig(format!(
                "delta_sing must lie in (0, 1e-3), got {delta_sing}"
            )));
        }
        Ok(Self {
            kappa: params.kappa(),
            c_kappa_sq: params.sound_speed_sq(),
            alpha: params.alpha(),
            params,
            delta_sing,
        })
    }

    pub fn params(&self) -> &DimerParams<T> {
        &self.params
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn c_kappa_sq(&self) -> T {
        self.c_kappa_sq
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn delta_sing(&self) -> T {
        self.delta_sing
    }

    pub fn rho(&self, k: T) -> T {
        let km1 = self.kappa - T::one();
        let c = k.cos();
        (km1 * km1 + lit::<T>(4.0) * self.kappa * c * c).sqrt()
    }

    /// `(λ̃₋(k), λ̃₊(k))`.
    pub fn lambda_pm(&self, k: T) -> (T, T) {
        let rho = self.rho(k);
        let s = k.sin();
        let one_k = T::one() + self.kappa;
        (lit::<T>(4.0) * self.kappa * s * s / (one_k + rho), one_k + rho)
    }

    pub fn lambda_minus(&self, k: T) -> T {
        self.lambda_pm(k).0
    }

    pub fn lambda_plus(&self, k: T) -> T {
        T::one() + self.kappa + self.rho(k)
    }

    /// `[ρ̃, ρ̃′, ρ̃″, ρ̃‴]` at `k`, by the chain rule on `ρ̃²`.
    pub fn rho_derivs(&self, k: T) -> [T; 4] {
        let four_k = lit::<T>(4.0) * self.kappa;
        let two = lit::<T>(2.0);
        let (s2, c2) = (two * k).sin_cos();
        let u1 = -four_k * s2;
        let u2 = -two * four_k * c2;
        let u3 = lit::<T>(4.0) * four_k * s2;
        let r = self.rho(k);
        let r1 = u1 / (two * r);
        let r2 = (u2 - two * r1 * r1) / (two * r);
        let r3 = (u3 - lit::<T>(6.0) * r1 * r2) / (two * r);
        [r, r1, r2, r3]
    }

    /// `(λ̃₋′(k), λ̃₊′(k))`.
    pub fn lambda_prime(&self, k: T) -> (T, T) {
        let d = self.rho_derivs(k)[1];
        (-d, d)
    }

    /// Eigenvector entries `(ṽ₋, ṽ₊)`.
    ///
    /// Uses `ṽ₋ = 2cos k/(κ − 1 + ρ̃)` and `ṽ₊ = −κ ṽ₋`, which equal the
    /// defining quotients `(2 − λ̃₋)/(2κ cos k)` and `(2κ − λ̃₊)/(2 cos k)`
    /// identically and have no singularity at `cos k = 0`. Note that both
    /// entries change sign under `k ↦ k + π`.
    pub fn eigvec_v_pm(&self, k: T) -> (T, T) {
        let vm = lit::<T>(2.0) * k.cos() / (self.kappa - T::one() + self.rho(k));
        (vm, -self.kappa * vm)
    }

    /// The defining quotients, evaluated literally. Loses accuracy as
    /// `cos k → 0`; kept as a cross-check for [`Self::eigvec_v_pm`].
    pub fn eigvec_v_pm_quotient(&self, k: T) -> (T, T) {
        let two = lit::<T>(2.0);
        let (lm, lp) = self.lambda_pm(k);
        let c = k.cos();
        ((two - lm) / (two * self.kappa * c), (two * self.kappa - lp) / (two * c))
    }

    /// `L̃_κ(k)`.
    pub fn l_kappa(&self, k: T) -> Mat2<T> {
        let two = lit::<T>(2.0);
        let c = k.cos();
        [[two * self.kappa, -two * c], [-two * self.kappa * c, two]]
    }

    pub fn j_matrix(&self, k: T) -> Mat2<T> {
        let (vm, vp) = self.eigvec_v_pm(k);
        [[vm, T::one()], [T::one(), vp]]
    }

    /// Closed-form inverse of [`Self::j_matrix`]. `det J̃ = −κṽ₋² − 1`, so it
    /// never vanishes for `κ > 1`.
    pub fn j1_matrix(&self, k: T) -> Mat2<T> {
        let (vm, vp) = self.eigvec_v_pm(k);
        let det = vm * vp - T::one();
        [[vp / det, -T::one() / det], [-T::one() / det, vm / det]]
    }

    /// `(J̃(k), J̃₁(k))`.
    pub fn j_and_j1(&self, k: T) -> Result<(Mat2<T>, Mat2<T>)> {
        let (vm, vp) = self.eigvec_v_pm(k);
        let det = vm * vp - T::one();
        if det.abs() < lit(1e-14) {
            return Err(Error::SingularMatrix { k: to_f64(k), det: to_f64(det.abs()) });
        }
        Ok((self.j_matrix(k), self.j1_matrix(k)))
    }

    /// `ξ̃_c(k) = −c²k² + λ̃₊(k)`.
    pub fn xi(&self, c_sq: T, k: T) -> T {
        -c_sq * k * k + self.lambda_plus(k)
    }

    pub fn xi_prime(&self, c_sq: T, k: T) -> T {
        -lit::<T>(2.0) * c_sq * k + self.lambda_prime(k).1
    }

    /// `λ̃₋(s)/s²`, equal to `c_κ²` at `s = 0`.
    pub fn lambda_minus_over_sq(&self, s: T) -> T {
        let sinc = if s == T::zero() { T::one() } else { s.sin() / s };
        lit::<T>(4.0) * self.kappa * sinc * sinc / (T::one() + self.kappa + self.rho(s))
    }

    /// Long-wave gap `D(s) = c_κ² − λ̃₋(s)/s² ≥ 0`, with `D(s) ≈ α_κ s²`.
    pub fn long_wave_gap(&self, s: T) -> T {
        if s.abs() < self.delta_sing {
            return self.alpha * s * s;
        }
        let one_k = T::one() + self.kappa;
        let rho = self.rho(s);
        let sn = s.sin();
        let s2 = s * s;
        // 1 − (sin s / s)²
        let defect = if s.abs() < lit(1e-2) {
            s2 / lit(3.0) - lit::<T>(2.0 / 45.0) * s2 * s2 + s2 * s2 * s2 / lit(315.0)
        } else {
            (s2 - sn * sn) / s2
        };
        let numer = -lit::<T>(4.0) * self.kappa * sn * sn / (rho + one_k)
            + lit::<T>(2.0) * one_k * defect;
        lit::<T>(4.0) * self.kappa * numer / (lit::<T>(2.0) * one_k * (one_k + rho))
    }

    /// `ϖ̃_c(k) = −λ̃₋(k)/(c²k² − λ̃₋(k))` for `c² > c_κ²`.
    pub fn varpi_c(&self, c_sq: T, k: T) -> T {
        let g = self.lambda_minus_over_sq(k);
        -g / (c_sq - self.c_kappa_sq + self.long_wave_gap(k))
    }

    /// `ϖ̃^ε(K) = ε² ϖ̃_{c_ε}(εK)`; equals `−c_κ²` at `K = 0`.
    pub fn varpi_eps(&self, eps: T, big_k: T) -> T {
        let s = eps * big_k;
        let e2 = eps * eps;
        -e2 * self.lambda_minus_over_sq(s) / (e2 + self.long_wave_gap(s))
    }

    /// `ϖ̃⁰(K) = −c_κ²/(1 + α_κK²)`.
    pub fn varpi0(&self, big_k: T) -> T {
        -self.c_kappa_sq / (T::one() + self.alpha * big_k * big_k)
    }

    /// `(ϖ̃_{c_ε}(εK), ϖ̃^ε(K), ϖ̃⁰(K))`.
    pub fn varpi_symbols(&self, eps: T, big_k: T) -> (T, T, T) {
        let c_sq = self.c_kappa_sq + eps * eps;
        (
            self.varpi_c(c_sq, eps * big_k),
            self.varpi_eps(eps, big_k),
            self.varpi0(big_k),
        )
    }

    /// Symbol of `𝒯_ε`: `−c_ε²ε²K² + λ̃₊(εK)`.
    pub fn t_eps(&self, eps: T, big_k: T) -> T {
        let c_sq = self.c_kappa_sq + eps * eps;
        self.xi(c_sq, eps * big_k)
    }

    /// Solve `c²Ω² = λ̃₊(Ω)` by bisection for `c² = c_κ² + ε²`.
    pub fn find_resonance(&self, eps: T) -> Result<Resonance<T>> {
        let c_sq = self.c_kappa_sq + eps * eps;
        let c = c_sq.sqrt();
        let two = lit::<T>(2.0);
        let margin = lit::<T>(1e-9);
        let mut lo = (two * self.kappa).sqrt() / c - margin;
        let mut hi = (two + two * self.kappa).sqrt() / c + margin;
        let f = |w: T| c_sq * w * w - self.lambda_plus(w);
        let (f_lo, f_hi) = (f(lo), f(hi));
        let bracketed = eps.is_finite() && eps > T::zero() && f_lo <= T::zero() && f_hi >= T::zero();
        if !bracketed {
            return Err(Error::RootNotBracketed {
                lo: to_f64(lo),
                hi: to_f64(hi),
                f_lo: to_f64(f_lo),
                f_hi: to_f64(f_hi),
            });
        }
        let tol = lit::<T>(1e-13).max(T::epsilon() * lit(8.0) * hi);
        while hi - lo > tol {
            let mid = lo + (hi - lo) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) <= T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let omega_c = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
        let upsilon = self.xi_prime(c_sq, omega_c);
        if upsilon == T::zero() {
            return Err(Error::RootNotBracketed {
                lo: to_f64(lo),
                hi: to_f64(hi),
                f_lo: 0.0,
                f_hi: 0.0,
            });
        }
        Ok(Resonance { eps, c_sq, omega_c, omega_eps: omega_c / eps, upsilon })
    }

    /// `ξ̃_c(Ω_c + s) − ξ̃_c(Ω_c)` without cancellation.
    pub fn xi_increment(&self, res: &Resonance<T>, s: T) -> T {
        let two = lit::<T>(2.0);
        let w = res.omega_c;
        let drho = -lit::<T>(4.0) * self.kappa * (two * w + s).sin() * s.sin()
            / (self.rho(w + s) + self.rho(w));
        -res.c_sq * (two * w * s + s * s) + drho
    }

    /// `R_ε(s) = (ξ̃_c(Ω_c + s) − Υ_ε s)/s²`, with `ξ̃_c(Ω_c) = 0` taken
    /// exactly. Series `ξ̃″/2 + ξ̃‴ s/6` for `|s| < δ_sing`.
    pub fn r_eps(&self, res: &Resonance<T>, s: T) -> T {
        let two = lit::<T>(2.0);
        if s.abs() < self.delta_sing {
            let d = self.rho_derivs(res.omega_c);
            let xi2 = -two * res.c_sq + d[2];
            return xi2 / two + d[3] * s / lit(6.0);
        }
        (self.xi_increment(res, s) - res.upsilon * s) / (s * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sym(kappa: f64) -> SymbolSet<f64> {
        SymbolSet::new(DimerParams::quadratic(kappa, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let s = sym(2.0);
        let (lm, lp) = s.lambda_pm(0.0);
        assert_eq!(lm, 0.0);
        assert!((lp - 6.0).abs() < 1e-15);
        let (lm, lp) = s.lambda_pm(FRAC_PI_2);
        assert!((lm - 2.0).abs() < 1e-14 && (lp - 4.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_determinant_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &kappa in &[1.5, 2.0, 5.0] {
            let s = sym(kappa);
            for _ in 0..2000 {
                let k: f64 = rng.gen_range(-PI..PI);
                let (lm, lp) = s.lambda_pm(k);
                assert!((lm + lp - 2.0 - 2.0 * kappa).abs() < 1e-12);
                assert!((lm * lp - 4.0 * kappa * k.sin().powi(2)).abs() < 1e-12);
                assert!(lp >= lm && lm >= 0.0);
            }
        }
    }

    #[test]
    fn eigvec_at_origin_and_pole() {
        let s = sym(2.0);
        let (vm, vp) = s.eigvec_v_pm(0.0);
        assert!((vm - 0.5).abs() < 1e-15 && (vp + 1.0).abs() < 1e-15);
        let (vm, vp) = s.eigvec_v_pm(FRAC_PI_2);
        assert!(vm.is_finite() && vp.is_finite());
        assert!(vm.abs() < 1e-15);
    }

    #[test]
    fn eigvec_parity() {
        let s = sym(3.0);
        for &k in &[0.1, 0.7, 1.3, 2.9] {
            let (a, b) = s.eigvec_v_pm(k);
            let (c, d) = s.eigvec_v_pm(-k);
            let (e, f) = s.eigvec_v_pm(k + PI);
            assert_eq!((a, b), (c, d));
            assert!((a + e).abs() < 1e-12 && (b + f).abs() < 1e-12);
        }
    }

    #[test]
    fn eigvec_matches_quotient_near_pole() {
        let s = sym(2.0);
        for &d in &[1e-1, 1e-3, 1e-6] {
            // cos k = ±d up to O(d³)
            for k in [FRAC_PI_2 - d, FRAC_PI_2 + d] {
                let (a, b) = s.eigvec_v_pm(k);
                let (qa, qb) = s.eigvec_v_pm_quotient(k);
                assert!((a - qa).abs() < 1e-8 && (b - qb).abs() < 1e-8, "k={k}");
            }
        }
    }

    #[test]
    fn j_matrices() {
        let s = sym(2.0);
        let (j, j1) = s.j_and_j1(0.0).unwrap();
        let want_j = [[0.5, 1.0], [1.0, -1.0]];
        let want_j1 = [[2.0 / 3.0, 2.0 / 3.0], [2.0 / 3.0, -1.0 / 3.0]];
        for i in 0..2 {
            for l in 0..2 {
                assert!((j[i][l] - want_j[i][l]).abs() < 1e-15);
                assert!((j1[i][l] - want_j1[i][l]).abs() < 1e-15);
            }
        }
        for &k in &[0.3, 1.0, FRAC_PI_2, 2.5] {
            let (j, j1) = s.j_and_j1(k).unwrap();
            let id = mat_mul(&j, &j1);
            assert!((id[0][0] - 1.0).abs() < 1e-12 && id[0][1].abs() < 1e-12);
            assert!(id[1][0].abs() < 1e-12 && (id[1][1] - 1.0).abs() < 1e-12);
        }
        let k = 1.0;
        let (lm, lp) = s.lambda_pm(k);
        let lj = mat_mul(&s.l_kappa(k), &s.j_matrix(k));
        let jl = mat_mul(&s.j_matrix(k), &[[lm, 0.0], [0.0, lp]]);
        for i in 0..2 {
            for l in 0..2 {
                assert!((lj[i][l] - jl[i][l]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_reference_values() {
        // ρ̃ and its first three derivatives at κ = 2, from 40-digit arithmetic
        let reference = [
            (0.2, [2.94690413417395, -0.528579586682494, -2.59522671361832, 0.717818357751274]),
            (0.9, [2.02266942954791, -1.92586611860914, -0.93507298900773, 5.03250100163753]),
            (1.6, [1.0034046525809, 0.232704296426905, 7.90529214348344, -6.43087772927823]),
            (2.4, [2.313005822249, 1.72271872254475, -1.58570792569623, -3.34778558299987]),
        ];
        let s = sym(2.0);
        for (k, want) in reference {
            let got = s.rho_derivs(k);
            for i in 0..4 {
                assert!((got[i] - want[i]).abs() < 1e-12, "k={k} order {i}");
            }
        }
    }

    #[test]
    fn literal_slope_bound_fails_near_origin() {
        // λ̃₋ ≈ c_κ²k², so |λ̃₋′| ≈ 2c_κ²|k| exceeds 2c_κ|k| for small k.
        let s = sym(2.0);
        let ck = (4.0f64 / 3.0).sqrt();
        let k = 0.01;
        assert!(s.lambda_prime(k).0.abs() > 2.0 * ck * k);
    }

    #[test]
    fn xi_examples() {
        let s = sym(2.0);
        assert!((s.xi(4.0 / 3.0, 0.0) - 6.0).abs() < 1e-15);
        assert!(s.xi(4.0 / 3.0, 50.0) < 0.0);
        let r = s.find_resonance(0.1).unwrap();
        assert!(s.xi(r.c_sq, r.omega_c).abs() < 1e-12);
    }

    #[test]
    fn varpi_limits() {
        let s = sym(2.0);
        assert!((s.varpi0(0.0) + 4.0 / 3.0).abs() < 1e-15);
        for &e in &[0.3, 0.1, 0.01] {
            assert!((s.varpi_eps(e, 0.0) + 4.0 / 3.0).abs() < 1e-14);
        }
        let mut last = f64::INFINITY;
        for &e in &[0.2, 0.1, 0.05, 0.025] {
            let dev = (0..=400)
                .map(|i| {
                    let k = -10.0 + 0.05 * i as f64;
                    (s.varpi_eps(e, k) - s.varpi0(k)).abs()
                })
                .fold(0.0, f64::max);
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn varpi_matches_defining_quotient() {
        let s = sym(2.0);
        let c_sq = 4.0 / 3.0 + 0.01;
        for &k in &[1e-3, 0.05, 0.5, 1.5, 3.0, 7.0] {
            let lm = s.lambda_minus(k);
            let direct = -lm / (c_sq * k * k - lm);
            assert!((s.varpi_c(c_sq, k) - direct).abs() < 1e-9 * direct.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn long_wave_gap_branches_agree() {
        let s = sym(2.0);
        let d = DEFAULT_DELTA_SING;
        let below = s.alpha() * d * d;
        let above = s.long_wave_gap(d * (1.0 + 1e-9));
        assert!((below - above).abs() < 1e-8 * below);
        for &x in &[0.009, 0.0101] {
            let series = s.long_wave_gap(x);
            let direct = 4.0 / 3.0 - s.lambda_minus_over_sq(x);
            assert!((series - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn resonance_bracket_and_residual() {
        let s = sym(2.0);
        for &e in &[0.3, 0.1, 0.03] {
            let r = s.find_resonance(e).unwrap();
            let c = r.c();
            assert!((r.c_sq * r.omega_c.powi(2) - s.lambda_plus(r.omega_c)).abs() <= 1e-12);
            assert!(r.omega_c >= 4f64.sqrt() / c - 1e-9 && r.omega_c <= 6f64.sqrt() / c + 1e-9);
            assert_eq!(r.omega_eps * e, r.omega_c);
            assert!(r.upsilon.abs() > 0.0);
        }
        let r = s.find_resonance(0.1).unwrap();
        assert!(r.omega_c >= 1.72 && r.omega_c <= 2.12);
        assert!(matches!(s.find_resonance(-0.1), Err(Error::RootNotBracketed { .. })));
    }

    #[test]
    fn r_eps_seam_and_bound() {
        let s = sym(2.0);
        let r = s.find_resonance(0.1).unwrap();
        let d = DEFAULT_DELTA_SING;
        let series = s.r_eps(&r, d * 0.999_999);
        let quotient = s.r_eps(&r, d * 1.000_001);
        assert!((series - quotient).abs() < 1e-6 * series.abs());
        for i in 0..=200 {
            let x = -0.1 + 0.001 * i as f64;
            assert!(s.r_eps(&r, x).abs() < 10.0);
        }
        // quotient against the plain definition at moderate s
        let x = 0.05;
        let plain = (s.xi(r.c_sq, r.omega_c + x) - r.upsilon * x) / (x * x);
        assert!((s.r_eps(&r, x) - plain).abs() < 1e-8);
    }

    #[test]
    fn generic_over_f32() {
        let s = SymbolSet::new(DimerParams::quadratic(2.0f32, 1.0).unwrap()).unwrap();
        let (lm, lp) = s.lambda_pm(0.4f32);
        assert!((lm + lp - 6.0).abs() < 1e-5);
        assert!(s.find_resonance(0.1f32).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn symbols_even_and_periodic(k in -10.0f64..10.0, kappa in 1.1f64..8.0) {
                let s = sym(kappa);
                let (a, b) = s.lambda_pm(k);
                let (c, d) = s.lambda_pm(k + PI);
                let (e, f) = s.lambda_pm(-k);
                prop_assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
                prop_assert!((a - e).abs() < 1e-12 && (b - f).abs() < 1e-12);
                prop_assert!((s.varpi_eps(0.1, k) - s.varpi_eps(0.1, -k)).abs() < 1e-12);
            }

            #[test]
            fn derivative_bounds(k in -4.0f64..4.0, kappa in 1.05f64..8.0) {
                let s = sym(kappa);
                let ck2 = 2.0 * kappa / (1.0 + kappa);
                let (dm, dp) = s.lambda_prime(k);
                for d in [dm, dp] {
                    prop_assert!(d.abs() <= 2.0 + 1e-12);
                    prop_assert!(d.abs() <= 2.0 * ck2 * k.abs() + 1e-12);
                }
            }
        }
    }
}
