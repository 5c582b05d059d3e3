//! Periodic ripples `aφ^a(ω^a X)` of the long-wave equations.
//!
//! With `φ = a(ν + ψ)`, `ν = cos(·)e₂` and `ω = ω_ε + t`, the periodic
//! profile equations split into
//!
//! ```text
//! ψ₁ = −a ϖ^{ε,ω}(ℬ₁ + ℰ₁)                                   Ψ₁
//! ψ₂ = −aε² (ξ^{ε,t})⁻¹ Π₂ λ₊^{εω}(ℬ₂ + ℰ₂)                   Ψ₂
//! t  = −(ε/Υ_ε) R_ε(εt) t² − (εa/Υ_ε) [λ₊^{εω}(ℬ₂ + ℰ₂)]₁     Ψ₃
//! ```
//!
//! where `ℬ = B^{εω}(ν+ψ, ν+ψ)`, `ℰ = Q^{εω}(ν+ψ, ν+ψ, a(ν+ψ))`, `[·]₁` is
//! the first cosine coefficient and `Π₂` removes mode 1. The mode-1
//! coefficient of `ψ₂` is held at zero, which is what makes `ν` and `ψ`
//! complementary. The map is iterated from zero.

use crate::dispersion::{Resonance, SymbolSet};
use crate::error::{Error, Result};
use crate::fixed_point::{iterate, FixedPointConfig, IterationLog};
use crate::nonlinear::{PeriodicOps, PeriodicPart, QScaling};
use crate::scalar::{idx, lit, Real};
use crate::spectral::PeriodicField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicConfig<T> {
    /// Initial mode cutoff `M`.
    pub modes: usize,
    /// Refinement stops once the last retained coefficient is below this.
    pub tail_tol: T,
    pub max_modes: usize,
    pub tol: T,
    pub max_iter: usize,
    /// Largest accepted `|a|`; stands in for the unknown contraction radius.
    pub a_max: T,
    pub anderson: Option<usize>,
    pub q_scaling: QScaling,
}

impl<T: Real> Default for PeriodicConfig<T> {
    fn default() -> Self {
        Self {
            modes: 32,
            tail_tol: lit(1e-14),
            max_modes: 512,
            tol: lit(1e-12),
            max_iter: 200,
            a_max: lit(1e-2),
            anderson: None,
            q_scaling: QScaling::OneOverKappa,
        }
    }
}

/// Fixed-point unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicState<T> {
    pub psi: [PeriodicField<T>; 2],
    pub t: T,
    pub a: T,
}

impl<T: Real> PeriodicState<T> {
    pub fn zero(modes: usize, a: T) -> Self {
        Self { psi: [PeriodicField::zeros(modes), PeriodicField::zeros(modes)], t: T::zero(), a }
    }

    fn flatten(&self) -> Vec<T> {
        let mut v = self.psi[0].coeffs().to_vec();
        v.extend_from_slice(self.psi[1].coeffs());
        v.push(self.t);
        v
    }

    fn unflatten(v: &[T], modes: usize, a: T) -> Self {
        let m1 = modes + 1;
        Self {
            psi: [PeriodicField::new(v[..m1].to_vec()), PeriodicField::new(v[m1..2 * m1].to_vec())],
            t: v[2 * m1],
            a,
        }
    }
}

/// Converged ripple: `φ^a(X) = (ν + ψ)(ω^a X)` with `ω^a = ω_ε + t`.
#[derive(Debug, Clone)]
pub struct PeriodicWave<T> {
    pub eps: T,
    pub a: T,
    pub t: T,
    /// `ω_ε^a`.
    pub omega: T,
    pub psi: [PeriodicField<T>; 2],
    pub log: IterationLog<T>,
    /// Max-norm residual of the full periodic system over retained modes.
    pub residual: T,
    pub resonance: Resonance<T>,
}

impl<T: Real> PeriodicWave<T> {
    pub fn modes(&self) -> usize {
        self.psi[0].modes()
    }

    /// Cosine coefficients of `ν + ψ`.
    pub fn profile(&self) -> [PeriodicField<T>; 2] {
        let m = self.modes();
        [self.psi[0].clone(), self.psi[1].add(&PeriodicField::cos_mode(m, 1))]
    }

    /// `φ^a` as the periodic half of a field with frequency `ω^a`.
    pub fn part(&self) -> PeriodicPart<T> {
        PeriodicPart { comps: self.profile(), omega: self.omega }
    }

    /// `φ^a(X)`.
    pub fn eval(&self, x: T) -> [T; 2] {
        let p = self.profile();
        let y = self.omega * x;
        [p[0].eval(y), p[1].eval(y)]
    }

    pub fn contraction_ratio(&self) -> T {
        self.log.contraction_ratio(lit(1e-9))
    }
}

/// Operators of the periodic problem at fixed `ε` and mode cutoff.
#[derive(Debug)]
pub struct PeriodicProblem<T: Real> {
    ops: PeriodicOps<T>,
    res: Resonance<T>,
}

impl<T: Real> PeriodicProblem<T> {
    pub fn new(symbols: SymbolSet<T>, eps: T, modes: usize, q_scaling: QScaling) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1), got {eps}")));
        }
        if modes < 8 {
            return Err(Error::InvalidConfig(format!("at least 8 periodic modes needed, got {modes}")));
        }
        let res = symbols.find_resonance(eps)?;
        let ops = PeriodicOps::new(symbols, eps, modes)?.with_q_scaling(q_scaling);
        Ok(Self { ops, res })
    }

    pub fn resonance(&self) -> &Resonance<T> {
        &self.res
    }

    pub fn modes(&self) -> usize {
        self.ops.modes()
    }

    fn eps(&self) -> T {
        self.res.eps
    }

    fn nu_plus(&self, s: &PeriodicState<T>) -> [PeriodicField<T>; 2] {
        let m = self.modes();
        [s.psi[0].resized(m), s.psi[1].resized(m).add(&PeriodicField::cos_mode(m, 1))]
    }

    /// `ℬ + ℰ` at the state.
    pub fn forcing(&self, s: &PeriodicState<T>) -> [PeriodicField<T>; 2] {
        let omega = self.res.omega_eps + s.t;
        let phi = self.nu_plus(s);
        let b = self.ops.b(&phi, &phi, omega);
        let aphi = [phi[0].scale(s.a), phi[1].scale(s.a)];
        let e = self.ops.q(&phi, &phi, &aphi, omega);
        [b[0].add(&e[0]), b[1].add(&e[1])]
    }

    fn lambda_plus_part(&self, f: &PeriodicField<T>, omega: T) -> PeriodicField<T> {
        let sym = self.ops.symbols();
        let eps = self.eps();
        self.ops.apply_scalar(f, omega, |k| sym.lambda_plus(eps * k))
    }

    fn psi1_from(&self, s: &PeriodicState<T>, f: &[PeriodicField<T>; 2]) -> PeriodicField<T> {
        let omega = self.res.omega_eps + s.t;
        let sym = self.ops.symbols();
        let eps = self.eps();
        self.ops.apply_scalar(&f[0], omega, |k| sym.varpi_eps(eps, k)).scale(-s.a)
    }

    fn psi2_from(&self, s: &PeriodicState<T>, f: &[PeriodicField<T>; 2]) -> Result<PeriodicField<T>> {
        let omega = self.res.omega_eps + s.t;
        let eps = self.eps();
        let g = self.lambda_plus_part(&f[1], omega);
        let sym = self.ops.symbols();
        let mut out = PeriodicField::zeros(self.modes());
        let scale = -s.a * eps * eps;
        for (j, o) in out.coeffs_mut().iter_mut().enumerate() {
            if j == 1 {
                continue;
            }
            let xi = sym.xi(self.res.c_sq, eps * omega * idx(j));
            if xi.abs() < lit(1e-8) {
                return Err(Error::NearSingularMode { mode: j, value: crate::scalar::to_f64(xi.abs()) });
            }
            *o = scale * g.coeffs()[j] / xi;
        }
        Ok(out)
    }

    fn psi3_from(&self, s: &PeriodicState<T>, f: &[PeriodicField<T>; 2]) -> T {
        let omega = self.res.omega_eps + s.t;
        let eps = self.eps();
        let g1 = self.lambda_plus_part(&f[1], omega).coeffs()[1];
        let sym = self.ops.symbols();
        let r = sym.r_eps(&self.res, eps * s.t);
        -(eps / self.res.upsilon) * r * s.t * s.t - (eps * s.a / self.res.upsilon) * g1
    }

    pub fn psi1(&self, s: &PeriodicState<T>) -> PeriodicField<T> {
        self.psi1_from(s, &self.forcing(s))
    }

    pub fn psi2(&self, s: &PeriodicState<T>) -> Result<PeriodicField<T>> {
        self.psi2_from(s, &self.forcing(s))
    }

    pub fn psi3(&self, s: &PeriodicState<T>) -> T {
        self.psi3_from(s, &self.forcing(s))
    }

    /// `(Ψ₁, Ψ₂, Ψ₃)` sharing one evaluation of the forcing.
    pub fn map(&self, s: &PeriodicState<T>) -> Result<PeriodicState<T>> {
        let f = self.forcing(s);
        Ok(PeriodicState {
            psi: [self.psi1_from(s, &f), self.psi2_from(s, &f)?],
            t: self.psi3_from(s, &f),
            a: s.a,
        })
    }

    /// Componentwise max-norm residual of the unsplit periodic system
    /// ```text
    /// (ν+ψ)₁ + aϖ^{ε,ω}(ℬ₁+ℰ₁),   ξ^{ε,t}(ν+ψ)₂ + aε²λ₊^{εω}(ℬ₂+ℰ₂)
    /// ```
    pub fn residual(&self, s: &PeriodicState<T>) -> [T; 2] {
        let omega = self.res.omega_eps + s.t;
        let eps = self.eps();
        let f = self.forcing(s);
        let phi = self.nu_plus(s);
        let sym = self.ops.symbols();
        let r1 = phi[0].sub(&self.psi1_from(s, &f));
        let xi_phi = self.ops.apply_scalar(&phi[1], omega, |k| sym.xi(self.res.c_sq, eps * k));
        let r2 = xi_phi.add(&self.lambda_plus_part(&f[1], omega).scale(s.a * eps * eps));
        [r1.max_abs(), r2.max_abs()]
    }
}

/// Solve for the ripple of amplitude `a`, refining the mode cutoff until
/// the tail of `ψ` drops below `cfg.tail_tol`.
pub fn solve_periodic<T: Real>(
    symbols: &SymbolSet<T>,
    eps: T,
    a: T,
    cfg: &PeriodicConfig<T>,
) -> Result<PeriodicWave<T>> {
    if !(a.abs() <= cfg.a_max) {
        return Err(Error::InvalidConfig(format!("|a| = {} exceeds a_max = {}", a.abs(), cfg.a_max)));
    }
    let mut modes = cfg.modes;
    loop {
        let problem = PeriodicProblem::new(symbols.clone(), eps, modes, cfg.q_scaling)?;
        let mut fp = FixedPointConfig::new(cfg.tol, cfg.max_iter);
        fp.anderson = cfg.anderson;
        let x0 = PeriodicState::zero(modes, a).flatten();
        let (x, log) = iterate(x0, &fp, |x| {
            let s = PeriodicState::unflatten(x, modes, a);
            Ok(problem.map(&s)?.flatten())
        })?;
        let state = PeriodicState::unflatten(&x, modes, a);
        let tail = state.psi[0].tail().max(state.psi[1].tail());
        if tail < cfg.tail_tol || modes * 2 > cfg.max_modes {
            let r = problem.residual(&state);
            let res = *problem.resonance();
            return Ok(PeriodicWave {
                eps,
                a,
                t: state.t,
                omega: res.omega_eps + state.t,
                psi: state.psi,
                log,
                residual: r[0].max(r[1]),
                resonance: res,
            });
        }
        modes *= 2;
    }
}
