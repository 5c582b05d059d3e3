//! Nanopteron profiles `θ = σe₁ + aφ^a + η`.
//!
//! Subtracting the periodic equation satisfied by `aφ^a` from the long-wave
//! equations leaves, with `s = σe₁ + η`,
//!
//! ```text
//! η₁ + σ + ϖ^ε L₁ = 0,      𝒯_ε η₂ + ε²λ₊^ε L₂ = 0,
//! L = B(s,s) + 2aB(s,φ) + Q(s,s,θ) + 2aQ(s,φ,θ) + a²[Q(φ,φ,θ) − Q(φ,φ,aφ)],
//! ```
//!
//! every term of which decays. The first equation is rewritten with the
//! Friesecke–Pego operator `𝒜 = I − 𝒦₁` by adding `2ϖ⁰B₁⁰(σe₁, η)` to both
//! sides. The second needs the solvability condition `ι_ε[G] = 0` for
//! `G = −λ₊^ε L₂`, which is traded for an equation for `a` via the profile
//! `χ_ε`. The resulting map `(η₁, η₂, a) ↦ (𝔑₁, 𝔑₂, 𝔑₃)` is iterated from
//! zero.

use std::sync::Arc;

use num_complex::Complex;

use crate::dispersion::{Resonance, SymbolSet};
use crate::error::{Error, Result};
use crate::fixed_point::{iterate, FixedPointConfig, IterationLog};
use crate::kdv::Soliton;
use crate::krylov::{gmres, GmresConfig};
use crate::nonlinear::{LongWaveOps, PeriodicPart, QScaling, VectorField};
use crate::periodic_solver::{solve_periodic, PeriodicConfig, PeriodicProblem, PeriodicState, PeriodicWave};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{default_q, weighted_norm, LineField, LineGrid, NormVariant, PeriodicField, Weight};

/// Which of the two equivalent fixed-point systems to iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedPointForm {
    /// `η₁ = 𝒜⁻¹(𝔯₁ − 𝒦₂𝔑₂)`.
    #[default]
    New,
    /// `η₁ = 𝒜⁻¹(𝔯₁ − 𝒦₂η₂)`.
    Original,
}

/// How `𝒯_ε⁻¹` treats grid wavenumbers next to `±ω_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TInversion {
    /// Divide by the symbol everywhere (the quotient is removable).
    #[default]
    Quotient,
    /// Zero the quotient for `|K ∓ ω_ε| < 2ΔK`.
    BandZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanopteronConfig<T> {
    pub half_length: T,
    pub n: usize,
    /// Double `n` until the ripple is resolved instead of failing.
    pub auto_grid: bool,
    pub tol: T,
    pub max_iter: usize,
    pub form: FixedPointForm,
    pub inversion: TInversion,
    pub gmres_tol: T,
    pub gmres_max_iter: usize,
    pub anderson: Option<usize>,
    /// Re-solve the ripple when `|Δa| > resolve_fraction·|a|`.
    pub resolve_fraction: T,
    pub periodic: PeriodicConfig<T>,
    pub q_scaling: QScaling,
}

impl<T: Real> Default for NanopteronConfig<T> {
    fn default() -> Self {
        Self {
            half_length: lit(60.0),
            n: 4096,
            auto_grid: false,
            tol: lit(1e-10),
            max_iter: 200,
            form: FixedPointForm::New,
            inversion: TInversion::Quotient,
            gmres_tol: lit(1e-12),
            gmres_max_iter: 400,
            anderson: None,
            resolve_fraction: lit(0.1),
            periodic: PeriodicConfig::default(),
            q_scaling: QScaling::OneOverKappa,
        }
    }
}

/// Unknowns `(η₁, η₂, a)`.
#[derive(Debug, Clone)]
pub struct NanopteronState<T: Real> {
    pub eta: [LineField<T>; 2],
    pub a: T,
}

impl<T: Real> NanopteronState<T> {
    pub fn zero(grid: &Arc<LineGrid<T>>) -> Self {
        Self { eta: [LineField::zeros(grid), LineField::zeros(grid)], a: T::zero() }
    }

    fn flatten(&self) -> Vec<T> {
        let mut v = self.eta[0].values().to_vec();
        v.extend_from_slice(self.eta[1].values());
        v.push(self.a);
        v
    }

    fn unflatten(grid: &Arc<LineGrid<T>>, v: &[T]) -> Self {
        let n = grid.n();
        Self {
            eta: [
                LineField::from_raw(grid, v[..n].to_vec()),
                LineField::from_raw(grid, v[n..2 * n].to_vec()),
            ],
            a: v[2 * n],
        }
    }

    pub fn max_symmetry_defect(&self) -> T {
        self.eta[0].symmetry_defect().max(self.eta[1].symmetry_defect())
    }
}

/// Terms of the split equations at one state.
#[derive(Debug, Clone)]
pub struct Terms<T: Real> {
    /// `B(s,s) + 2aB(s,φ)`.
    pub bilinear: [LineField<T>; 2],
    /// The `Q` part of `L`.
    pub cubic: [LineField<T>; 2],
    /// `L`.
    pub l: [LineField<T>; 2],
    /// `−σ − ϖ^εL₁ + 2ϖ⁰B₁⁰(σe₁, η)`.
    pub r1_mod: LineField<T>,
    /// `G = −λ₊^ε L₂`.
    pub g: LineField<T>,
    /// `G + 2aχ_ε`.
    pub g_mod: LineField<T>,
}

/// Residual of the full long-wave equations at `θ = σe₁ + aφ + η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport<T> {
    /// `‖η₁ + σ + ϖ^εL₁‖∞`, `‖𝒯η₂ + ε²λ₊L₂‖∞`.
    pub line: [T; 2],
    /// `|a|` times the periodic-system residual of the ripple used.
    pub periodic: T,
    /// Largest of the above over `‖σ‖∞`.
    pub relative: T,
}

/// Ripple data sampled once per periodic solve.
#[derive(Debug, Clone)]
struct Ripple<T: Real> {
    wave: PeriodicWave<T>,
    jphi: [Vec<T>; 2],
}

/// Operators and tables shared by every iteration at fixed `ε` and grid.
#[derive(Debug)]
pub struct NanopteronOperators<T: Real> {
    ops: LongWaveOps<T>,
    res: Resonance<T>,
    soliton: Soliton<T>,
    sigma: LineField<T>,
    js_sigma: [Vec<T>; 2],
    cos_table: Vec<T>,
    chi: LineField<T>,
    upsilon: T,
    k1: T,
    k2: T,
    inv_t: Vec<T>,
    cfg: NanopteronConfig<T>,
}

impl<T: Real> NanopteronOperators<T> {
    pub fn new(symbols: SymbolSet<T>, eps: T, cfg: &NanopteronConfig<T>) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1), got {eps}")));
        }
        let res = symbols.find_resonance(eps)?;
        let mut n = cfg.n;
        let bound = T::PI() / (lit::<T>(4.0) * res.omega_eps);
        while lit::<T>(2.0) * cfg.half_length / crate::scalar::idx::<T>(n) >= bound {
            if !cfg.auto_grid || n >= 1 << 20 {
                return Err(Error::InvalidConfig(format!(
                    "grid spacing {} does not resolve the ripple (need < {}, omega_eps = {})",
                    2.0 * to_f64(cfg.half_length) / n as f64,
                    to_f64(bound),
                    to_f64(res.omega_eps)
                )));
            }
            n *= 2;
        }
        let grid = LineGrid::new(cfg.half_length, n)?;
        let ops = LongWaveOps::new(symbols.clone(), eps, &grid)?.with_q_scaling(cfg.q_scaling);
        let params = symbols.params().clone();
        let soliton = Soliton::new(&params);
        let sigma = soliton.sigma_field(&grid);
        let js_sigma = ops.j_fine(&VectorField::first(sigma.clone()));
        let cos_table: Vec<T> = grid.nodes().iter().map(|&x| (res.omega_eps * x).cos()).collect();
        let kappa = symbols.kappa();
        let beta = params.beta();
        let two = lit::<T>(2.0);
        let pre = two * kappa / (kappa + T::one());
        let k1 = -pre * (beta / (kappa * kappa * kappa) + T::one());
        let k2 = pre * (beta / (kappa * kappa) - T::one());

        // χ_ε = λ₊^ε B₂^ε(σe₁, cos(ω_ε·)e₂)
        let nu = VectorField::periodic(
            &grid,
            PeriodicPart {
                comps: [PeriodicField::zeros(1), PeriodicField::cos_mode(1, 1)],
                omega: res.omega_eps,
            },
        );
        let b = ops.b_from_fine(&js_sigma, &ops.j_fine(&nu));
        let chi = b[1].apply_table(ops.lambda_plus());

        let dk = grid.dk();
        let inv_t = grid
            .abs_wavenumbers()
            .iter()
            .zip(ops.t_symbol())
            .map(|(&k, &t)| {
                let banded = cfg.inversion == TInversion::BandZero && (k - res.omega_eps).abs() < two * dk;
                if banded || t.abs() < lit(1e-14) {
                    T::zero()
                } else {
                    T::one() / t
                }
            })
            .collect();

        let mut out = Self {
            ops,
            res,
            soliton,
            sigma,
            js_sigma,
            cos_table,
            chi,
            upsilon: T::zero(),
            k1,
            k2,
            inv_t,
            cfg: *cfg,
        };
        out.upsilon = out.iota(&out.chi);
        if !(out.upsilon.abs() > lit(1e-6)) {
            return Err(Error::DegenerateSolvability(to_f64(out.upsilon.abs())));
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Arc<LineGrid<T>> {
        self.ops.grid()
    }

    pub fn ops(&self) -> &LongWaveOps<T> {
        &self.ops
    }

    pub fn resonance(&self) -> &Resonance<T> {
        &self.res
    }

    pub fn eps(&self) -> T {
        self.res.eps
    }

    pub fn soliton(&self) -> &Soliton<T> {
        &self.soliton
    }

    pub fn sigma(&self) -> &LineField<T> {
        &self.sigma
    }

    pub fn chi(&self) -> &LineField<T> {
        &self.chi
    }

    pub fn upsilon(&self) -> T {
        self.upsilon
    }

    /// `ι_ε[g] = ∫ g(X) cos(ω_ε X) dX` by the trapezoidal rule.
    pub fn iota(&self, g: &LineField<T>) -> T {
        let h = self.grid().spacing();
        h * g.values().iter().zip(&self.cos_table).fold(T::zero(), |s, (&a, &c)| s + a * c)
    }

    /// `𝒦₁f = −(2κ/(κ+1))(β/κ³+1) ϖ⁰(σf)`.
    pub fn k1(&self, f: &LineField<T>) -> LineField<T> {
        self.sigma.mul_pointwise(f).apply_table(self.ops.varpi0()).scale(self.k1)
    }

    /// `𝒦₂g = (2κ/(κ+1))(β/κ²−1) ϖ⁰(σg)`.
    pub fn k2(&self, g: &LineField<T>) -> LineField<T> {
        self.sigma.mul_pointwise(g).apply_table(self.ops.varpi0()).scale(self.k2)
    }

    /// `𝒜f = f − 𝒦₁f`.
    pub fn apply_a(&self, f: &LineField<T>) -> LineField<T> {
        f.sub(&self.k1(f))
    }

    /// `𝒜⁻¹y` by GMRES.
    pub fn solve_a(&self, y: &LineField<T>) -> Result<LineField<T>> {
        let grid = self.grid().clone();
        let out = gmres(
            |x| self.apply_a(&LineField::from_raw(&grid, x.to_vec())).into_values(),
            y.values(),
            &GmresConfig { tol: self.cfg.gmres_tol, max_iter: self.cfg.gmres_max_iter },
        )?;
        Ok(LineField::from_raw(&grid, out.x))
    }

    /// `𝒯_ε f`.
    pub fn apply_t(&self, f: &LineField<T>) -> LineField<T> {
        f.apply_table(self.ops.t_symbol())
    }

    /// `𝒫_ε g = 𝒯_ε⁻¹(g − (ι_ε[g]/υ_ε) χ_ε)`.
    pub fn p_eps(&self, g: &LineField<T>) -> LineField<T> {
        let gt = g.axpy(-self.iota(g) / self.upsilon, &self.chi);
        gt.apply_table(&self.inv_t)
    }

    fn ripple(&self, wave: PeriodicWave<T>) -> Ripple<T> {
        let phi = VectorField::periodic(self.grid(), wave.part());
        let jphi = self.ops.j_fine(&phi);
        Ripple { wave, jphi }
    }

    /// All terms of the split equations at `state` with ripple `wave`.
    pub fn assemble_terms(&self, state: &NanopteronState<T>, wave: &PeriodicWave<T>) -> Terms<T> {
        self.terms_with(state, &self.ripple(wave.clone()))
    }

    fn terms_with(&self, state: &NanopteronState<T>, ripple: &Ripple<T>) -> Terms<T> {
        let ops = &self.ops;
        let a = state.a;
        let two = lit::<T>(2.0);
        let jeta = ops.j_fine(&VectorField::line(state.eta[0].clone(), state.eta[1].clone()));
        let js: [Vec<T>; 2] = [0, 1].map(|c| {
            self.js_sigma[c].iter().zip(&jeta[c]).map(|(&p, &q)| p + q).collect()
        });
        // s + 2aφ
        let js2a: [Vec<T>; 2] =
            [0, 1].map(|c| js[c].iter().zip(&ripple.jphi[c]).map(|(&p, &q)| p + two * a * q).collect());
        let bilinear = ops.b_from_fine(&js, &js2a);
        let cubic = if ops.cubic_vanishes() {
            [LineField::zeros(self.grid()), LineField::zeros(self.grid())]
        } else {
            let jtheta: [Vec<T>; 2] =
                [0, 1].map(|c| js[c].iter().zip(&ripple.jphi[c]).map(|(&p, &q)| p + a * q).collect());
            let japhi: [Vec<T>; 2] = [0, 1].map(|c| ripple.jphi[c].iter().map(|&q| a * q).collect());
            let n_theta = ops.cal_n_fine(&jtheta);
            let n_aphi = ops.cal_n_fine(&japhi);
            let a2 = a * a;
            let prod: [Vec<T>; 2] = [0, 1].map(|c| {
                (0..js[c].len())
                    .map(|i| {
                        let phi = ripple.jphi[c][i];
                        js[c][i] * js2a[c][i] * n_theta[c][i] + a2 * phi * phi * (n_theta[c][i] - n_aphi[c][i])
                    })
                    .collect()
            });
            ops.finish(prod, ops.gamma(true))
        };
        let l = [bilinear[0].add(&cubic[0]), bilinear[1].add(&cubic[1])];
        let r1_mod = self
            .sigma
            .add(&l[0].apply_table(ops.varpi()))
            .scale(-T::one())
            .sub(&self.k1(&state.eta[0]))
            .add(&self.k2(&state.eta[1]));
        let g = l[1].apply_table(ops.lambda_plus()).scale(-T::one());
        let g_mod = g.axpy(two * a, &self.chi);
        Terms { bilinear, cubic, l, r1_mod, g, g_mod }
    }

    /// `σ + ϖ^ε B₁^ε(σe₁, σe₁)`, the leading term that vanishes as `ε → 0`.
    pub fn j11(&self) -> LineField<T> {
        let b = self.ops.b_from_fine(&self.js_sigma, &self.js_sigma);
        self.sigma.add(&b[0].apply_table(self.ops.varpi()))
    }

    /// `(𝔑₁, 𝔑₂, 𝔑₃)` at `state`.
    pub fn n_maps(
        &self,
        state: &NanopteronState<T>,
        wave: &PeriodicWave<T>,
        form: FixedPointForm,
    ) -> Result<NanopteronState<T>> {
        self.n_maps_with(state, &self.ripple(wave.clone()), form)
    }

    fn n_maps_with(
        &self,
        state: &NanopteronState<T>,
        ripple: &Ripple<T>,
        form: FixedPointForm,
    ) -> Result<NanopteronState<T>> {
        let terms = self.terms_with(state, ripple);
        let e2 = self.eps() * self.eps();
        let mut n2 = self.p_eps(&terms.g_mod).scale(e2);
        n2.symmetrize();
        let n3 = self.iota(&terms.g_mod) / (lit::<T>(2.0) * self.upsilon);
        let rhs = match form {
            FixedPointForm::New => terms.r1_mod.sub(&self.k2(&n2)),
            FixedPointForm::Original => terms.r1_mod.sub(&self.k2(&state.eta[1])),
        };
        let mut n1 = self.solve_a(&rhs)?;
        n1.symmetrize();
        Ok(NanopteronState { eta: [n1, n2], a: n3 })
    }

    /// Residual of the unsplit equations.
    pub fn residual(&self, state: &NanopteronState<T>, wave: &PeriodicWave<T>) -> Result<ResidualReport<T>> {
        let ripple = self.ripple(wave.clone());
        let terms = self.terms_with(state, &ripple);
        let ops = &self.ops;
        let e2 = self.eps() * self.eps();
        let r1 = state.eta[0].add(&self.sigma).add(&terms.l[0].apply_table(ops.varpi()));
        let r2 = self.apply_t(&state.eta[1]).add(&terms.l[1].apply_table(ops.lambda_plus()).scale(e2));
        let problem = PeriodicProblem::new(ops.symbols().clone(), self.eps(), wave.modes(), self.cfg.q_scaling)?;
        let pr = problem.residual(&PeriodicState { psi: wave.psi.clone(), t: wave.t, a: state.a });
        let periodic = state.a.abs() * pr[0].max(pr[1]);
        let line = [r1.max_abs(), r2.max_abs()];
        let relative = line[0].max(line[1]).max(periodic) / self.sigma.max_abs();
        Ok(ResidualReport { line, periodic, relative })
    }
}

/// Summary numbers of a nanopteron run.
#[derive(Debug, Clone)]
pub struct NanopteronDiagnostics<T> {
    pub log: IterationLog<T>,
    pub residual: ResidualReport<T>,
    pub upsilon: T,
    /// `|ι_ε[𝒯η₂ − ε²G]|`: the solvability defect.
    pub solvability: T,
    /// `‖η‖∞` over both components.
    pub eta_max: T,
    /// `‖η‖_{L²}` over both components.
    pub eta_l2: T,
    /// `‖cosh(q·)η‖_{H¹}` at the default `q`.
    pub eta_weighted: T,
    pub q: T,
    pub periodic_solves: usize,
    pub symmetry_defect: T,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct NanopteronSolution<T: Real> {
    pub state: NanopteronState<T>,
    pub wave: PeriodicWave<T>,
    pub diagnostics: NanopteronDiagnostics<T>,
}

impl<T: Real> NanopteronSolution<T> {
    pub fn grid(&self) -> &Arc<LineGrid<T>> {
        self.state.eta[0].grid()
    }

    /// `θ = σe₁ + aφ^a + η` as a field with a periodic part.
    pub fn theta(&self, sigma: &LineField<T>) -> VectorField<T> {
        VectorField {
            line: [sigma.add(&self.state.eta[0]), self.state.eta[1].clone()],
            periodic: Some(self.wave.part().scale(self.state.a)),
        }
    }
}

/// Solve from `(η, a) = 0` with the ripple re-solved as `a` moves.
pub fn solve_nanopteron<T: Real>(
    symbols: &SymbolSet<T>,
    eps: T,
    cfg: &NanopteronConfig<T>,
) -> Result<NanopteronSolution<T>> {
    let op = NanopteronOperators::new(symbols.clone(), eps, cfg)?;
    solve_with(&op, cfg)
}

/// Iterate with prebuilt operators.
pub fn solve_with<T: Real>(op: &NanopteronOperators<T>, cfg: &NanopteronConfig<T>) -> Result<NanopteronSolution<T>> {
    let grid = op.grid().clone();
    let symbols = op.ops().symbols().clone();
    let eps = op.eps();
    let mut solves = 1usize;
    let mut ripple = op.ripple(solve_periodic(&symbols, eps, T::zero(), &cfg.periodic)?);
    let mut x = NanopteronState::zero(&grid).flatten();
    let mut log = IterationLog::default();
    let mut fp = FixedPointConfig::new(cfg.tol, cfg.max_iter);
    fp.anderson = cfg.anderson;
    for _ in 0..20 {
        let mut err = None;
        let result = iterate(x.clone(), &fp, |v| {
            let s = NanopteronState::unflatten(&grid, v);
            if (s.a - ripple.wave.a).abs() > cfg.resolve_fraction * s.a.abs() {
                match solve_periodic(&symbols, eps, s.a, &cfg.periodic) {
                    Ok(w) => {
                        ripple = op.ripple(w);
                        solves += 1;
                    }
                    Err(e) => {
                        err = Some(e.clone());
                        return Err(e);
                    }
                }
            }
            Ok(op.n_maps_with(&s, &ripple, cfg.form)?.flatten())
        });
        if let Some(e) = err {
            return Err(e);
        }
        let (xn, l) = result?;
        log.changes.extend(l.changes);
        log.ratios.extend(l.ratios);
        x = xn;
        let a = x[x.len() - 1];
        if a == ripple.wave.a {
            break;
        }
        // bring the ripple to the final amplitude and polish
        ripple = op.ripple(solve_periodic(&symbols, eps, a, &cfg.periodic)?);
        solves += 1;
        fp.max_iter = cfg.max_iter;
    }
    let state = NanopteronState::unflatten(&grid, &x);
    let wave = ripple.wave.clone();
    let residual = op.residual(&state, &wave)?;
    let terms = op.terms_with(&state, &ripple);
    let e2 = eps * eps;
    let solvability = op.iota(&op.apply_t(&state.eta[1]).sub(&terms.g.scale(e2))).abs();
    let q = default_q(symbols.alpha());
    let variant = NormVariant::Full(Weight::CoshOfQx);
    let eta_weighted =
        weighted_norm(&state.eta[0], q, 1, variant).hypot(weighted_norm(&state.eta[1], q, 1, variant));
    let diagnostics = NanopteronDiagnostics {
        log,
        residual,
        upsilon: op.upsilon(),
        solvability,
        eta_max: state.eta[0].max_abs().max(state.eta[1].max_abs()),
        eta_l2: state.eta[0].l2_norm().hypot(state.eta[1].l2_norm()),
        eta_weighted,
        q,
        periodic_solves: solves,
        symmetry_defect: state.max_symmetry_defect(),
        n: grid.n(),
    };
    Ok(NanopteronSolution { state, wave, diagnostics })
}

/// Spectrum helper for diagnostics: `|f̂|` at the grid wavenumbers.
pub fn spectrum_magnitude<T: Real>(f: &LineField<T>) -> Vec<T> {
    f.spectrum().iter().map(|c: &Complex<T>| c.norm()).collect()
}
