//! Bilinear and trilinear long-wave operators.
//!
//! ```text
//! B^ε(θ, θ̀)    = J₁^ε M_{β/κ} [(J^ε θ)·(J^ε θ̀)]
//! Q^ε(θ, θ̀, θ̆) = J₁^ε M_{1/κ} [(J^ε θ)·(J^ε θ̀)·𝒩(ε² J^ε θ̆)]
//! 𝒩(h)         = h·N(h)   (componentwise)
//! ```
//!
//! where `M_γ = diag(γ, 1)` and `J^ε`, `J₁^ε` have symbols `J̃(εK)`, `J̃₁(εK)`.
//!
//! Fields are superpositions of a decaying part on a [`LineGrid`] and an
//! even periodic part `g(ωX)` stored as cosine coefficients. Products
//! involving a decaying factor decay and are formed on the line grid, with
//! the periodic factor sampled there; products of two periodic parts stay
//! periodic and are formed on a [`PeriodicGrid`].

use std::sync::Arc;

use crate::dispersion::{Mat2, SymbolSet};
use crate::error::{Error, Result};
use crate::model::{DimerParams, Spring};
use crate::scalar::{idx, lit, Real};
use crate::spectral::{LineField, LineGrid, PeriodicField, PeriodicGrid};

/// Which diagonal scaling `Q^ε` uses before `J₁^ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QScaling {
    /// `M_{1/κ}`, as produced by factoring `J₁L₁ = ΛJ₁M_{1/κ}`.
    #[default]
    OneOverKappa,
    /// `M_{β/κ}`, the variant printed in one definition of `Q^ε`.
    BetaOverKappa,
}

/// Periodic half of a [`VectorField`]: `(g₁(ωX), g₂(ωX))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPart<T> {
    pub comps: [PeriodicField<T>; 2],
    pub omega: T,
}

impl<T: Real> PeriodicPart<T> {
    pub fn modes(&self) -> usize {
        self.comps[0].modes().max(self.comps[1].modes())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { comps: [self.comps[0].scale(s), self.comps[1].scale(s)], omega: self.omega }
    }
}

/// Two-component profile: decaying line part plus optional periodic part.
#[derive(Debug, Clone)]
pub struct VectorField<T: Real> {
    pub line: [LineField<T>; 2],
    pub periodic: Option<PeriodicPart<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: &Arc<LineGrid<T>>) -> Self {
        Self { line: [LineField::zeros(grid), LineField::zeros(grid)], periodic: None }
    }

    pub fn line(a: LineField<T>, b: LineField<T>) -> Self {
        assert!(a.same_grid(&b), "components on different grids");
        Self { line: [a, b], periodic: None }
    }

    /// `(f, 0)`.
    pub fn first(f: LineField<T>) -> Self {
        let z = LineField::zeros(f.grid());
        Self::line(f, z)
    }

    /// `(0, f)`.
    pub fn second(f: LineField<T>) -> Self {
        let z = LineField::zeros(f.grid());
        Self::line(z, f)
    }

    pub fn periodic(grid: &Arc<LineGrid<T>>, part: PeriodicPart<T>) -> Self {
        Self { line: [LineField::zeros(grid), LineField::zeros(grid)], periodic: Some(part) }
    }

    pub fn grid(&self) -> &Arc<LineGrid<T>> {
        self.line[0].grid()
    }

    pub fn has_line_part(&self) -> bool {
        self.line.iter().any(|f| f.values().iter().any(|v| !v.is_zero()))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            line: [self.line[0].scale(s), self.line[1].scale(s)],
            periodic: self.periodic.as_ref().map(|p| p.scale(s)),
        }
    }

    /// Line part of `self + other`; periodic parts must match in `ω`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let periodic = match (&self.periodic, &other.periodic) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p.clone()),
            (Some(p), Some(q)) => {
                if p.omega != q.omega {
                    return Err(Error::Incompatible("periodic parts with different frequencies".into()));
                }
                Some(PeriodicPart {
                    comps: [p.comps[0].add(&q.comps[0]), p.comps[1].add(&q.comps[1])],
                    omega: p.omega,
                })
            }
        };
        Ok(Self { line: [self.line[0].add(&other.line[0]), self.line[1].add(&other.line[1])], periodic })
    }

    /// Total field sampled at the line nodes.
    pub fn sample(&self) -> [LineField<T>; 2] {
        match &self.periodic {
            None => self.line.clone(),
            Some(p) => {
                let nodes = self.grid().nodes();
                let mut out = self.line.clone();
                for c in 0..2 {
                    let vals = sample_cosines(&p.comps[c], p.omega, &nodes);
                    for (o, v) in out[c].values_mut().iter_mut().zip(vals) {
                        *o = *o + v;
                    }
                }
                out
            }
        }
    }

    pub fn max_symmetry_defect(&self) -> T {
        self.line[0].symmetry_defect().max(self.line[1].symmetry_defect())
    }
}

/// `Σ_j c_j cos(jωx)` at each point, by the Chebyshev recurrence. Modes
/// are included while `jω ≤ cutoff`.
fn sample_cosines_cut<T: Real>(f: &PeriodicField<T>, omega: T, xs: &[T], cutoff: T) -> Vec<T> {
    let two = lit::<T>(2.0);
    let jmax = f.coeffs().iter().enumerate().rev().find(|(j, c)| {
        !c.is_zero() && omega * idx::<T>(*j) <= cutoff
    });
    let Some((jmax, _)) = jmax else { return vec![T::zero(); xs.len()] };
    let c = f.coeffs();
    xs.iter()
        .map(|&x| {
            let y = omega * x;
            let cy = y.cos();
            let (mut prev, mut cur) = (T::one(), cy);
            let mut acc = c[0];
            for (j, &cj) in c.iter().enumerate().take(jmax + 1).skip(1) {
                if j > 1 {
                    let next = two * cy * cur - prev;
                    prev = cur;
                    cur = next;
                    if j % 16 == 0 {
                        cur = (idx::<T>(j) * y).cos();
                        prev = (idx::<T>(j - 1) * y).cos();
                    }
                }
                acc = acc + cj * cur;
            }
            acc
        })
        .collect()
}

fn sample_cosines<T: Real>(f: &PeriodicField<T>, omega: T, xs: &[T]) -> Vec<T> {
    sample_cosines_cut(f, omega, xs, T::infinity())
}

fn mat_vec<T: Real>(m: &Mat2<T>, v: [T; 2]) -> [T; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Pointwise `𝒩(h) = (h₁N₁(h₁), h₂N₂(h₂))`.
pub fn cal_n<T: Real>(params: &DimerParams<T>, h: [T; 2]) -> [T; 2] {
    [
        h[0] * params.remainder(Spring::Odd).eval(&h[0]),
        h[1] * params.remainder(Spring::Even).eval(&h[1]),
    ]
}

fn has_remainder<T: Real>(params: &DimerParams<T>) -> bool {
    !params.remainder(Spring::Odd).is_zero() || !params.remainder(Spring::Even).is_zero()
}

/// Precomputed long-wave symbol tables on one line grid for one `ε`.
#[derive(Debug, Clone)]
pub struct LongWaveOps<T: Real> {
    symbols: SymbolSet<T>,
    eps: T,
    grid: Arc<LineGrid<T>>,
    j: [[Vec<T>; 2]; 2],
    j1: [[Vec<T>; 2]; 2],
    varpi: Vec<T>,
    varpi0: Vec<T>,
    lambda_plus: Vec<T>,
    t_sym: Vec<T>,
    fine_nodes: Vec<T>,
    q_scaling: QScaling,
}

fn split_tables<T: Real>(mats: &[Mat2<T>]) -> [[Vec<T>; 2]; 2] {
    let pick = |a: usize, b: usize| mats.iter().map(|m| m[a][b]).collect::<Vec<T>>();
    [[pick(0, 0), pick(0, 1)], [pick(1, 0), pick(1, 1)]]
}

impl<T: Real> LongWaveOps<T> {
    /// `eps = 0` gives the formal limit operators (`J⁰`, `ϖ⁰`).
    pub fn new(symbols: SymbolSet<T>, eps: T, grid: &Arc<LineGrid<T>>) -> Result<Self> {
        if !(eps >= T::zero()) || !eps.is_finite() {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {eps}")));
        }
        let ks = grid.abs_wavenumbers();
        let jm: Vec<Mat2<T>> = ks.iter().map(|&k| symbols.j_matrix(eps * k)).collect();
        let j1m: Vec<Mat2<T>> = ks.iter().map(|&k| symbols.j1_matrix(eps * k)).collect();
        let varpi0: Vec<T> = ks.iter().map(|&k| symbols.varpi0(k)).collect();
        let varpi = if eps == T::zero() {
            varpi0.clone()
        } else {
            ks.iter().map(|&k| symbols.varpi_eps(eps, k)).collect()
        };
        let lambda_plus = ks.iter().map(|&k| symbols.lambda_plus(eps * k)).collect();
        let t_sym = ks.iter().map(|&k| symbols.t_eps(eps, k)).collect();
        Ok(Self {
            j: split_tables(&jm),
            j1: split_tables(&j1m),
            varpi,
            varpi0,
            lambda_plus,
            t_sym,
            fine_nodes: grid.fine_nodes(),
            grid: Arc::clone(grid),
            symbols,
            eps,
            q_scaling: QScaling::default(),
        })
    }

    pub fn with_q_scaling(mut self, q: QScaling) -> Self {
        self.q_scaling = q;
        self
    }

    pub fn q_scaling(&self) -> QScaling {
        self.q_scaling
    }

    pub fn symbols(&self) -> &SymbolSet<T> {
        &self.symbols
    }

    pub fn params(&self) -> &DimerParams<T> {
        self.symbols.params()
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn grid(&self) -> &Arc<LineGrid<T>> {
        &self.grid
    }

    /// `ϖ^ε` table.
    pub fn varpi(&self) -> &[T] {
        &self.varpi
    }

    pub fn varpi0(&self) -> &[T] {
        &self.varpi0
    }

    /// `λ₊^ε` table.
    pub fn lambda_plus(&self) -> &[T] {
        &self.lambda_plus
    }

    /// `𝒯_ε` table.
    pub fn t_symbol(&self) -> &[T] {
        &self.t_sym
    }

    /// First-component weight of `M`: `β/κ` for `B^ε`, per [`QScaling`] for `Q^ε`.
    pub fn gamma(&self, cubic: bool) -> T {
        let kappa = self.symbols.kappa();
        let beta = self.symbols.params().beta();
        match (cubic, self.q_scaling) {
            (false, _) | (true, QScaling::BetaOverKappa) => beta / kappa,
            (true, QScaling::OneOverKappa) => T::one() / kappa,
        }
    }

    /// Apply a matrix symbol given as four tables to a pair of spectra.
    fn mat_apply(
        tables: &[[Vec<T>; 2]; 2],
        spec: [Vec<num_complex::Complex<T>>; 2],
    ) -> [Vec<num_complex::Complex<T>>; 2] {
        let n = spec[0].len();
        let mut out = [spec[0].clone(), spec[1].clone()];
        for k in 0..n {
            let (a, b) = (spec[0][k], spec[1][k]);
            out[0][k] = a * tables[0][0][k] + b * tables[0][1][k];
            out[1][k] = a * tables[1][0][k] + b * tables[1][1][k];
        }
        out
    }

    /// `J^ε θ` on the line nodes.
    pub fn j_line(&self, theta: &VectorField<T>) -> [LineField<T>; 2] {
        let spec = Self::mat_apply(&self.j, [theta.line[0].spectrum(), theta.line[1].spectrum()]);
        let [s0, s1] = spec;
        let mut out = [
            LineField::from_raw(&self.grid, self.grid.inverse(s0)),
            LineField::from_raw(&self.grid, self.grid.inverse(s1)),
        ];
        if let Some(p) = &theta.periodic {
            let nodes = self.grid.nodes();
            let jp = self.j_periodic(p);
            for c in 0..2 {
                let vals = sample_cosines_cut(&jp[c], p.omega, &nodes, self.grid.nyquist());
                for (o, v) in out[c].values_mut().iter_mut().zip(vals) {
                    *o = *o + v;
                }
            }
        }
        out
    }

    /// `J^ε` on a periodic part: mode `j` multiplied by `J̃(εωj)`.
    pub fn j_periodic(&self, p: &PeriodicPart<T>) -> [PeriodicField<T>; 2] {
        apply_mat_periodic(&self.symbols, self.eps, p, false)
    }

    /// `J^ε θ` sampled on the doubled grid.
    pub fn j_fine(&self, theta: &VectorField<T>) -> [Vec<T>; 2] {
        let spec = Self::mat_apply(&self.j, [theta.line[0].spectrum(), theta.line[1].spectrum()]);
        let mut out = [self.grid.to_fine(&spec[0]), self.grid.to_fine(&spec[1])];
        if let Some(p) = &theta.periodic {
            let jp = self.j_periodic(p);
            for c in 0..2 {
                let vals = sample_cosines_cut(&jp[c], p.omega, &self.fine_nodes, self.grid.nyquist());
                for (o, v) in out[c].iter_mut().zip(vals) {
                    *o = *o + v;
                }
            }
        }
        out
    }

    /// `J₁^ε M_{γ,1}[·]` applied to doubled-grid products, truncated back to the line grid.
    pub fn finish(&self, prod: [Vec<T>; 2], gamma: T) -> [LineField<T>; 2] {
        let [p0, p1] = prod;
        let mut s0 = self.grid.from_fine(&p0);
        let s1 = self.grid.from_fine(&p1);
        for c in s0.iter_mut() {
            *c = *c * gamma;
        }
        let [o0, o1] = Self::mat_apply(&self.j1, [s0, s1]);
        [
            LineField::from_raw(&self.grid, self.grid.inverse(o0)),
            LineField::from_raw(&self.grid, self.grid.inverse(o1)),
        ]
    }

    /// `(J^εθ)·(J^εθ̀)` on the doubled grid.
    pub fn product_fine(a: &[Vec<T>; 2], b: &[Vec<T>; 2]) -> [Vec<T>; 2] {
        [
            a[0].iter().zip(&b[0]).map(|(&x, &y)| x * y).collect(),
            a[1].iter().zip(&b[1]).map(|(&x, &y)| x * y).collect(),
        ]
    }

    /// `B^ε` from precomputed doubled-grid samples of `J^εθ` and `J^εθ̀`.
    pub fn b_from_fine(&self, a: &[Vec<T>; 2], b: &[Vec<T>; 2]) -> [LineField<T>; 2] {
        self.finish(Self::product_fine(a, b), self.gamma(false))
    }

    /// `ε² J^ε θ̆` fed through `𝒩`, on the doubled grid.
    pub fn cal_n_fine(&self, jb: &[Vec<T>; 2]) -> [Vec<T>; 2] {
        let e2 = self.eps * self.eps;
        let params = self.params();
        let mut out = [vec![T::zero(); jb[0].len()], vec![T::zero(); jb[0].len()]];
        for i in 0..jb[0].len() {
            let v = cal_n(params, [e2 * jb[0][i], e2 * jb[1][i]]);
            out[0][i] = v[0];
            out[1][i] = v[1];
        }
        out
    }

    /// `Q^ε` from doubled-grid samples of `J^εθ`, `J^εθ̀` and `𝒩(ε²J^εθ̆)`.
    pub fn q_from_fine(&self, a: &[Vec<T>; 2], b: &[Vec<T>; 2], n: &[Vec<T>; 2]) -> [LineField<T>; 2] {
        let ab = Self::product_fine(a, b);
        self.finish(Self::product_fine(&ab, n), self.gamma(true))
    }

    /// Whether `𝒩` is identically zero (all products with it vanish).
    pub fn cubic_vanishes(&self) -> bool {
        !has_remainder(self.params())
    }

    /// `B^ε(θ, θ̀)` evaluated on the line grid. Exact for the decaying part
    /// whenever each product has a decaying factor.
    pub fn b_line(&self, theta: &VectorField<T>, theta2: &VectorField<T>) -> [LineField<T>; 2] {
        self.b_from_fine(&self.j_fine(theta), &self.j_fine(theta2))
    }

    /// `Q^ε(θ, θ̀, θ̆)` evaluated on the line grid.
    pub fn q_line(
        &self,
        theta: &VectorField<T>,
        theta2: &VectorField<T>,
        theta3: &VectorField<T>,
    ) -> [LineField<T>; 2] {
        if self.cubic_vanishes() {
            return [LineField::zeros(&self.grid), LineField::zeros(&self.grid)];
        }
        let n = self.cal_n_fine(&self.j_fine(theta3));
        self.q_from_fine(&self.j_fine(theta), &self.j_fine(theta2), &n)
    }

    /// `B^ε(θ, θ̀)` with the representation split: products with a
    /// decaying factor on the line grid, periodic × periodic on a
    /// periodic grid.
    pub fn b_eps(&self, theta: &VectorField<T>, theta2: &VectorField<T>) -> Result<VectorField<T>> {
        let strip = |v: &VectorField<T>| VectorField { line: v.line.clone(), periodic: None };
        let per_only = |v: &VectorField<T>| v.periodic.clone().map(|p| VectorField::periodic(&self.grid, p));
        let jb = self.j_fine(theta2);
        let line = if theta.has_line_part() || theta2.has_line_part() {
            // B(a, b) − B(a_per, b_per) = B(a_line, b) + B(a_per, b_line)
            let jal = self.j_fine(&strip(theta));
            let mut out = self.b_from_fine(&jal, &jb);
            if let Some(ap) = per_only(theta) {
                let jap = self.j_fine(&ap);
                let jbl = self.j_fine(&strip(theta2));
                let extra = self.b_from_fine(&jap, &jbl);
                out = [out[0].add(&extra[0]), out[1].add(&extra[1])];
            }
            out
        } else {
            [LineField::zeros(&self.grid), LineField::zeros(&self.grid)]
        };
        let periodic = match (&theta.periodic, &theta2.periodic) {
            (Some(p), Some(q)) => {
                if p.omega != q.omega {
                    return Err(Error::Incompatible("periodic parts with different frequencies".into()));
                }
                // the product of modes ≤ m₁ and ≤ m₂ is exactly representable with m₁ + m₂ modes
                let m = p.modes() + q.modes();
                let pops = PeriodicOps::new(self.symbols.clone(), self.eps, m)?
                    .with_q_scaling(self.q_scaling);
                Some(PeriodicPart { comps: pops.b(&p.comps, &q.comps, p.omega), omega: p.omega })
            }
            _ => None,
        };
        Ok(VectorField { line, periodic })
    }

    /// `Q^ε(θ, θ̀, θ̆)`. Periodic output when all three arguments are purely
    /// periodic with one frequency; otherwise evaluated on the line grid.
    pub fn q_eps(
        &self,
        theta: &VectorField<T>,
        theta2: &VectorField<T>,
        theta3: &VectorField<T>,
    ) -> Result<VectorField<T>> {
        let all_periodic = [theta, theta2, theta3].iter().all(|v| !v.has_line_part() && v.periodic.is_some());
        if all_periodic {
            let (p, q, r) = (
                theta.periodic.as_ref().unwrap(),
                theta2.periodic.as_ref().unwrap(),
                theta3.periodic.as_ref().unwrap(),
            );
            if p.omega != q.omega || p.omega != r.omega {
                return Err(Error::Incompatible("periodic parts with different frequencies".into()));
            }
            let m = p.modes().max(q.modes()).max(r.modes());
            let pops = PeriodicOps::new(self.symbols.clone(), self.eps, m)?.with_q_scaling(self.q_scaling);
            let comps = pops.q(&p.comps, &q.comps, &r.comps, p.omega);
            return Ok(VectorField::periodic(&self.grid, PeriodicPart { comps, omega: p.omega }));
        }
        Ok(VectorField { line: self.q_line(theta, theta2, theta3), periodic: None })
    }

    /// Pointwise `𝒩` of the sampled field (periodic part resampled onto the
    /// line nodes), or of the periodic part alone when there is no line part.
    pub fn cal_n_field(&self, v: &VectorField<T>) -> Result<VectorField<T>> {
        if !v.has_line_part() {
            if let Some(p) = &v.periodic {
                let m = p.modes();
                let pops = PeriodicOps::new(self.symbols.clone(), self.eps, m)?;
                let s = [pops.grid.synthesize(&p.comps[0]), pops.grid.synthesize(&p.comps[1])];
                let mut out = [s[0].clone(), s[1].clone()];
                for i in 0..s[0].len() {
                    let r = cal_n(self.params(), [s[0][i], s[1][i]]);
                    out[0][i] = r[0];
                    out[1][i] = r[1];
                }
                let comps = [pops.grid.analyze(&out[0], m), pops.grid.analyze(&out[1], m)];
                return Ok(VectorField::periodic(&self.grid, PeriodicPart { comps, omega: p.omega }));
            }
        }
        let s = v.sample();
        let params = self.params();
        let vals: Vec<[T; 2]> =
            s[0].values().iter().zip(s[1].values()).map(|(&a, &b)| cal_n(params, [a, b])).collect();
        Ok(VectorField::line(
            LineField::from_raw(&self.grid, vals.iter().map(|v| v[0]).collect()),
            LineField::from_raw(&self.grid, vals.iter().map(|v| v[1]).collect()),
        ))
    }
}

fn apply_mat_periodic<T: Real>(
    symbols: &SymbolSet<T>,
    eps: T,
    p: &PeriodicPart<T>,
    inverse: bool,
) -> [PeriodicField<T>; 2] {
    let m = p.modes();
    let (a, b) = (p.comps[0].resized(m), p.comps[1].resized(m));
    let mut out = [PeriodicField::zeros(m), PeriodicField::zeros(m)];
    for j in 0..=m {
        let k = eps * p.omega * idx::<T>(j);
        let mat = if inverse { symbols.j1_matrix(k) } else { symbols.j_matrix(k) };
        let v = mat_vec(&mat, [a.coeffs()[j], b.coeffs()[j]]);
        out[0].coeffs_mut()[j] = v[0];
        out[1].coeffs_mut()[j] = v[1];
    }
    out
}

/// Long-wave operators on purely periodic profiles `g(ωX)`.
#[derive(Debug)]
pub struct PeriodicOps<T: Real> {
    symbols: SymbolSet<T>,
    eps: T,
    modes: usize,
    grid: PeriodicGrid<T>,
    q_scaling: QScaling,
}

impl<T: Real> PeriodicOps<T> {
    /// Operators keeping modes `0..=modes`, collocated finely enough for
    /// products of five series without aliasing.
    pub fn new(symbols: SymbolSet<T>, eps: T, modes: usize) -> Result<Self> {
        let grid = PeriodicGrid::for_modes(modes.max(1), 5)?;
        Ok(Self { symbols, eps, modes, grid, q_scaling: QScaling::default() })
    }

    pub fn with_q_scaling(mut self, q: QScaling) -> Self {
        self.q_scaling = q;
        self
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn symbols(&self) -> &SymbolSet<T> {
        &self.symbols
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Multiply mode `j` by `μ̃(ωj)` for a scalar symbol in the long-wave variable.
    pub fn apply_scalar(&self, f: &PeriodicField<T>, omega: T, symbol: impl Fn(T) -> T) -> PeriodicField<T> {
        let coeffs = f.coeffs().iter().enumerate().map(|(j, &c)| c * symbol(omega * idx(j))).collect();
        PeriodicField::new(coeffs)
    }

    /// Samples of `J^ε φ` at the collocation nodes.
    pub fn j_samples(&self, phi: &[PeriodicField<T>; 2], omega: T) -> [Vec<T>; 2] {
        let jp = apply_mat_periodic(
            &self.symbols,
            self.eps,
            &PeriodicPart { comps: phi.clone(), omega },
            false,
        );
        [self.grid.synthesize(&jp[0]), self.grid.synthesize(&jp[1])]
    }

    /// `J₁^ε M_{γ,1}` of collocated products.
    pub fn finish(&self, prod: [Vec<T>; 2], gamma: T, omega: T) -> [PeriodicField<T>; 2] {
        let c0 = self.grid.analyze(&prod[0], self.modes).scale(gamma);
        let c1 = self.grid.analyze(&prod[1], self.modes);
        apply_mat_periodic(&self.symbols, self.eps, &PeriodicPart { comps: [c0, c1], omega }, true)
    }

    fn gamma(&self, cubic: bool) -> T {
        let kappa = self.symbols.kappa();
        let beta = self.symbols.params().beta();
        match (cubic, self.q_scaling) {
            (false, _) | (true, QScaling::BetaOverKappa) => beta / kappa,
            (true, QScaling::OneOverKappa) => T::one() / kappa,
        }
    }

    pub fn b(&self, phi: &[PeriodicField<T>; 2], phi2: &[PeriodicField<T>; 2], omega: T) -> [PeriodicField<T>; 2] {
        let a = self.j_samples(phi, omega);
        let b = self.j_samples(phi2, omega);
        self.finish(LongWaveOps::product_fine(&a, &b), self.gamma(false), omega)
    }

    /// `Q^ε(φ, φ̀, φ̆)`.
    pub fn q(
        &self,
        phi: &[PeriodicField<T>; 2],
        phi2: &[PeriodicField<T>; 2],
        phi3: &[PeriodicField<T>; 2],
        omega: T,
    ) -> [PeriodicField<T>; 2] {
        if !has_remainder(self.symbols.params()) {
            return [PeriodicField::zeros(self.modes), PeriodicField::zeros(self.modes)];
        }
        let a = self.j_samples(phi, omega);
        let b = self.j_samples(phi2, omega);
        let c = self.j_samples(phi3, omega);
        let e2 = self.eps * self.eps;
        let params = self.symbols.params();
        let mut n = [vec![T::zero(); c[0].len()], vec![T::zero(); c[0].len()]];
        for i in 0..c[0].len() {
            let v = cal_n(params, [e2 * c[0][i], e2 * c[1][i]]);
            n[0][i] = v[0];
            n[1][i] = v[1];
        }
        let ab = LongWaveOps::product_fine(&a, &b);
        self.finish(LongWaveOps::product_fine(&ab, &n), self.gamma(true), omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kdv::Soliton;
    use crate::model::Polynomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(eps: f64, n1: Vec<f64>, n2: Vec<f64>) -> (LongWaveOps<f64>, Soliton<f64>) {
        let p = DimerParams::new(2.0, 1.0, Polynomial::new(n1), Polynomial::new(n2)).unwrap();
        let s = Soliton::new(&p);
        let g = LineGrid::new(30.0, 1024).unwrap();
        (LongWaveOps::new(SymbolSet::new(p).unwrap(), eps, &g).unwrap(), s)
    }

    fn random_even(g: &Arc<LineGrid<f64>>, rng: &mut ChaCha8Rng) -> LineField<f64> {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let w: f64 = rng.gen_range(0.5..2.0);
        let k: f64 = rng.gen_range(0.0..3.0);
        LineField::from_fn(g, |x| a * (-(x / w).powi(2)).exp() * (k * x).cos())
    }

    fn max_diff(a: &[LineField<f64>; 2], b: &[LineField<f64>; 2]) -> f64 {
        a[0].sub(&b[0]).max_abs().max(a[1].sub(&b[1]).max_abs())
    }

    #[test]
    fn cal_n_examples() {
        let p = DimerParams::quadratic(2.0, 1.0).unwrap();
        assert_eq!(cal_n(&p, [0.3, -0.2]), [0.0, 0.0]);
        let p = DimerParams::new(2.0, 1.0, Polynomial::new(vec![3.0]), Polynomial::new(vec![3.0])).unwrap();
        assert_eq!(cal_n(&p, [1.0, 1.0]), [3.0, 3.0]);
    }

    #[test]
    fn b_zero_and_symmetry() {
        let (ops, _) = setup(0.1, vec![], vec![]);
        let g = ops.grid().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = VectorField::line(random_even(&g, &mut rng), random_even(&g, &mut rng));
        let b = VectorField::line(random_even(&g, &mut rng), random_even(&g, &mut rng));
        let z = VectorField::zeros(&g);
        assert!(max_diff(&ops.b_line(&a, &z), &[LineField::zeros(&g), LineField::zeros(&g)]) == 0.0);
        assert!(max_diff(&ops.b_line(&a, &b), &ops.b_line(&b, &a)) <= 1e-12);
        let s = 0.37;
        let lhs = ops.b_line(&a.scale(s), &b);
        let rhs = ops.b_line(&a, &b);
        assert!(max_diff(&lhs, &[rhs[0].scale(s), rhs[1].scale(s)]) <= 1e-12);
        let out = ops.b_line(&a, &b);
        assert!(out[0].symmetry_defect() < 1e-11 && out[1].symmetry_defect() < 1e-11);
    }

    #[test]
    fn b_zero_limit_closed_form() {
        let (ops, s) = setup(0.0, vec![], vec![]);
        let g = ops.grid().clone();
        let sig = VectorField::first(s.sigma_field(&g));
        let b = ops.b_line(&sig, &sig);
        let want = s.sigma_field(&g).map(|v| 0.75 * v * v);
        assert!(b[0].sub(&want).max_abs() < 1e-12);
        // J₁⁰ second row is κ/(κ+1)·(1, −1/κ)
        let k = 2.0;
        let beta = 1.0;
        let want2 = s.sigma_field(&g).map(|v| k / (k + 1.0) * ((beta / k) * (v / k).powi(2) - v * v / k));
        assert!(b[1].sub(&want2).max_abs() < 1e-12);
        // ε → 0 convergence of the first component
        let mut last = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05] {
            let (ops_e, _) = setup(eps, vec![], vec![]);
            let be = ops_e.b_line(&sig, &sig);
            let d = be[0].sub(&want).max_abs();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn q_vanishes_without_remainder() {
        let (ops, s) = setup(0.1, vec![], vec![]);
        let g = ops.grid().clone();
        let sig = VectorField::first(s.sigma_field(&g));
        let q = ops.q_line(&sig, &sig, &sig);
        assert_eq!(q[0].max_abs(), 0.0);
        assert_eq!(q[1].max_abs(), 0.0);
    }

    #[test]
    fn q_matches_pointwise_oracle() {
        // N linear: N_j(h) = c_j + d_j h; compare against direct per-node evaluation
        let (ops, s) = setup(0.2, vec![0.5, 0.25], vec![-0.3, 1.0]);
        let g = ops.grid().clone();
        let a = VectorField::line(s.sigma_field(&g), s.sigma_field(&g).scale(0.2));
        let b = VectorField::line(s.sigma_field(&g).scale(0.5), s.sigma_field(&g));
        let c = VectorField::line(s.sigma_field(&g).scale(2.0), s.sigma_field(&g).scale(-1.0));
        let got = ops.q_line(&a, &b, &c);
        let (ja, jb, jc) = (ops.j_line(&a), ops.j_line(&b), ops.j_line(&c));
        let e2 = 0.04;
        let mut prod = [vec![0.0; g.n()], vec![0.0; g.n()]];
        for i in 0..g.n() {
            let h1 = e2 * jc[0].values()[i];
            let h2 = e2 * jc[1].values()[i];
            let n1 = h1 * (0.5 + 0.25 * h1);
            let n2 = h2 * (-0.3 + 1.0 * h2);
            prod[0][i] = ja[0].values()[i] * jb[0].values()[i] * n1 / 2.0;
            prod[1][i] = ja[1].values()[i] * jb[1].values()[i] * n2;
        }
        let p0 = LineField::new(g.clone(), prod[0].clone()).unwrap();
        let p1 = LineField::new(g.clone(), prod[1].clone()).unwrap();
        // apply J₁ spectrally
        let sp = [p0.spectrum(), p1.spectrum()];
        let [o0, o1] = LongWaveOps::mat_apply(&ops.j1, sp);
        let want = [
            LineField::new(g.clone(), g.inverse(o0)).unwrap(),
            LineField::new(g.clone(), g.inverse(o1)).unwrap(),
        ];
        assert!(max_diff(&got, &want) < 1e-12 * want[0].max_abs().max(want[1].max_abs()).max(1e-3));
        // linearity in slot 1
        let got2 = ops.q_line(&a.scale(1.7), &b, &c);
        assert!(max_diff(&got2, &[got[0].scale(1.7), got[1].scale(1.7)]) < 1e-12);
    }

    #[test]
    fn q_over_b_scales_like_eps_squared() {
        let mut ratios = vec![];
        for eps in [0.2, 0.1, 0.05] {
            let (ops, s) = setup(eps, vec![1.0], vec![1.0]);
            let g = ops.grid().clone();
            let sig = VectorField::first(s.sigma_field(&g));
            let q = ops.q_line(&sig, &sig, &sig);
            let b = ops.b_line(&sig, &sig);
            ratios.push(q[0].l2_norm().hypot(q[1].l2_norm()) / b[0].l2_norm().hypot(b[1].l2_norm()));
        }
        for w in ratios.windows(2) {
            let r = w[0] / w[1];
            assert!(r > 3.0 && r < 5.0, "{ratios:?}");
        }
    }

    #[test]
    fn representation_split_agrees_with_direct_sampling() {
        // ω chosen commensurate with the box so the periodic part lives on the grid.
        let p = DimerParams::quadratic(2.0, 1.0).unwrap();
        let s = Soliton::new(&p);
        let g = LineGrid::new(8.0 * std::f64::consts::PI, 2048).unwrap();
        let ops = LongWaveOps::new(SymbolSet::new(p).unwrap(), 0.1, &g).unwrap();
        let omega = 2.0; // 16 grid wavenumbers
        let part = PeriodicPart {
            comps: [PeriodicField::new(vec![0.0, 0.01, 0.002]), PeriodicField::new(vec![0.0, 1.0, 0.05])],
            omega,
        };
        let theta = VectorField { line: [s.sigma_field(&g), LineField::zeros(&g)], periodic: Some(part.clone()) };
        let split = ops.b_eps(&theta, &theta).unwrap();
        let total = split.sample();
        let direct = ops.b_line(&theta, &theta);
        assert!(max_diff(&total, &direct) < 1e-10);
        // pure periodic input stays periodic
        let per = VectorField::periodic(&g, part);
        let out = ops.b_eps(&per, &per).unwrap();
        assert!(!out.has_line_part() && out.periodic.is_some());
    }
}
