//! Direct simulation of the nondimensional spring-dimer lattice
//!
//! ```text
//! r̈_j = F_{j+1}(r_{j+1}) − 2F_j(r_j) + F_{j−1}(r_{j−1}),
//! ```
//!
//! with `F_j` the odd or even spring force. The integrated variables are the
//! relative displacements `r_j` and the particle velocities `m_j = u̇_j`, with
//! `ṙ_j = m_{j+1} − m_j` and `ṁ_j = F_j(r_j) − F_{j−1}(r_{j−1})`. Eliminating
//! `m` gives the system above, and the Hamiltonian is simply
//! `Σ m_j²/2 + V_j(r_j)`.
//!
//! Sites `j = −J/2, …, J/2 − 1` wrap periodically.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kdv::Soliton;
use crate::model::{DimerParams, Spring};
use crate::nanopteron_solver::{NanopteronOperators, NanopteronSolution};
use crate::nonlinear::VectorField;
use crate::scalar::{idx, lit, to_f64, Real};
use crate::spectral::{LineField, LineGrid, PeriodicField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta.
    #[default]
    Rk4,
    /// Störmer–Verlet on `(u, u̇)`; symplectic, second order.
    Verlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig<T> {
    /// Site count `J`, even.
    pub sites: usize,
    pub dt: T,
    pub t_final: T,
    /// Keep every `snap_every`-th step (the first and last are always kept).
    pub snap_every: usize,
    pub integrator: Integrator,
}

impl<T: Real> LatticeConfig<T> {
    pub fn new(sites: usize, dt: T, t_final: T) -> Self {
        Self { sites, dt, t_final, snap_every: 1, integrator: Integrator::Rk4 }
    }

    /// `dt ≤ 0.1/√(2+2κ)` keeps well inside the stability region for the
    /// top phonon frequency.
    pub fn max_dt(kappa: T) -> T {
        lit::<T>(0.1) / (lit::<T>(2.0) + lit::<T>(2.0) * kappa).sqrt()
    }

    pub fn validate(&self, params: &DimerParams<T>) -> Result<()> {
        if self.sites < 4 || self.sites % 2 != 0 {
            return Err(Error::InvalidConfig(format!("site count must be even and >= 4, got {}", self.sites)));
        }
        let cap = Self::max_dt(params.kappa());
        if !(self.dt > T::zero() && self.dt <= cap) {
            return Err(Error::InvalidConfig(format!("dt = {} outside (0, {}]", self.dt, cap)));
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!("final time must be >= 0, got {}", self.t_final)));
        }
        if self.snap_every == 0 {
            return Err(Error::InvalidConfig("snap_every must be positive".into()));
        }
        Ok(())
    }

    /// Site label of array index `i`.
    pub fn site(&self, i: usize) -> i64 {
        i as i64 - (self.sites / 2) as i64
    }
}

/// Positions and velocities of every site.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState<T> {
    /// `r_j`.
    pub r: Vec<T>,
    /// `u̇_j`.
    pub m: Vec<T>,
}

impl<T: Real> LatticeState<T> {
    pub fn zeros(sites: usize) -> Self {
        Self { r: vec![T::zero(); sites], m: vec![T::zero(); sites] }
    }

    /// Build from `r` and `ṙ`. The mean of `ṙ` is removed first, since a
    /// periodic `u̇` forces `Σṙ_j = 0`; the removed mean is returned.
    pub fn from_displacements(r: Vec<T>, rdot: &[T]) -> (Self, T) {
        let n = rdot.len();
        let mean = rdot.iter().fold(T::zero(), |s, &x| s + x) / idx(n);
        let mut m = vec![T::zero(); n];
        for i in 0..n - 1 {
            m[i + 1] = m[i] + rdot[i] - mean;
        }
        let mm = m.iter().fold(T::zero(), |s, &x| s + x) / idx(n);
        m.iter_mut().for_each(|x| *x = *x - mm);
        (Self { r, m }, mean)
    }

    /// `ṙ_j = u̇_{j+1} − u̇_j`.
    pub fn rdot(&self) -> Vec<T> {
        let n = self.m.len();
        (0..n).map(|i| self.m[(i + 1) % n] - self.m[i]).collect()
    }

    pub fn max_diff(&self, other: &Self) -> T {
        let d = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s.max((x - y).abs()));
        d(&self.r, &other.r).max(d(&self.m, &other.m))
    }
}

/// The lattice right-hand side with cached spring assignment.
#[derive(Debug, Clone)]
pub struct Lattice<T> {
    params: DimerParams<T>,
    springs: Vec<Spring>,
}

impl<T: Real> Lattice<T> {
    pub fn new(params: DimerParams<T>, sites: usize) -> Self {
        let half = (sites / 2) as i64;
        let springs = (0..sites).map(|i| Spring::of_site(i as i64 - half)).collect();
        Self { params, springs }
    }

    pub fn sites(&self) -> usize {
        self.springs.len()
    }

    pub fn params(&self) -> &DimerParams<T> {
        &self.params
    }

    fn forces(&self, r: &[T]) -> Vec<T> {
        r.iter().zip(&self.springs).map(|(x, &s)| self.params.force(s, x)).collect()
    }

    /// `(ṙ, ṁ)`.
    pub fn rhs(&self, s: &LatticeState<T>) -> LatticeState<T> {
        let n = self.sites();
        let f = self.forces(&s.r);
        LatticeState {
            r: (0..n).map(|i| s.m[(i + 1) % n] - s.m[i]).collect(),
            m: (0..n).map(|i| f[i] - f[(i + n - 1) % n]).collect(),
        }
    }

    pub fn energy(&self, s: &LatticeState<T>) -> T {
        let half = lit::<T>(0.5);
        s.r.iter()
            .zip(&s.m)
            .zip(&self.springs)
            .fold(T::zero(), |acc, ((r, &m), &sp)| acc + half * m * m + self.params.potential(sp, r))
    }

    pub fn step(&self, s: &LatticeState<T>, dt: T, method: Integrator) -> LatticeState<T> {
        match method {
            Integrator::Rk4 => self.rk4(s, dt),
            Integrator::Verlet => self.verlet(s, dt),
        }
    }

    fn rk4(&self, s: &LatticeState<T>, dt: T) -> LatticeState<T> {
        let two = lit::<T>(2.0);
        let shifted = |k: &LatticeState<T>, h: T| LatticeState {
            r: s.r.iter().zip(&k.r).map(|(&a, &b)| a + h * b).collect(),
            m: s.m.iter().zip(&k.m).map(|(&a, &b)| a + h * b).collect(),
        };
        let k1 = self.rhs(s);
        let k2 = self.rhs(&shifted(&k1, dt / two));
        let k3 = self.rhs(&shifted(&k2, dt / two));
        let k4 = self.rhs(&shifted(&k3, dt));
        let w = dt / lit(6.0);
        let comb = |x: &[T], a: &[T], b: &[T], c: &[T], d: &[T]| -> Vec<T> {
            (0..x.len()).map(|i| x[i] + w * (a[i] + two * (b[i] + c[i]) + d[i])).collect()
        };
        LatticeState {
            r: comb(&s.r, &k1.r, &k2.r, &k3.r, &k4.r),
            m: comb(&s.m, &k1.m, &k2.m, &k3.m, &k4.m),
        }
    }

    fn verlet(&self, s: &LatticeState<T>, dt: T) -> LatticeState<T> {
        let n = self.sites();
        let half = dt / lit(2.0);
        let kick = |r: &[T], m: &mut Vec<T>| {
            let f = self.forces(r);
            for i in 0..n {
                m[i] = m[i] + half * (f[i] - f[(i + n - 1) % n]);
            }
        };
        let mut m = s.m.clone();
        kick(&s.r, &mut m);
        let r: Vec<T> = (0..n).map(|i| s.r[i] + dt * (m[(i + 1) % n] - m[i])).collect();
        kick(&r, &mut m);
        LatticeState { r, m }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot<T> {
    pub t: T,
    pub state: LatticeState<T>,
}

impl<T: Real> Snapshot<T> {
    pub fn r(&self) -> &[T] {
        &self.state.r
    }

    pub fn rdot(&self) -> Vec<T> {
        self.state.rdot()
    }
}

#[derive(Debug, Clone)]
pub struct LatticeTrajectory<T> {
    pub config: LatticeConfig<T>,
    pub snapshots: Vec<Snapshot<T>>,
    /// Energy at every kept snapshot.
    pub energy: Vec<T>,
}

impl<T: Real> LatticeTrajectory<T> {
    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    /// `max |H(t) − H(0)| / |H(0)|`.
    pub fn energy_drift(&self) -> T {
        let h0 = self.energy[0];
        self.energy.iter().fold(T::zero(), |m, &h| m.max((h - h0).abs())) / h0.abs()
    }
}

/// Integrate from `init` to `cfg.t_final`. The step is shrunk slightly so an
/// integer number of steps lands on the final time.
pub fn simulate<T: Real>(
    params: &DimerParams<T>,
    init: LatticeState<T>,
    cfg: &LatticeConfig<T>,
) -> Result<LatticeTrajectory<T>> {
    cfg.validate(params)?;
    if init.r.len() != cfg.sites || init.m.len() != cfg.sites {
        return Err(Error::Incompatible(format!("initial state has {} sites, config {}", init.r.len(), cfg.sites)));
    }
    let lattice = Lattice::new(params.clone(), cfg.sites);
    let steps = (cfg.t_final / cfg.dt).ceil().to_usize().unwrap_or(0);
    let dt = if steps == 0 { cfg.dt } else { cfg.t_final / idx(steps) };
    let mut s = init;
    let mut snapshots = vec![];
    let mut energy = vec![];
    snapshots.push(Snapshot { t: T::zero(), state: s.clone() });
    energy.push(lattice.energy(&s));
    for k in 1..=steps {
        s = lattice.step(&s, dt, cfg.integrator);
        if s.r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence { iterations: k, last_change: f64::INFINITY, ratio: f64::NAN });
        }
        if k % cfg.snap_every == 0 || k == steps {
            snapshots.push(Snapshot { t: dt * idx(k), state: s.clone() });
            energy.push(lattice.energy(&s));
        }
    }
    Ok(LatticeTrajectory { config: *cfg, snapshots, energy })
}

/// Traveling profile `p(x) = ε²(J^εθ)(εx)`, split into a decaying part
/// sampled on a long-wave grid and a periodic ripple.
#[derive(Debug, Clone)]
pub struct WaveProfile<T: Real> {
    pub eps: T,
    /// Wave speed `c_ε`.
    pub speed: T,
    /// `ε²J^ε(σe₁ + η)` against `X = εx`.
    pub line: [LineField<T>; 2],
    /// `ε²aJ^εφ` as cosine series in `ω X`.
    pub ripple: Option<([PeriodicField<T>; 2], T)>,
    /// Soliton core width in lattice units, `w/ε`.
    pub core_width: T,
}

impl<T: Real> WaveProfile<T> {
    /// Leading order: `p₁ = ε²σ(εx)/κ`, `p₂ = ε²σ(εx)`.
    pub fn leading(params: &DimerParams<T>, eps: T, grid: &Arc<LineGrid<T>>) -> Self {
        let sol = Soliton::new(params);
        let (odd, even) = sol.leading_profiles(params, grid);
        let e2 = eps * eps;
        Self {
            eps,
            speed: (params.sound_speed_sq() + e2).sqrt(),
            line: [odd.scale(e2), even.scale(e2)],
            ripple: None,
            core_width: sol.width / eps,
        }
    }

    /// Full reconstruction from a solved nanopteron.
    pub fn from_solution(op: &NanopteronOperators<T>, sol: &NanopteronSolution<T>) -> Self {
        let eps = op.eps();
        let e2 = eps * eps;
        let ops = op.ops();
        let theta = VectorField::line(op.sigma().add(&sol.state.eta[0]), sol.state.eta[1].clone());
        let [l1, l2] = ops.j_line(&theta);
        let part = sol.wave.part().scale(sol.state.a * e2);
        let rip = ops.j_periodic(&part);
        Self {
            eps,
            speed: op.resonance().c(),
            line: [l1.scale(e2), l2.scale(e2)],
            ripple: Some((rip, part.omega)),
            core_width: op.soliton().width / eps,
        }
    }

    /// The same profile without its ripple.
    pub fn without_ripple(&self) -> Self {
        Self { ripple: None, ..self.clone() }
    }

    fn component(j: i64) -> usize {
        if j.rem_euclid(2) == 1 {
            0
        } else {
            1
        }
    }

    /// `p_{1 or 2}(x)` for each `(x, parity of j)`; `deriv` selects `p′`.
    fn eval_parts(&self, xs: &[T], comp: usize, deriv: bool) -> Vec<T> {
        let big: Vec<T> = xs.iter().map(|&x| self.eps * x).collect();
        let field = if deriv { self.line[comp].derivative(1) } else { self.line[comp].clone() };
        let mut out = field.interpolate(&big);
        if let Some((rip, omega)) = &self.ripple {
            for (o, &xx) in out.iter_mut().zip(&big) {
                *o = *o + eval_cos(&rip[comp], *omega, xx, deriv);
            }
        }
        if deriv {
            out.iter_mut().for_each(|v| *v = *v * self.eps);
        }
        out
    }

    /// `r_j = p(j − s)` at every site of a `sites`-site ring, wrapping
    /// `j − s` into `[−J/2, J/2)`.
    pub fn sample(&self, sites: usize, shift: T, deriv: bool) -> Vec<T> {
        let half = (sites / 2) as i64;
        let js: Vec<i64> = (0..sites).map(|i| i as i64 - half).collect();
        let len = idx::<T>(sites);
        let hl = idx::<T>(sites / 2);
        let mut out = vec![T::zero(); sites];
        for comp in 0..2 {
            let (which, xs): (Vec<usize>, Vec<T>) = js
                .iter()
                .enumerate()
                .filter(|(_, &j)| Self::component(j) == comp)
                .map(|(i, &j)| {
                    let mut x = T::from_i64(j).expect("site index") - shift;
                    x = x - len * ((x + hl) / len).floor();
                    (i, x)
                })
                .unzip();
            for (i, v) in which.into_iter().zip(self.eval_parts(&xs, comp, deriv)) {
                out[i] = v;
            }
        }
        out
    }

    /// `r_j(0) = p(j)` and `ṙ_j(0) = −c p′(j)`.
    pub fn initial_state(&self, sites: usize) -> (LatticeState<T>, T) {
        let r = self.sample(sites, T::zero(), false);
        let rdot: Vec<T> = self.sample(sites, T::zero(), true).into_iter().map(|v| -self.speed * v).collect();
        LatticeState::from_displacements(r, &rdot)
    }
}

fn eval_cos<T: Real>(f: &PeriodicField<T>, omega: T, x: T, deriv: bool) -> T {
    f.coeffs().iter().enumerate().fold(T::zero(), |s, (j, &c)| {
        let w = omega * idx(j);
        if deriv {
            s - c * w * (w * x).sin()
        } else {
            s + c * (w * x).cos()
        }
    })
}

/// `max_j |r_j(t) − p(j − c t)| / max_j |p(j)|` over the whole ring.
pub fn shape_error<T: Real>(snap: &Snapshot<T>, profile: &WaveProfile<T>) -> T {
    shape_error_masked(snap, profile, |_| true)
}

/// As [`shape_error`], skipping sites the wrap seam can have influenced.
///
/// A ripple whose period does not divide `J` is cut at `j = −J/2`. The cut
/// radiates at group speeds up to `group_speed`, and the comparison profile
/// carries its own cut along at `c`. Sites within `group_speed·t + guard`
/// of the segment swept between the two are excluded.
pub fn shape_error_away_from_seam<T: Real>(
    snap: &Snapshot<T>,
    profile: &WaveProfile<T>,
    group_speed: T,
    guard: T,
) -> T {
    let sites = snap.state.r.len();
    let len = idx::<T>(sites);
    let reach = group_speed * snap.t + guard;
    let travel = profile.speed * snap.t;
    shape_error_masked(snap, profile, |i| {
        // distance past the seam, measured forward from site −J/2
        let d = idx::<T>(i);
        let back = len - d;
        !(back <= reach || d <= travel + reach)
    })
}

fn shape_error_masked<T: Real>(snap: &Snapshot<T>, profile: &WaveProfile<T>, keep: impl Fn(usize) -> bool) -> T {
    let sites = snap.state.r.len();
    let want = profile.sample(sites, profile.speed * snap.t, false);
    let scale = profile.sample(sites, T::zero(), false).iter().fold(T::zero(), |m, v| m.max(v.abs()));
    snap.state
        .r
        .iter()
        .zip(&want)
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .fold(T::zero(), |m, (_, (&a, &b))| m.max((a - b).abs()))
        / scale
}

/// Per-snapshot stegoton numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StegotonSample<T> {
    pub t: T,
    /// Peak of the band-limited interpolant through the even sites.
    pub even_peak: T,
    pub odd_peak: T,
    pub ratio: T,
    /// Location of the even peak.
    pub center: T,
    /// `max |r_j|` more than three core widths from the peak.
    pub tail: T,
}

pub fn stegoton_diagnostics<T: Real>(traj: &LatticeTrajectory<T>, core_width: T) -> Vec<StegotonSample<T>> {
    traj.snapshots.iter().map(|s| stegoton_sample(s, core_width)).collect()
}

pub fn stegoton_sample<T: Real>(snap: &Snapshot<T>, core_width: T) -> StegotonSample<T> {
    let r = &snap.state.r;
    let sites = r.len();
    let half = (sites / 2) as i64;
    let even: Vec<T> = r.iter().step_by(2).copied().collect();
    let odd: Vec<T> = r.iter().skip(1).step_by(2).copied().collect();
    // index 0 is site −J/2, which is even
    let first = -(half as f64);
    let (even_peak, center) = upsampled_peak(&even, first, 2.0);
    let (odd_peak, _) = upsampled_peak(&odd, first + 1.0, 2.0);
    let len = idx::<T>(sites);
    let tail = r.iter().enumerate().fold(T::zero(), |m, (i, &v)| {
        let x = T::from_i64(i as i64 - half).expect("site index");
        let mut d = (x - center).abs();
        d = d.min(len - d);
        if d > lit::<T>(3.0) * core_width {
            m.max(v.abs())
        } else {
            m
        }
    });
    StegotonSample { t: snap.t, even_peak, odd_peak, ratio: even_peak / odd_peak, center, tail }
}

/// Maximum of the trigonometric interpolant through `v` (samples at
/// `x0 + h·i`), located by dense sampling near the largest sample and a
/// parabolic refinement.
fn upsampled_peak<T: Real>(v: &[T], x0: f64, h: f64) -> (T, T) {
    let n = v.len();
    let mut buf: Vec<Complex<T>> = v.iter().map(|&x| Complex::new(x, T::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / idx(n);
    let eval = |s: f64| -> T {
        // s in units of the sample index
        let mut acc = buf[0].re;
        for (k, c) in buf.iter().enumerate().take(n.div_ceil(2)).skip(1) {
            let a = lit::<T>(2.0 * std::f64::consts::PI * k as f64 * s / n as f64);
            acc = acc + lit::<T>(2.0) * (*c * Complex::new(a.cos(), a.sin())).re;
        }
        if n % 2 == 0 {
            let a = lit::<T>(std::f64::consts::PI * s);
            acc = acc + buf[n / 2].re * a.cos();
        }
        acc * scale
    };
    let imax = (0..n).fold(0, |b, i| if v[i] > v[b] { i } else { b });
    let steps = 64;
    let mut best = (v[imax], imax as f64);
    for q in 0..=steps {
        let s = imax as f64 - 1.0 + 2.0 * q as f64 / steps as f64;
        let y = eval(s);
        if y > best.0 {
            best = (y, s);
        }
    }
    let d = 1.0 / steps as f64;
    let (ym, y0, yp) = (eval(best.1 - d), best.0, eval(best.1 + d));
    let curv = ym + yp - lit::<T>(2.0) * y0;
    let (peak, s) = if curv < T::zero() {
        let off = to_f64((ym - yp) / (lit::<T>(2.0) * curv)) * d;
        let s = best.1 + off;
        (eval(s).max(y0), s)
    } else {
        best
    };
    (peak, lit(x0 + h * s))
}
