//! Fixed-point iteration on flat state vectors.
//!
//! Plain Picard by default. Anderson mixing (depth `m`) can be switched on
//! for slowly contracting maps.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig<T> {
    /// Stop once the max-norm change between iterates drops to this.
    pub tol: T,
    pub max_iter: usize,
    /// Anderson depth; `None` for plain Picard.
    pub anderson: Option<usize>,
    /// Consecutive growing steps (ratio ≥ 1) tolerated before giving up.
    pub divergence_window: usize,
}

impl<T: Real> FixedPointConfig<T> {
    pub fn new(tol: T, max_iter: usize) -> Self {
        Self { tol, max_iter, anderson: None, divergence_window: 5 }
    }

    pub fn with_anderson(mut self, depth: usize) -> Self {
        self.anderson = if depth == 0 { None } else { Some(depth) };
        self
    }
}

/// Per-iteration changes and their ratios.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog<T> {
    pub changes: Vec<T>,
    pub ratios: Vec<T>,
}

impl<T: Real> IterationLog<T> {
    pub fn iterations(&self) -> usize {
        self.changes.len()
    }

    pub fn last_change(&self) -> T {
        self.changes.last().copied().unwrap_or_else(T::zero)
    }

    /// Largest ratio among steps whose previous change was above
    /// `floor`; steps at the roundoff floor are noise and are skipped.
    pub fn contraction_ratio(&self, floor: T) -> T {
        self.ratios
            .iter()
            .zip(&self.changes)
            .filter(|(_, &prev)| prev > floor)
            .fold(T::zero(), |m, (&r, _)| m.max(r))
    }

    fn push(&mut self, change: T) {
        if let Some(&prev) = self.changes.last() {
            self.ratios.push(if prev > T::zero() { change / prev } else { T::zero() });
        }
        self.changes.push(change);
    }
}

pub fn max_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn max_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Iterate `x ← map(x)` from `x0`. Returns the last iterate and the log.
pub fn iterate<T: Real>(
    x0: Vec<T>,
    cfg: &FixedPointConfig<T>,
    mut map: impl FnMut(&[T]) -> Result<Vec<T>>,
) -> Result<(Vec<T>, IterationLog<T>)> {
    let mut log = IterationLog::default();
    let mut x = x0;
    let mut mixer = cfg.anderson.map(Anderson::new);
    let mut growing = 0usize;
    for _ in 0..cfg.max_iter {
        let gx = map(&x)?;
        if gx.len() != x.len() {
            return Err(Error::Incompatible("fixed-point map changed the state length".into()));
        }
        if gx.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: log.iterations() + 1,
                last_change: f64::INFINITY,
                ratio: f64::INFINITY,
            });
        }
        let change = max_diff(&gx, &x);
        log.push(change);
        if change <= cfg.tol {
            return Ok((gx, log));
        }
        if log.ratios.last().is_some_and(|&r| r >= T::one()) && change > cfg.tol * lit(1e3) {
            growing += 1;
            if growing >= cfg.divergence_window {
                return Err(no_convergence(&log));
            }
        } else {
            growing = 0;
        }
        x = match mixer.as_mut() {
            Some(m) => m.mix(&x, gx),
            None => gx,
        };
    }
    Err(no_convergence(&log))
}

fn no_convergence<T: Real>(log: &IterationLog<T>) -> Error {
    Error::NoConvergence {
        iterations: log.iterations(),
        last_change: to_f64(log.last_change()),
        ratio: log.ratios.last().map(|&r| to_f64(r)).unwrap_or(f64::NAN),
    }
}

/// Type-II Anderson mixing over the residuals `f = g(x) − x`.
#[derive(Debug)]
struct Anderson<T> {
    depth: usize,
    prev: Option<(Vec<T>, Vec<T>)>,
    dg: Vec<Vec<T>>,
    df: Vec<Vec<T>>,
}

impl<T: Real> Anderson<T> {
    fn new(depth: usize) -> Self {
        Self { depth, prev: None, dg: vec![], df: vec![] }
    }

    fn mix(&mut self, x: &[T], gx: Vec<T>) -> Vec<T> {
        let f: Vec<T> = gx.iter().zip(x).map(|(&g, &v)| g - v).collect();
        if let Some((g_old, f_old)) = self.prev.take() {
            self.dg.push(gx.iter().zip(&g_old).map(|(&a, &b)| a - b).collect());
            self.df.push(f.iter().zip(&f_old).map(|(&a, &b)| a - b).collect());
            if self.dg.len() > self.depth {
                self.dg.remove(0);
                self.df.remove(0);
            }
        }
        self.prev = Some((gx.clone(), f.clone()));
        if self.df.is_empty() {
            return gx;
        }
        match least_squares(&self.df, &f) {
            Some(gamma) => {
                let mut out = gx;
                for (g, col) in gamma.iter().zip(&self.dg) {
                    for (o, &c) in out.iter_mut().zip(col) {
                        *o = *o - *g * c;
                    }
                }
                out
            }
            None => {
                self.dg.clear();
                self.df.clear();
                gx
            }
        }
    }
}

/// `argmin ‖Σ γ_i cols_i − rhs‖₂` by modified Gram–Schmidt; `None` when the
/// columns are numerically dependent.
fn least_squares<T: Real>(cols: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let m = cols.len();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut r = vec![vec![T::zero(); m]; m];
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        for (i, qi) in q.iter().enumerate() {
            let d = dot(qi, &v);
            r[i][j] = d;
            for (a, &b) in v.iter_mut().zip(qi) {
                *a = *a - d * b;
            }
        }
        let nv = dot(&v, &v).sqrt();
        if !(nv > lit::<T>(1e-12) * dot(c, c).sqrt()) {
            return None;
        }
        r[j][j] = nv;
        q.push(v.into_iter().map(|a| a / nv).collect());
    }
    let qb: Vec<T> = q.iter().map(|qi| dot(qi, rhs)).collect();
    let mut g = vec![T::zero(); m];
    for i in (0..m).rev() {
        let s = (i + 1..m).fold(qb[i], |s, k| s - r[i][k] * g[k]);
        g[i] = s / r[i][i];
    }
    Some(g)
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}
