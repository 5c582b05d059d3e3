//! Matrix-free GMRES for `A x = b`.

use crate::error::{Error, Result};
use crate::fixed_point::dot;
use crate::scalar::{to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig<T> {
    /// Relative residual target `‖b − Ax‖/‖b‖`.
    pub tol: T,
    /// Krylov dimension; there is no restart.
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
}

/// Solve from `x = 0`. Fails with [`Error::LinearSolveFailure`] when the
/// target is not met within `max_iter` steps.
pub fn gmres<T: Real>(
    apply: impl Fn(&[T]) -> Vec<T>,
    b: &[T],
    cfg: &GmresConfig<T>,
) -> Result<GmresOutcome<T>> {
    let n = b.len();
    let beta = dot(b, b).sqrt();
    if beta == T::zero() {
        return Ok(GmresOutcome { x: vec![T::zero(); n], iterations: 0, relative_residual: T::zero() });
    }
    let m = cfg.max_iter.min(n).max(1);
    let mut v: Vec<Vec<T>> = vec![b.iter().map(|&x| x / beta).collect()];
    let mut h = vec![vec![T::zero(); m]; m + 1];
    let (mut cs, mut sn) = (vec![T::zero(); m], vec![T::zero(); m]);
    let mut g = vec![T::zero(); m + 1];
    g[0] = beta;
    let mut k_done = 0;
    let mut rel = T::one();
    for k in 0..m {
        let mut w = apply(&v[k]);
        // modified Gram–Schmidt, twice for stability
        for _ in 0..2 {
            for (i, vi) in v.iter().enumerate() {
                let d = dot(&w, vi);
                h[i][k] = h[i][k] + d;
                for (a, &c) in w.iter_mut().zip(vi) {
                    *a = *a - d * c;
                }
            }
        }
        let hn = dot(&w, &w).sqrt();
        h[k + 1][k] = hn;
        for i in 0..k {
            let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
            h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
            h[i][k] = t;
        }
        let r = h[k][k].hypot(h[k + 1][k]);
        cs[k] = h[k][k] / r;
        sn[k] = h[k + 1][k] / r;
        h[k][k] = r;
        h[k + 1][k] = T::zero();
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k] * g[k];
        k_done = k + 1;
        rel = g[k + 1].abs() / beta;
        if rel <= cfg.tol || hn == T::zero() {
            break;
        }
        v.push(w.into_iter().map(|a| a / hn).collect());
    }
    let mut y = vec![T::zero(); k_done];
    for i in (0..k_done).rev() {
        let s = (i + 1..k_done).fold(g[i], |s, j| s - h[i][j] * y[j]);
        y[i] = s / h[i][i];
    }
    let mut x = vec![T::zero(); n];
    for (yi, vi) in y.iter().zip(&v) {
        for (a, &c) in x.iter_mut().zip(vi) {
            *a = *a + *yi * c;
        }
    }
    // true residual, not the recurrence estimate
    let ax = apply(&x);
    let res: Vec<T> = b.iter().zip(&ax).map(|(&p, &q)| p - q).collect();
    let true_rel = dot(&res, &res).sqrt() / beta;
    if true_rel > cfg.tol.max(rel) * T::from(10.0).unwrap() {
        return Err(Error::LinearSolveFailure { iterations: k_done, residual: to_f64(true_rel) });
    }
    if rel > cfg.tol {
        return Err(Error::LinearSolveFailure { iterations: k_done, residual: to_f64(true_rel) });
    }
    Ok(GmresOutcome { x, iterations: k_done, relative_residual: true_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_identity_plus_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200;
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) / (n as f64).sqrt()).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) / (n as f64).sqrt()).collect();
        let apply = |x: &[f64]| {
            let d = dot(&w, x);
            x.iter().zip(&u).map(|(&a, &b)| a + 0.7 * b * d).collect::<Vec<_>>()
        };
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out = gmres(apply, &b, &GmresConfig { tol: 1e-12, max_iter: 50 }).unwrap();
        assert!(out.iterations <= 3);
        assert!(out.relative_residual <= 1e-12);
    }

    #[test]
    fn diagonal_system() {
        let n = 30;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let b = vec![1.0; n];
        let out = gmres(|x| x.iter().zip(&d).map(|(a, b)| a * b).collect(), &b, &GmresConfig { tol: 1e-13, max_iter: 30 })
            .unwrap();
        for (x, di) in out.x.iter().zip(&d) {
            assert!((x - 1.0 / di).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs_and_failure() {
        let out = gmres(|x: &[f64]| x.to_vec(), &[0.0, 0.0], &GmresConfig { tol: 1e-12, max_iter: 5 }).unwrap();
        assert_eq!(out.x, vec![0.0, 0.0]);
        let n = 50;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let err = gmres(|x| x.iter().zip(&d).map(|(a, b)| a * b).collect(), &vec![1.0; n], &GmresConfig {
            tol: 1e-14,
            max_iter: 3,
        })
        .unwrap_err();
        assert!(matches!(err, Error::LinearSolveFailure { .. }));
    }
}
