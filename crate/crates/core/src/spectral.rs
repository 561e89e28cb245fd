//! Spectral radius and Perron eigenpairs of (mostly nonnegative) iteration
//! matrices.
//!
//! Nonnegative matrices go through power iteration; anything else, and any
//! power run that fails to converge, falls back to a dense Schur
//! decomposition from which only eigenvalue moduli are used.

use nalgebra::{DMatrix, Schur};

use crate::classes::{is_irreducible, pattern_graph, strongly_connected_components};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Iterations without progress before the power method restarts with a
/// shifted operator and a perturbed start vector.
const STAGNATION_WINDOW: usize = 200;
/// Consecutive small changes required before accepting an estimate.
const STABLE_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Power,
    DenseEig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub rho: f64,
    pub right_vec: Option<Vec<f64>>,
    pub left_vec: Option<Vec<f64>>,
    pub method: SpectralMethod,
    pub iterations: usize,
    pub converged: bool,
}

/// Spectral radius of `t`. Power iteration for nonnegative input with a
/// dense eigensolve fallback.
///
/// A reducible nonnegative `t` is split into the diagonal blocks of its
/// strongly connected components and the largest block radius is returned,
/// without eigenvectors. Each block's Perron root is simple, whereas the
/// whole matrix may be defective (e.g. `c I + N` with `N` nilpotent), which
/// costs both power iteration and the dense eigensolve most of their digits.
pub fn spectral_radius(t: &Matrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if t.is_nonnegative(0.0) {
        let blocks = irreducible_blocks(t);
        if blocks.len() > 1 {
            return by_blocks(t, &blocks, SpectralMethod::Power, tol, max_iter);
        }
        if let Ok(res) = power_iteration(t, tol, max_iter) {
            return Ok(res);
        }
    }
    dense_result(dense_spectral_radius(t)?)
}

/// As [`spectral_radius`] but every block goes through the dense eigensolve.
pub fn dense_block_spectral_radius(t: &Matrix) -> Result<f64> {
    if t.is_nonnegative(0.0) {
        let blocks = irreducible_blocks(t);
        if blocks.len() > 1 {
            return Ok(by_blocks(t, &blocks, SpectralMethod::DenseEig, 0.0, 0)?.rho);
        }
    }
    dense_spectral_radius(t)
}

fn dense_result(rho: f64) -> Result<SpectralResult> {
    Ok(SpectralResult {
        rho,
        right_vec: None,
        left_vec: None,
        method: SpectralMethod::DenseEig,
        iterations: 0,
        converged: true,
    })
}

/// Index sets of the strongly connected components of the exact nonzero
/// pattern.
fn irreducible_blocks(t: &Matrix) -> Vec<Vec<usize>> {
    let comp = strongly_connected_components(&pattern_graph(t, 0.0));
    let count = comp.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); count];
    for (i, c) in comp.into_iter().enumerate() {
        blocks[c].push(i);
    }
    blocks
}

fn by_blocks(
    t: &Matrix,
    blocks: &[Vec<usize>],
    method: SpectralMethod,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralResult> {
    let mut rho = 0.0_f64;
    let mut iterations = 0;
    let mut used = SpectralMethod::Power;
    for b in blocks {
        let r = if let [i] = b.as_slice() {
            t[(*i, *i)].abs()
        } else {
            let sub = Matrix::from_fn(b.len(), |i, j| t[(b[i], b[j])]);
            match method {
                SpectralMethod::DenseEig => {
                    used = SpectralMethod::DenseEig;
                    dense_spectral_radius(&sub)?
                }
                SpectralMethod::Power => match power_iteration(&sub, tol, max_iter) {
                    Ok(res) => {
                        iterations += res.iterations;
                        res.rho
                    }
                    Err(_) => {
                        used = SpectralMethod::DenseEig;
                        dense_spectral_radius(&sub)?
                    }
                },
            }
        };
        rho = rho.max(r);
    }
    Ok(SpectralResult {
        rho,
        right_vec: None,
        left_vec: None,
        method: used,
        iterations,
        converged: true,
    })
}

/// Maximum eigenvalue modulus from a dense real Schur decomposition.
pub fn dense_spectral_radius(t: &Matrix) -> Result<f64> {
    let n = t.order();
    let m = DMatrix::from_row_slice(n, n, t.as_slice());
    let schur = Schur::try_new(m, f64::EPSILON, 10_000).ok_or(Error::NoConvergence {
        iterations: 10_000,
        estimate: f64::NAN,
    })?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Plain power iteration for a nonnegative matrix; no fallback.
///
/// Accepts an estimate when either the Collatz-Wielandt bracket of a
/// positive iterate is within `tol * max(1, rho)`, or the quotient has been
/// stable for a few steps and the eigen-residual is within the same bound.
pub fn power_iteration(t: &Matrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if let Some(((i, j), v)) = first_negative(t) {
        return Err(Error::NegativeEntry { row: i, col: j, value: v });
    }
    let n = t.order();
    let mut x = vec![1.0; n];
    let mut shift = 0.0;
    let mut prev = f64::NAN;
    let mut stable = 0;
    let mut best_residual = f64::INFINITY;
    let mut since_progress = 0;
    let mut estimate = 0.0;

    for it in 1..=max_iter {
        let tx = t.matvec(&x);
        let mu = norm_inf(&tx);
        if mu == 0.0 {
            // x lies in the null space; every iterate of a nilpotent matrix ends here.
            return Ok(power_result(0.0, x, it));
        }
        estimate = mu;

        if x.iter().all(|&v| v > 0.0) {
            let (lo, hi) = collatz_wielandt(&tx, &x);
            if hi - lo <= tol * hi.max(1.0) {
                return Ok(power_result(0.5 * (lo + hi), x, it));
            }
        }

        let residual = tx
            .iter()
            .zip(&x)
            .fold(0.0_f64, |m, (a, b)| m.max((a - mu * b).abs()));
        let scale = mu.max(1.0);
        if (mu - prev).abs() <= tol * scale {
            stable += 1;
        } else {
            stable = 0;
        }
        if stable >= STABLE_STEPS && residual <= tol * scale {
            return Ok(power_result(mu, x, it));
        }
        prev = mu;

        if residual < 0.5 * best_residual {
            best_residual = residual;
            since_progress = 0;
        } else {
            since_progress += 1;
        }
        if since_progress >= STAGNATION_WINDOW {
            // A shift breaks the periodicity of cyclic matrices without
            // moving the Perron vector.
            shift = 0.5 * mu.max(1e-3);
            for (i, v) in x.iter_mut().enumerate() {
                *v += 0.1 * (i + 1) as f64 / n as f64;
            }
            let norm = norm_inf(&x);
            x.iter_mut().for_each(|v| *v /= norm);
            since_progress = 0;
            best_residual = f64::INFINITY;
            stable = 0;
            prev = f64::NAN;
            continue;
        }

        for (xi, ti) in x.iter_mut().zip(&tx) {
            *xi = ti + shift * *xi;
        }
        let norm = norm_inf(&x);
        x.iter_mut().for_each(|v| *v /= norm);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        estimate,
    })
}

/// Perron root of a nonnegative matrix with right and left eigenvectors.
///
/// Both vectors are normalized to unit max-norm. When `t` is irreducible they
/// are checked to be entrywise greater than `tol`.
pub fn perron_pair(t: &Matrix, tol: f64) -> Result<SpectralResult> {
    if let Some(((i, j), v)) = first_negative(t) {
        return Err(Error::NegativeEntry { row: i, col: j, value: v });
    }
    let (rho, right, it_r) = perron_vector(t, tol)?;
    let (_, left, it_l) = perron_vector(&t.transpose(), tol)?;
    if is_irreducible(t, 0.0) {
        for v in [&right, &left] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| x <= tol) {
                return Err(Error::PerronPositivity { index, value });
            }
        }
    }
    Ok(SpectralResult {
        rho,
        right_vec: Some(right),
        left_vec: Some(left),
        method: SpectralMethod::Power,
        iterations: it_r + it_l,
        converged: true,
    })
}

fn perron_vector(t: &Matrix, tol: f64) -> Result<(f64, Vec<f64>, usize)> {
    match power_iteration(t, tol, DEFAULT_MAX_ITER) {
        Ok(res) => {
            let v = normalize(res.right_vec.expect("power iteration returns a vector"));
            Ok((res.rho, v, res.iterations))
        }
        Err(_) => {
            let rho = dense_spectral_radius(t)?;
            let v = inverse_iteration(t, rho)?;
            Ok((rho, v, 0))
        }
    }
}

/// Eigenvector for a known eigenvalue by inverse iteration with a slightly
/// perturbed shift. Power iteration only lands here for defective or badly
/// separated spectra, so the shift stays well clear of exact singularity.
fn inverse_iteration(t: &Matrix, rho: f64) -> Result<Vec<f64>> {
    let n = t.order();
    let mut delta = 1e-9 * rho.max(1.0);
    for _ in 0..4 {
        let mu = rho + delta;
        let shifted = Matrix::from_fn(n, |i, j| t[(i, j)] - if i == j { mu } else { 0.0 });
        if let Ok(lu) = shifted.lu() {
            let mut x = vec![1.0; n];
            for _ in 0..8 {
                x = normalize(lu.solve(&x));
            }
            return Ok(x);
        }
        delta *= 100.0;
    }
    Err(Error::Singular)
}

/// Scales to unit max-norm with the first maximal entry positive.
fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[k].abs() {
            k = i;
        }
    }
    let d = v[k];
    if d != 0.0 {
        v.iter_mut().for_each(|x| *x /= d);
    }
    v
}

fn power_result(rho: f64, x: Vec<f64>, iterations: usize) -> SpectralResult {
    SpectralResult {
        rho,
        right_vec: Some(normalize(x)),
        left_vec: None,
        method: SpectralMethod::Power,
        iterations,
        converged: true,
    }
}

fn collatz_wielandt(tx: &[f64], x: &[f64]) -> (f64, f64) {
    tx.iter()
        .zip(x)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn first_negative(t: &Matrix) -> Option<((usize, usize), f64)> {
    let n = t.order();
    t.as_slice()
        .iter()
        .enumerate()
        .find(|(_, &v)| v < 0.0)
        .map(|(k, &v)| ((k / n, k % n), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn rho(t: &Matrix) -> f64 {
        spectral_radius(t, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap().rho
    }

    #[test]
    fn trivial_radii() {
        assert_eq!(rho(&Matrix::zeros(3)), 0.0);
        assert!((rho(&Matrix::identity(3)) - 1.0).abs() < 1e-14);
        let nil = m(&[&[0.0, 1.0, 2.0], &[0.0, 0.0, 3.0], &[0.0, 0.0, 0.0]]);
        assert!(rho(&nil).abs() < 1e-14);
    }

    #[test]
    fn defective_reducible_is_exact() {
        // 0.75 I + 0.25 N with N nilpotent: a single Jordan block at 0.75
        let t = Matrix::from_fn(4, |i, j| {
            if i == j {
                0.75
            } else if j == i + 1 {
                0.25
            } else {
                0.0
            }
        });
        let r = spectral_radius(&t, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.rho, 0.75);
        assert!(r.right_vec.is_none());
        assert_eq!(dense_block_spectral_radius(&t).unwrap(), 0.75);
    }

    #[test]
    fn block_radius_is_max_over_components() {
        // components {0, 1} with radius 2 and {2} with radius 3
        let t = m(&[&[0.0, 2.0, 1.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 3.0]]);
        assert!((rho(&t) - 3.0).abs() < 1e-12);
        let t = m(&[&[0.0, 2.0, 1.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 0.5]]);
        assert!((rho(&t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cyclic_two_by_two() {
        // characteristic polynomial lambda^2 - 4
        let t = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        assert!((rho(&t) - 2.0).abs() < 1e-12);
        assert!((dense_spectral_radius(&t).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_matrix_needs_shift() {
        // 2-cyclic with unequal blocks: iterates from ones oscillate
        let t = m(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 3.0], &[1.0, 1.0, 0.0]]);
        // eigenvalues 0 and +-2
        let r = power_iteration(&t, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((r.rho - 2.0).abs() < 1e-10, "{}", r.rho);
    }

    #[test]
    fn negative_entries_use_dense() {
        let t = m(&[&[0.0, -2.0], &[2.0, 0.0]]);
        let r = spectral_radius(&t, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.method, SpectralMethod::DenseEig);
        assert!((r.rho - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perron_of_permutation() {
        let t = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let r = perron_pair(&t, 1e-12).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        assert_eq!(r.right_vec.unwrap(), vec![1.0, 1.0]);
        assert_eq!(r.left_vec.unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn perron_of_reducible_triangular() {
        let t = m(&[&[0.5, 1.0], &[0.0, 0.5]]);
        let r = perron_pair(&t, 1e-12).unwrap();
        assert!((r.rho - 0.5).abs() < 1e-9, "{}", r.rho);
        let v = r.right_vec.unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!(v[1].abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn perron_rejects_negative() {
        let t = m(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(matches!(perron_pair(&t, 1e-12), Err(Error::NegativeEntry { .. })));
    }
}
