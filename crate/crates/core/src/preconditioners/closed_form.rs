//! Entrywise closed forms of `Delta(gamma)` for a few catalog variants,
//! written directly in terms of the parameters and the entries of `A`. They
//! serve as an independent oracle for [`super::delta_generic`].

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{check_unit_diagonal, DeltaMatrix, Params, PreconditionerSpec};

/// Closed-form `Delta(gamma)` for `q2` and `q13` (any `gamma`), `q17` (any
/// `gamma`), and `q3`, `q5` (`gamma = 1` only).
pub fn delta_closed_form(spec: &PreconditionerSpec, a: &Matrix, gamma: f64) -> Result<DeltaMatrix> {
    check_unit_diagonal(a)?;
    let n = a.order();
    let k = spec.variant().number();
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "no closed form for {} at gamma = {gamma}",
            spec.variant()
        )))
    };
    let entries = match (k, spec.params()) {
        (2, Params::Matrix(al)) => q2(a, al, gamma),
        (3, Params::Matrix(al)) if gamma == 1.0 => q3_at_one(a, al),
        (5, Params::Line { r, alpha }) if gamma == 1.0 => {
            if alpha.len() + 1 != *r || *r > n {
                return Err(Error::InvalidParameter(format!("q5: r = {r} with {} weights", alpha.len())));
            }
            q5_at_one(a, *r - 1, alpha)
        }
        (13, Params::Scalar(alpha)) => q13(a, *alpha, gamma),
        (17, Params::Vector(alpha)) => {
            if alpha.len() + 1 != n {
                return Err(Error::InvalidParameter(format!("q17 needs {} weights", n - 1)));
            }
            q17(a, alpha, gamma)
        }
        _ => return unsupported(),
    };
    Ok(DeltaMatrix { entries, gamma })
}

/// `q_{i,j} = -alpha_{i,j} a_{i,j}` for all `i != j`:
/// diagonal `sum_{k != i} alpha_{i,k} a_{i,k} a_{k,i}`;
/// above `(gamma - 1) alpha_{i,j} a_{i,j} + gamma sum_{i < k < j} alpha_{i,k} a_{i,k} a_{k,j}`;
/// below the same with `k` ranging over `k < j` and `k > i`.
fn q2(a: &Matrix, al: &Matrix, g: f64) -> Matrix {
    let n = a.order();
    let w = |i: usize, k: usize| al[(i, k)] * a[(i, k)];
    Matrix::from_fn(n, |i, j| {
        if i == j {
            (0..n).filter(|&k| k != i).map(|k| w(i, k) * a[(k, i)]).sum()
        } else {
            let ks: Box<dyn Iterator<Item = usize>> = if j > i {
                Box::new(i + 1..j)
            } else {
                Box::new((0..j).chain(i + 1..n))
            };
            (g - 1.0) * w(i, j) + g * ks.map(|k| w(i, k) * a[(k, j)]).sum::<f64>()
        }
    })
}

/// Lower-triangular weights at `gamma = 1`: row `i >= 2`, column
/// `2 <= j <= i` carries `sum_{k < j} alpha_{i,k} a_{i,k} a_{k,j}`; all else 0.
fn q3_at_one(a: &Matrix, al: &Matrix) -> Matrix {
    let n = a.order();
    Matrix::from_fn(n, |i, j| {
        if i >= 1 && j >= 1 && j <= i {
            (0..j).map(|k| al[(i, k)] * a[(i, k)] * a[(k, j)]).sum()
        } else {
            0.0
        }
    })
}

/// Single row `r` at `gamma = 1`: column `2 <= j <= r` carries
/// `sum_{k < j} alpha_k a_{r,k} a_{k,j}`.
fn q5_at_one(a: &Matrix, r: usize, alpha: &[f64]) -> Matrix {
    let n = a.order();
    Matrix::from_fn(n, |i, j| {
        if i == r && j >= 1 && j <= r {
            (0..j).map(|k| alpha[k] * a[(r, k)] * a[(k, j)]).sum()
        } else {
            0.0
        }
    })
}

/// `Q = alpha U`: the unit-weight display scaled by `alpha`. Diagonal
/// `sum_{k > i} a_{i,k} a_{k,i}`, above `(gamma - 1) a_{i,j} + gamma
/// sum_{i < k < j} a_{i,k} a_{k,j}`, below `gamma sum_{k > i} a_{i,k} a_{k,j}`,
/// last row zero.
fn q13(a: &Matrix, alpha: f64, g: f64) -> Matrix {
    let n = a.order();
    Matrix::from_fn(n, |i, j| {
        if i == n - 1 {
            return 0.0;
        }
        let v = if i == j {
            (i + 1..n).map(|k| a[(i, k)] * a[(k, i)]).sum()
        } else if j > i {
            (g - 1.0) * a[(i, j)] + g * (i + 1..j).map(|k| a[(i, k)] * a[(k, j)]).sum::<f64>()
        } else {
            g * (i + 1..n).map(|k| a[(i, k)] * a[(k, j)]).sum::<f64>()
        };
        alpha * v
    })
}

/// Superdiagonal weights: diagonal `alpha_i a_{i,i+1} a_{i+1,i}`, entry
/// `(i, i+1)` is `(gamma - 1) alpha_i a_{i,i+1}`, every other entry of row
/// `i < n` is `gamma alpha_i a_{i,i+1} a_{i+1,j}`, last row zero.
fn q17(a: &Matrix, alpha: &[f64], g: f64) -> Matrix {
    let n = a.order();
    Matrix::from_fn(n, |i, j| {
        if i == n - 1 {
            0.0
        } else if j == i {
            alpha[i] * a[(i, i + 1)] * a[(i + 1, i)]
        } else if j == i + 1 {
            (g - 1.0) * alpha[i] * a[(i, i + 1)]
        } else {
            g * alpha[i] * a[(i, i + 1)] * a[(i + 1, j)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preconditioners::{build_q, delta_generic};

    fn sample() -> Matrix {
        Matrix::from_rows(&[
            [1.0, -0.2, -0.1, -0.3, -0.05],
            [-0.4, 1.0, -0.2, -0.05, 0.0],
            [-0.1, -0.3, 1.0, -0.2, -0.1],
            [-0.2, -0.1, -0.4, 1.0, -0.3],
            [-0.3, 0.0, -0.1, -0.2, 1.0],
        ])
        .unwrap()
    }

    fn agree(spec: &PreconditionerSpec, gamma: f64) {
        let a = sample();
        let q = build_q(spec, &a).unwrap();
        let g = delta_generic(&a, &q, gamma).unwrap();
        let c = delta_closed_form(spec, &a, gamma).unwrap();
        assert!(g.entries.max_abs_diff(&c.entries) < 1e-15, "{spec} gamma={gamma}");
    }

    #[test]
    fn closed_forms_match_generic() {
        let al = Matrix::from_fn(5, |i, j| 0.1 * (1 + i + 2 * j) as f64 % 1.0);
        for g in [0.0, 0.3, 1.0] {
            agree(&PreconditionerSpec::weighted(2, al.clone()).unwrap(), g);
            agree(&PreconditionerSpec::scalar(13, 0.6).unwrap(), g);
            agree(&PreconditionerSpec::vector(17, vec![0.2, 0.9, 1.0, 0.5]).unwrap(), g);
        }
        agree(&PreconditionerSpec::weighted(3, al).unwrap(), 1.0);
        agree(&PreconditionerSpec::line(5, 4, vec![0.3, 0.7, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn q3_first_row_is_zero() {
        let al = Matrix::from_fn(5, |_, _| 1.0);
        let d = delta_closed_form(&PreconditionerSpec::weighted(3, al).unwrap(), &sample(), 1.0).unwrap();
        assert!(d.entries.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn q13_last_row_is_zero() {
        let d = delta_closed_form(&PreconditionerSpec::scalar(13, 1.0).unwrap(), &sample(), 0.4).unwrap();
        assert!(d.entries.row(4).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unsupported_variants() {
        let spec = PreconditionerSpec::scalar(4, 1.0).unwrap();
        assert!(matches!(delta_closed_form(&spec, &sample(), 1.0), Err(Error::Unsupported(_))));
        let al = Matrix::from_fn(5, |_, _| 1.0);
        let q3 = PreconditionerSpec::weighted(3, al).unwrap();
        assert!(matches!(delta_closed_form(&q3, &sample(), 0.5), Err(Error::Unsupported(_))));
    }
}
