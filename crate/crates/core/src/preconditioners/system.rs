use crate::error::{Error, Result};
use crate::matrix::{decompose_dlu, DluSplit, Matrix};

use super::check_unit_diagonal;

/// `PA = (I + Q) A` with its `D - L - U` split.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionedSystem {
    pub q: Matrix,
    pub p: Matrix,
    pub pa: Matrix,
    pub split: DluSplit,
}

/// Forms `P = I + Q`, `PA` and the split of `PA`.
///
/// In debug builds the entries of `PA` are cross-checked against the
/// entrywise expansion `a_{i,j} + q_{i,j} + sum_{k != i,j} q_{i,k} a_{k,j}`.
pub fn precondition(a: &Matrix, q: &Matrix) -> Result<PreconditionedSystem> {
    if a.order() != q.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: q.order(),
        });
    }
    let p = &Matrix::identity(a.order()) + q;
    let pa = &p * a;
    debug_assert!(
        check_unit_diagonal(a).is_err()
            || structure_deviation(a, q, &pa) <= 1e-12 * (1.0 + q.norm_inf()) * (1.0 + a.norm_inf()),
        "PA does not match its entrywise expansion"
    );
    let split = decompose_dlu(&pa);
    Ok(PreconditionedSystem { q: q.clone(), p, pa, split })
}

/// Largest deviation of `pa` from the entrywise expansion of `(I + Q) A` for
/// unit-diagonal `a` and zero-diagonal `q`:
/// `a'_{i,i} = 1 + sum_{k != i} q_{i,k} a_{k,i}` and
/// `a'_{i,j} = a_{i,j} + q_{i,j} + sum_{k != i,j} q_{i,k} a_{k,j}`.
pub fn structure_deviation(a: &Matrix, q: &Matrix, pa: &Matrix) -> f64 {
    let n = a.order();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j {
                1.0 + (0..n).filter(|&k| k != i).map(|k| q[(i, k)] * a[(k, i)]).sum::<f64>()
            } else {
                a[(i, j)]
                    + q[(i, j)]
                    + (0..n)
                        .filter(|&k| k != i && k != j)
                        .map(|k| q[(i, k)] * a[(k, j)])
                        .sum::<f64>()
            };
            worst = worst.max((pa[(i, j)] - expected).abs());
        }
    }
    worst
}

/// `Q = Q_l + Q_u` and the diagonal / strictly lower / strictly upper parts
/// of `Q_l U = E1 + F1 + G1` and `Q_u L = E2 + F2 + G2`, where `L` and `U`
/// come from the split of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QDecomposition {
    pub q_l: Matrix,
    pub q_u: Matrix,
    pub e1: Matrix,
    pub f1: Matrix,
    pub g1: Matrix,
    pub e2: Matrix,
    pub f2: Matrix,
    pub g2: Matrix,
}

impl QDecomposition {
    /// `D1 = I - E1 - E2`, `L1 = L + F1 + F2 + Q_l L - Q_l`,
    /// `U1 = U + G1 + G2 + Q_u U - Q_u`; equal to the split of `PA` when `A`
    /// has unit diagonal.
    pub fn preconditioned_split(&self, a_split: &DluSplit) -> DluSplit {
        let n = self.q_l.order();
        let d = &(&Matrix::identity(n) - &self.e1) - &self.e2;
        let l = &(&(&(&a_split.l + &self.f1) + &self.f2) + &(&self.q_l * &a_split.l)) - &self.q_l;
        let u = &(&(&(&a_split.u + &self.g1) + &self.g2) + &(&self.q_u * &a_split.u)) - &self.q_u;
        DluSplit { d, l, u }
    }
}

pub fn q_decompose(q: &Matrix, a_split: &DluSplit) -> Result<QDecomposition> {
    if q.order() != a_split.d.order() {
        return Err(Error::DimensionMismatch {
            expected: a_split.d.order(),
            found: q.order(),
        });
    }
    let q_l = q.strict_lower();
    let q_u = q.strict_upper();
    let lu = &q_l * &a_split.u;
    let ul = &q_u * &a_split.l;
    Ok(QDecomposition {
        e1: lu.diagonal_part(),
        f1: lu.strict_lower(),
        g1: lu.strict_upper(),
        e2: ul.diagonal_part(),
        f2: ul.strict_lower(),
        g2: ul.strict_upper(),
        q_l,
        q_u,
    })
}

/// `Delta(gamma) = (E1 + E2) + gamma (F1 + F2) + gamma Q_u U + (1 - gamma) Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMatrix {
    pub entries: Matrix,
    pub gamma: f64,
}

/// Evaluates `Delta(gamma)` through [`q_decompose`]; `a` must have unit diagonal.
pub fn delta_generic(a: &Matrix, q: &Matrix, gamma: f64) -> Result<DeltaMatrix> {
    check_unit_diagonal(a)?;
    let split = decompose_dlu(a);
    let d = q_decompose(q, &split)?;
    let f = &d.f1 + &d.f2;
    let entries = &(&(&(&d.e1 + &d.e2) + &f.scale(gamma)) + &(&d.q_u * &split.u).scale(gamma))
        + &q.scale(1.0 - gamma);
    Ok(DeltaMatrix { entries, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preconditioners::{build_q, tests_support::catalog_specs, PreconditionerSpec};

    fn sample() -> Matrix {
        Matrix::from_rows(&[
            [1.0, -0.2, -0.1, -0.3],
            [-0.4, 1.0, -0.2, -0.05],
            [-0.1, -0.3, 1.0, -0.2],
            [-0.2, -0.1, -0.4, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn identity_preconditioner() {
        let a = sample();
        let s = precondition(&a, &Matrix::zeros(4)).unwrap();
        assert_eq!(s.pa, a);
        assert_eq!(s.split, decompose_dlu(&a));
    }

    #[test]
    fn q7_row_update() {
        let a = sample();
        let q = build_q(&PreconditionerSpec::entry(7, 4, 1, 1.0).unwrap(), &a).unwrap();
        let s = precondition(&a, &q).unwrap();
        for j in 0..4 {
            let expected = a[(3, j)] - a[(3, 0)] * a[(0, j)];
            assert!((s.pa[(3, j)] - expected).abs() < 1e-15);
        }
        for i in 0..3 {
            assert_eq!(s.pa.row(i), a.row(i));
        }
    }

    #[test]
    fn q6_lower_block_update() {
        let a = Matrix::from_rows(&[[1.0, -0.3, -0.2], [-0.4, 1.0, -0.1], [-0.5, -0.2, 1.0]]).unwrap();
        let q = build_q(&PreconditionerSpec::line(6, 2, vec![1.0, 1.0]).unwrap(), &a).unwrap();
        let s = precondition(&a, &q).unwrap();
        for i in 1..3 {
            for j in 1..3 {
                let expected = a[(i, j)] - a[(i, 0)] * a[(0, j)];
                assert!((s.pa[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn one_sided_q_kills_the_other_products() {
        let a = sample();
        let split = decompose_dlu(&a);
        let up = build_q(&PreconditionerSpec::scalar(13, 0.7).unwrap(), &a).unwrap();
        let d = q_decompose(&up, &split).unwrap();
        assert_eq!(d.q_l, Matrix::zeros(4));
        for m in [&d.e1, &d.f1, &d.g1] {
            assert_eq!(*m, Matrix::zeros(4));
        }
        let lo = build_q(&PreconditionerSpec::scalar(4, 0.7).unwrap(), &a).unwrap();
        let d = q_decompose(&lo, &split).unwrap();
        for m in [&d.e2, &d.f2, &d.g2] {
            assert_eq!(*m, Matrix::zeros(4));
        }
    }

    #[test]
    fn q5_products_by_hand() {
        // Q nonzero only in row 4 (lower part), U only on the superdiagonal
        let a = Matrix::from_rows(&[
            [1.0, -0.5, 0.0, 0.0],
            [-0.1, 1.0, -0.25, 0.0],
            [-0.2, 0.0, 1.0, -0.125],
            [-0.3, -0.4, -0.6, 1.0],
        ])
        .unwrap();
        let q = build_q(&PreconditionerSpec::line(5, 4, vec![1.0, 1.0, 1.0]).unwrap(), &a).unwrap();
        let d = q_decompose(&q, &decompose_dlu(&a)).unwrap();
        // (Q_l U)_{4,j} = q_{4,j-1} u_{j-1,j}
        assert!((d.f1[(3, 1)] - 0.3 * 0.5).abs() < 1e-16);
        assert!((d.f1[(3, 2)] - 0.4 * 0.25).abs() < 1e-16);
        assert!((d.e1[(3, 3)] - 0.6 * 0.125).abs() < 1e-16);
        assert_eq!(d.g1, Matrix::zeros(4));
        let nonzero = d.f1.as_slice().iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn decomposition_reproduces_split_for_catalog() {
        let a = sample();
        let split = decompose_dlu(&a);
        for spec in catalog_specs(4, 1.0) {
            let q = build_q(&spec, &a).unwrap();
            let d = q_decompose(&q, &split).unwrap();
            assert_eq!(&d.q_l + &d.q_u, q);
            let pre = precondition(&a, &q).unwrap();
            let rebuilt = d.preconditioned_split(&split);
            assert!(rebuilt.d.max_abs_diff(&pre.split.d) < 1e-15, "{spec}");
            assert!(rebuilt.l.max_abs_diff(&pre.split.l) < 1e-15, "{spec}");
            assert!(rebuilt.u.max_abs_diff(&pre.split.u) < 1e-15, "{spec}");
        }
    }

    #[test]
    fn delta_gamma_zero() {
        let a = sample();
        let q = build_q(&PreconditionerSpec::weighted(2, Matrix::from_fn(4, |_, _| 0.5)).unwrap(), &a).unwrap();
        let d = q_decompose(&q, &decompose_dlu(&a)).unwrap();
        let delta = delta_generic(&a, &q, 0.0).unwrap();
        let expected = &(&d.e1 + &d.e2) + &q;
        assert_eq!(delta.entries, expected);
    }

    #[test]
    fn delta_q17_diagonal_at_one() {
        let a = sample();
        let alpha = vec![0.5, 1.0, 0.25];
        let q = build_q(&PreconditionerSpec::vector(17, alpha.clone()).unwrap(), &a).unwrap();
        let delta = delta_generic(&a, &q, 1.0).unwrap();
        for i in 0..3 {
            let e = alpha[i] * a[(i, i + 1)] * a[(i + 1, i)];
            assert!((delta.entries[(i, i)] - e).abs() < 1e-16);
        }
        assert_eq!(delta.entries[(3, 3)], 0.0);
    }
}
