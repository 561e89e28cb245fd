//! The AOR splitting `A = M - N` with `M = (D - gamma L) / omega`, its
//! iteration matrix, the stationary iteration itself and splitting
//! classification.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{cone_of, decompose_dlu, DluSplit, Matrix};

/// Relaxation parameters `(gamma, omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AorParams {
    pub gamma: f64,
    pub omega: f64,
}

impl AorParams {
    /// Any finite `gamma` and nonzero finite `omega` are accepted; use
    /// [`AorParams::out_of_range`] to see whether they leave the range the
    /// comparison theorems are stated for.
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !gamma.is_finite() || !omega.is_finite() || omega == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need finite gamma and finite nonzero omega, got gamma={gamma}, omega={omega}"
            )));
        }
        Ok(Self { gamma, omega })
    }

    pub fn jacobi() -> Self {
        Self { gamma: 0.0, omega: 1.0 }
    }

    pub fn gauss_seidel() -> Self {
        Self { gamma: 1.0, omega: 1.0 }
    }

    pub fn sor(omega: f64) -> Result<Self> {
        Self::new(omega, omega)
    }

    /// True unless `0 < omega <= 1` and `0 <= gamma <= 1`.
    pub fn out_of_range(&self) -> bool {
        !(self.omega > 0.0 && self.omega <= 1.0 && (0.0..=1.0).contains(&self.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingKind {
    /// `M^{-1} >= 0` and `N >= 0`.
    Regular,
    /// `M^{-1} >= 0` and `M^{-1} N >= 0`.
    WeakRegular,
    /// `M^{-1} N >= 0`.
    Nonnegative,
    None,
}

impl fmt::Display for SplittingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplittingKind::Regular => "regular",
            SplittingKind::WeakRegular => "weak_regular",
            SplittingKind::Nonnegative => "nonnegative",
            SplittingKind::None => "none",
        })
    }
}

/// `A = M - N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub m: Matrix,
    pub n_mat: Matrix,
    pub kind: SplittingKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// `||A x^k - b||_inf` for `k = 0, 1, ...`, including the start vector.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Residual growth factor (relative to the starting residual) at which
/// [`aor_solve`] gives up.
pub const DIVERGENCE_CAP: f64 = 1e6;

/// Tolerance for classifying `M^{-1}`, `N` and `M^{-1} N` against zero.
pub const SPLITTING_EPS: f64 = 1e-10;

fn check_diagonal(a: &Matrix) -> Result<()> {
    match a.diagonal().iter().position(|&d| d == 0.0) {
        Some(i) => Err(Error::ZeroDiagonal(i)),
        None => Ok(()),
    }
}

/// `D - gamma L` and `(1 - omega) D + (omega - gamma) L + omega U`, i.e. the
/// splitting scaled by `omega`.
fn scaled_parts(s: &DluSplit, p: AorParams) -> (Matrix, Matrix) {
    let (g, w) = (p.gamma, p.omega);
    let lower = &s.d - &s.l.scale(g);
    let upper = &(&s.d.scale(1.0 - w) + &s.l.scale(w - g)) + &s.u.scale(w);
    (lower, upper)
}

/// The AOR splitting of `a`, classified with [`SPLITTING_EPS`].
pub fn aor_splitting(a: &Matrix, p: AorParams) -> Result<Splitting> {
    check_diagonal(a)?;
    let (lower, upper) = scaled_parts(&decompose_dlu(a), p);
    let m = lower.scale(1.0 / p.omega);
    let n_mat = upper.scale(1.0 / p.omega);
    let mut s = Splitting {
        m,
        n_mat,
        kind: SplittingKind::None,
    };
    s.kind = classify_splitting(a, &s, SPLITTING_EPS)?;
    Ok(s)
}

/// `T = (D - gamma L)^{-1} [(1 - omega) D + (omega - gamma) L + omega U]`,
/// formed by triangular solves against the columns of the right factor.
pub fn aor_iteration_matrix(a: &Matrix, p: AorParams) -> Result<Matrix> {
    check_diagonal(a)?;
    let (lower, upper) = scaled_parts(&decompose_dlu(a), p);
    lower.solve_lower_matrix(&upper)
}

/// Runs `x^{k+1} = T x^k + omega (D - gamma L)^{-1} b` until
/// `||A x - b||_inf <= tol (1 + ||b||_inf)`, `max_iter` is reached, or the
/// residual grows past [`DIVERGENCE_CAP`] times its starting value.
pub fn aor_solve(
    a: &Matrix,
    b: &[f64],
    p: AorParams,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    a.check_len(b.len())?;
    a.check_len(x0.len())?;
    check_diagonal(a)?;
    let (lower, upper) = scaled_parts(&decompose_dlu(a), p);
    let bnorm = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let target = tol * (1.0 + bnorm);
    let residual = |x: &[f64]| {
        a.matvec(x)
            .iter()
            .zip(b)
            .fold(0.0_f64, |m, (ax, bi)| m.max((ax - bi).abs()))
    };

    let mut x = x0.to_vec();
    let r0 = residual(&x);
    let mut history = vec![r0];
    if r0 <= target {
        return Ok(SolveReport {
            solution: x,
            residual_history: history,
            iterations: 0,
            converged: true,
        });
    }
    for k in 1..=max_iter {
        let rhs: Vec<f64> = upper
            .matvec(&x)
            .iter()
            .zip(b)
            .map(|(u, bi)| u + p.omega * bi)
            .collect();
        x = lower.solve_lower(&rhs)?;
        let r = residual(&x);
        history.push(r);
        if r <= target {
            return Ok(SolveReport {
                solution: x,
                residual_history: history,
                iterations: k,
                converged: true,
            });
        }
        if !r.is_finite() || r > DIVERGENCE_CAP * r0 {
            return Ok(SolveReport {
                solution: x,
                residual_history: history,
                iterations: k,
                converged: false,
            });
        }
    }
    Ok(SolveReport {
        solution: x,
        residual_history: history,
        iterations: max_iter,
        converged: false,
    })
}

/// Classifies a splitting of `a`; fails if `M - N` does not reproduce `a` or
/// `M` is singular.
pub fn classify_splitting(a: &Matrix, s: &Splitting, eps: f64) -> Result<SplittingKind> {
    let diff = (&s.m - &s.n_mat).max_abs_diff(a);
    // M and N grow like 1 / omega, and so does the rounding in M - N
    let scale = a.max_abs().max(s.m.max_abs()).max(s.n_mat.max_abs()).max(1.0);
    if diff > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "M - N differs from A by {diff:e}"
        )));
    }
    let m_inv = s.m.inverse()?;
    let t = &m_inv * &s.n_mat;
    let m_inv_nonneg = cone_of(&m_inv, eps).is_nonnegative();
    let t_nonneg = cone_of(&t, eps).is_nonnegative();
    Ok(if m_inv_nonneg && cone_of(&s.n_mat, eps).is_nonnegative() {
        SplittingKind::Regular
    } else if m_inv_nonneg && t_nonneg {
        SplittingKind::WeakRegular
    } else if t_nonneg {
        SplittingKind::Nonnegative
    } else {
        SplittingKind::None
    })
}

/// Extrapolation identity `1 - omega/gamma + (omega/gamma) rho_gamma`.
pub fn extrapolate_rho(rho_gamma: f64, gamma: f64, omega: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Err(Error::InvalidParameter("gamma must be nonzero".into()));
    }
    let r = omega / gamma;
    Ok(1.0 - r + r * rho_gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn params_range_flag() {
        assert!(!AorParams::new(0.5, 1.0).unwrap().out_of_range());
        assert!(AorParams::new(1.2, 0.5).unwrap().out_of_range());
        assert!(AorParams::new(0.5, 1.5).unwrap().out_of_range());
        assert!(AorParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn gauss_seidel_and_jacobi_splittings() {
        let a = m(&[&[1.0, -0.3, -0.2], &[-0.1, 1.0, -0.4], &[-0.5, -0.2, 1.0]]);
        let s = decompose_dlu(&a);
        let gs = aor_splitting(&a, AorParams::gauss_seidel()).unwrap();
        assert_eq!(gs.m, &Matrix::identity(3) - &s.l);
        assert_eq!(gs.n_mat, s.u);
        assert_eq!(gs.kind, SplittingKind::Regular);
        let j = aor_splitting(&a, AorParams::jacobi()).unwrap();
        assert_eq!(j.m, Matrix::identity(3));
        assert_eq!(j.n_mat, &s.l + &s.u);
    }

    #[test]
    fn two_by_two_splitting() {
        let a = m(&[&[1.0, -0.5], &[-1.0, 1.0]]);
        let s = aor_splitting(&a, AorParams::new(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(s.m, m(&[&[1.0, 0.0], &[-0.5, 1.0]]));
        assert_eq!(s.n_mat, m(&[&[0.0, 0.5], &[0.5, 0.0]]));
        assert!((&s.m - &s.n_mat).max_abs_diff(&a) == 0.0);
    }

    #[test]
    fn iteration_matrix_special_cases() {
        let a = m(&[&[1.0, -0.3, -0.2], &[-0.1, 1.0, -0.4], &[-0.5, -0.2, 1.0]]);
        let s = decompose_dlu(&a);
        let jac = &s.l + &s.u;
        let t = aor_iteration_matrix(&a, AorParams::jacobi()).unwrap();
        assert!(t.max_abs_diff(&jac) < 1e-15);
        let t = aor_iteration_matrix(&a, AorParams::new(0.0, 0.5).unwrap()).unwrap();
        let expected = &Matrix::identity(3).scale(0.5) + &jac.scale(0.5);
        assert!(t.max_abs_diff(&expected) < 1e-15);
        let gs = aor_iteration_matrix(&a, AorParams::gauss_seidel()).unwrap();
        let expected = &(&Matrix::identity(3) - &s.l).inverse().unwrap() * &s.u;
        assert!(gs.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let a = m(&[&[0.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            aor_iteration_matrix(&a, AorParams::jacobi()),
            Err(Error::ZeroDiagonal(0))
        ));
    }

    #[test]
    fn solve_identity_in_one_step() {
        let b = [1.0, -2.0, 3.0];
        let r = aor_solve(&Matrix::identity(3), &b, AorParams::gauss_seidel(), &[0.0; 3], 1e-12, 10)
            .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.solution, b.to_vec());
    }

    #[test]
    fn solve_diverges_on_non_m_matrix() {
        // Gauss-Seidel matrix [[0,2],[0,4]] has radius 4
        let a = m(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        let r = aor_solve(&a, &[1.0, 1.0], AorParams::gauss_seidel(), &[0.0, 0.0], 1e-10, 1000)
            .unwrap();
        assert!(!r.converged);
        assert!(r.iterations < 1000);
        assert!(*r.residual_history.last().unwrap() > 1e6 * r.residual_history[0]);
    }

    #[test]
    fn classify_explicit_splitting() {
        let a = m(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let s = Splitting {
            m: Matrix::identity(2),
            n_mat: m(&[&[-1.0, 0.0], &[0.0, 0.0]]),
            kind: SplittingKind::None,
        };
        assert_eq!(classify_splitting(&a, &s, 1e-12).unwrap(), SplittingKind::None);
        let bad = Splitting {
            m: Matrix::identity(2),
            n_mat: Matrix::zeros(2),
            kind: SplittingKind::None,
        };
        assert!(classify_splitting(&a, &bad, 1e-12).is_err());
    }

    #[test]
    fn extrapolation() {
        assert_eq!(extrapolate_rho(0.3, 0.7, 0.7).unwrap(), 0.3);
        assert_eq!(extrapolate_rho(1.0, 0.4, 0.9).unwrap(), 1.0);
        assert_eq!(extrapolate_rho(0.5, 1.0, 0.5).unwrap(), 0.75);
        assert!(extrapolate_rho(0.5, 0.0, 0.5).is_err());
    }
}
