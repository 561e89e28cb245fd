//! Replays of the two published counterexamples: irreducible L-matrices
//! whose preconditioned iteration matrices are nevertheless reducible.

use std::fmt;

use crate::aor::{aor_iteration_matrix, AorParams};
use crate::classes::{is_irreducible, is_l};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::preconditioners::{build_q, precondition, PreconditionerSpec};

/// Irreducible L-matrix whose `q8` preconditioned AOR iteration matrices
/// are reducible once `alpha_3 = 1`.
pub fn counterexample_4x4() -> Matrix {
    Matrix::from_rows(&[
        [1.0, -0.5, 0.0, -1.0],
        [-1.0, 1.0, 0.0, 0.0],
        [0.0, -1.0, 1.0, 0.0],
        [0.0, 0.0, -1.0, 1.0],
    ])
    .expect("constant")
}

/// Irreducible L-matrix whose preconditioned SOR iteration matrix is
/// reducible under the all-ones `q25` preconditioner.
pub fn counterexample_6x6() -> Matrix {
    Matrix::from_rows(&[
        [1.0, 0.0, 0.0, 0.0, 0.0, -0.5],
        [-0.5, 1.0, -0.5, 0.0, 0.0, 0.0],
        [0.0, -0.5, 1.0, 0.0, 0.0, 0.0],
        [0.0, -0.5, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, -0.5],
        [-0.5, -0.5, 0.0, -0.5, -0.5, 1.0],
    ])
    .expect("constant")
}

/// The all-ones `q25 = q6(r = 2) + q17` preconditioner of order `n`.
pub fn q25_all_ones(n: usize) -> PreconditionerSpec {
    PreconditionerSpec::combination(
        25,
        PreconditionerSpec::line(6, 2, vec![1.0; n - 1]).expect("valid"),
        PreconditionerSpec::vector(17, vec![1.0; n - 1]).expect("valid"),
    )
    .expect("valid")
}

/// One `(preconditioner, gamma, omega)` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayCheck {
    pub spec: PreconditionerSpec,
    pub gamma: f64,
    pub omega: f64,
    pub iteration_reducible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayCase {
    pub name: &'static str,
    pub a: Matrix,
    pub a_is_l: bool,
    pub a_irreducible: bool,
    pub checks: Vec<ReplayCheck>,
}

impl ReplayCase {
    pub fn passed(&self) -> bool {
        self.a_is_l && self.a_irreducible && !self.checks.is_empty() && self.checks.iter().all(|c| c.iteration_reducible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub cases: Vec<ReplayCase>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(ReplayCase::passed)
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            let reducible = c.checks.iter().filter(|k| k.iteration_reducible).count();
            writeln!(
                f,
                "{}: {} (L-matrix {}, irreducible {}, reducible iteration matrices {}/{})",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.a_is_l,
                c.a_irreducible,
                reducible,
                c.checks.len()
            )?;
            for k in c.checks.iter().filter(|k| !k.iteration_reducible) {
                writeln!(f, "  irreducible at gamma={} omega={} for {}", k.gamma, k.omega, k.spec)?;
            }
        }
        Ok(())
    }
}

fn iteration_reducible(a: &Matrix, q: &Matrix, gamma: f64, omega: f64) -> Result<bool> {
    let pa = precondition(a, q)?.pa;
    let t = aor_iteration_matrix(&pa, AorParams::new(gamma, omega)?)?;
    // the iteration matrix is computed, so ignore rounding-level entries
    Ok(!is_irreducible(&t, 1e-12 * t.max_abs().max(1.0)))
}

const GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

fn case(name: &'static str, a: Matrix, cells: &[(PreconditionerSpec, f64, f64)]) -> Result<ReplayCase> {
    let mut checks = Vec::with_capacity(cells.len());
    for (spec, gamma, omega) in cells {
        let q = build_q(spec, &a)?;
        checks.push(ReplayCheck {
            spec: spec.clone(),
            gamma: *gamma,
            omega: *omega,
            iteration_reducible: iteration_reducible(&a, &q, *gamma, *omega)?,
        });
    }
    Ok(ReplayCase {
        name,
        a_is_l: is_l(&a, 0.0),
        a_irreducible: is_irreducible(&a, 0.0),
        a,
        checks,
    })
}

/// Both replays. The 4x4 case fixes `alpha_3 = 1`, scans `alpha_1, alpha_2
/// in {0.5, 1}` and the AOR grid `gamma in {0, 0.25, ..., 1}`, `omega in
/// {0.25, ..., 1}`; the 6x6 case scans SOR with `omega in {0.25, ..., 1}`.
pub fn replay_counterexamples() -> Result<ReplayReport> {
    let mut cells4 = Vec::new();
    for a1 in [0.5, 1.0] {
        for a2 in [0.5, 1.0] {
            let spec = PreconditionerSpec::vector(8, vec![a1, a2, 1.0])?;
            for gamma in std::iter::once(0.0).chain(GRID) {
                for omega in GRID {
                    cells4.push((spec.clone(), gamma, omega));
                }
            }
        }
    }
    let spec6 = q25_all_ones(6);
    let cells6: Vec<_> = GRID.iter().map(|&w| (spec6.clone(), w, w)).collect();
    Ok(ReplayReport {
        cases: vec![
            case("4x4 q8 alpha_3 = 1 (AOR)", counterexample_4x4(), &cells4)?,
            case("6x6 q25 all ones (SOR)", counterexample_6x6(), &cells6)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_replays_pass() {
        let r = replay_counterexamples().unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.cases[0].checks.len(), 4 * 5 * 4);
        assert_eq!(r.cases[1].checks.len(), 4);
    }

    #[test]
    fn q8_with_small_alpha3_stays_irreducible() {
        // the reducibility hinges on alpha_3 = 1
        let a = counterexample_4x4();
        let q = build_q(&PreconditionerSpec::vector(8, vec![1.0, 1.0, 0.5]).unwrap(), &a).unwrap();
        assert!(!iteration_reducible(&a, &q, 0.5, 1.0).unwrap());
    }
}
