//! Matrix-class analyzers: Z, L, irreducible, nonsingular M and monotone.

use crate::matrix::{cone_of, Matrix, NUMERIC_EPS};
use crate::spectral;

/// Which of the standard classes a matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixClassReport {
    pub is_z: bool,
    pub is_l: bool,
    pub is_irreducible: bool,
    pub is_nonsingular_m: bool,
    pub is_monotone: bool,
}

/// Off-diagonal entries all `<= eps`.
pub fn is_z(a: &Matrix, eps: f64) -> bool {
    let n = a.order();
    (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)] <= eps))
}

/// Z-matrix with every diagonal entry `> eps`.
pub fn is_l(a: &Matrix, eps: f64) -> bool {
    is_z(a, eps) && a.diagonal().iter().all(|&d| d > eps)
}

/// `D^{-1}(L + U)` for a matrix with nonzero diagonal.
pub fn jacobi_matrix(a: &Matrix) -> Option<Matrix> {
    let n = a.order();
    let diag = a.diagonal();
    if diag.contains(&0.0) {
        return None;
    }
    Some(Matrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            -a[(i, j)] / diag[i]
        }
    }))
}

/// Spectral radius of the Jacobi matrix, or `None` when some diagonal entry
/// is not positive.
pub fn jacobi_radius(a: &Matrix) -> Option<f64> {
    if a.diagonal().iter().any(|&d| d <= 0.0) {
        return None;
    }
    let j = jacobi_matrix(a)?;
    spectral::spectral_radius(&j, spectral::DEFAULT_TOL, spectral::DEFAULT_MAX_ITER)
        .ok()
        .map(|r| r.rho)
}

/// Nonsingular M-matrix test via the Jacobi radius: a Z-matrix with positive
/// diagonal whose Jacobi matrix has spectral radius below `1 - eps`.
pub fn is_nonsingular_m(a: &Matrix, eps: f64) -> bool {
    if !is_z(a, eps) {
        return false;
    }
    match jacobi_radius(a) {
        Some(rho) => rho < 1.0 - eps,
        None => false,
    }
}

/// Numerically invertible with entrywise nonnegative inverse.
pub fn is_monotone(a: &Matrix, eps: f64) -> bool {
    a.inverse()
        .map(|inv| cone_of(&inv, eps).is_nonnegative())
        .unwrap_or(false)
}

/// Classifies `a`; `eps` is used for sign tests, the nonzero pattern uses an
/// exact-zero threshold.
pub fn classify(a: &Matrix, eps: f64) -> MatrixClassReport {
    let z = is_z(a, eps);
    let l = z && a.diagonal().iter().all(|&d| d > eps);
    let m = l && is_nonsingular_m(a, eps.max(NUMERIC_EPS));
    MatrixClassReport {
        is_z: z,
        is_l: l,
        is_irreducible: is_irreducible(a, 0.0),
        is_nonsingular_m: m,
        is_monotone: is_monotone(a, eps.max(NUMERIC_EPS)),
    }
}

/// Adjacency lists of the directed graph with an edge `i -> j` iff `i != j`
/// and `|a_ij| > eps_pattern`.
pub fn pattern_graph(a: &Matrix, eps_pattern: f64) -> Vec<Vec<usize>> {
    let n = a.order();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && a[(i, j)].abs() > eps_pattern)
                .collect()
        })
        .collect()
}

/// Strongly connected components of a directed graph (Tarjan, iterative).
/// Each vertex receives a component id.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// True iff the directed graph of the off-diagonal pattern is strongly
/// connected. Order-one matrices are irreducible.
pub fn is_irreducible(a: &Matrix, eps_pattern: f64) -> bool {
    let comp = strongly_connected_components(&pattern_graph(a, eps_pattern));
    comp.iter().all(|&c| c == comp[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::STRUCTURAL_EPS;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_classes() {
        let r = classify(&Matrix::identity(3), STRUCTURAL_EPS);
        assert!(r.is_z && r.is_l && r.is_nonsingular_m && r.is_monotone);
        assert!(!r.is_irreducible);
        assert!(is_irreducible(&Matrix::identity(1), 0.0));
    }

    #[test]
    fn non_m_l_matrix() {
        let a = m(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        let r = classify(&a, STRUCTURAL_EPS);
        assert!(r.is_z && r.is_l && r.is_irreducible);
        assert!(!r.is_nonsingular_m);
        assert!(!r.is_monotone);
        // eigenvalues of [[0,2],[2,0]] are +-2
        assert!((jacobi_radius(&a).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_diagonal_is_not_m() {
        let a = m(&[&[0.0, -0.1], &[-0.1, 1.0]]);
        assert!(!is_nonsingular_m(&a, 1e-9));
        assert!(jacobi_radius(&a).is_none());
    }

    #[test]
    fn cyclic_pattern_is_irreducible() {
        let n = 5;
        let a = Matrix::from_fn(n, |i, j| {
            if i == j {
                1.0
            } else if j == (i + 1) % n {
                -0.3
            } else {
                0.0
            }
        });
        assert!(is_irreducible(&a, 0.0));
        let mut broken = a.clone();
        broken[(n - 1, 0)] = 0.0;
        assert!(!is_irreducible(&broken, 0.0));
        // a tiny entry is an edge only below the threshold
        broken[(n - 1, 0)] = 1e-15;
        assert!(is_irreducible(&broken, 0.0));
        assert!(!is_irreducible(&broken, 1e-12));
    }

    #[test]
    fn four_by_four_counterexample_is_irreducible_l() {
        let a = m(&[
            &[1.0, -0.5, 0.0, -1.0],
            &[-1.0, 1.0, 0.0, 0.0],
            &[0.0, -1.0, 1.0, 0.0],
            &[0.0, 0.0, -1.0, 1.0],
        ]);
        let r = classify(&a, STRUCTURAL_EPS);
        assert!(r.is_l && r.is_irreducible);
    }

    #[test]
    fn scc_components() {
        // 0 <-> 1, 2 -> 0, 3 isolated
        let adj = vec![vec![1], vec![0], vec![0], vec![]];
        let c = strongly_connected_components(&adj);
        assert_eq!(c[0], c[1]);
        assert_ne!(c[0], c[2]);
        assert_ne!(c[2], c[3]);
    }
}
