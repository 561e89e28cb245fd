//! Seeded random instance generators. All outputs have unit diagonal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Off-diagonal magnitude for which the Jacobi radius of a generated
/// L-matrix sits near 1 in the median, so instances split roughly evenly
/// between the convergent and divergent regimes.
///
/// Each off-diagonal entry averages `mag / 2`, so a row carrying `k` entries
/// has Jacobi row sum `k mag / 2`; `k` is the expected entry count per row.
pub fn default_magnitude(n: usize, density: f64, irreducible: bool) -> f64 {
    let mut k = (n.saturating_sub(1)) as f64 * density;
    if irreducible {
        // the embedded cycle adds one entry where the draw left none
        k += 1.0 - density;
    }
    MAG_CALIBRATION * 2.0 / k.max(1.0)
}

/// Correction to the row-sum estimate, measured once: at 1.0 the median
/// Jacobi radius over `n in 3..=10` was 0.94 to 0.99 for densities 0.5 and 1.
/// The radius scales linearly with `mag`, so this centers it on 1.
pub const MAG_CALIBRATION: f64 = 1.03;

fn check_args(n: usize, density: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("generator needs n >= 2, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter(format!("density must lie in (0, 1], got {density}")));
    }
    Ok(())
}

/// Uniform draw from `(0, 1]`.
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Unit-diagonal L-matrix whose off-diagonal entries are drawn uniformly
/// from `[-mag, 0)` with probability `density`. With `irreducible`, a random
/// Hamiltonian cycle of negative entries is embedded.
pub fn gen_l_matrix_with(n: usize, density: f64, irreducible: bool, mag: f64, seed: u64) -> Result<Matrix> {
    check_args(n, density)?;
    if !(mag > 0.0 && mag.is_finite()) {
        return Err(Error::InvalidParameter(format!("magnitude must be positive, got {mag}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                a[(i, j)] = -mag * unit_open(&mut rng);
            }
        }
    }
    if irreducible {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for k in 0..n {
            let (i, j) = (perm[k], perm[(k + 1) % n]);
            if a[(i, j)] == 0.0 {
                a[(i, j)] = -mag * unit_open(&mut rng);
            }
        }
        debug_assert!(crate::classes::is_irreducible(&a, 0.0));
    }
    Ok(a)
}

/// [`gen_l_matrix_with`] at [`default_magnitude`].
pub fn gen_l_matrix(n: usize, density: f64, irreducible: bool, seed: u64) -> Result<Matrix> {
    gen_l_matrix_with(n, density, irreducible, default_magnitude(n, density, irreducible), seed)
}

/// Rescales every row's off-diagonal part to absolute sum `s`; rows without
/// off-diagonal entries are left alone.
fn rescale_rows(a: &mut Matrix, s: f64) {
    let n = a.order();
    for i in 0..n {
        let sum: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        if sum > 0.0 {
            for j in (0..n).filter(|&j| j != i) {
                a[(i, j)] *= s / sum;
            }
        }
    }
}

/// Strictly diagonally dominant unit-diagonal L-matrix, hence a nonsingular
/// M-matrix: each row's off-diagonal absolute sum is `1 / (1 + dominance)`.
pub fn gen_m_matrix_with(n: usize, density: f64, dominance: f64, irreducible: bool, seed: u64) -> Result<Matrix> {
    if !(dominance > 0.0 && dominance.is_finite()) {
        return Err(Error::InvalidParameter(format!("dominance must be positive, got {dominance}")));
    }
    let mut a = gen_l_matrix_with(n, density, irreducible, 1.0, seed)?;
    rescale_rows(&mut a, 1.0 / (1.0 + dominance));
    Ok(a)
}

pub fn gen_m_matrix(n: usize, density: f64, dominance: f64, seed: u64) -> Result<Matrix> {
    gen_m_matrix_with(n, density, dominance, false, seed)
}

/// Irreducible unit-diagonal Z-matrix with zero row sums, so `A e = 0` and
/// every AOR iteration matrix with `0 < omega <= 1`, `0 <= gamma <= 1` has
/// spectral radius 1.
pub fn gen_singular_l_matrix(n: usize, density: f64, seed: u64) -> Result<Matrix> {
    let mut a = gen_l_matrix_with(n, density, true, 1.0, seed)?;
    rescale_rows(&mut a, 1.0);
    Ok(a)
}

/// Row `i` divided by `a_{i,i}`.
pub fn normalize_diag(a: &Matrix) -> Result<Matrix> {
    let n = a.order();
    let d = a.diagonal();
    if let Some((index, &value)) = d.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveDiagonal { index, value });
    }
    Ok(Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { a[(i, j)] / d[i] }))
}
