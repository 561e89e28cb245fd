//! The `P = I + Q` preconditioner catalog (variants `q1` to `q34`), the
//! preconditioned system `PA`, the decomposition of `Q` against the split of
//! `A`, and the improvement matrix `Delta(gamma)`.
//!
//! Every builder assumes `A` has unit diagonal; `normalize_diag` in the harness
//! rescales a general matrix with positive diagonal. Row, column and
//! parameter indices in specs are 1-based, matching the usual notation for
//! these preconditioners (`alpha_1` multiplies `a_{n,1}` in `q5` with `r = n`,
//! and so on).

mod closed_form;
mod system;
mod text;

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, STRUCTURAL_EPS};

pub use closed_form::delta_closed_form;
pub use system::{
    delta_generic, precondition, q_decompose, structure_deviation, DeltaMatrix,
    PreconditionedSystem, QDecomposition,
};

/// Catalog number `1..=34`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variant(u8);

impl Variant {
    pub const COUNT: u8 = 34;

    pub fn new(k: u8) -> Result<Self> {
        if (1..=Self::COUNT).contains(&k) {
            Ok(Self(k))
        } else {
            Err(Error::InvalidParameter(format!("no preconditioner variant q{k}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Variant> {
        (1..=Self::COUNT).map(Variant)
    }

    pub fn is_combination(self) -> bool {
        self.0 >= 21
    }

    /// Parameter shape expected by this variant.
    pub fn shape(self) -> Shape {
        match self.0 {
            1 | 2 | 3 | 12 => Shape::Matrix,
            4 | 13 => Shape::Scalar,
            5 | 6 | 14 | 15 => Shape::Line,
            7 | 16 => Shape::Entry,
            8 | 17 | 18 => Shape::Vector,
            9 | 10 | 19 => Shape::Shifted,
            11 | 20 => Shape::Corner,
            _ => Shape::Combination,
        }
    }

    /// Constituent variants `(lower, upper)` of a combination.
    pub fn constituents(self) -> Option<(Variant, Variant)> {
        let (l, u) = match self.0 {
            21 => (5, 12),
            22 => (7, 12),
            23 => (3, 17),
            24 => (5, 17),
            25 => (6, 17),
            26 => (7, 17),
            27 => (8, 16),
            28 => (8, 17),
            29 => (5, 15),
            30 => (6, 14),
            31 => (5, 14),
            32 => (5, 14),
            33 => (6, 15),
            34 => (11, 20),
            _ => return None,
        };
        Some((Variant(l), Variant(u)))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .strip_prefix('q')
            .or_else(|| s.strip_prefix('Q'))
            .ok_or_else(|| Error::Parse(format!("variant must look like q7, got `{s}`")))?;
        let k: u8 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad variant number in `{s}`")))?;
        Variant::new(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Matrix,
    Scalar,
    Line,
    Entry,
    Vector,
    Shifted,
    Corner,
    Combination,
}

/// Variant parameters. Which shape applies is fixed by the variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    /// `q1`: the off-diagonal entries of `Q` themselves; `q2`, `q3`, `q12`:
    /// the weights `alpha_{i,j}` (only the relevant triangle is read).
    Matrix(Matrix),
    /// `q4`, `q13`: the scalar `alpha`.
    Scalar(f64),
    /// `q5`, `q6`, `q14`, `q15`: the anchor `r` and the weights along the
    /// row or column segment.
    Line { r: usize, alpha: Vec<f64> },
    /// `q7`, `q16`: the single entry `(r, s)` and its divisor `alpha`.
    Entry { r: usize, s: usize, alpha: f64 },
    /// `q8`, `q17`, `q18`: one weight per row `1..n-1` (or per sub-diagonal entry).
    Vector(Vec<f64>),
    /// `q9`, `q10`, `q19`: weights and additive shifts along a row or column.
    Shifted { alpha: Vec<f64>, beta: Vec<f64> },
    /// `q11`, `q20`: a single corner entry `-a/alpha - beta`.
    Corner { alpha: f64, beta: f64 },
    /// `q21`..`q34`: the strictly lower and strictly upper constituents.
    Combination {
        lower: Box<PreconditionerSpec>,
        upper: Box<PreconditionerSpec>,
    },
}

impl Params {
    fn shape(&self) -> Shape {
        match self {
            Params::Matrix(_) => Shape::Matrix,
            Params::Scalar(_) => Shape::Scalar,
            Params::Line { .. } => Shape::Line,
            Params::Entry { .. } => Shape::Entry,
            Params::Vector(_) => Shape::Vector,
            Params::Shifted { .. } => Shape::Shifted,
            Params::Corner { .. } => Shape::Corner,
            Params::Combination { .. } => Shape::Combination,
        }
    }
}

/// A catalog variant together with its parameters.
///
/// Construction checks everything that does not depend on `A`; [`build_q`]
/// checks the rest (lengths, index ranges, sign conditions on anchored
/// entries, and that `Q` is not identically zero).
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionerSpec {
    variant: Variant,
    params: Params,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn check_nonneg(variant: Variant, name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        Some(k) => Err(invalid(format!(
            "{variant}: {name}[{}] = {} must be finite and nonnegative",
            k + 1,
            values[k]
        ))),
        None => Ok(()),
    }
}

fn check_positive(variant: Variant, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{variant}: {name} = {v} must be positive")))
    }
}

impl PreconditionerSpec {
    pub fn new(variant: Variant, params: Params) -> Result<Self> {
        if params.shape() != variant.shape() {
            return Err(invalid(format!(
                "{variant} expects {:?} parameters, got {:?}",
                variant.shape(),
                params.shape()
            )));
        }
        match &params {
            Params::Matrix(m) => {
                let name = if variant.number() == 1 { "q" } else { "alpha" };
                let n = m.order();
                let off: Vec<f64> = (0..n)
                    .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                    .map(|(i, j)| m[(i, j)])
                    .collect();
                check_nonneg(variant, name, &off)?;
            }
            Params::Scalar(a) => check_positive(variant, "alpha", *a)?,
            Params::Line { r, alpha } => {
                if *r < 2 {
                    return Err(invalid(format!("{variant}: r = {r} must be at least 2")));
                }
                check_nonneg(variant, "alpha", alpha)?;
            }
            Params::Entry { r, s, alpha } => {
                check_positive(variant, "alpha", *alpha)?;
                let ok = match variant.number() {
                    7 => r > s,
                    _ => r < s,
                };
                if *r == 0 || *s == 0 || !ok {
                    return Err(invalid(format!(
                        "{variant}: entry ({r}, {s}) is not strictly {} the diagonal",
                        if variant.number() == 7 { "below" } else { "above" }
                    )));
                }
            }
            Params::Vector(alpha) => check_nonneg(variant, "alpha", alpha)?,
            Params::Shifted { alpha, beta } => {
                check_nonneg(variant, "alpha", alpha)?;
                if alpha.len() != beta.len() {
                    return Err(invalid(format!(
                        "{variant}: alpha and beta lengths differ ({} vs {})",
                        alpha.len(),
                        beta.len()
                    )));
                }
                if beta.iter().any(|b| !b.is_finite()) {
                    return Err(invalid(format!("{variant}: beta must be finite")));
                }
            }
            Params::Corner { alpha, beta } => {
                check_positive(variant, "alpha", *alpha)?;
                if !beta.is_finite() {
                    return Err(invalid(format!("{variant}: beta must be finite")));
                }
            }
            Params::Combination { lower, upper } => {
                let (l, u) = variant.constituents().expect("combination variant");
                if lower.variant != l || upper.variant != u {
                    return Err(invalid(format!(
                        "{variant} combines {l} and {u}, got {} and {}",
                        lower.variant, upper.variant
                    )));
                }
            }
        }
        Ok(Self { variant, params })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// True when the parameters alone force `Q = 0` for every matrix.
    pub fn is_identically_zero(&self) -> bool {
        let zeros = |v: &[f64]| v.iter().all(|&x| x == 0.0);
        match &self.params {
            Params::Matrix(m) => zeros(m.as_slice()),
            Params::Line { alpha, .. } | Params::Vector(alpha) => zeros(alpha),
            Params::Shifted { alpha, beta } => zeros(alpha) && zeros(beta),
            Params::Scalar(_) | Params::Entry { .. } | Params::Corner { .. } => false,
            Params::Combination { lower, upper } => lower.is_identically_zero() && upper.is_identically_zero(),
        }
    }

    fn of(k: u8, params: Params) -> Result<Self> {
        Self::new(Variant::new(k)?, params)
    }

    /// `q1`: `Q` given directly by its off-diagonal entries.
    pub fn q1(q: Matrix) -> Result<Self> {
        Self::of(1, Params::Matrix(q))
    }

    /// `q2`, `q3` or `q12` with weight matrix `alpha`.
    pub fn weighted(k: u8, alpha: Matrix) -> Result<Self> {
        Self::of(k, Params::Matrix(alpha))
    }

    /// `q4` (`alpha L`) or `q13` (`alpha U`).
    pub fn scalar(k: u8, alpha: f64) -> Result<Self> {
        Self::of(k, Params::Scalar(alpha))
    }

    /// `q5`, `q6`, `q14` or `q15` anchored at `r`.
    pub fn line(k: u8, r: usize, alpha: Vec<f64>) -> Result<Self> {
        Self::of(k, Params::Line { r, alpha })
    }

    /// `q7` or `q16` at entry `(r, s)`.
    pub fn entry(k: u8, r: usize, s: usize, alpha: f64) -> Result<Self> {
        Self::of(k, Params::Entry { r, s, alpha })
    }

    /// `q8`, `q17` or `q18`.
    pub fn vector(k: u8, alpha: Vec<f64>) -> Result<Self> {
        Self::of(k, Params::Vector(alpha))
    }

    /// `q9`, `q10` or `q19`.
    pub fn shifted(k: u8, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        Self::of(k, Params::Shifted { alpha, beta })
    }

    /// `q11` or `q20`.
    pub fn corner(k: u8, alpha: f64, beta: f64) -> Result<Self> {
        Self::of(k, Params::Corner { alpha, beta })
    }

    /// `q21`..`q34` from its two constituents.
    pub fn combination(k: u8, lower: PreconditionerSpec, upper: PreconditionerSpec) -> Result<Self> {
        Self::of(
            k,
            Params::Combination {
                lower: Box::new(lower),
                upper: Box::new(upper),
            },
        )
    }
}

/// Rejects matrices whose diagonal is not 1 within `STRUCTURAL_EPS`.
pub fn check_unit_diagonal(a: &Matrix) -> Result<()> {
    for (i, d) in a.diagonal().into_iter().enumerate() {
        if (d - 1.0).abs() > STRUCTURAL_EPS {
            return Err(Error::NonUnitDiagonal { index: i, value: d });
        }
    }
    Ok(())
}

fn expect_len(variant: Variant, name: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() == len {
        Ok(())
    } else {
        Err(invalid(format!(
            "{variant}: {name} needs {len} entries for this matrix, got {}",
            v.len()
        )))
    }
}

/// Builds `Q` for `spec` on the unit-diagonal matrix `a`.
pub fn build_q(spec: &PreconditionerSpec, a: &Matrix) -> Result<Matrix> {
    check_unit_diagonal(a)?;
    let q = build_unchecked(spec, a)?;
    if q.as_slice().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroPreconditioner(spec.variant.to_string()));
    }
    Ok(q)
}

fn build_unchecked(spec: &PreconditionerSpec, a: &Matrix) -> Result<Matrix> {
    let v = spec.variant;
    let k = v.number();
    let n = a.order();
    let mut q = Matrix::zeros(n);
    match &spec.params {
        Params::Matrix(m) => {
            if m.order() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.order(),
                });
            }
            for i in 0..n {
                for j in 0..n {
                    let keep = match k {
                        1 | 2 => i != j,
                        3 => i > j,
                        _ => i < j,
                    };
                    if keep {
                        q[(i, j)] = if k == 1 { m[(i, j)] } else { -m[(i, j)] * a[(i, j)] };
                    }
                }
            }
        }
        Params::Scalar(alpha) => {
            for i in 0..n {
                for j in 0..n {
                    if (k == 4 && i > j) || (k == 13 && i < j) {
                        q[(i, j)] = -alpha * a[(i, j)];
                    }
                }
            }
        }
        Params::Line { r, alpha } => {
            let r = *r;
            if r > n {
                return Err(invalid(format!("{v}: r = {r} exceeds the order {n}")));
            }
            // 0-based anchor row or column and the index range it covers
            match k {
                5 => {
                    // row r, columns 1..r-1
                    expect_len(v, "alpha", alpha, r - 1)?;
                    for c in 0..r - 1 {
                        q[(r - 1, c)] = -alpha[c] * a[(r - 1, c)];
                    }
                }
                6 => {
                    // column r-1, rows r..n
                    expect_len(v, "alpha", alpha, n - r + 1)?;
                    for (t, i) in (r - 1..n).enumerate() {
                        q[(i, r - 2)] = -alpha[t] * a[(i, r - 2)];
                    }
                }
                14 => {
                    // row r-1, columns r..n
                    expect_len(v, "alpha", alpha, n - r + 1)?;
                    for (t, j) in (r - 1..n).enumerate() {
                        q[(r - 2, j)] = -alpha[t] * a[(r - 2, j)];
                    }
                }
                _ => {
                    // column r, rows 1..r-1
                    expect_len(v, "alpha", alpha, r - 1)?;
                    for i in 0..r - 1 {
                        q[(i, r - 1)] = -alpha[i] * a[(i, r - 1)];
                    }
                }
            }
        }
        Params::Entry { r, s, alpha } => {
            if *r > n || *s > n {
                return Err(invalid(format!("{v}: entry ({r}, {s}) outside order {n}")));
            }
            let (i, j) = (r - 1, s - 1);
            if a[(i, j)] >= 0.0 {
                return Err(Error::SignPrecondition(format!(
                    "{v} needs a_{{{r},{s}}} < 0, found {}",
                    a[(i, j)]
                )));
            }
            q[(i, j)] = -a[(i, j)] / alpha;
        }
        Params::Vector(alpha) => {
            if n < 2 {
                return Err(invalid(format!("{v} needs order at least 2")));
            }
            expect_len(v, "alpha", alpha, n - 1)?;
            for t in 0..n - 1 {
                let (i, j) = match k {
                    8 => (t + 1, t),
                    17 => (t, t + 1),
                    _ => (t, argmax_right(a, t)),
                };
                q[(i, j)] = -alpha[t] * a[(i, j)];
            }
        }
        Params::Shifted { alpha, beta } => {
            if n < 2 {
                return Err(invalid(format!("{v} needs order at least 2")));
            }
            expect_len(v, "alpha", alpha, n - 1)?;
            for t in 0..n - 1 {
                let (i, j) = match k {
                    9 => (n - 1, t),
                    10 => (t + 1, 0),
                    _ => (t, n - 1),
                };
                let val = -alpha[t] * a[(i, j)] + beta[t];
                if val < 0.0 {
                    return Err(Error::SignPrecondition(format!(
                        "{v}: entry ({}, {}) = -alpha a + beta = {val} is negative",
                        i + 1,
                        j + 1
                    )));
                }
                q[(i, j)] = val;
            }
        }
        Params::Corner { alpha, beta } => {
            if n < 2 {
                return Err(invalid(format!("{v} needs order at least 2")));
            }
            let (i, j) = if k == 11 { (n - 1, 0) } else { (0, n - 1) };
            let s = a[(i, j)] / alpha + beta;
            if s >= 0.0 {
                return Err(Error::SignPrecondition(format!(
                    "{v} needs a_{{{},{}}}/alpha + beta < 0, found {s}",
                    i + 1,
                    j + 1
                )));
            }
            q[(i, j)] = -s;
        }
        Params::Combination { lower, upper } => {
            check_anchors(k, lower, upper, n)?;
            let ql = build_q(lower, a)?;
            let qu = build_q(upper, a)?;
            for idx in 0..n * n {
                let (x, y) = (ql.as_slice()[idx], qu.as_slice()[idx]);
                if x != 0.0 && y != 0.0 {
                    return Err(invalid(format!(
                        "{v}: constituents overlap at ({}, {})",
                        idx / n + 1,
                        idx % n + 1
                    )));
                }
            }
            q = &ql + &qu;
        }
    }
    Ok(q)
}

/// The fixed anchors each combination imposes on its constituents.
fn check_anchors(k: u8, lower: &PreconditionerSpec, upper: &PreconditionerSpec, n: usize) -> Result<()> {
    let line_r = |s: &PreconditionerSpec| match s.params {
        Params::Line { r, .. } => Some(r),
        _ => None,
    };
    let entry = |s: &PreconditionerSpec| match s.params {
        Params::Entry { r, s, .. } => Some((r, s)),
        _ => None,
    };
    let (lr, ur) = (line_r(lower), line_r(upper));
    let ok = match k {
        21 | 24 => lr == Some(n),
        22 | 26 => entry(lower) == Some((n, 1)),
        25 => lr == Some(2),
        27 => entry(upper) == Some((1, n)),
        29 => lr == Some(n) && ur == Some(n),
        30 => lr == Some(2) && ur == Some(2),
        31 => lr == Some(n) && ur == Some(2),
        32 => matches!((lr, ur), (Some(r), Some(r1)) if r >= 2 && r < n && r1 == r + 1),
        33 => matches!((lr, ur), (Some(r1), Some(r)) if r >= 2 && r < n && r1 == r + 1),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!(
            "q{k}: constituent anchors {lower} / {upper} do not match the combination for order {n}"
        )))
    }
}

/// Smallest column index `k > i` maximizing `|a_{i,k}|` (0-based).
fn argmax_right(a: &Matrix, i: usize) -> usize {
    let n = a.order();
    let mut best = i + 1;
    for k in i + 2..n {
        if a[(i, k)].abs() > a[(i, best)].abs() {
            best = k;
        }
    }
    best
}


#[doc(hidden)]
pub mod tests_support {
    //! Parameter sets exercising every catalog variant; shared by unit and
    //! integration tests.
    use super::*;

    /// One spec per variant for order `n >= 4` matrices whose off-diagonal
    /// entries are all negative. `w` scales every weight.
    pub fn catalog_specs(n: usize, w: f64) -> Vec<PreconditionerSpec> {
        assert!(n >= 4);
        let full = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { 0.05 * w });
        let ones = |len: usize| vec![w; len];
        let mut v = vec![
            PreconditionerSpec::q1(full.clone()).unwrap(),
            PreconditionerSpec::weighted(2, full.scale(10.0)).unwrap(),
            PreconditionerSpec::weighted(3, full.scale(10.0)).unwrap(),
            PreconditionerSpec::scalar(4, w).unwrap(),
            PreconditionerSpec::line(5, n, ones(n - 1)).unwrap(),
            PreconditionerSpec::line(6, 2, ones(n - 1)).unwrap(),
            PreconditionerSpec::entry(7, n, 1, 1.0 / w).unwrap(),
            PreconditionerSpec::vector(8, ones(n - 1)).unwrap(),
            PreconditionerSpec::shifted(9, ones(n - 1), vec![0.01; n - 1]).unwrap(),
            PreconditionerSpec::shifted(10, ones(n - 1), vec![0.01; n - 1]).unwrap(),
            PreconditionerSpec::corner(11, 1.0 / w, 0.0).unwrap(),
            PreconditionerSpec::weighted(12, full.scale(10.0)).unwrap(),
            PreconditionerSpec::scalar(13, w).unwrap(),
            PreconditionerSpec::line(14, 2, ones(n - 1)).unwrap(),
            PreconditionerSpec::line(15, n, ones(n - 1)).unwrap(),
            PreconditionerSpec::entry(16, 1, n, 1.0 / w).unwrap(),
            PreconditionerSpec::vector(17, ones(n - 1)).unwrap(),
            PreconditionerSpec::vector(18, ones(n - 1)).unwrap(),
            PreconditionerSpec::shifted(19, ones(n - 1), vec![0.01; n - 1]).unwrap(),
            PreconditionerSpec::corner(20, 1.0 / w, 0.0).unwrap(),
        ];
        let s = |k: usize| v[k - 1].clone();
        let combos = vec![
            (21, s(5), s(12)),
            (22, s(7), s(12)),
            (23, s(3), s(17)),
            (24, s(5), s(17)),
            (25, s(6), s(17)),
            (26, s(7), s(17)),
            (27, s(8), s(16)),
            (28, s(8), s(17)),
            (29, s(5), s(15)),
            (30, s(6), s(14)),
            (31, s(5), s(14)),
            (
                32,
                PreconditionerSpec::line(5, 2, ones(1)).unwrap(),
                PreconditionerSpec::line(14, 3, ones(n - 2)).unwrap(),
            ),
            (
                33,
                PreconditionerSpec::line(6, 3, ones(n - 2)).unwrap(),
                PreconditionerSpec::line(15, 2, ones(1)).unwrap(),
            ),
            (34, s(11), s(20)),
        ];
        for (k, l, u) in combos {
            v.push(PreconditionerSpec::combination(k, l, u).unwrap());
        }
        v
    }
}
