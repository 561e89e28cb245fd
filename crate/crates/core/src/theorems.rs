//! Hypothesis predicates for the comparison theorems and empirical
//! verification of their conclusions.
//!
//! Four conclusions are checked for `T = AOR iteration matrix of A` and
//! `T' = AOR iteration matrix of PA`:
//!
//! * A (L-matrix `A`): `rho(T') <= rho(T) < 1`, `= 1`, or `>= rho(T) > 1`.
//! * B (nonsingular M-matrix `A`): `rho(T') <= rho(T) < 1`.
//! * C (irreducible L-matrix `A`): as A with strict inequalities.
//! * D (irreducible nonsingular M-matrix `A`): `rho(T') < rho(T) < 1`.
//!
//! Sufficient conditions come in two families: results for a general
//! nonnegative `Q` (tags `3.1`..`3.4`, `cor3.5`..`cor3.8`) and results for
//! `Q = (-alpha_{i,j} a_{i,j})` (tags `3.5`..`3.8`). Tags may name a single
//! alternative, e.g. `3.3(ii)`.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use crate::aor::{aor_iteration_matrix, AorParams};
use crate::classes::{is_irreducible, is_l, is_nonsingular_m, is_z};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, NUMERIC_EPS};
use crate::preconditioners::{
    build_q, check_unit_diagonal, delta_closed_form, delta_generic, precondition, PreconditionerSpec,
};
use crate::spectral::{self, dense_block_spectral_radius, spectral_radius};

/// Sign tolerance for the hypothesis predicates: a quantity counts as
/// positive iff `> HYP_EPS` and as nonpositive iff `<= HYP_EPS`.
pub const HYP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremKind {
    A,
    B,
    C,
    D,
}

impl TheoremKind {
    pub fn all() -> [TheoremKind; 4] {
        [TheoremKind::A, TheoremKind::B, TheoremKind::C, TheoremKind::D]
    }

    /// The general-`Q` result whose conclusion is this kind.
    pub fn general_tag(self) -> TheoremTag {
        let result = match self {
            TheoremKind::A => Result_::T3_1,
            TheoremKind::B => Result_::T3_2,
            TheoremKind::C => Result_::T3_3,
            TheoremKind::D => Result_::T3_4,
        };
        TheoremTag { result, clause: None }
    }
}

impl fmt::Display for TheoremKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One of the implemented sufficient-condition results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum Result_ {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6,
    T3_7,
    T3_8,
    Cor3_5,
    Cor3_6,
    Cor3_7,
    Cor3_8,
}

impl Result_ {
    const ALL: [Result_; 12] = [
        Result_::T3_1,
        Result_::T3_2,
        Result_::T3_3,
        Result_::T3_4,
        Result_::T3_5,
        Result_::T3_6,
        Result_::T3_7,
        Result_::T3_8,
        Result_::Cor3_5,
        Result_::Cor3_6,
        Result_::Cor3_7,
        Result_::Cor3_8,
    ];

    fn name(self) -> &'static str {
        match self {
            Result_::T3_1 => "3.1",
            Result_::T3_2 => "3.2",
            Result_::T3_3 => "3.3",
            Result_::T3_4 => "3.4",
            Result_::T3_5 => "3.5",
            Result_::T3_6 => "3.6",
            Result_::T3_7 => "3.7",
            Result_::T3_8 => "3.8",
            Result_::Cor3_5 => "cor3.5",
            Result_::Cor3_6 => "cor3.6",
            Result_::Cor3_7 => "cor3.7",
            Result_::Cor3_8 => "cor3.8",
        }
    }

    fn kind(self) -> TheoremKind {
        match self {
            Result_::T3_1 | Result_::T3_5 | Result_::Cor3_5 => TheoremKind::A,
            Result_::T3_2 | Result_::T3_6 | Result_::Cor3_6 => TheoremKind::B,
            Result_::T3_3 | Result_::T3_7 | Result_::Cor3_7 => TheoremKind::C,
            Result_::T3_4 | Result_::T3_8 | Result_::Cor3_8 => TheoremKind::D,
        }
    }

    /// Number of top-level alternatives `(i), (ii), ...`.
    fn clauses(self) -> u8 {
        match self {
            Result_::T3_3 | Result_::T3_7 => 4,
            Result_::T3_4 | Result_::T3_8 | Result_::Cor3_7 => 2,
            Result_::Cor3_8 => 3,
            _ => 0,
        }
    }
}

/// A result reference such as `3.1`, `3.3(ii)` or `cor3.7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TheoremTag {
    pub result: Result_,
    /// 1-based alternative; `None` accepts any alternative.
    pub clause: Option<u8>,
}

impl TheoremTag {
    pub fn kind(&self) -> TheoremKind {
        self.result.kind()
    }

    /// Every result at its top level.
    pub fn all() -> Vec<TheoremTag> {
        Result_::ALL
            .iter()
            .map(|&result| TheoremTag { result, clause: None })
            .collect()
    }
}

const ROMAN: [&str; 4] = ["i", "ii", "iii", "iv"];

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.result.name())?;
        if let Some(c) = self.clause {
            write!(f, "({})", ROMAN[c as usize - 1])?;
        }
        Ok(())
    }
}

impl FromStr for TheoremTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownTheorem(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let (head, clause) = match lower.split_once('(') {
            Some((h, rest)) => {
                let roman = rest.strip_suffix(')').ok_or_else(unknown)?;
                let c = ROMAN.iter().position(|r| *r == roman).ok_or_else(unknown)? as u8 + 1;
                (h.to_string(), Some(c))
            }
            None => (lower, None),
        };
        let head = head.replace("corollary", "cor").replace("theorem", "");
        let result = Result_::ALL
            .into_iter()
            .find(|r| r.name() == head.trim())
            .ok_or_else(unknown)?;
        if let Some(c) = clause {
            if c > result.clauses() {
                return Err(unknown());
            }
        }
        Ok(TheoremTag { result, clause })
    }
}

/// Outcome of evaluating every named condition of one result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub theorem: TheoremTag,
    pub passed: bool,
    pub failed_conditions: Vec<String>,
}

/// Evaluates the hypotheses of `tag` for `A`, the preconditioner described by
/// `spec`, and `(gamma, omega)`. Fails if `Q` cannot be built.
pub fn check_hypotheses(
    tag: TheoremTag,
    a: &Matrix,
    spec: &PreconditionerSpec,
    gamma: f64,
    omega: f64,
) -> Result<HypothesisReport> {
    let q = build_q(spec, a)?;
    check_hypotheses_q(tag, a, &q, gamma, omega)
}

/// As [`check_hypotheses`] with `Q` given explicitly.
pub fn check_hypotheses_q(
    tag: TheoremTag,
    a: &Matrix,
    q: &Matrix,
    gamma: f64,
    omega: f64,
) -> Result<HypothesisReport> {
    check_unit_diagonal(a)?;
    if q.order() != a.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: q.order(),
        });
    }
    let ctx = Ctx::new(a, q, gamma, omega)?;
    Ok(ctx.report(tag))
}

/// Everything the predicates need, computed once per `(A, Q, gamma, omega)`.
pub(crate) struct Ctx<'a> {
    a: &'a Matrix,
    q: &'a Matrix,
    pa: Matrix,
    n: usize,
    gamma: f64,
    omega: f64,
    pa_irreducible: bool,
    delta1: OnceCell<Matrix>,
    alpha: OnceCell<Option<Matrix>>,
    a_is_l: bool,
    a_is_m: bool,
    a_irreducible: bool,
}

type Conds = Vec<String>;

fn require(failed: &mut Conds, ok: bool, name: &str) {
    if !ok {
        failed.push(name.to_string());
    }
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(a: &'a Matrix, q: &'a Matrix, gamma: f64, omega: f64) -> Result<Self> {
        let sys = precondition(a, q)?;
        let scale = sys.pa.max_abs().max(1.0);
        let a_is_l = is_l(a, HYP_EPS);
        Ok(Self {
            n: a.order(),
            pa_irreducible: is_irreducible(&sys.pa, HYP_EPS * scale),
            pa: sys.pa,
            a,
            q,
            gamma,
            omega,
            delta1: OnceCell::new(),
            alpha: OnceCell::new(),
            a_is_l,
            a_is_m: a_is_l && is_nonsingular_m(a, NUMERIC_EPS),
            a_irreducible: is_irreducible(a, 0.0),
        })
    }

    fn report(&self, tag: TheoremTag) -> HypothesisReport {
        let mut failed = Vec::new();
        self.standing(tag, &mut failed);
        self.specific(tag, &mut failed);
        HypothesisReport {
            theorem: tag,
            passed: failed.is_empty(),
            failed_conditions: failed,
        }
    }

    /// Assumptions shared by every result of a kind.
    fn standing(&self, tag: TheoremTag, failed: &mut Conds) {
        let kind = tag.kind();
        require(failed, self.omega > 0.0 && self.omega <= 1.0, "0 < omega <= 1");
        require(failed, (0.0..=1.0).contains(&self.gamma), "0 <= gamma <= 1");
        require(failed, self.q.is_nonnegative(HYP_EPS), "Q >= 0");
        match kind {
            TheoremKind::A => require(failed, self.a_is_l, "A is an L-matrix"),
            TheoremKind::B => require(failed, self.a_is_m, "A is a nonsingular M-matrix"),
            TheoremKind::C => require(
                failed,
                self.a_is_l && self.a_irreducible,
                "A is an irreducible L-matrix",
            ),
            TheoremKind::D => require(
                failed,
                self.a_is_m && self.a_irreducible,
                "A is an irreducible nonsingular M-matrix",
            ),
        }
    }

    fn specific(&self, tag: TheoremTag, failed: &mut Conds) {
        let clause_ok = |c: u8, f: &dyn Fn() -> bool| tag.clause.is_none_or(|k| k == c) && f();
        match tag.result {
            Result_::T3_1 => require(failed, self.pa_is_l(), "PA is an L-matrix"),
            Result_::T3_2 => require(failed, self.pa_is_z(), "PA is a Z-matrix"),
            Result_::T3_3 => {
                require(failed, self.pa_is_l(), "PA is an L-matrix");
                let any = (1..=4).any(|c| clause_ok(c, &|| self.thm33_clause(c)));
                require(failed, any, &alternatives(tag, "3.3"));
            }
            Result_::T3_4 => {
                require(failed, self.pa_is_z(), "PA is a Z-matrix");
                let any = clause_ok(1, &|| (1..=4).any(|c| self.thm33_clause(c)))
                    || clause_ok(2, &|| self.thm34_ii());
                require(failed, any, &alternatives(tag, "3.4"));
            }
            Result_::T3_5 | Result_::T3_6 | Result_::T3_7 | Result_::T3_8 => {
                if self.alpha().is_none() {
                    failed.push("Q has the form (-alpha_ij a_ij) with alpha_ij >= 0".into());
                    return;
                }
                match tag.result {
                    Result_::T3_5 => {
                        require(failed, self.q2_diag_below_one(), "sum_k alpha_ik a_ik a_ki < 1 for all i");
                        require(failed, self.eq312(), "(3.12)");
                    }
                    Result_::T3_6 => require(failed, self.eq312(), "(3.12)"),
                    Result_::T3_7 => {
                        require(failed, self.q2_diag_below_one(), "sum_k alpha_ik a_ik a_ki < 1 for all i");
                        let any = (1..=4).any(|c| clause_ok(c, &|| self.thm37_clause(c)));
                        require(failed, any, &alternatives(tag, "3.7"));
                    }
                    _ => {
                        let any = clause_ok(1, &|| {
                            self.q2_diag_below_one() && (1..=4).any(|c| self.thm37_clause(c))
                        }) || clause_ok(2, &|| self.thm38_ii());
                        require(failed, any, &alternatives(tag, "3.8"));
                    }
                }
            }
            Result_::Cor3_5 => {
                require(failed, self.q_below_minus_a(), "q_ij <= -a_ij for i != j");
                require(failed, self.eq311(), "(3.11)");
            }
            Result_::Cor3_6 => require(failed, self.q_below_minus_a(), "q_ij <= -a_ij for i != j"),
            Result_::Cor3_7 => {
                require(failed, self.q_below_minus_a(), "q_ij <= -a_ij for i != j");
                require(failed, self.eq311(), "(3.11)");
                let any = clause_ok(1, &|| self.cor37_i()) || clause_ok(2, &|| self.cor37_ii());
                require(failed, any, &alternatives(tag, "cor3.7"));
            }
            Result_::Cor3_8 => {
                require(failed, self.q_below_minus_a(), "q_ij <= -a_ij for i != j");
                let any = clause_ok(1, &|| self.thm34_ii())
                    || clause_ok(2, &|| self.cor37_i())
                    || clause_ok(3, &|| self.cor37_ii());
                require(failed, any, &alternatives(tag, "cor3.8"));
            }
        }
    }

    // ---- shared quantities ------------------------------------------------

    fn a(&self, i: usize, j: usize) -> f64 {
        self.a[(i, j)]
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        self.q[(i, j)]
    }

    fn pa_is_z(&self) -> bool {
        is_z(&self.pa, HYP_EPS)
    }

    fn pa_is_l(&self) -> bool {
        is_l(&self.pa, HYP_EPS)
    }

    fn delta1(&self) -> &Matrix {
        self.delta1.get_or_init(|| {
            delta_generic(self.a, self.q, 1.0)
                .expect("unit diagonal checked")
                .entries
        })
    }

    /// `alpha_ij = -q_ij / a_ij`; `None` if some `q_ij != 0` sits on a zero
    /// of `A` or some weight is negative.
    fn alpha(&self) -> Option<&Matrix> {
        self.alpha
            .get_or_init(|| {
                let n = self.n;
                let mut al = Matrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let (q, a) = (self.q(i, j), self.a(i, j));
                        if a == 0.0 {
                            if q != 0.0 {
                                return None;
                            }
                        } else {
                            let w = -q / a;
                            if w < -HYP_EPS {
                                return None;
                            }
                            al[(i, j)] = w.max(0.0);
                        }
                    }
                }
                Some(al)
            })
            .as_ref()
    }

    fn al(&self, i: usize, j: usize) -> f64 {
        self.alpha().map_or(0.0, |m| m[(i, j)])
    }

    fn gamma_below_one(&self) -> bool {
        (0.0..1.0).contains(&self.gamma)
    }

    fn gamma_is_one(&self) -> bool {
        self.gamma == 1.0
    }

    // ---- general-Q conditions --------------------------------------------

    fn neg(v: f64) -> bool {
        v < -HYP_EPS
    }

    fn pos(v: f64) -> bool {
        v > HYP_EPS
    }

    /// `(ii_1)`..`(ii_9)` evaluated on `q`.
    fn ii_any(&self) -> bool {
        let n = self.n;
        let d = self.delta1();
        let ii1 = d.as_slice().iter().any(|&v| Self::pos(v));
        let ii2 = Self::pos(self.q(n - 1, 0));
        let ii3 = (0..n - 1).any(|k| Self::pos(self.q(k, k + 1)));
        let ii4 = (0..n).any(|i| (0..n).any(|j| i != j && Self::neg(self.q(i, j) * self.a(j, i))));
        let ii5 = (0..n - 1).any(|i| (0..=i).any(|j| Self::neg(self.q(i, n - 1) * self.a(n - 1, j))));
        let ii6 = (0..n - 1).any(|i| (i + 1..n).any(|j| Self::neg(self.q(i, j) * self.a(j, 0))));
        let ii7 = (0..n).any(|i| (0..n - 1).any(|j| Self::neg(self.q(i, j) * self.a(j, j + 1))));
        let ii8 = (1..n).any(|i| (1..=i).any(|j| Self::neg(self.q(i, 0) * self.a(0, j))));
        let ii9 = Self::neg(self.a(n - 1, 0)) && (0..n - 1).all(|k| Self::neg(self.a(k, k + 1)));
        ii1 || ii2 || ii3 || ii4 || ii5 || ii6 || ii7 || ii8 || ii9
    }

    /// `(iv_1)`..`(iv_6)` (or `(iv_7)` when `with_7`) for 0-based row `i`.
    fn iv_row(&self, i: usize, with_7: bool) -> bool {
        let n = self.n;
        let d = self.delta1();
        (0..n).any(|j| Self::pos(d[(i, j)]))
            || (i + 1 < n && Self::pos(self.q(i, i + 1)))
            || (0..n).any(|j| j != i && Self::neg(self.q(i, j) * self.a(j, i)))
            || (0..=i).any(|j| Self::neg(self.q(i, n - 1) * self.a(n - 1, j)))
            || (i + 1..n).any(|j| Self::neg(self.q(i, j) * self.a(j, 0)))
            || (0..n - 1).any(|j| Self::neg(self.q(i, j) * self.a(j, j + 1)))
            || (with_7 && (1..=i).any(|j| Self::neg(self.q(i, 0) * self.a(0, j))))
    }

    /// `(iv^a)`..`(iv^e)`; `alt_36` is an extra sufficient replacement for
    /// inequality (3.6).
    fn iv_last_row(&self, alt_36: &dyn Fn() -> bool) -> bool {
        let n = self.n;
        let last = n - 1;
        let iva = (1..n).any(|j| (0..j).any(|k| Self::neg(self.q(last, k) * self.a(k, j))));
        let ivb = Self::pos(self.q(last, 0));
        let ivc = (1..n - 1).any(|j| {
            let s: f64 = (0..n - 1).filter(|&k| k != j).map(|k| self.q(last, k) * self.a(k, j)).sum();
            Self::neg(self.a(last, j) + self.q(last, j) + s)
        });
        let row1 = self.iv_row(0, false);
        let eq36 = || {
            let s: f64 = (1..n - 1).map(|k| self.q(last, k) * self.a(k, 0)).sum();
            Self::neg(self.a(last, 0) + self.q(last, 0) + s) || alt_36()
        };
        let ivd = row1 && eq36();
        let ive = row1 && Self::neg(self.a(last, 0));
        iva || ivb || ivc || ivd || ive
    }

    fn thm33_iv(&self, alt_36: &dyn Fn() -> bool) -> bool {
        let n = self.n;
        (1..n.saturating_sub(1)).all(|i| self.iv_row(i, true)) && self.iv_last_row(alt_36)
    }

    fn thm33_clause(&self, c: u8) -> bool {
        let n = self.n;
        match c {
            1 => self.gamma_below_one() && self.pa_irreducible,
            2 => self.gamma_is_one() && self.pa_irreducible && self.ii_any(),
            3 => {
                self.gamma_below_one()
                    && (0..n - 1).all(|i| (0..n).any(|j| Self::pos(self.q(i, j))))
            }
            _ => self.gamma_is_one() && self.thm33_iv(&|| false),
        }
    }

    fn thm34_ii(&self) -> bool {
        let n = self.n;
        let lower = (1..n).all(|i| (0..i).all(|j| self.a(i, j) >= self.pa[(i, j)] - HYP_EPS));
        let ii1 = (0..n).any(|i| self.pa[(i, i)] < 1.0 - HYP_EPS);
        let ii2 = self.gamma > 0.0
            && (1..n).any(|i| (0..i).any(|j| self.a(i, j) > self.pa[(i, j)] + HYP_EPS));
        lower && (ii1 || ii2)
    }

    fn q_below_minus_a(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i == j || self.q(i, j) <= -self.a(i, j) + HYP_EPS))
    }

    /// `1 + sum_{k != i} q_ik a_ki > 0` for every row.
    fn eq311(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            let s: f64 = (0..n).filter(|&k| k != i).map(|k| self.q(i, k) * self.a(k, i)).sum();
            Self::pos(1.0 + s)
        })
    }

    /// `x <~ 0`: `<= 0` when `PA` is irreducible, otherwise `< 0`.
    fn lesssim_zero(&self, x: f64) -> bool {
        if self.pa_irreducible {
            x <= HYP_EPS
        } else {
            Self::neg(x)
        }
    }

    fn cor37_i(&self) -> bool {
        let n = self.n;
        let sim = (0..n).all(|i| {
            (0..n).all(|j| i == j || self.a(i, j) >= 0.0 || self.lesssim_zero(self.q(i, j) + self.a(i, j)))
        });
        sim && (self.gamma_below_one() || (self.gamma_is_one() && self.ii_any()))
    }

    fn cor37_ii(&self) -> bool {
        let last = self.n - 1;
        let alt = || self.q(last, 0) < -self.a(last, 0) - HYP_EPS;
        self.thm33_clause(3) || (self.gamma_is_one() && self.thm33_iv(&alt))
    }

    // ---- conditions in terms of alpha_ij ----------------------------------

    fn w(&self, i: usize, k: usize) -> f64 {
        self.al(i, k) * self.a(i, k)
    }

    fn q2_diag_below_one(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            let s: f64 = (0..n).filter(|&k| k != i).map(|k| self.w(i, k) * self.a(k, i)).sum();
            s < 1.0 - HYP_EPS
        })
    }

    /// Left side of (3.12): `(1 - alpha_ij) a_ij - sum_{k != i,j} alpha_ik a_ik a_kj`.
    fn e312(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let s: f64 = (0..n).filter(|&k| k != i && k != j).map(|k| self.w(i, k) * self.a(k, j)).sum();
        (1.0 - self.al(i, j)) * self.a(i, j) - s
    }

    fn eq312(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i == j || self.e312(i, j) <= HYP_EPS))
    }

    /// (3.14): the (3.12) left side `<~ 0` wherever `a_ij < 0`.
    fn eq314(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| i == j || self.a(i, j) >= 0.0 || self.lesssim_zero(self.e312(i, j)))
        })
    }

    fn delta2_at_one(&self) -> Matrix {
        let al = self.alpha().expect("checked by caller").clone();
        let spec = PreconditionerSpec::weighted(2, al).expect("nonnegative weights");
        delta_closed_form(&spec, self.a, 1.0).expect("q2 closed form").entries
    }

    fn q2_ii_any(&self, d2: &Matrix) -> bool {
        let n = self.n;
        let last = n - 1;
        let ww = |i: usize, j: usize, k: usize, l: usize| self.w(i, j) * self.a(k, l);
        let ii1 = d2.as_slice().iter().any(|&v| Self::pos(v));
        let ii2 = Self::neg(self.a(last, 0)) && Self::pos(self.al(last, 0));
        let ii3 = (0..last).any(|k| Self::neg(self.a(k, k + 1)) && Self::pos(self.al(k, k + 1)));
        let ii4 = (0..n).any(|i| (0..n).any(|j| i != j && Self::pos(ww(i, j, j, i))));
        let ii5 = (0..last).any(|i| (0..=i).any(|j| Self::pos(ww(i, last, last, j))));
        // Positive here; the product is never negative for an L-matrix, and
        // the general-Q form of this condition reads q_ij a_j1 < 0.
        let ii6 = (0..last).any(|i| (i + 1..n).any(|j| Self::pos(ww(i, j, j, 0))));
        let ii7 = (0..n).any(|i| (0..last).any(|j| Self::pos(ww(i, j, j, j + 1))));
        let ii8 = (1..n).any(|i| (1..=i).any(|j| Self::pos(ww(i, 0, 0, j))));
        let ii9 = Self::neg(self.a(last, 0)) && (0..last).all(|k| Self::neg(self.a(k, k + 1)));
        ii1 || ii2 || ii3 || ii4 || ii5 || ii6 || ii7 || ii8 || ii9
    }

    fn q2_iv_row(&self, d2: &Matrix, i: usize, with_7: bool) -> bool {
        let n = self.n;
        let last = n - 1;
        let ww = |i: usize, j: usize, k: usize, l: usize| self.w(i, j) * self.a(k, l);
        (0..n).any(|j| Self::pos(d2[(i, j)]))
            || (i < last && Self::neg(self.a(i, i + 1)) && Self::pos(self.al(i, i + 1)))
            || (0..n).any(|j| j != i && Self::pos(ww(i, j, j, i)))
            || (0..=i).any(|j| Self::pos(ww(i, last, last, j)))
            || (i + 1..n).any(|j| Self::pos(ww(i, j, j, 0)))
            || (0..last).any(|j| Self::pos(ww(i, j, j, j + 1)))
            || (with_7 && (1..=i).any(|j| Self::pos(ww(i, 0, 0, j))))
    }

    fn q2_iv(&self, d2: &Matrix) -> bool {
        let n = self.n;
        let last = n - 1;
        let rows = (1..n.saturating_sub(1)).all(|i| self.q2_iv_row(d2, i, true));
        let iva = (1..n).any(|j| (0..j).any(|k| Self::pos(self.w(last, k) * self.a(k, j))));
        let ivb = Self::neg(self.a(last, 0)) && Self::pos(self.al(last, 0));
        let ivc = (1..last).any(|j| {
            let s: f64 = (0..last).filter(|&k| k != j).map(|k| self.w(last, k) * self.a(k, j)).sum();
            Self::neg((1.0 - self.al(last, j)) * self.a(last, j) - s)
        });
        let row1 = self.q2_iv_row(d2, 0, false);
        let eq316 = || {
            let s: f64 = (1..last).map(|k| self.w(last, k) * self.a(k, 0)).sum();
            Self::neg((1.0 - self.al(last, 0)) * self.a(last, 0) - s)
        };
        let ivd = row1 && eq316();
        let ive = row1 && Self::neg(self.a(last, 0));
        rows && (iva || ivb || ivc || ivd || ive)
    }

    fn thm37_clause(&self, c: u8) -> bool {
        let n = self.n;
        match c {
            1 => self.gamma_below_one() && self.eq314(),
            2 => self.gamma_is_one() && self.eq314() && self.q2_ii_any(&self.delta2_at_one()),
            3 => {
                self.gamma_below_one()
                    && self.eq312()
                    && (0..n - 1).all(|i| (0..n).any(|j| Self::neg(self.w(i, j))))
            }
            _ => self.gamma_is_one() && self.eq312() && self.q2_iv(&self.delta2_at_one()),
        }
    }

    fn thm38_ii(&self) -> bool {
        let n = self.n;
        let lower_expr = |i: usize, j: usize| {
            let s: f64 = (0..n).filter(|&k| k != i && k != j).map(|k| self.w(i, k) * self.a(k, j)).sum();
            self.w(i, j) + s
        };
        let lower = (1..n).all(|i| (0..i).all(|j| lower_expr(i, j) >= -HYP_EPS));
        let ii1 = (0..n).any(|i| {
            let s: f64 = (0..n).filter(|&k| k != i).map(|k| self.w(i, k) * self.a(k, i)).sum();
            Self::pos(s)
        });
        let ii2 = self.gamma > 0.0 && (1..n).any(|i| (0..i).any(|j| Self::pos(lower_expr(i, j))));
        self.eq312() && lower && (ii1 || ii2)
    }
}

fn alternatives(tag: TheoremTag, name: &str) -> String {
    match tag.clause {
        Some(c) => format!("{name}({})", ROMAN[c as usize - 1]),
        None => format!("one of the alternatives of {name}"),
    }
}

/// Position of the two radii relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    BelowOne,
    AtOne,
    AboveOne,
    Violation,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::BelowOne => "below_one",
            Branch::AtOne => "at_one",
            Branch::AboveOne => "above_one",
            Branch::Violation => "violation",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonBranch {
    pub branch: Branch,
    pub rho_base: f64,
    pub rho_pre: f64,
    /// The ordering holds with margin `strict` (always false at one).
    pub strict: bool,
}

/// Tolerances for [`classify_branch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTol {
    /// Distance from 1 (and slack in non-strict orderings) attributed to
    /// eigensolver noise.
    pub equal: f64,
    /// Margin required for a strict ordering.
    pub strict: f64,
}

impl Default for BranchTol {
    fn default() -> Self {
        Self {
            equal: 1e-7,
            strict: 1e-9,
        }
    }
}

/// Places `(rho_base, rho_pre)` into one of the trichotomy branches.
///
/// `at_one` needs both radii within `tol.equal` of 1; `below_one` needs
/// `rho_base < 1 - tol.equal` and `rho_pre <= rho_base + tol.equal`;
/// `above_one` mirrors it. With `strict_required`, a branch off one whose
/// ordering lacks the `tol.strict` margin becomes a violation.
pub fn classify_branch(rho_base: f64, rho_pre: f64, tol: BranchTol, strict_required: bool) -> ComparisonBranch {
    let near_one = |r: f64| (r - 1.0).abs() <= tol.equal;
    let (branch, strict) = if near_one(rho_base) && near_one(rho_pre) {
        (Branch::AtOne, false)
    } else if rho_base < 1.0 - tol.equal && rho_pre <= rho_base + tol.equal {
        (Branch::BelowOne, rho_pre < rho_base - tol.strict)
    } else if rho_base > 1.0 + tol.equal && rho_pre >= rho_base - tol.equal {
        (Branch::AboveOne, rho_pre > rho_base + tol.strict)
    } else {
        (Branch::Violation, false)
    };
    let branch = if strict_required && !strict && branch != Branch::AtOne {
        Branch::Violation
    } else {
        branch
    };
    ComparisonBranch {
        branch,
        rho_base,
        rho_pre,
        strict,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Confirmed,
    Vacuous,
    Refuted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Vacuous => "vacuous",
            Verdict::Refuted => "refuted",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Judges a branch against a theorem's conclusion. `branch` should come from
/// [`classify_branch`] without `strict_required`; strictness is read from
/// its `strict` flag.
pub fn verify_theorem(kind: TheoremKind, hyp: &HypothesisReport, branch: &ComparisonBranch) -> Verdict {
    if !hyp.passed {
        return Verdict::Vacuous;
    }
    let ok = match kind {
        TheoremKind::A => branch.branch != Branch::Violation,
        TheoremKind::B => branch.branch == Branch::BelowOne,
        TheoremKind::C => match branch.branch {
            Branch::AtOne => true,
            Branch::BelowOne | Branch::AboveOne => branch.strict,
            Branch::Violation => false,
        },
        TheoremKind::D => branch.branch == Branch::BelowOne && branch.strict,
    };
    if ok {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    }
}

/// Options for [`compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub spectral_tol: f64,
    pub max_iter: usize,
    pub branch_tol: BranchTol,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            spectral_tol: spectral::DEFAULT_TOL,
            max_iter: spectral::DEFAULT_MAX_ITER,
            branch_tol: BranchTol::default(),
        }
    }
}

/// Paired radii with the hypothesis check and verdict for each requested
/// result.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rho_base: f64,
    pub rho_pre: f64,
    pub branch: ComparisonBranch,
    pub hypotheses: Vec<HypothesisReport>,
    pub verdicts: Vec<(TheoremTag, Verdict)>,
    /// Set when a refutation triggered a recomputation of the radii at a
    /// tighter tolerance with a dense cross-check.
    pub rechecked: bool,
}

impl ComparisonReport {
    pub fn any_refuted(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| *v == Verdict::Refuted)
    }
}

fn radii(a: &Matrix, pa: &Matrix, p: AorParams, tol: f64, max_iter: usize, dense: bool) -> Result<(f64, f64)> {
    let t = aor_iteration_matrix(a, p)?;
    let tp = aor_iteration_matrix(pa, p)?;
    if dense {
        Ok((dense_block_spectral_radius(&t)?, dense_block_spectral_radius(&tp)?))
    } else {
        Ok((
            spectral_radius(&t, tol, max_iter)?.rho,
            spectral_radius(&tp, tol, max_iter)?.rho,
        ))
    }
}

/// Computes both AOR radii for `A` and `(I + Q) A`, checks every tag's
/// hypotheses and judges the conclusion.
///
/// A refutation is not reported straight away: the radii are recomputed with
/// a ten times tighter eigensolver tolerance and by a dense eigensolve, and
/// the verdict stands only if every computation refutes.
pub fn compare(
    a: &Matrix,
    q: &Matrix,
    gamma: f64,
    omega: f64,
    tags: &[TheoremTag],
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    check_unit_diagonal(a)?;
    let p = AorParams::new(gamma, omega)?;
    let ctx = Ctx::new(a, q, gamma, omega)?;
    let hypotheses: Vec<HypothesisReport> = tags.iter().map(|&t| ctx.report(t)).collect();
    let judge = |rb: f64, rp: f64| {
        let branch = classify_branch(rb, rp, opts.branch_tol, false);
        let verdicts: Vec<(TheoremTag, Verdict)> = hypotheses
            .iter()
            .map(|h| (h.theorem, verify_theorem(h.theorem.kind(), h, &branch)))
            .collect();
        (branch, verdicts)
    };
    let (rb, rp) = radii(a, &ctx.pa, p, opts.spectral_tol, opts.max_iter, false)?;
    let (mut branch, mut verdicts) = judge(rb, rp);
    let mut rechecked = false;
    if verdicts.iter().any(|(_, v)| *v == Verdict::Refuted) {
        rechecked = true;
        for dense in [false, true] {
            let (rb2, rp2) = radii(a, &ctx.pa, p, opts.spectral_tol / 10.0, opts.max_iter * 10, dense)?;
            let (b2, v2) = judge(rb2, rp2);
            if !v2.iter().any(|(_, v)| *v == Verdict::Refuted) {
                branch = b2;
                verdicts = v2;
                break;
            }
        }
    }
    Ok(ComparisonReport {
        rho_base: branch.rho_base,
        rho_pre: branch.rho_pre,
        branch,
        hypotheses,
        verdicts,
        rechecked,
    })
}
