//! Plain-text spec format: whitespace-separated `key=value` pairs.
//!
//! ```text
//! variant=q4 alpha=0.5
//! variant=q5 r=4 alpha=1,0.5,1
//! variant=q7 r=4 s=1 alpha=2
//! variant=q9 alpha=1,1,1 beta=0,0.1,0
//! variant=q2 alpha=0,1;0.5,0
//! variant=q24 lower.r=4 lower.alpha=1,1,1 upper.alpha=1,1,1
//! ```
//!
//! Vectors are comma-separated; matrices list rows separated by `;`.
//! Combinations prefix the keys of their constituents with `lower.` and
//! `upper.`; the constituent variants are implied.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{Params, PreconditionerSpec, Shape, Variant};

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_matrix(m: &Matrix) -> String {
    (0..m.order()).map(|i| join(m.row(i))).collect::<Vec<_>>().join(";")
}

fn write_params(f: &mut fmt::Formatter<'_>, prefix: &str, spec: &PreconditionerSpec) -> fmt::Result {
    let key = if spec.variant().number() == 1 { "q" } else { "alpha" };
    match spec.params() {
        Params::Matrix(m) => write!(f, " {prefix}{key}={}", fmt_matrix(m)),
        Params::Scalar(a) => write!(f, " {prefix}alpha={a}"),
        Params::Line { r, alpha } => write!(f, " {prefix}r={r} {prefix}alpha={}", join(alpha)),
        Params::Entry { r, s, alpha } => write!(f, " {prefix}r={r} {prefix}s={s} {prefix}alpha={alpha}"),
        Params::Vector(alpha) => write!(f, " {prefix}alpha={}", join(alpha)),
        Params::Shifted { alpha, beta } => {
            write!(f, " {prefix}alpha={} {prefix}beta={}", join(alpha), join(beta))
        }
        Params::Corner { alpha, beta } => write!(f, " {prefix}alpha={alpha} {prefix}beta={beta}"),
        Params::Combination { lower, upper } => {
            write_params(f, "lower.", lower)?;
            write_params(f, "upper.", upper)
        }
    }
}

impl fmt::Display for PreconditionerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "variant={}", self.variant())?;
        write_params(f, "", self)
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: `{s}` is not a number")))
}

fn parse_vec(key: &str, s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_f64(key, x)).collect()
}

fn parse_matrix(key: &str, s: &str) -> Result<Matrix> {
    let rows = s
        .split(';')
        .map(|row| parse_vec(key, row))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows).map_err(|e| Error::Parse(format!("`{key}`: {e}")))
}

fn parse_index(key: &str, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("`{key}`: `{s}` is not an index")))
}

struct Fields<'a> {
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn take(&mut self, prefix: &str, key: &str) -> Result<&'a str> {
        let full = format!("{prefix}{key}");
        self.map
            .remove(full.as_str())
            .ok_or_else(|| Error::Parse(format!("missing `{full}`")))
    }
}

fn parse_params(fields: &mut Fields<'_>, prefix: &str, variant: Variant) -> Result<PreconditionerSpec> {
    let p = prefix;
    let params = match variant.shape() {
        Shape::Matrix => {
            let key = if variant.number() == 1 { "q" } else { "alpha" };
            Params::Matrix(parse_matrix(key, fields.take(p, key)?)?)
        }
        Shape::Scalar => Params::Scalar(parse_f64("alpha", fields.take(p, "alpha")?)?),
        Shape::Line => Params::Line {
            r: parse_index("r", fields.take(p, "r")?)?,
            alpha: parse_vec("alpha", fields.take(p, "alpha")?)?,
        },
        Shape::Entry => Params::Entry {
            r: parse_index("r", fields.take(p, "r")?)?,
            s: parse_index("s", fields.take(p, "s")?)?,
            alpha: parse_f64("alpha", fields.take(p, "alpha")?)?,
        },
        Shape::Vector => Params::Vector(parse_vec("alpha", fields.take(p, "alpha")?)?),
        Shape::Shifted => Params::Shifted {
            alpha: parse_vec("alpha", fields.take(p, "alpha")?)?,
            beta: parse_vec("beta", fields.take(p, "beta")?)?,
        },
        Shape::Corner => Params::Corner {
            alpha: parse_f64("alpha", fields.take(p, "alpha")?)?,
            beta: parse_f64("beta", fields.take(p, "beta")?)?,
        },
        Shape::Combination => {
            let (l, u) = variant.constituents().expect("combination variant");
            Params::Combination {
                lower: Box::new(parse_params(fields, "lower.", l)?),
                upper: Box::new(parse_params(fields, "upper.", u)?),
            }
        }
    };
    PreconditionerSpec::new(variant, params)
}

impl FromStr for PreconditionerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{tok}`")))?;
            if map.insert(k, v).is_some() {
                return Err(Error::Parse(format!("duplicate key `{k}`")));
            }
        }
        let mut fields = Fields { map };
        let variant: Variant = fields.take("", "variant")?.parse()?;
        let spec = parse_params(&mut fields, "", variant)?;
        if let Some(k) = fields.map.keys().next() {
            return Err(Error::Parse(format!("unexpected key `{k}` for {variant}")));
        }
        Ok(spec)
    }
}
