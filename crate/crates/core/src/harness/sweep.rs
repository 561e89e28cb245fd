use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mm::load_matrix;
use crate::preconditioners::{build_q, PreconditionerSpec};
use crate::theorems::{compare, Branch, CompareOptions, TheoremKind, TheoremTag, Verdict};

use super::generate::{gen_l_matrix, gen_m_matrix_with, gen_singular_l_matrix, normalize_diag};

/// Bit-exact CSV header.
pub const CSV_HEADER: [&str; 11] = [
    "seed", "n", "variant", "gamma", "omega", "rho_base", "rho_pre", "branch", "verdict", "skip_reason", "wall_ms",
];

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PRECOND_AOR_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    L,
    IrreducibleL,
    M,
    IrreducibleM,
    /// Irreducible, zero row sums.
    Singular,
}

impl FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "l" => MatrixKind::L,
            "l-irr" | "irreducible-l" => MatrixKind::IrreducibleL,
            "m" => MatrixKind::M,
            "m-irr" | "irreducible-m" => MatrixKind::IrreducibleM,
            "singular" => MatrixKind::Singular,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown matrix kind `{s}` (expected l, l-irr, m, m-irr or singular)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub density: f64,
    pub kind: MatrixKind,
    /// Used by the M-matrix kinds only.
    pub dominance: f64,
    /// Seed of the first instance; instance `k` uses `seed + k`.
    pub seed: u64,
    pub instances: usize,
}

impl GeneratorConfig {
    pub const DEFAULT_DOMINANCE: f64 = 0.05;

    pub fn new(n: usize, density: f64, kind: MatrixKind, seed: u64) -> Self {
        Self {
            n,
            density,
            kind,
            dominance: Self::DEFAULT_DOMINANCE,
            seed,
            instances: 1,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Matrix> {
        let (n, d) = (self.n, self.density);
        match self.kind {
            MatrixKind::L => gen_l_matrix(n, d, false, seed),
            MatrixKind::IrreducibleL => gen_l_matrix(n, d, true, seed),
            MatrixKind::M => gen_m_matrix_with(n, d, self.dominance, false, seed),
            MatrixKind::IrreducibleM => gen_m_matrix_with(n, d, self.dominance, true, seed),
            MatrixKind::Singular => gen_singular_l_matrix(n, d, seed),
        }
    }
}

/// `n,density,kind,seed`, e.g. `8,0.5,m-irr,42`.
impl FromStr for GeneratorConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [n, density, kind, seed] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected n,density,kind,seed, got `{s}`")));
        };
        let num_err = |what: &str, v: &str| Error::Parse(format!("bad {what} `{v}`"));
        Ok(Self::new(
            n.parse().map_err(|_| num_err("n", n))?,
            density.parse().map_err(|_| num_err("density", density))?,
            kind.parse()?,
            seed.parse().map_err(|_| num_err("seed", seed))?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Generated(GeneratorConfig),
    /// Matrix Market file; its diagonal is normalized to 1 on load.
    File(PathBuf),
    /// Explicit matrices, each normalized to unit diagonal; instance `k` is
    /// reported with seed `k`.
    Inline(Vec<Matrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: MatrixSource,
    pub spec: PreconditionerSpec,
    pub gamma_grid: Vec<f64>,
    /// Cells with `omega = 0` are dropped.
    pub omega_grid: Vec<f64>,
    pub theorems: Vec<TheoremTag>,
    pub output: Option<PathBuf>,
    /// Permit grid values outside `0 <= gamma <= 1`, `0 < omega <= 1`.
    pub allow_extended: bool,
    /// Record wall time per cell; off by default so output is reproducible.
    pub timing: bool,
    pub compare: CompareOptions,
}

impl ExperimentConfig {
    /// Grid `{0, 0.25, ..., 1}` in both parameters, theorem kinds A to D.
    pub fn new(source: MatrixSource, spec: PreconditionerSpec) -> Self {
        let grid = parse_grid("0:1:0.25").expect("static grid");
        Self {
            source,
            spec,
            gamma_grid: grid.clone(),
            omega_grid: grid,
            theorems: TheoremKind::all().iter().map(|k| k.general_tag()).collect(),
            output: None,
            allow_extended: false,
            timing: false,
            compare: CompareOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_grid.is_empty() || self.omega_grid.is_empty() {
            return Err(Error::InvalidParameter("empty parameter grid".into()));
        }
        if let Some(x) = self.gamma_grid.iter().chain(&self.omega_grid).find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite grid value {x}")));
        }
        if !self.allow_extended {
            if let Some(g) = self.gamma_grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
                return Err(Error::InvalidParameter(format!(
                    "gamma = {g} outside [0, 1]; pass allow_extended to permit it"
                )));
            }
            if let Some(w) = self.omega_grid.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                return Err(Error::InvalidParameter(format!(
                    "omega = {w} outside (0, 1]; pass allow_extended to permit it"
                )));
            }
        }
        if self.omega_grid.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidParameter("omega grid has no nonzero value".into()));
        }
        if self.spec.is_identically_zero() {
            return Err(Error::ZeroPreconditioner(self.spec.variant().to_string()));
        }
        if let MatrixSource::Generated(g) = &self.source {
            if g.instances == 0 {
                return Err(Error::InvalidParameter("instances must be at least 1".into()));
            }
        }
        Ok(())
    }

    fn instances(&self) -> Result<Vec<(u64, Matrix)>> {
        match &self.source {
            MatrixSource::Generated(g) => (0..g.instances as u64)
                .map(|k| {
                    let seed = g.seed.wrapping_add(k);
                    Ok((seed, g.generate(seed)?))
                })
                .collect(),
            MatrixSource::File(path) => Ok(vec![(0, normalize_diag(&load_matrix(path)?)?)]),
            MatrixSource::Inline(ms) => ms
                .iter()
                .enumerate()
                .map(|(k, m)| Ok((k as u64, normalize_diag(m)?)))
                .collect(),
        }
    }
}

/// `a:b:step` (inclusive), a comma-separated list, or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |v: &str| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("bad grid value `{v}`")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Parse(format!("grid `{s}` needs a <= b and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            // rounding to 12 digits removes drift such as 0.1 * 3 = 0.30000000000000004
            Ok((0..=count)
                .map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::Parse(format!("bad grid `{s}`"))),
    }
}

/// Comma-separated theorem references; `A`..`D` stand for the general-`Q`
/// result of that kind.
pub fn parse_theorems(s: &str) -> Result<Vec<TheoremTag>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "A" | "a" => Ok(TheoremKind::A.general_tag()),
            "B" | "b" => Ok(TheoremKind::B.general_tag()),
            "C" | "c" => Ok(TheoremKind::C.general_tag()),
            "D" | "d" => Ok(TheoremKind::D.general_tag()),
            _ => t.parse(),
        })
        .collect()
}

/// One `(instance, gamma, omega)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub seed: u64,
    pub n: usize,
    pub variant: String,
    pub gamma: f64,
    pub omega: f64,
    pub rho_base: Option<f64>,
    pub rho_pre: Option<f64>,
    pub branch: Option<Branch>,
    pub verdicts: Vec<(TheoremTag, Verdict)>,
    pub hypothesis_failures: Vec<(TheoremTag, Vec<String>)>,
    pub skip_reason: Option<String>,
    pub wall_ms: f64,
}

impl SweepRecord {
    pub fn refuted(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| *v == Verdict::Refuted)
    }

    fn verdict_field(&self) -> String {
        self.verdicts
            .iter()
            .map(|(t, v)| format!("{t}:{v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn csv_fields(&self) -> [String; 11] {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.seed.to_string(),
            self.n.to_string(),
            self.variant.clone(),
            self.gamma.to_string(),
            self.omega.to_string(),
            opt(self.rho_base),
            opt(self.rho_pre),
            self.branch.map(|b| b.as_str().to_string()).unwrap_or_default(),
            self.verdict_field(),
            self.skip_reason.clone().unwrap_or_default(),
            format!("{:.3}", self.wall_ms),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
}

impl SweepOutcome {
    pub fn refuted(&self) -> usize {
        self.records.iter().filter(|r| r.refuted()).count()
    }

    pub fn skipped(&self) -> usize {
        self.records.iter().filter(|r| r.skip_reason.is_some()).count()
    }

    /// Verdict counts per theorem tag.
    pub fn tally(&self) -> BTreeMap<TheoremTag, [usize; 3]> {
        let mut out = BTreeMap::new();
        for (t, v) in self.records.iter().flat_map(|r| &r.verdicts) {
            let slot: &mut [usize; 3] = out.entry(*t).or_default();
            slot[match v {
                Verdict::Confirmed => 0,
                Verdict::Vacuous => 1,
                Verdict::Refuted => 2,
            }] += 1;
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} rows, {} skipped, {} with a refuted verdict\n",
            self.records.len(),
            self.skipped(),
            self.refuted()
        );
        for (t, [c, v, r]) in self.tally() {
            let _ = writeln!(s, "  {t}: {c} confirmed, {v} vacuous, {r} refuted");
        }
        let mut branches: BTreeMap<&str, usize> = BTreeMap::new();
        for b in self.records.iter().filter_map(|r| r.branch) {
            *branches.entry(b.as_str()).or_default() += 1;
        }
        let list: Vec<String> = branches.iter().map(|(b, k)| format!("{b} {k}")).collect();
        if !list.is_empty() {
            let _ = writeln!(s, "  branches: {}", list.join(", "));
        }
        s
    }
}

/// Runs `f` on a pool capped by [`THREADS_ENV`] when it is set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let k: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Errors that make a preconditioner inapplicable to one matrix rather than
/// invalidating the whole configuration.
fn per_matrix(e: &Error) -> bool {
    matches!(e, Error::SignPrecondition(_) | Error::ZeroPreconditioner(_))
}

/// Evaluates every cell, writes the CSV when `cfg.output` is set, and returns
/// the records sorted by `(seed, gamma, omega)`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let instances = cfg.instances()?;
    let mut prepared = Vec::with_capacity(instances.len());
    for (seed, a) in instances {
        let q = match build_q(&cfg.spec, &a) {
            Ok(q) => Ok(q),
            Err(e) if per_matrix(&e) => Err(e.to_string()),
            Err(e) => return Err(e),
        };
        prepared.push((seed, a, q));
    }
    let cells: Vec<(usize, f64, f64)> = (0..prepared.len())
        .flat_map(|k| {
            cfg.gamma_grid.iter().flat_map(move |&g| {
                cfg.omega_grid.iter().filter(|&&w| w != 0.0).map(move |&w| (k, g, w))
            })
        })
        .collect();
    let variant = cfg.spec.variant().to_string();
    let mut records = with_thread_cap(|| {
        cells
            .par_iter()
            .map(|&(k, gamma, omega)| {
                let (seed, a, q) = &prepared[k];
                let mut rec = SweepRecord {
                    seed: *seed,
                    n: a.order(),
                    variant: variant.clone(),
                    gamma,
                    omega,
                    rho_base: None,
                    rho_pre: None,
                    branch: None,
                    verdicts: Vec::new(),
                    hypothesis_failures: Vec::new(),
                    skip_reason: None,
                    wall_ms: 0.0,
                };
                let q = match q {
                    Ok(q) => q,
                    Err(reason) => {
                        rec.skip_reason = Some(reason.clone());
                        return rec;
                    }
                };
                let start = Instant::now();
                match compare(a, q, gamma, omega, &cfg.theorems, &cfg.compare) {
                    Ok(rep) => {
                        rec.rho_base = Some(rep.rho_base);
                        rec.rho_pre = Some(rep.rho_pre);
                        rec.branch = Some(rep.branch.branch);
                        rec.verdicts = rep.verdicts;
                        rec.hypothesis_failures = rep
                            .hypotheses
                            .into_iter()
                            .filter(|h| !h.passed)
                            .map(|h| (h.theorem, h.failed_conditions))
                            .collect();
                    }
                    Err(e) => rec.skip_reason = Some(e.to_string()),
                }
                if cfg.timing {
                    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                }
                rec
            })
            .collect::<Vec<_>>()
    })?;
    records.sort_by(|x, y| {
        x.seed
            .cmp(&y.seed)
            .then(x.gamma.total_cmp(&y.gamma))
            .then(x.omega.total_cmp(&y.omega))
    });
    let outcome = SweepOutcome { records };
    if let Some(path) = &cfg.output {
        let file = std::fs::File::create(path)?;
        write_csv(file, &outcome.records)?;
    }
    Ok(outcome)
}

pub fn write_csv<W: Write>(w: W, records: &[SweepRecord]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        out.write_record(r.csv_fields()).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("0.2,0.7").unwrap(), vec![0.2, 0.7]);
        for bad in ["1:0:0.1", "0:1:0", "0:1", "x", "0:1:-1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn theorem_lists() {
        let t = parse_theorems("A,C,cor3.6,3.3(ii)").unwrap();
        let s: Vec<String> = t.iter().map(|t| t.to_string()).collect();
        assert_eq!(s, ["3.1", "3.3", "cor3.6", "3.3(ii)"]);
        assert!(parse_theorems("E").is_err());
    }

    #[test]
    fn generator_spec() {
        let g: GeneratorConfig = "8,0.5,m-irr,42".parse().unwrap();
        assert_eq!((g.n, g.kind, g.seed), (8, MatrixKind::IrreducibleM, 42));
        assert!("8,0.5,x,1".parse::<GeneratorConfig>().is_err());
        assert!("8,0.5,m".parse::<GeneratorConfig>().is_err());
    }

    fn small_cfg(instances: usize) -> ExperimentConfig {
        let mut g = GeneratorConfig::new(5, 0.6, MatrixKind::IrreducibleM, 3);
        g.instances = instances;
        ExperimentConfig::new(MatrixSource::Generated(g), PreconditionerSpec::scalar(13, 1.0).unwrap())
    }

    #[test]
    fn sweep_rows_and_order() {
        let out = run_sweep(&small_cfg(3)).unwrap();
        // 5 gamma values x 4 nonzero omega values
        assert_eq!(out.records.len(), 3 * 20);
        assert_eq!(out.refuted(), 0);
        let keys: Vec<(u64, f64, f64)> = out.records.iter().map(|r| (r.seed, r.gamma, r.omega)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert!(out.records.iter().all(|r| r.skip_reason.is_none()));
    }

    #[test]
    fn csv_is_deterministic() {
        let render = || {
            let mut buf = Vec::new();
            write_csv(&mut buf, &run_sweep(&small_cfg(2)).unwrap().records).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render();
        assert_eq!(a, render());
        assert!(a.starts_with("seed,n,variant,gamma,omega,rho_base,rho_pre,branch,verdict,skip_reason,wall_ms\n"));
    }

    #[test]
    fn zero_spec_rejected_before_rows() {
        let mut cfg = small_cfg(1);
        cfg.spec = PreconditionerSpec::q1(Matrix::zeros(5)).unwrap();
        assert!(matches!(run_sweep(&cfg), Err(Error::ZeroPreconditioner(_))));
    }

    #[test]
    fn out_of_range_grid_needs_flag() {
        let mut cfg = small_cfg(1);
        cfg.omega_grid = vec![1.5];
        assert!(run_sweep(&cfg).is_err());
        cfg.allow_extended = true;
        let out = run_sweep(&cfg).unwrap();
        assert!(out.records.iter().all(|r| r.verdicts.iter().all(|(_, v)| *v == Verdict::Vacuous)));
    }

    #[test]
    fn anchor_sign_failure_is_a_skip() {
        // a_{3,1} = 0, so q7 anchored there is inapplicable
        let a = Matrix::from_rows(&[[1.0, -0.3, -0.2], [-0.4, 1.0, -0.1], [0.0, -0.2, 1.0]]).unwrap();
        let cfg = ExperimentConfig::new(
            MatrixSource::Inline(vec![a]),
            PreconditionerSpec::entry(7, 3, 1, 1.0).unwrap(),
        );
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.skipped(), out.records.len());
        assert!(out.records[0].skip_reason.as_ref().unwrap().contains("q7"));
    }
}
