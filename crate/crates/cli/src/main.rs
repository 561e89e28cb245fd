use std::path::PathBuf;
use std::process::ExitCode;

use aor_precond::aor::{aor_iteration_matrix, AorParams};
use aor_precond::classes::{classify, jacobi_radius};
use aor_precond::harness::{
    normalize_diag, parse_grid, parse_theorems, replay_counterexamples, run_sweep, ExperimentConfig, GeneratorConfig,
    MatrixSource,
};
use aor_precond::mm::load_matrix;
use aor_precond::preconditioners::{build_q, precondition, PreconditionerSpec};
use aor_precond::spectral::{spectral_radius, DEFAULT_MAX_ITER, DEFAULT_TOL};
use aor_precond::theorems::{classify_branch, BranchTol};
use aor_precond::Matrix;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "precond-aor", version, about = "Preconditioned AOR experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep (gamma, omega) over one or more matrices and check the
    /// comparison theorems; exits with status 1 if any verdict is refuted.
    Sweep(SweepArgs),
    /// Replay the two reducibility counterexamples.
    Replay,
    /// Report the matrix classes of a Matrix Market file.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Spectral radius of the AOR iteration matrix, optionally with the
    /// preconditioned one. The matrix is scaled to unit diagonal first, which
    /// leaves the iteration matrix unchanged.
    Radius {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        precond: Option<String>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Matrix Market file (normalized to unit diagonal).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    matrix: Option<PathBuf>,
    /// Generated instances `n,density,kind,seed` with kind one of l, l-irr,
    /// m, m-irr, singular.
    #[arg(long)]
    gen: Option<String>,
    /// Number of generated instances, seeded `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Off-diagonal dominance of generated M-matrices.
    #[arg(long)]
    dominance: Option<f64>,
    /// Preconditioner, e.g. `variant=q4 alpha=0.5`.
    #[arg(long)]
    precond: String,
    #[arg(long, default_value = "0:1:0.25")]
    gamma_grid: String,
    #[arg(long, default_value = "0:1:0.25")]
    omega_grid: String,
    /// Theorem letters A-D or result tags such as `3.3(ii)` or `cor3.7`.
    #[arg(long, default_value = "A,B,C,D")]
    theorems: String,
    /// CSV output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow grid values outside 0 <= gamma <= 1, 0 < omega <= 1.
    #[arg(long)]
    allow_extended: bool,
    /// Record per-row wall time (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
}

fn sweep(args: SweepArgs) -> aor_precond::Result<ExitCode> {
    let source = match (&args.matrix, &args.gen) {
        (Some(path), _) => MatrixSource::File(path.clone()),
        (None, Some(g)) => {
            let mut g: GeneratorConfig = g.parse()?;
            g.instances = args.instances;
            if let Some(d) = args.dominance {
                g.dominance = d;
            }
            MatrixSource::Generated(g)
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let spec: PreconditionerSpec = args.precond.parse()?;
    let mut cfg = ExperimentConfig::new(source, spec);
    cfg.gamma_grid = parse_grid(&args.gamma_grid)?;
    cfg.omega_grid = parse_grid(&args.omega_grid)?;
    cfg.theorems = parse_theorems(&args.theorems)?;
    cfg.output = args.out;
    cfg.allow_extended = args.allow_extended;
    cfg.timing = args.timing;
    let outcome = run_sweep(&cfg)?;
    print!("{}", outcome.summary());
    for r in outcome.records.iter().filter(|r| r.refuted()) {
        println!(
            "refuted: seed {} gamma {} omega {} rho {:?} rho' {:?}",
            r.seed, r.gamma, r.omega, r.rho_base, r.rho_pre
        );
    }
    Ok(if outcome.refuted() > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn replay() -> aor_precond::Result<ExitCode> {
    let report = replay_counterexamples()?;
    print!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn classify_cmd(path: PathBuf) -> aor_precond::Result<ExitCode> {
    let a = load_matrix(path)?;
    let c = classify(&a, 0.0);
    println!("n: {}", a.order());
    println!("z_matrix: {}", c.is_z);
    println!("l_matrix: {}", c.is_l);
    println!("irreducible: {}", c.is_irreducible);
    println!("nonsingular_m: {}", c.is_nonsingular_m);
    println!("monotone: {}", c.is_monotone);
    if let Some(r) = jacobi_radius(&a) {
        println!("jacobi_radius: {r}");
    }
    Ok(ExitCode::SUCCESS)
}

fn radius(path: PathBuf, gamma: f64, omega: f64, precond: Option<String>) -> aor_precond::Result<ExitCode> {
    let a = normalize_diag(&load_matrix(path)?)?;
    let p = AorParams::new(gamma, omega)?;
    if p.out_of_range() {
        eprintln!("warning: (gamma, omega) = ({gamma}, {omega}) is outside 0 <= gamma <= 1, 0 < omega <= 1");
    }
    let rho = |m: &Matrix| spectral_radius(m, DEFAULT_TOL, DEFAULT_MAX_ITER).map(|r| r.rho);
    let rb = rho(&aor_iteration_matrix(&a, p)?)?;
    println!("rho: {rb}");
    if let Some(spec) = precond {
        let spec: PreconditionerSpec = spec.parse()?;
        let pa = precondition(&a, &build_q(&spec, &a)?)?.pa;
        let rp = rho(&aor_iteration_matrix(&pa, p)?)?;
        println!("rho_pre: {rp}");
        println!("branch: {}", classify_branch(rb, rp, BranchTol::default(), false).branch);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Replay => replay(),
        Command::Classify { matrix } => classify_cmd(matrix),
        Command::Radius {
            matrix,
            gamma,
            omega,
            precond,
        } => radius(matrix, gamma, omega, precond),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
