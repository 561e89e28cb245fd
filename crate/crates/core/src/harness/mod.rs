//! Instance generation, parameter sweeps with CSV output, and the
//! counterexample replays.

pub mod generate;
pub mod replay;
pub mod sweep;

pub use generate::{
    default_magnitude, gen_l_matrix, gen_l_matrix_with, gen_m_matrix, gen_m_matrix_with, gen_singular_l_matrix,
    normalize_diag,
};
pub use replay::{counterexample_4x4, counterexample_6x6, replay_counterexamples, ReplayReport};
pub use sweep::{
    parse_grid, parse_theorems, run_sweep, write_csv, ExperimentConfig, GeneratorConfig, MatrixKind, MatrixSource,
    SweepOutcome, SweepRecord, CSV_HEADER, THREADS_ENV,
};
