//! Verification sweeps, rate fitting, the test-function corpus and the
//! command-line front end.

mod checks;
mod cli;
mod config;
mod corpus;
mod lemmas;
mod output;
mod report;
mod sums;

pub use checks::{
    direct_check, inverse_check, local_scale, nominal_exponent, rate_sweep, second_derivative_norm, smooth_function,
    theorem_suite, InverseReport, NamedReport, SuiteReport, COROLLARY_LAMBDAS, LADDER_PER_OCTAVE, LADDER_TOP,
    NOISE_FLOOR,
};
pub use cli::run_cli;
pub use config::{
    default_t_values, parse_doubling_range, parse_geometric_range, ExperimentConfig, OutputFormat, DEFAULT_N,
};
pub use corpus::{corpus, AFFINE, BUMP_WIDTH, CORPUS_KEYS, DEFAULT_CUSP_EXPONENT};
pub use lemmas::{
    central_moment_check, inverse_moment_check, lemma_suite, quadrature_check, LemmaEntry, LemmaReport, LemmaStatus,
    SubCheck,
};
pub use output::{dump_operator_csv, inverse_csv, lemma_csv, rate_csv, suite_csv};
pub use report::{
    bounded_ratio, fit_rate, kendall_tau, BoundedRatio, RateReport, RateRow, Verdict, MAX_GROWTH, MAX_SPREAD,
    MAX_TREND, SLOPE_TOLERANCE,
};
pub use sums::{an_sum, error_field, lemma6_sum};
