//! Sweeps over `N`, log-log slope fits, CSV output and the validation suites.

mod config;
mod sweep;
mod validate;

pub use config::{ExperimentConfig, GammaRule};
pub use sweep::{
    fit_slope, fit_slope_points, loglog_path, read_csv, row_seed, run_sweep, write_loglog,
    SlopeFit, SweepRow, CSV_HEADER, LOGLOG_HEADER,
};
pub use validate::{
    impossibility_check, lambda_scaling_check, null_space_check, spline_oracle_check, validate,
    Check, ImpossibilityReport, LambdaScaling, OracleReport, Suite, ValidationReport,
    IMPOSSIBILITY_J, IMPOSSIBILITY_SCHEDULE, KERNEL_LAMBDAS,
};
