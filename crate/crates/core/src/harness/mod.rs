//! Configured Monte Carlo experiments, reports and the acceptance suite.

pub mod acceptance;
mod config;
mod experiment;
mod plots;
mod report;
pub mod stats;

pub use config::{env_number, ConfigError, ExperimentConfig, Tolerances, SEED_ENV, THREADS_ENV};
pub use experiment::{
    eve_report, ladder_transcripts, retained_fraction_prediction, run_experiment, run_trials, sweep, trial_seed,
    with_pool, ExperimentError, TrialSummary,
};
pub use plots::{emit_plot_series, PlotError, PLOT_FILES};
pub use report::{metrics_csv, metrics_table, EstimationSummary, Metric, Prediction, Report, Tolerance};
