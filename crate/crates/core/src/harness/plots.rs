use super::acceptance::{heisenberg_series, kappa_decay_series, SuiteOptions, LADDER_RETAINED, LADDER_ROUNDS};
use super::config::ExperimentConfig;
use super::experiment::{eve_report, run_trials, ExperimentError};
use super::stats::binomial_sigma;
use crate::adversary::AdversarySpec;
use crate::protocol::{ProtocolParams, REFERENCE_P_A};
use crate::qsim::derive_seed;
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Files written by [`emit_plot_series`].
pub const PLOT_FILES: [&str; 3] = ["kappa_decay.csv", "heisenberg_scaling.csv", "detection_vs_pc.csv"];

const KAPPA_TRIALS: usize = 5_000;
const LADDER_REPS: usize = 100;
const PC_TRIALS: usize = 20_000;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct KappaRow {
    kappa: usize,
    trials: usize,
    undetected_rate: f64,
    sigma: f64,
    prediction: f64,
}

#[derive(Serialize)]
struct LadderRow {
    n_max: usize,
    circular_mse: f64,
    single_party_bound: f64,
    inconsistent: usize,
}

#[derive(Serialize)]
struct PcRow {
    p_c: f64,
    trials: usize,
    undetected_rate: f64,
    sigma: f64,
    prediction: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), PlotError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV series behind the κ-decay, Heisenberg-scaling and
/// detection-vs-`P_c` plots into `dir`.
pub fn emit_plot_series(dir: &Path, opts: &SuiteOptions) -> Result<Vec<PathBuf>, PlotError> {
    std::fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = PLOT_FILES.iter().map(|f| dir.join(f)).collect();

    let points = kappa_decay_series(derive_seed(opts.seed, 1), opts.threads, KAPPA_TRIALS, 10)?;
    write_rows(
        &paths[0],
        points.iter().map(|p| KappaRow {
            kappa: p.kappa,
            trials: p.trials,
            undetected_rate: p.rate(),
            sigma: binomial_sigma(p.prediction, p.trials),
            prediction: p.prediction,
        }),
    )?;

    let s = heisenberg_series(derive_seed(opts.seed, 2), opts.threads, LADDER_REPS, LADDER_RETAINED, LADDER_ROUNDS)?;
    write_rows(
        &paths[1],
        (0..s.n_max.len()).map(|i| LadderRow {
            n_max: s.n_max[i],
            circular_mse: s.circular_mse[i],
            single_party_bound: s.mean_bound[i],
            inconsistent: s.inconsistent[i],
        }),
    )?;

    let mut rows = Vec::new();
    for step in 1..=9 {
        let p_c = step as f64 / 10.0;
        let params = ProtocolParams {
            p_a: REFERENCE_P_A,
            p_c,
            nu: 1,
            ..ProtocolParams::default()
        };
        let mut config = ExperimentConfig::new("p_c", params, AdversarySpec::basis_guess(), PC_TRIALS, derive_seed(opts.seed, 100 + step));
        config.threads = opts.threads;
        let trials = run_trials(&config)?;
        let prediction = eve_report(&config)?.undetected_probability;
        let undetected = trials.iter().filter(|t| t.aborted.is_none()).count();
        rows.push(PcRow {
            p_c,
            trials: PC_TRIALS,
            undetected_rate: undetected as f64 / PC_TRIALS as f64,
            sigma: binomial_sigma(prediction, PC_TRIALS),
            prediction,
        });
    }
    write_rows(&paths[2], rows)?;
    Ok(paths)
}
