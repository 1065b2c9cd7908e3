use super::config::{ConfigError, ExperimentConfig};
use super::report::{EstimationSummary, Metric, Prediction, Report, Tolerance};
use crate::adversary::{eve_information_report, EveInformationReport};
use crate::estimator::{circular_mse, ladder_estimate, phase_period, EstimationError, EstimationResult};
use crate::protocol::{multi_key_class_probability, run_protocol, AbortReason, ProtocolError, ProtocolParams, Scenario, Transcript};
use crate::qsim::derive_seed;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("trial {trial}: {source}")]
    Protocol { trial: usize, source: ProtocolError },
    #[error("trial {trial}: {source}")]
    Estimation { trial: usize, source: EstimationError },
    #[error("analytic prediction: {0}")]
    Analytic(ProtocolError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Runs `job` on a pool of `threads` workers (all cores when `None`).
pub fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
    Ok(pool.install(job))
}

/// Fraction of rounds kept for estimation by an honest run, with its
/// formula id.
pub fn retained_fraction_prediction(params: &ProtocolParams) -> Prediction {
    let (p_a, p_c) = (params.p_a, params.p_c);
    match params.scenario() {
        Scenario::SingleParty => Prediction::new(p_a * p_c, "retained.single_party"),
        Scenario::TwoParty if params.preshared_basis_key => Prediction::new(p_a * p_c, "retained.two_party_preshared"),
        Scenario::TwoParty => Prediction::new(p_a * params.eta() * p_c, "retained.two_party"),
        Scenario::MultiParty => Prediction::new(multi_key_class_probability(p_a) * p_c, "retained.multi_party"),
    }
}

/// What one trial contributes to the aggregates.
#[derive(Clone, Debug)]
pub struct TrialSummary {
    pub aborted: Option<AbortReason>,
    pub rounds: usize,
    pub retained: usize,
    pub max_probes_in_flight: usize,
    pub estimate: Option<EstimationResult>,
}

impl TrialSummary {
    fn of(t: &Transcript) -> Self {
        Self {
            aborted: t.aborted.map(|a| a.reason),
            rounds: t.rounds.len(),
            retained: t.retained_for_estimation.len(),
            max_probes_in_flight: t.max_probes_in_flight,
            estimate: None,
        }
    }
}

/// Seed of trial `index` under master seed `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Transcripts at `N = 1, 2, 4, …, params.n_probes`, each on its own seed.
pub fn ladder_transcripts(params: &ProtocolParams) -> Result<Vec<Transcript>, ProtocolError> {
    let mut out = Vec::new();
    let mut n = 1;
    while n <= params.n_probes {
        let level = ProtocolParams {
            n_probes: n,
            seed: derive_seed(params.seed, n as u64),
            ..params.clone()
        };
        out.push(run_protocol(&level, &mut crate::adversary::passive())?);
        n *= 2;
    }
    Ok(out)
}

fn run_trial(config: &ExperimentConfig, index: usize) -> Result<TrialSummary, ExperimentError> {
    let params = ProtocolParams {
        seed: trial_seed(config.seed, index),
        ..config.params.clone()
    };
    let mut eve = config.adversary.build();
    let transcript = run_protocol(&params, eve.as_mut()).map_err(|source| ExperimentError::Protocol { trial: index, source })?;
    let mut summary = TrialSummary::of(&transcript);
    if config.estimate {
        let levels = ladder_transcripts(&params).map_err(|source| ExperimentError::Protocol { trial: index, source })?;
        let result = ladder_estimate(&levels).map_err(|source| ExperimentError::Estimation { trial: index, source })?;
        summary.estimate = Some(result);
    }
    Ok(summary)
}

/// Runs every trial of `config` (in parallel, aggregated in trial order).
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialSummary>, ExperimentError> {
    config.validate()?;
    with_pool(config.threads, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect::<Result<Vec<_>, _>>()
    })?
}

/// Analytic report for the tampered rounds of one trial.
pub fn eve_report(config: &ExperimentConfig) -> Result<EveInformationReport, ExperimentError> {
    let kappa = config.adversary.kappa.unwrap_or(config.params.nu).min(config.params.nu);
    eve_information_report(&config.params, &config.adversary, kappa).map_err(ExperimentError::Analytic)
}

/// Executes one configured experiment and compares it with the closed forms.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    let trials = run_trials(config)?;
    let k = config.tolerances.sigma;
    let eve = eve_report(config)?;
    let mut metrics = Vec::new();

    let undetected = trials.iter().filter(|t| t.aborted.is_none()).count();
    metrics.push(Metric::rate(
        "undetected_rate",
        undetected,
        trials.len(),
        Prediction::new(eve.undetected_probability, format!("undetected.{}", eve.formula.id())),
        k,
    ));
    let probe_aborts = trials.iter().filter(|t| t.aborted == Some(AbortReason::ProbeCount)).count();
    metrics.push(Metric::new(
        "probe_count_aborts",
        probe_aborts as f64,
        None,
        trials.len(),
        None,
        Tolerance::Informational,
    ));
    let in_flight = trials.iter().map(|t| t.max_probes_in_flight).max().unwrap_or(0);
    metrics.push(Metric::new(
        "max_probes_in_flight",
        in_flight as f64,
        None,
        trials.len(),
        None,
        Tolerance::at_most(1.0),
    ));

    let passive = matches!(config.adversary.kind, crate::adversary::AdversaryKind::Passive);
    if passive {
        let rounds: usize = trials.iter().map(|t| t.rounds).sum();
        let retained: usize = trials.iter().map(|t| t.retained).sum();
        metrics.push(Metric::rate(
            "retained_fraction",
            retained,
            rounds,
            retained_fraction_prediction(&config.params),
            k,
        ));
    }
    metrics.push(Metric::new(
        "eve_max_qfi",
        eve.max_qfi,
        None,
        eve.kappa,
        Some(Prediction::new(eve.max_qfi, "eve.max_qfi")),
        Tolerance::Informational,
    ));
    metrics.push(Metric::new(
        "eve_success_probability",
        eve.success_probability,
        None,
        eve.kappa,
        Some(Prediction::new(eve.success_probability, "eve.success_probability")),
        Tolerance::Informational,
    ));

    let mut report = Report::new(
        config.name.clone(),
        config.seed,
        config.trials,
        format!("{:?}", config.scenario),
        config.adversary.build().label(),
        metrics,
    );
    if config.estimate {
        report.estimation = Some(summarize_estimates(config, &trials));
    }
    Ok(report)
}

fn summarize_estimates(config: &ExperimentConfig, trials: &[TrialSummary]) -> EstimationSummary {
    let results: Vec<&EstimationResult> = trials.iter().filter_map(|t| t.estimate.as_ref()).collect();
    let estimates: Vec<f64> = results.iter().map(|r| r.phi_hat).collect();
    let period = phase_period(config.params.spectrum.gap());
    let truth = vec![config.params.phi_true.rem_euclid(period); estimates.len()];
    EstimationSummary {
        trials_estimated: results.len(),
        circular_mse: circular_mse(&estimates, &truth, period),
        mean_analytic_bound: results.iter().map(|r| r.analytic_bound).sum::<f64>() / results.len().max(1) as f64,
        inconsistent: results.iter().filter(|r| !r.is_consistent()).count(),
        example: results.first().map(|r| (*r).clone()),
    }
}

/// Runs each configuration independently; errors stay per item.
pub fn sweep(configs: &[ExperimentConfig]) -> Vec<Result<Report, ExperimentError>> {
    configs.par_iter().map(run_experiment).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{AdversaryKind, AdversarySpec};

    fn config(adversary: AdversarySpec, trials: usize) -> ExperimentConfig {
        let params = ProtocolParams {
            nu: 20,
            ..ProtocolParams::default()
        };
        ExperimentConfig::new("t", params, adversary, trials, 11)
    }

    #[test]
    fn passive_single_party_never_detected() {
        let r = run_experiment(&config(AdversarySpec::new(AdversaryKind::Passive), 100)).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert_eq!(r.metrics[0].empirical, 1.0);
    }

    #[test]
    fn identical_configs_give_identical_bytes() {
        let c = config(AdversarySpec::basis_guess(), 50);
        let a = run_experiment(&c).unwrap().to_json();
        let mut c1 = c.clone();
        c1.threads = Some(1);
        assert_eq!(a, run_experiment(&c1).unwrap().to_json());
    }

    #[test]
    fn empty_sweep() {
        assert!(sweep(&[]).is_empty());
    }

    #[test]
    fn estimation_summary_present() {
        let mut c = config(AdversarySpec::new(AdversaryKind::Passive), 4);
        c.params.quadrature_split = true;
        c.params.nu = 600;
        c.estimate = true;
        let r = run_experiment(&c).unwrap();
        let e = r.estimation.unwrap();
        assert_eq!(e.trials_estimated, 4);
        assert!(e.circular_mse < 0.01, "{e:?}");
    }
}
