//! The acceptance criteria as executable checks.
//!
//! Every tolerance is fixed here, before any sample is drawn. Wall-clock
//! timings are returned beside the report, never inside it, so that two runs
//! with one seed serialize to identical bytes.

use super::config::ExperimentConfig;
use super::experiment::{retained_fraction_prediction, run_experiment, run_trials, with_pool, ExperimentError};
use super::report::{metrics_table, Metric, Prediction, Tolerance};
use super::stats::{chi_square_uniform, linear_regression, Regression};
use crate::adversary::{basis_guess_intercept_resend, passive, AdversaryKind, AdversarySpec};
use crate::estimator::{circular_distance, expectation_from_transcript, ladder_estimate, phase_period};
use crate::protocol::{bb84_exchange, run_protocol, AbortReason, Outcome, Party, ProtocolParams, Transcript, REFERENCE_P_A, REFERENCE_P_C};
use crate::qsim::{derive_seed, eve_view_density_defect, pure_state_phase_invariance_check, JointState, Sign, SimRng, Spectrum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

/// Standard deviations allowed on every rate comparison.
pub const SIGMA_TOLERANCE: f64 = 4.0;
/// Fidelity and density-matrix exactness.
pub const EXACT: f64 = 1e-12;
/// Allowed deviation of the Heisenberg slope from −2.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Minimum R² of the log-linear κ fit.
pub const KAPPA_R2: f64 = 0.99;
/// Minimum chi-square p-value for withheld-outcome uniformity.
pub const UNIFORMITY_P: f64 = 0.01;

pub const DETECTION_TRIALS: usize = 100_000;
pub const KAPPA_TRIALS: usize = 20_000;
pub const KAPPA_MAX: usize = 10;
pub const LADDER_REPETITIONS: usize = 100;
pub const LADDER_RETAINED: usize = 1_000;
/// Rounds run per ladder level; `P_a P_c ν` comfortably exceeds
/// [`LADDER_RETAINED`] (about six standard deviations).
pub const LADDER_ROUNDS: usize = 3_500;
pub const LADDER_N_MAX: [usize; 4] = [1, 2, 4, 8];
pub const FRACTION_ROUNDS: usize = 10_000;
pub const SHARING_ROUNDS: usize = 10_000;
pub const INJECTION_RUNS: usize = 1_000;
pub const BB84_QUBITS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, threads: None }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    /// Wall-clock limit checked by the caller against the returned timings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_limit_secs: Option<f64>,
    pub metrics: Vec<Metric>,
    pub passed: bool,
}

impl CriterionResult {
    fn new(id: u8, name: &str, runtime_limit_secs: Option<f64>, metrics: Vec<Metric>) -> Self {
        let passed = metrics.iter().all(|m| m.passed);
        Self {
            id,
            name: name.to_owned(),
            runtime_limit_secs,
            metrics,
            passed,
        }
    }

    /// True when `elapsed` respects the limit, if any.
    pub fn within_runtime(&self, elapsed: Duration) -> bool {
        self.runtime_limit_secs.is_none_or(|s| elapsed.as_secs_f64() < s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(seed: u64, criteria: Vec<CriterionResult>) -> Self {
        let passed = criteria.iter().all(|c| c.passed);
        Self { seed, criteria, passed }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }

    /// One verdict line per criterion followed by its metrics.
    pub fn to_text(&self, timings: Option<&[Duration]>) -> String {
        let mut out = String::new();
        for (i, c) in self.criteria.iter().enumerate() {
            out.push_str(&verdict_line(c, timings.and_then(|t| t.get(i).copied())));
            out.push('\n');
            for line in metrics_table(&c.metrics).lines() {
                out.push_str("    ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(if self.passed { "ALL PASS\n" } else { "SOME CRITERIA FAILED\n" });
        out
    }
}

pub fn verdict_line(c: &CriterionResult, elapsed: Option<Duration>) -> String {
    let timing = match (elapsed, c.runtime_limit_secs) {
        (Some(t), Some(limit)) => format!(" ({:.2} s, limit {limit} s)", t.as_secs_f64()),
        (Some(t), None) => format!(" ({:.2} s)", t.as_secs_f64()),
        _ => String::new(),
    };
    format!(
        "criterion {:>2}: {} {}{}",
        c.id,
        if c.passed { "PASS" } else { "FAIL" },
        c.name,
        timing
    )
}

fn reference_params(k: usize, nu: usize, seed: u64) -> ProtocolParams {
    ProtocolParams {
        k,
        n_probes: 4,
        p_a: REFERENCE_P_A,
        p_c: REFERENCE_P_C,
        nu,
        seed,
        ..ProtocolParams::default()
    }
}

fn criterion_seed(opts: &SuiteOptions, id: u8) -> u64 {
    derive_seed(opts.seed, 1000 + id as u64)
}

/// 1. `U_{mπ/N}` maps `Ψ^+` to `Ψ^{±}` according to the parity of `m`.
pub fn flip_rule(_opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let spectrum = Spectrum::default();
    let mut min_fidelity = f64::INFINITY;
    let mut max_wrong = 0.0f64;
    let mut cases = 0;
    for n in 1..=10 {
        for m in 0..n {
            let mut state = JointState::prepare_noon(n, Sign::Plus).map_err(qsim_err)?;
            let all: Vec<usize> = (0..n).collect();
            state.apply_phase(m as f64 * PI / n as f64, &spectrum, &all).map_err(qsim_err)?;
            let expected = if m % 2 == 1 { Sign::Minus } else { Sign::Plus };
            let right = JointState::prepare_noon(n, expected).map_err(qsim_err)?;
            let wrong = JointState::prepare_noon(n, expected.flip()).map_err(qsim_err)?;
            min_fidelity = min_fidelity.min(state.fidelity(&right).map_err(qsim_err)?);
            max_wrong = max_wrong.max(state.fidelity(&wrong).map_err(qsim_err)?);
            cases += 1;
        }
    }
    Ok(CriterionResult::new(
        1,
        "flip rule exactness",
        Some(1.0),
        vec![
            Metric::new("min_fidelity_expected_sign", min_fidelity, None, cases, None, Tolerance::at_least(1.0 - EXACT)),
            Metric::new("max_fidelity_other_sign", max_wrong, None, cases, None, Tolerance::at_most(EXACT)),
        ],
    ))
}

fn qsim_err(e: crate::qsim::QsimError) -> ExperimentError {
    ExperimentError::Analytic(e.into())
}

/// 2. Eve's sign-averaged view does not depend on the imprinted phase.
pub fn eve_view_invariance(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let mut rng = SimRng::new(criterion_seed(opts, 2), 0);
    let spectrum = Spectrum::default();
    let mut worst = 0.0f64;
    let mut pure_sensitive = 0;
    const PAIRS: usize = 20;
    for _ in 0..PAIRS {
        let n = 1 + rng.below(8);
        let theta = rng.uniform() * TAU;
        worst = worst.max(eve_view_density_defect(n, theta, &spectrum).map_err(qsim_err)?);
        let noon = JointState::prepare_noon(n, Sign::Plus).map_err(qsim_err)?;
        if !pure_state_phase_invariance_check(&noon, theta, &spectrum) {
            pure_sensitive += 1;
        }
    }
    Ok(CriterionResult::new(
        2,
        "eavesdropper view invariance",
        Some(1.0),
        vec![
            Metric::new("max_entry_deviation", worst, None, PAIRS, None, Tolerance::at_most(EXACT)),
            // control: the unmixed NOON state does pick up the phase
            Metric::new("phase_sensitive_pure_states", pure_sensitive as f64, None, PAIRS, None, Tolerance::Informational),
        ],
    ))
}

fn detection_metric(opts: &SuiteOptions, id: u8, sub: u64, k: usize, preshared: bool, name: &str) -> Result<Metric, ExperimentError> {
    let mut params = reference_params(k, 1, 0);
    params.preshared_basis_key = preshared;
    let mut config = ExperimentConfig::new(name, params, AdversarySpec::basis_guess(), DETECTION_TRIALS, derive_seed(criterion_seed(opts, id), sub));
    config.threads = opts.threads;
    let report = run_experiment(&config)?;
    let mut metric = report.metrics.into_iter().find(|m| m.id == "undetected_rate").expect("undetected metric");
    metric.id = name.to_owned();
    Ok(metric)
}

/// 3. Per-round undetected probability of the basis-guess attack, one party.
pub fn single_party_detection(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let m = detection_metric(opts, 3, 0, 0, false, "single_party_undetected")?;
    Ok(CriterionResult::new(3, "single-party detection", Some(60.0), vec![m]))
}

/// 4. The same for two parties, with and without a preshared basis key.
pub fn two_party_detection(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let sifted = detection_metric(opts, 4, 0, 1, false, "two_party_undetected")?;
    let keyed = detection_metric(opts, 4, 1, 1, true, "two_party_preshared_undetected")?;
    Ok(CriterionResult::new(4, "two-party detection", Some(120.0), vec![sifted, keyed]))
}

/// Undetected rate after tampering with all of `κ` rounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaPoint {
    pub kappa: usize,
    pub trials: usize,
    pub undetected: usize,
    pub prediction: f64,
}

impl KappaPoint {
    pub fn rate(&self) -> f64 {
        self.undetected as f64 / self.trials as f64
    }
}

pub fn kappa_decay_series(seed: u64, threads: Option<usize>, trials: usize, kappa_max: usize) -> Result<Vec<KappaPoint>, ExperimentError> {
    (1..=kappa_max)
        .map(|kappa| {
            let params = reference_params(0, kappa, 0);
            let mut config = ExperimentConfig::new("kappa", params, AdversarySpec::basis_guess().with_kappa(kappa), trials, derive_seed(seed, kappa as u64));
            config.threads = threads;
            let summaries = run_trials(&config)?;
            let eve = super::experiment::eve_report(&config)?;
            Ok(KappaPoint {
                kappa,
                trials,
                undetected: summaries.iter().filter(|t| t.aborted.is_none()).count(),
                prediction: eve.undetected_probability,
            })
        })
        .collect()
}

/// Log-linear fit of `ln(undetected rate)` against `κ`.
pub fn kappa_fit(points: &[KappaPoint]) -> Regression {
    let x: Vec<f64> = points.iter().map(|p| p.kappa as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.rate().ln()).collect();
    // δ ln p = δp/p
    let s: Vec<f64> = points
        .iter()
        .map(|p| ((1.0 - p.rate()) / (p.trials as f64 * p.rate())).sqrt())
        .collect();
    linear_regression(&x, &y, Some(&s))
}

/// 5. Geometric decay of the undetected probability with tampered rounds.
pub fn kappa_decay(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let points = kappa_decay_series(criterion_seed(opts, 5), opts.threads, KAPPA_TRIALS, KAPPA_MAX)?;
    let fit = kappa_fit(&points);
    let per_round = points[0].prediction;
    let mut metrics = vec![
        Metric::new("log_linear_r_squared", fit.r_squared, None, points.len(), None, Tolerance::at_least(KAPPA_R2)),
        Metric::new(
            "log_slope",
            fit.slope,
            Some(fit.slope_se),
            points.len(),
            Some(Prediction::new(per_round.ln(), "ln(undetected.basis_guess_single_party)")),
            Tolerance::Sigma { k: SIGMA_TOLERANCE },
        ),
    ];
    for p in &points {
        metrics.push(Metric::rate(
            format!("undetected_kappa_{}", p.kappa),
            p.undetected,
            p.trials,
            Prediction::new(p.prediction, "undetected.basis_guess_single_party^kappa"),
            SIGMA_TOLERANCE,
        ));
    }
    Ok(CriterionResult::new(5, "kappa decay", None, metrics))
}

/// Circular MSE of the ladder estimate for each `N_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSeries {
    pub n_max: Vec<usize>,
    pub circular_mse: Vec<f64>,
    pub mean_bound: Vec<f64>,
    pub inconsistent: Vec<usize>,
    /// Levels that retained fewer than the requested rounds.
    pub short_levels: usize,
    pub fit: Regression,
}

fn ladder_levels(seed: u64, phi: f64, retained: usize, rounds: usize) -> Result<(Vec<Transcript>, usize), ExperimentError> {
    let mut short = 0;
    let mut levels = Vec::new();
    for &n in &LADDER_N_MAX {
        let params = ProtocolParams {
            n_probes: n,
            phi_true: phi,
            nu: rounds,
            seed: derive_seed(seed, n as u64),
            quadrature_split: true,
            p_a: REFERENCE_P_A,
            p_c: REFERENCE_P_C,
            ..ProtocolParams::default()
        };
        let mut t = run_protocol(&params, &mut passive()).map_err(|source| ExperimentError::Protocol { trial: 0, source })?;
        if t.retained_for_estimation.len() < retained {
            short += 1;
        }
        t.retained_for_estimation.truncate(retained);
        levels.push(t);
    }
    Ok((levels, short))
}

pub fn heisenberg_series(seed: u64, threads: Option<usize>, repetitions: usize, retained: usize, rounds: usize) -> Result<HeisenbergSeries, ExperimentError> {
    struct Rep {
        errors: Vec<f64>,
        bounds: Vec<f64>,
        consistent: Vec<bool>,
        short: usize,
    }
    let reps: Vec<Rep> = with_pool(threads, || {
        (0..repetitions)
            .into_par_iter()
            .map(|r| -> Result<Rep, ExperimentError> {
                let rep_seed = derive_seed(seed, r as u64);
                let phi = SimRng::new(rep_seed, 0).uniform() * TAU;
                let (levels, short) = ladder_levels(rep_seed, phi, retained, rounds)?;
                let mut rep = Rep {
                    errors: Vec::new(),
                    bounds: Vec::new(),
                    consistent: Vec::new(),
                    short,
                };
                for depth in 1..=levels.len() {
                    let est = ladder_estimate(&levels[..depth]).map_err(|source| ExperimentError::Estimation { trial: r, source })?;
                    rep.errors.push(circular_distance(est.phi_hat, phi, phase_period(1.0)));
                    rep.bounds.push(est.analytic_bound);
                    rep.consistent.push(est.is_consistent());
                }
                Ok(rep)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    let levels = LADDER_N_MAX.len();
    let avg = |f: &dyn Fn(&Rep) -> f64| reps.iter().map(f).sum::<f64>() / reps.len() as f64;
    let circular_mse: Vec<f64> = (0..levels).map(|l| avg(&|r: &Rep| r.errors[l].powi(2))).collect();
    let mean_bound: Vec<f64> = (0..levels).map(|l| avg(&|r: &Rep| r.bounds[l])).collect();
    let inconsistent: Vec<usize> = (0..levels).map(|l| reps.iter().filter(|r| !r.consistent[l]).count()).collect();
    let x: Vec<f64> = LADDER_N_MAX.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = circular_mse.iter().map(|m| m.ln()).collect();
    Ok(HeisenbergSeries {
        n_max: LADDER_N_MAX.to_vec(),
        circular_mse,
        mean_bound,
        inconsistent,
        short_levels: reps.iter().map(|r| r.short).sum(),
        fit: linear_regression(&x, &y, None),
    })
}

/// 6. Circular MSE of the ladder estimate scales as `N_max^{-2}`.
pub fn heisenberg_scaling(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let s = heisenberg_series(criterion_seed(opts, 6), opts.threads, LADDER_REPETITIONS, LADDER_RETAINED, LADDER_ROUNDS)?;
    let mut metrics = vec![
        Metric::new(
            "log_mse_slope",
            s.fit.slope,
            None,
            LADDER_REPETITIONS,
            Some(Prediction::new(-2.0, "bound.heisenberg.exponent")),
            Tolerance::Absolute { eps: SLOPE_TOLERANCE },
        ),
        Metric::new("short_levels", s.short_levels as f64, None, LADDER_REPETITIONS * LADDER_N_MAX.len(), None, Tolerance::Informational),
    ];
    for (i, &n) in s.n_max.iter().enumerate() {
        metrics.push(Metric::new(
            format!("circular_mse_n{n}"),
            s.circular_mse[i],
            None,
            LADDER_REPETITIONS,
            Some(Prediction::new(s.mean_bound[i], "bound.single_party")),
            Tolerance::Informational,
        ));
        metrics.push(Metric::new(
            format!("inconsistent_ladders_n{n}"),
            s.inconsistent[i] as f64,
            None,
            LADDER_REPETITIONS,
            None,
            Tolerance::Informational,
        ));
    }
    Ok(CriterionResult::new(6, "Heisenberg scaling", Some(300.0), metrics))
}

/// 7. Fraction of rounds retained for estimation.
pub fn retained_fractions(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let mut metrics = Vec::new();
    for (k, name) in [(0, "single_party_retained"), (1, "two_party_retained")] {
        let params = reference_params(k, FRACTION_ROUNDS, derive_seed(criterion_seed(opts, 7), k as u64));
        let t = run_protocol(&params, &mut passive()).map_err(|source| ExperimentError::Protocol { trial: 0, source })?;
        metrics.push(Metric::rate(
            name,
            t.retained_for_estimation.len(),
            t.rounds.len(),
            retained_fraction_prediction(&params),
            SIGMA_TOLERANCE,
        ));
    }
    Ok(CriterionResult::new(7, "retained-round fractions", None, metrics))
}

fn bits_of(t: &Transcript, round: usize, party: Party) -> Vec<bool> {
    match t.rounds[round].measurement_of(party).map(|m| &m.outcome) {
        Some(Outcome::Bits(b)) => b.clone(),
        _ => Vec::new(),
    }
}

/// 8. Any `k − 1` recipients see uniform outcomes; all `k` recover the phase.
pub fn secret_sharing(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let mut params = reference_params(3, SHARING_ROUNDS, criterion_seed(opts, 8));
    params.n_probes = 4;
    let t = run_protocol(&params, &mut passive()).map_err(|source| ExperimentError::Protocol { trial: 0, source })?;
    let parties = [Party::Bob, Party::Recipient(1), Party::Recipient(2)];
    let rounds = &t.retained_for_estimation;
    let mut metrics = Vec::new();
    for withheld in parties {
        let kept: Vec<Party> = parties.iter().copied().filter(|&p| p != withheld).collect();
        let width: usize = kept.iter().map(|&p| bits_of(&t, rounds[0], p).len()).sum();
        let mut counts = vec![0usize; 1 << width];
        for &r in rounds {
            let index = kept
                .iter()
                .flat_map(|&p| bits_of(&t, r, p))
                .fold(0usize, |acc, b| (acc << 1) | b as usize);
            counts[index] += 1;
        }
        let chi = chi_square_uniform(&counts);
        let label = match withheld {
            Party::Bob => "bob".to_owned(),
            Party::Recipient(i) => format!("recipient_{i}"),
            other => format!("{other:?}"),
        };
        metrics.push(Metric::new(
            format!("uniformity_p_without_{label}"),
            chi.p_value,
            None,
            rounds.len(),
            None,
            Tolerance::at_least(UNIFORMITY_P),
        ));
    }
    let (e, count) = expectation_from_transcript(&t, params.n_probes).map_err(|source| ExperimentError::Estimation { trial: 0, source })?;
    let target = (params.n_probes as f64 * params.phi_true * params.spectrum.gap()).cos();
    metrics.push(Metric::new(
        "combined_expectation",
        e,
        Some(((1.0 - target * target) / count as f64).sqrt()),
        count,
        Some(Prediction::new(target, "born.cos_n_phi_gap")),
        Tolerance::Sigma { k: SIGMA_TOLERANCE },
    ));
    Ok(CriterionResult::new(8, "secret-sharing randomness", None, metrics))
}

/// 9. Extra probes are always caught by Charlie's count.
pub fn probe_injection(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let params = reference_params(0, 5, 0);
    let mut config = ExperimentConfig::new(
        "probe injection",
        params,
        AdversarySpec::new(AdversaryKind::ProbeInjector { extra: 1 }),
        INJECTION_RUNS,
        criterion_seed(opts, 9),
    );
    config.threads = opts.threads;
    let trials = run_trials(&config)?;
    let caught = trials.iter().filter(|t| t.aborted == Some(AbortReason::ProbeCount)).count();
    let first_round = trials.iter().filter(|t| t.rounds == 1).count();
    Ok(CriterionResult::new(
        9,
        "probe injection",
        None,
        vec![
            Metric::rate("probe_count_detection", caught, trials.len(), Prediction::new(1.0, "probe_count.deterministic"), SIGMA_TOLERANCE),
            Metric::rate("aborted_at_first_round", first_round, trials.len(), Prediction::new(1.0, "probe_count.deterministic"), SIGMA_TOLERANCE),
        ],
    ))
}

/// 10. Intercept-resend against toy BB84.
pub fn bb84_intercept_resend(opts: &SuiteOptions) -> Result<CriterionResult, ExperimentError> {
    let mut rng = SimRng::new(criterion_seed(opts, 10), 0);
    let mut eve = basis_guess_intercept_resend();
    let batch = bb84_exchange(BB84_QUBITS, &mut rng, Some(&mut eve)).map_err(|source| ExperimentError::Protocol { trial: 0, source })?;
    let s = batch.stats;
    Ok(CriterionResult::new(
        10,
        "toy BB84 intercept-resend",
        None,
        vec![
            Metric::rate("sift_rate", s.sifted, s.sent, Prediction::new(0.5, "bb84.sift"), SIGMA_TOLERANCE),
            Metric::rate("qber", s.errors, s.sifted, Prediction::new(0.25, "bb84.intercept_resend_qber"), SIGMA_TOLERANCE),
        ],
    ))
}

type Criterion = fn(&SuiteOptions) -> Result<CriterionResult, ExperimentError>;

/// Criteria 1 through 10 in order.
pub const CRITERIA: [Criterion; 10] = [
    flip_rule,
    eve_view_invariance,
    single_party_detection,
    two_party_detection,
    kappa_decay,
    heisenberg_scaling,
    retained_fractions,
    secret_sharing,
    probe_injection,
    bb84_intercept_resend,
];

/// Runs criteria 1–10, returning the report and each criterion's timing.
pub fn run_criteria(opts: &SuiteOptions) -> Result<(SuiteReport, Vec<Duration>), ExperimentError> {
    let mut results = Vec::new();
    let mut timings = Vec::new();
    for criterion in CRITERIA {
        let start = Instant::now();
        results.push(criterion(opts)?);
        timings.push(start.elapsed());
    }
    Ok((SuiteReport::new(opts.seed, results), timings))
}

/// The full suite: criteria 1–10, then criterion 11, which repeats them and
/// compares the serialized reports byte for byte.
pub fn verify_suite(opts: &SuiteOptions) -> Result<(SuiteReport, Vec<Duration>), ExperimentError> {
    let (first, mut timings) = run_criteria(opts)?;
    let start = Instant::now();
    let (second, _) = run_criteria(opts)?;
    let identical = first.to_json() == second.to_json();
    timings.push(start.elapsed());
    let mut criteria = first.criteria;
    criteria.push(CriterionResult::new(
        11,
        "determinism",
        None,
        vec![Metric::new(
            "reports_byte_identical",
            identical as u8 as f64,
            None,
            2,
            Some(Prediction::new(1.0, "determinism")),
            Tolerance::Absolute { eps: 0.0 },
        )],
    ));
    Ok((SuiteReport::new(opts.seed, criteria), timings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_criteria_pass() {
        let opts = SuiteOptions::default();
        assert!(flip_rule(&opts).unwrap().passed);
        assert!(eve_view_invariance(&opts).unwrap().passed);
    }

    #[test]
    fn kappa_fit_of_exact_geometry() {
        let points: Vec<KappaPoint> = (1..=5)
            .map(|k| KappaPoint {
                kappa: k,
                trials: 1_000_000,
                undetected: (1e6 * 0.8f64.powi(k as i32)).round() as usize,
                prediction: 0.8f64.powi(k as i32),
            })
            .collect();
        let fit = kappa_fit(&points);
        assert!((fit.slope - 0.8f64.ln()).abs() < 1e-5);
        assert!(fit.r_squared > 0.99999);
    }

    #[test]
    fn verdict_line_format() {
        let c = CriterionResult::new(3, "x", Some(60.0), vec![]);
        assert_eq!(verdict_line(&c, None), "criterion  3: PASS x");
    }
}
