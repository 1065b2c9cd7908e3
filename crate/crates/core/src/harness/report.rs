use super::stats::z_score;
use crate::estimator::EstimationResult;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Pass criterion fixed before any data is produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|z| ≤ k` against the metric's prediction.
    Sigma { k: f64 },
    /// `|empirical − prediction| ≤ eps`.
    Absolute { eps: f64 },
    /// `lo ≤ empirical ≤ hi`; a missing end is unbounded.
    Range {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<f64>,
    },
    /// Reported without a verdict.
    Informational,
}

impl Tolerance {
    pub fn at_least(lo: f64) -> Self {
        Self::Range { lo: Some(lo), hi: None }
    }

    pub fn at_most(hi: f64) -> Self {
        Self::Range { lo: None, hi: Some(hi) }
    }

    pub fn between(lo: f64, hi: f64) -> Self {
        Self::Range { lo: Some(lo), hi: Some(hi) }
    }
}

/// An analytic value and the formula it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    pub formula: String,
}

impl Prediction {
    pub fn new(value: f64, formula: impl Into<String>) -> Self {
        Self {
            value,
            formula: formula.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub id: String,
    pub empirical: f64,
    /// Standard error of `empirical`, when it has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub tolerance: Tolerance,
    pub passed: bool,
}

impl Metric {
    /// Builds the metric and evaluates its verdict.
    ///
    /// Panics if a `Sigma` or `Absolute` tolerance has no prediction, or a
    /// `Sigma` tolerance no standard error: such a metric is malformed.
    pub fn new(id: impl Into<String>, empirical: f64, sigma: Option<f64>, samples: usize, prediction: Option<Prediction>, tolerance: Tolerance) -> Self {
        let id = id.into();
        let z = match (&prediction, sigma) {
            (Some(p), Some(s)) => Some(z_score(empirical, p.value, s)).filter(|z| z.is_finite()),
            _ => None,
        };
        let passed = match tolerance {
            Tolerance::Sigma { k } => {
                assert!(prediction.is_some() && sigma.is_some(), "{id}: sigma tolerance needs prediction and σ");
                z.is_some_and(|z| z.abs() <= k)
            }
            Tolerance::Absolute { eps } => {
                let p = prediction.as_ref().unwrap_or_else(|| panic!("{id}: absolute tolerance needs a prediction"));
                (empirical - p.value).abs() <= eps
            }
            Tolerance::Range { lo, hi } => lo.is_none_or(|lo| empirical >= lo) && hi.is_none_or(|hi| empirical <= hi),
            Tolerance::Informational => true,
        };
        Self {
            id,
            empirical,
            sigma,
            samples,
            prediction,
            z,
            tolerance,
            passed: passed && empirical.is_finite(),
        }
    }

    /// Proportion with binomial error tested at `k` sigma.
    pub fn rate(id: impl Into<String>, successes: usize, trials: usize, prediction: Prediction, k: f64) -> Self {
        let p = successes as f64 / trials.max(1) as f64;
        // σ from the prediction so that exact rates (0 or 1) are not
        // judged with a zero error bar
        let sigma = super::stats::binomial_sigma(prediction.value, trials);
        let tolerance = if sigma == 0.0 {
            Tolerance::Absolute { eps: 0.0 }
        } else {
            Tolerance::Sigma { k }
        };
        Self::new(id, p, Some(sigma), trials, Some(prediction), tolerance)
    }
}

/// Summary of phase estimation over the trials of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationSummary {
    pub trials_estimated: usize,
    pub circular_mse: f64,
    pub mean_analytic_bound: f64,
    pub inconsistent: usize,
    /// First trial's full result, for inspection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<EstimationResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub scenario: String,
    pub adversary: String,
    pub metrics: Vec<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimation: Option<EstimationSummary>,
    pub passed: bool,
}

impl Report {
    pub fn new(name: impl Into<String>, seed: u64, trials: usize, scenario: impl Into<String>, adversary: impl Into<String>, metrics: Vec<Metric>) -> Self {
        let passed = metrics.iter().all(|m| m.passed);
        Self {
            name: name.into(),
            seed,
            trials,
            scenario: scenario.into(),
            adversary: adversary.into(),
            metrics,
            estimation: None,
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} [{} / {}] seed={} trials={}\n",
            self.name, self.scenario, self.adversary, self.seed, self.trials
        );
        out.push_str(&metrics_table(&self.metrics));
        if let Some(e) = &self.estimation {
            let _ = writeln!(
                out,
                "estimation: {} trials, circular MSE {:.4e}, mean bound {:.4e}, {} inconsistent ladders",
                e.trials_estimated, e.circular_mse, e.mean_analytic_bound, e.inconsistent
            );
        }
        let _ = writeln!(out, "verdict: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    /// One CSV row per metric.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        metrics_csv(&self.metrics)
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    empirical: f64,
    sigma: Option<f64>,
    samples: usize,
    prediction: Option<f64>,
    formula: Option<&'a str>,
    z: Option<f64>,
    passed: bool,
}

pub fn metrics_csv(metrics: &[Metric]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for m in metrics {
        w.serialize(CsvRow {
            id: &m.id,
            empirical: m.empirical,
            sigma: m.sigma,
            samples: m.samples,
            prediction: m.prediction.as_ref().map(|p| p.value),
            formula: m.prediction.as_ref().map(|p| p.formula.as_str()),
            z: m.z,
            passed: m.passed,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.6}"))
}

fn fmt_tolerance(t: &Tolerance) -> String {
    match t {
        Tolerance::Sigma { k } => format!("|z|<={k}"),
        Tolerance::Absolute { eps } => format!("abs<={eps:e}"),
        Tolerance::Range { lo, hi } => format!("[{}, {}]", lo.map_or("-inf".into(), |v| v.to_string()), hi.map_or("inf".into(), |v| v.to_string())),
        Tolerance::Informational => "info".to_owned(),
    }
}

/// Aligned-column rendering.
pub fn metrics_table(metrics: &[Metric]) -> String {
    let header = ["metric", "empirical", "sigma", "prediction", "z", "tolerance", "formula", "ok"];
    let rows: Vec<[String; 8]> = metrics
        .iter()
        .map(|m| {
            [
                m.id.clone(),
                format!("{:.6}", m.empirical),
                fmt_opt(m.sigma),
                fmt_opt(m.prediction.as_ref().map(|p| p.value)),
                m.z.map_or_else(|| "-".to_owned(), |z| format!("{z:+.2}")),
                fmt_tolerance(&m.tolerance),
                m.prediction.as_ref().map_or_else(|| "-".to_owned(), |p| p.formula.clone()),
                if m.passed { "pass" } else { "FAIL" }.to_owned(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&header.map(str::to_owned));
    for row in &rows {
        line(row);
    }
    out
}
