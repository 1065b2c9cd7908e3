use super::bound::{bound, BoundSpec};
use super::circular::{circular_distance, phase_period, wrap_phase};
use super::expectation::{quadratures_from_transcript, Quadratures};
use super::EstimationError;
use crate::protocol::Transcript;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderLevel {
    pub n: usize,
    pub rounds: usize,
    /// Corrected `⟨O_N⟩`.
    pub expectation: f64,
    /// Corrected sine quadrature, when the level measured one.
    pub sine: Option<f64>,
    /// Estimate of `φ` after refining with this level.
    pub phi: f64,
    /// Distance between the chosen branch and the previous estimate.
    pub branch_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EstimationStatus {
    Ok,
    /// Some level had no branch within `tolerance` of the coarser estimate.
    Inconsistent { n: usize, distance: f64, tolerance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    /// In `[0, 2π/gap)`.
    pub phi_hat: f64,
    /// Delta-method variance of `phi_hat` from the top level's samples.
    pub empirical_variance: f64,
    /// Variance bound for the top level's configuration.
    pub analytic_bound: f64,
    pub samples_used: usize,
    pub ladder: Vec<LadderLevel>,
    pub status: EstimationStatus,
}

impl EstimationResult {
    pub fn is_consistent(&self) -> bool {
        self.status == EstimationStatus::Ok
    }

    pub fn n_max(&self) -> usize {
        self.ladder.last().map_or(0, |l| l.n)
    }
}

/// Candidate values of `α = Nφ·gap (mod 2π)` consistent with one level.
fn alpha_candidates(q: &Quadratures) -> Vec<f64> {
    if q.has_sine() && q.cos_rounds > 0 {
        vec![q.sin.atan2(q.cos)]
    } else if q.has_sine() {
        let a = q.sin.asin();
        vec![a, std::f64::consts::PI - a]
    } else {
        let a = q.cos.acos();
        vec![a, -a]
    }
}

fn alpha_variance(q: &Quadratures) -> f64 {
    let (c, s) = (q.cos, q.sin);
    match (q.cos_rounds, q.sin_rounds) {
        (0, ns) => 1.0 / ns as f64,
        (nc, 0) => 1.0 / nc as f64,
        (nc, ns) => {
            let r2 = (c * c + s * s).max(1e-6);
            (s * s * (1.0 - c * c) / nc as f64 + c * c * (1.0 - s * s) / ns as f64) / (r2 * r2)
        }
    }
}

/// Resolves `φ` from transcripts at `N = 1, 2, 4, …`.
///
/// Level 1 fixes `φ` up to the arccos sign ambiguity, which the sine
/// quadrature removes when it was measured; otherwise the principal branch
/// is taken. Each finer level has `N` (or `2N`) branches spaced
/// `2π/(N·gap)` apart; the one nearest the running estimate is kept. A
/// branch further than `π/(2N·gap)` from the running estimate marks the
/// ladder inconsistent, since noise that large makes the choice a coin flip.
pub fn ladder_estimate(transcripts: &[Transcript]) -> Result<EstimationResult, EstimationError> {
    let first = transcripts.first().ok_or(EstimationError::EmptyLadder)?;
    let gap = first.params.spectrum.gap();
    let period = phase_period(gap);
    let mut ladder = Vec::with_capacity(transcripts.len());
    let mut status = EstimationStatus::Ok;
    let mut phi = 0.0;
    let mut samples = 0;
    let mut top = Quadratures::default();

    for (level, t) in transcripts.iter().enumerate() {
        let n = 1usize << level;
        let q = quadratures_from_transcript(t, n)?;
        let scale = n as f64 * gap;
        let branches = alpha_candidates(&q)
            .into_iter()
            .flat_map(|a| (0..n).map(move |j| wrap_phase((a + TAU * j as f64) / scale, period)));
        let (distance, chosen) = if level == 0 {
            (0.0, branches.fold(f64::NAN, |best, b| if best.is_nan() { b } else { best }))
        } else {
            branches
                .map(|b| (circular_distance(b, phi, period), b))
                .fold((f64::INFINITY, 0.0), |best, cand| if cand.0 < best.0 { cand } else { best })
        };
        let tolerance = std::f64::consts::PI / (2.0 * scale);
        if level > 0 && distance > tolerance && status == EstimationStatus::Ok {
            status = EstimationStatus::Inconsistent { n, distance, tolerance };
        }
        phi = chosen;
        samples += q.cos_rounds + q.sin_rounds;
        ladder.push(LadderLevel {
            n,
            rounds: q.cos_rounds + q.sin_rounds,
            expectation: q.cos,
            sine: q.has_sine().then_some(q.sin),
            phi,
            branch_distance: distance,
        });
        top = q;
    }

    let last = transcripts.last().expect("non-empty");
    let n_max = last.params.n_probes as f64;
    Ok(EstimationResult {
        phi_hat: phi,
        empirical_variance: alpha_variance(&top) / (n_max * gap).powi(2),
        analytic_bound: bound(&BoundSpec::from_params(&last.params))?,
        samples_used: samples,
        ladder,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::passive;
    use crate::protocol::{run_single_party, ProtocolParams};

    fn levels(phi: f64, n_max: usize, nu: usize, seed: u64, quadrature: bool) -> Vec<Transcript> {
        let mut out = Vec::new();
        let mut n = 1;
        while n <= n_max {
            let params = ProtocolParams {
                n_probes: n,
                phi_true: phi,
                nu,
                seed: seed.wrapping_add(n as u64),
                quadrature_split: quadrature,
                ..ProtocolParams::default()
            };
            out.push(run_single_party(&params, &mut passive()).unwrap());
            n *= 2;
        }
        out
    }

    #[test]
    fn zero_phase_every_level() {
        let r = ladder_estimate(&levels(0.0, 8, 1500, 7, false)).unwrap();
        assert!(r.is_consistent());
        for l in &r.ladder {
            assert!(circular_distance(l.phi, 0.0, TAU) < 1e-9, "{l:?}");
        }
    }

    #[test]
    fn quadrature_resolves_full_circle() {
        for (i, phi) in [0.4, 2.0, 3.5, 5.9].into_iter().enumerate() {
            let r = ladder_estimate(&levels(phi, 8, 3000, 100 + i as u64, true)).unwrap();
            assert!(r.is_consistent(), "{phi}: {:?}", r.status);
            assert!(circular_distance(r.phi_hat, phi, TAU) < 0.05, "{phi} -> {}", r.phi_hat);
            assert!(r.empirical_variance > 0.0);
        }
    }

    #[test]
    fn no_wraparound_bias_near_zero() {
        let eps = 0.01;
        let r = ladder_estimate(&levels(TAU - eps, 8, 3000, 21, true)).unwrap();
        assert!(circular_distance(r.phi_hat, TAU - eps, TAU) < 0.05);
        assert!(r.phi_hat >= 0.0 && r.phi_hat < TAU);
    }

    #[test]
    fn empty_ladder_is_error() {
        assert_eq!(ladder_estimate(&[]), Err(EstimationError::EmptyLadder));
    }

    #[test]
    fn non_doubling_rejected() {
        let mut ts = levels(0.2, 4, 100, 9, false);
        ts.remove(1);
        assert!(matches!(ladder_estimate(&ts), Err(EstimationError::LevelMismatch { expected: 2, found: 4 })));
    }
}
