use super::EstimationError;
use crate::protocol::{Outcome, Party, RoundRecord, Scenario, Transcript};
use crate::qsim::{GhzOutcome, MeasBasis};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Corrected averages of the retained rounds of one transcript.
///
/// `cos` estimates `cos(Nφ·gap)` from rounds measured in the `±` family,
/// `sin` estimates `sin(Nφ·gap)` from rounds measured in the `±i` family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quadratures {
    pub cos: f64,
    pub cos_rounds: usize,
    pub sin: f64,
    pub sin_rounds: usize,
    /// Retained rounds whose outcome fell outside the NOON subspace.
    pub invalid_rounds: usize,
}

impl Quadratures {
    pub fn has_sine(&self) -> bool {
        self.sin_rounds > 0
    }
}

/// ±1 outcome of the measuring side, or `None` for an invalid projection.
fn raw_sign(record: &RoundRecord, scenario: Scenario) -> Option<(MeasBasis, f64)> {
    let measurer = match scenario {
        Scenario::SingleParty => Party::Alice,
        Scenario::TwoParty => Party::Bob,
        Scenario::MultiParty => {
            // parity of every recipient's ± bits
            let mut parity = false;
            let mut basis = None;
            for m in &record.measurements {
                match &m.outcome {
                    Outcome::Bits(bits) => parity ^= bits.iter().fold(false, |p, &b| p ^ b),
                    Outcome::Ghz(_) => return None,
                }
                basis = Some(m.basis);
            }
            return Some((basis?, if parity { -1.0 } else { 1.0 }));
        }
    };
    let m = record.measurement_of(measurer)?;
    match &m.outcome {
        Outcome::Ghz(GhzOutcome::Plus) => Some((m.basis, 1.0)),
        Outcome::Ghz(GhzOutcome::Minus) => Some((m.basis, -1.0)),
        Outcome::Ghz(GhzOutcome::Invalid) => None,
        Outcome::Bits(bits) => Some((m.basis, if bits.iter().fold(false, |p, &b| p ^ b) { -1.0 } else { 1.0 })),
    }
}

/// Averages the corrected outcomes of `rounds`.
///
/// A `±` outcome `s` on a round prepared with sign `σ` and offset `m` has
/// mean `σ·cos(Nφ·gap + mπ·gap)`, so `s·σ·(−1)^{m·gap}` is an unbiased
/// sample of `cos(Nφ·gap)`. For the `±i` family the mean is
/// `−σ·sin(·)` and the sample is negated as well. Offsets are taken from
/// the rounds themselves, so check rounds (φ not applied) may be passed in
/// to test the correction.
pub fn expectation_over(transcript: &Transcript, rounds: &[usize]) -> Quadratures {
    let gap = transcript.params.spectrum.gap();
    let scenario = transcript.scenario;
    let (mut cos, mut sin) = ((0.0, 0usize), (0.0, 0usize));
    let mut invalid = 0;
    for &i in rounds {
        let record = &transcript.rounds[i];
        let Some(sign) = record.preparation.sign() else { continue };
        let Some((basis, s)) = raw_sign(record, scenario) else {
            invalid += 1;
            continue;
        };
        let flip = if record.charlie_action.flips(gap) { -1.0 } else { 1.0 };
        let sample = s * sign.value() * flip;
        match basis {
            MeasBasis::GhzPlusMinus => {
                cos.0 += sample;
                cos.1 += 1;
            }
            MeasBasis::GhzPlusMinusI => {
                sin.0 -= sample;
                sin.1 += 1;
            }
            MeasBasis::Energy => {}
        }
    }
    let mean = |(sum, count): (f64, usize)| if count == 0 { 0.0 } else { (sum / count as f64).clamp(-1.0, 1.0) };
    Quadratures {
        cos: mean(cos),
        cos_rounds: cos.1,
        sin: mean(sin),
        sin_rounds: sin.1,
        invalid_rounds: invalid,
    }
}

fn check_level(transcript: &Transcript, level_n: usize) -> Result<(), EstimationError> {
    if transcript.is_aborted() {
        return Err(EstimationError::Aborted);
    }
    if transcript.params.n_probes != level_n {
        return Err(EstimationError::LevelMismatch {
            expected: level_n,
            found: transcript.params.n_probes,
        });
    }
    let disclosed: HashMap<usize, usize> = transcript.disclosed_offsets().collect();
    for &round in &transcript.retained_for_estimation {
        if disclosed.get(&round) != Some(&transcript.rounds[round].charlie_action.m) {
            return Err(EstimationError::MissingOffset { round });
        }
    }
    Ok(())
}

/// Both quadratures over the retained rounds of one ladder level.
pub fn quadratures_from_transcript(transcript: &Transcript, level_n: usize) -> Result<Quadratures, EstimationError> {
    check_level(transcript, level_n)?;
    let q = expectation_over(transcript, &transcript.retained_for_estimation);
    if q.cos_rounds + q.sin_rounds == 0 {
        return Err(EstimationError::NoRetainedRounds { n: level_n });
    }
    Ok(q)
}

/// `⟨O_N⟩ = cos(Nφ·gap)` estimated from the retained `±`-family rounds,
/// clamped to `[−1, 1]`, with the number of rounds used.
pub fn expectation_from_transcript(transcript: &Transcript, level_n: usize) -> Result<(f64, usize), EstimationError> {
    let q = quadratures_from_transcript(transcript, level_n)?;
    if q.cos_rounds == 0 {
        return Err(EstimationError::NoRetainedRounds { n: level_n });
    }
    Ok((q.cos, q.cos_rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::passive;
    use crate::protocol::{run_single_party, run_two_party, ProtocolParams};

    fn single(phi: f64, n: usize, nu: usize, seed: u64) -> Transcript {
        let params = ProtocolParams {
            n_probes: n,
            phi_true: phi,
            nu,
            seed,
            ..ProtocolParams::default()
        };
        run_single_party(&params, &mut passive()).unwrap()
    }

    fn within(value: f64, target: f64, count: usize) -> bool {
        let sigma = ((1.0 - target * target).max(1e-3) / count as f64).sqrt();
        (value - target).abs() <= 4.0 * sigma + 1e-12
    }

    #[test]
    fn zero_phase_gives_unit_expectation() {
        let t = single(0.0, 4, 3000, 1);
        let (e, c) = expectation_from_transcript(&t, 4).unwrap();
        assert!(c > 500);
        assert!((e - 1.0).abs() < 1e-12, "{e}");
    }

    #[test]
    fn quarter_turn_gives_zero() {
        let n = 4;
        let t = single(std::f64::consts::PI / (2.0 * n as f64), n, 6000, 2);
        let (e, c) = expectation_from_transcript(&t, n).unwrap();
        assert!(within(e, 0.0, c), "{e} over {c}");
    }

    #[test]
    fn born_rule_cosine() {
        let t = single(0.3, 4, 30000, 3);
        let (e, c) = expectation_from_transcript(&t, 4).unwrap();
        assert!(c > 9000);
        assert!(within(e, (1.2f64).cos(), c), "{e} over {c}");
    }

    #[test]
    fn check_rounds_cancel_offsets() {
        let t = single(0.7, 4, 4000, 4);
        let checks: Vec<usize> = t
            .rounds
            .iter()
            .filter(|r| r.preparation.sign().is_some() && !r.charlie_action.applied_phase)
            .map(|r| r.round)
            .collect();
        let q = expectation_over(&t, &checks);
        assert!(q.cos_rounds > 100);
        assert!((q.cos - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_party_reproduces_cosine() {
        let params = ProtocolParams {
            k: 1,
            phi_true: 0.3,
            nu: 40000,
            seed: 5,
            ..ProtocolParams::default()
        };
        let t = run_two_party(&params, &mut passive()).unwrap();
        let (e, c) = expectation_from_transcript(&t, 4).unwrap();
        assert!(within(e, (1.2f64).cos(), c), "{e} over {c}");
    }

    #[test]
    fn wrong_level_rejected() {
        let t = single(0.1, 2, 50, 6);
        assert_eq!(
            expectation_from_transcript(&t, 4),
            Err(EstimationError::LevelMismatch { expected: 4, found: 2 })
        );
    }
}
