use serde::{Deserialize, Serialize};

use super::{AdversaryKind, AdversarySpec};
use crate::protocol::{ProtocolError, ProtocolParams, Scenario};
use crate::qsim::{JointState, Sign};

/// Closed form behind an undetected-probability prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndetectedFormula {
    /// Nothing is disturbed.
    Passive,
    /// Charlie's probe count is exceeded every tampered round.
    ProbeCount,
    /// `1 − (1 − P_a P_c)/4`.
    BasisGuessSingleParty,
    /// Three guessed families: `1 − (checked decoy mass)/3`.
    BasisGuessSinglePartyExtended,
    /// `1 − 2(1 − P_a)P_a(1 − P_c) / (4(1 − P_a P_c))`.
    BasisGuessTwoParty,
    /// Bob's basis from a shared key: `1 − (1 − P_a P_c)/4`.
    BasisGuessTwoPartyPreshared,
    /// Key-scheduled bases: `1 − (1 − P_Φ P_c)/4`.
    BasisGuessMultiParty,
    /// Mismatch rate of biased check rounds, evaluated on the state vector.
    PhaseBiasStateVector,
}

impl UndetectedFormula {
    pub fn id(self) -> &'static str {
        match self {
            UndetectedFormula::Passive => "passive",
            UndetectedFormula::ProbeCount => "probe_count",
            UndetectedFormula::BasisGuessSingleParty => "basis_guess_single_party",
            UndetectedFormula::BasisGuessSinglePartyExtended => "basis_guess_single_party_extended",
            UndetectedFormula::BasisGuessTwoParty => "basis_guess_two_party",
            UndetectedFormula::BasisGuessTwoPartyPreshared => "basis_guess_two_party_preshared",
            UndetectedFormula::BasisGuessMultiParty => "basis_guess_multi_party",
            UndetectedFormula::PhaseBiasStateVector => "phase_bias_state_vector",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveInformationReport {
    pub kappa: usize,
    /// `κ N² (λ_M − λ_m)²`, reached only if every tampered round carried the phase.
    pub max_qfi: f64,
    /// `P_c^κ`.
    pub success_probability: f64,
    pub undetected_per_round: f64,
    /// `undetected_per_round^κ`.
    pub undetected_probability: f64,
    pub formula: UndetectedFormula,
}

/// Probability mass of rounds whose outcome is checked: `(energy, ghz)`.
fn checked_mass(params: &ProtocolParams) -> (f64, f64) {
    let (p_a, p_c) = (params.p_a, params.p_c);
    let quad = if params.quadrature_split { 0.5 } else { 1.0 };
    match params.scenario() {
        Scenario::SingleParty if params.extended_decoys => {
            // the ±i kinds take half the decoy mass and are checked like NOON
            ((1.0 - p_a) / 2.0, (1.0 - p_c) * (p_a * quad + (1.0 - p_a) / 2.0))
        }
        Scenario::SingleParty => (1.0 - p_a, p_a * (1.0 - p_c) * quad),
        Scenario::TwoParty if params.preshared_basis_key => (1.0 - p_a, p_a * (1.0 - p_c) * quad),
        Scenario::TwoParty => {
            let eta = params.eta();
            ((1.0 - p_a) * (1.0 - eta), p_a * (1.0 - p_c) * eta * quad)
        }
        Scenario::MultiParty => {
            let p_phi = crate::protocol::multi_key_class_probability(p_a);
            (1.0 - p_phi, p_phi * (1.0 - p_c))
        }
    }
}

/// Mismatch probability of a check round when Eve adds `theta` per round
/// on the probes crossing Charlie's device.
fn phase_bias_mismatch(params: &ProtocolParams, theta: f64) -> Result<f64, ProtocolError> {
    let size = params.register_size();
    let mut state = JointState::prepare_ghz(size, Sign::Plus, false, params.probe_cap)?;
    let channel: Vec<usize> = (0..params.n_probes).collect();
    state.apply_phase(theta / params.n_probes as f64, &params.spectrum, &channel)?;
    let all: Vec<usize> = (0..size).collect();
    let (_, minus, invalid) = state.ghz_probabilities(&all, false)?;
    Ok(minus + invalid)
}

/// Analytic view of what an eavesdropper gains and risks over `kappa`
/// tampered rounds.
pub fn eve_information_report(params: &ProtocolParams, adversary: &AdversarySpec, kappa: usize) -> Result<EveInformationReport, ProtocolError> {
    params.validate()?;
    let n = params.n_probes as f64;
    let gap = params.spectrum.gap();
    let (energy, ghz) = checked_mass(params);
    let (per_round, formula) = match &adversary.kind {
        AdversaryKind::Passive => (1.0, UndetectedFormula::Passive),
        AdversaryKind::ProbeInjector { extra: 0 } => (1.0, UndetectedFormula::Passive),
        AdversaryKind::ProbeInjector { .. } => (0.0, UndetectedFormula::ProbeCount),
        AdversaryKind::PhaseBias { theta } => (
            1.0 - ghz * phase_bias_mismatch(params, *theta)?,
            UndetectedFormula::PhaseBiasStateVector,
        ),
        AdversaryKind::BasisGuess { extended, .. } => {
            let families = if *extended { 3.0 } else { 2.0 };
            // wrong guess, then a half chance the collapsed state still agrees
            let fail = (families - 1.0) / families * 0.5;
            let formula = match params.scenario() {
                Scenario::SingleParty if params.extended_decoys || *extended => {
                    UndetectedFormula::BasisGuessSinglePartyExtended
                }
                Scenario::SingleParty => UndetectedFormula::BasisGuessSingleParty,
                Scenario::TwoParty if params.preshared_basis_key => UndetectedFormula::BasisGuessTwoPartyPreshared,
                Scenario::TwoParty => UndetectedFormula::BasisGuessTwoParty,
                Scenario::MultiParty => UndetectedFormula::BasisGuessMultiParty,
            };
            (1.0 - (energy + ghz) * fail, formula)
        }
    };
    Ok(EveInformationReport {
        kappa,
        max_qfi: kappa as f64 * (n * gap).powi(2),
        success_probability: params.p_c.powi(kappa as i32),
        undetected_per_round: per_round,
        undetected_probability: per_round.powi(kappa as i32),
        formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn reference(k: usize) -> ProtocolParams {
        ProtocolParams {
            k,
            ..Default::default()
        }
    }

    #[test]
    fn zero_kappa() {
        let r = eve_information_report(&reference(0), &AdversarySpec::basis_guess(), 0).unwrap();
        assert_eq!(r.max_qfi, 0.0);
        assert_eq!(r.success_probability, 1.0);
        assert_eq!(r.undetected_probability, 1.0);
    }

    #[test]
    fn qfi_and_success_at_three_rounds() {
        let r = eve_information_report(&reference(0), &AdversarySpec::basis_guess(), 3).unwrap();
        assert_abs_diff_eq!(r.max_qfi, 48.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.success_probability, 0.125, epsilon = 1e-15);
    }

    #[test]
    fn success_probability_decreases_with_kappa() {
        let p = reference(0);
        let spec = AdversarySpec::basis_guess();
        let probs: Vec<f64> = (0..8)
            .map(|k| eve_information_report(&p, &spec, k).unwrap().success_probability)
            .collect();
        assert!(probs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn basis_guess_closed_forms_at_reference_point() {
        let spec = AdversarySpec::basis_guess();
        let single = eve_information_report(&reference(0), &spec, 1).unwrap();
        assert_abs_diff_eq!(single.undetected_per_round, 5.0 / 6.0, epsilon = 1e-12);
        assert_eq!(single.formula, UndetectedFormula::BasisGuessSingleParty);

        let two = eve_information_report(&reference(1), &spec, 1).unwrap();
        assert_abs_diff_eq!(two.undetected_per_round, 11.0 / 12.0, epsilon = 1e-12);

        let pre = ProtocolParams {
            preshared_basis_key: true,
            ..reference(1)
        };
        let pre = eve_information_report(&pre, &spec, 1).unwrap();
        assert_abs_diff_eq!(pre.undetected_per_round, 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn two_party_matches_displayed_formula_off_reference() {
        // the η-weighted sum collapses to 2(1−P_a)P_a(1−P_c)/(1−P_aP_c)
        for (p_a, p_c) in [(0.3, 0.2), (0.55, 0.7), (0.8, 0.4)] {
            let p = ProtocolParams {
                k: 1,
                p_a,
                p_c,
                ..Default::default()
            };
            let r = eve_information_report(&p, &AdversarySpec::basis_guess(), 1).unwrap();
            let closed = 1.0 - 2.0 * (1.0 - p_a) * p_a * (1.0 - p_c) / (4.0 * (1.0 - p_a * p_c));
            assert_abs_diff_eq!(r.undetected_per_round, closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_bias_by_pi_fails_every_check() {
        let p = reference(0);
        let r = eve_information_report(&p, &AdversarySpec::new(AdversaryKind::PhaseBias { theta: PI }), 1).unwrap();
        assert_abs_diff_eq!(r.undetected_per_round, 1.0 - p.p_a * (1.0 - p.p_c), epsilon = 1e-12);
        let r = eve_information_report(&p, &AdversarySpec::new(AdversaryKind::PhaseBias { theta: 2.0 * PI }), 1).unwrap();
        assert_abs_diff_eq!(r.undetected_per_round, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn injector_is_always_caught() {
        let r = eve_information_report(&reference(0), &AdversarySpec::new(AdversaryKind::ProbeInjector { extra: 1 }), 2).unwrap();
        assert_eq!(r.undetected_probability, 0.0);
    }
}
