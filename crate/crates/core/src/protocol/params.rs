use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::qsim::{Spectrum, DEFAULT_PROBE_CAP, MAX_PROBE_CAP};

/// Reference operating point: balanced decoys with `P_a(2 − P_c) = 1`.
pub const REFERENCE_P_A: f64 = 2.0 / 3.0;
pub const REFERENCE_P_C: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SingleParty,
    TwoParty,
    MultiParty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolParams {
    /// Probes per phase-sensitive state.
    pub n_probes: usize,
    /// Recipient parties: 0 single-party, 1 two-party, ≥ 2 secret sharing.
    pub k: usize,
    pub p_a: f64,
    pub p_c: f64,
    pub spectrum: Spectrum,
    /// Hidden phase imprinted by Charlie's device.
    pub phi_true: f64,
    /// Protocol rounds.
    pub nu: usize,
    pub seed: u64,
    /// Adds `(|0…0⟩ ± i|1…1⟩)/√2` decoys (single-party only).
    pub extended_decoys: bool,
    /// Two-party: Bob's basis comes from a pre-shared key instead of a draw.
    pub preshared_basis_key: bool,
    /// Measure half the phase-sensitive rounds in the `±i` family to
    /// recover the sine quadrature.
    pub quadrature_split: bool,
    /// Rejects parameters violating `P_a(2 − P_c) = 1`.
    pub balanced_decoys: bool,
    /// Decoy failures tolerated before aborting (1 = first failure).
    pub abort_threshold: usize,
    pub probe_cap: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            n_probes: 4,
            k: 0,
            p_a: REFERENCE_P_A,
            p_c: REFERENCE_P_C,
            spectrum: Spectrum::default(),
            phi_true: 0.3,
            nu: 1,
            seed: 0,
            extended_decoys: false,
            preshared_basis_key: false,
            quadrature_split: false,
            balanced_decoys: false,
            abort_threshold: 1,
            probe_cap: DEFAULT_PROBE_CAP,
        }
    }
}

impl ProtocolParams {
    pub fn scenario(&self) -> Scenario {
        match self.k {
            0 => Scenario::SingleParty,
            1 => Scenario::TwoParty,
            _ => Scenario::MultiParty,
        }
    }

    /// Probability that Bob measures in the GHZ family,
    /// `η = (1 − P_a)/(1 − P_a P_c)`, which equalizes the two decoy families.
    pub fn eta(&self) -> f64 {
        (1.0 - self.p_a) / (1.0 - self.p_a * self.p_c)
    }

    /// Probes held in the register for one round.
    pub fn register_size(&self) -> usize {
        match self.scenario() {
            Scenario::MultiParty => self.n_probes + self.k - 1,
            _ => self.n_probes,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |msg: String| Err(ProtocolError::InvalidParams(msg));
        if self.n_probes == 0 {
            return bad("n_probes must be at least 1".into());
        }
        if !(self.p_a > 0.0 && self.p_a < 1.0) {
            return bad(format!("p_a = {} not in (0, 1)", self.p_a));
        }
        if !(self.p_c > 0.0 && self.p_c < 1.0) {
            return bad(format!("p_c = {} not in (0, 1)", self.p_c));
        }
        if self.balanced_decoys && (self.p_a * (2.0 - self.p_c) - 1.0).abs() > 1e-9 {
            return bad(format!(
                "balanced decoys need p_a(2 - p_c) = 1, got {}",
                self.p_a * (2.0 - self.p_c)
            ));
        }
        if self.nu == 0 {
            return bad("nu must be at least 1".into());
        }
        if self.abort_threshold == 0 {
            return bad("abort_threshold must be at least 1".into());
        }
        if self.probe_cap > MAX_PROBE_CAP {
            return bad(format!("probe_cap {} exceeds {MAX_PROBE_CAP}", self.probe_cap));
        }
        if self.register_size() > self.probe_cap {
            return bad(format!(
                "register of {} probes exceeds cap {}",
                self.register_size(),
                self.probe_cap
            ));
        }
        if !self.phi_true.is_finite() {
            return bad("phi_true must be finite".into());
        }
        self.spectrum
            .validate()
            .map_err(|e| ProtocolError::InvalidParams(e.to_string()))?;
        if self.extended_decoys && self.k != 0 {
            return bad("extended decoys are only defined for the single-party protocol".into());
        }
        if self.quadrature_split && self.scenario() == Scenario::MultiParty {
            return bad("quadrature split is not defined for secret sharing".into());
        }
        Ok(())
    }

    pub(crate) fn expect_scenario(&self, scenario: Scenario) -> Result<(), ProtocolError> {
        self.validate()?;
        if self.scenario() != scenario {
            return Err(ProtocolError::InvalidParams(format!(
                "k = {} does not select {scenario:?}",
                self.k
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point_is_balanced() {
        let p = ProtocolParams {
            balanced_decoys: true,
            ..Default::default()
        };
        p.validate().unwrap();
        assert!((p.eta() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_probabilities() {
        for (p_a, p_c) in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (f64::NAN, 0.5)] {
            let p = ProtocolParams {
                p_a,
                p_c,
                ..Default::default()
            };
            assert!(p.validate().is_err(), "{p_a} {p_c}");
        }
    }

    #[test]
    fn balanced_mode_checks_relation() {
        let p = ProtocolParams {
            p_a: 0.5,
            balanced_decoys: true,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn register_cap_enforced() {
        let p = ProtocolParams {
            n_probes: 10,
            k: 4,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = ProtocolParams {
            n_probes: 10,
            k: 4,
            probe_cap: 16,
            ..Default::default()
        };
        p.validate().unwrap();
    }

    #[test]
    fn params_json_uses_defaults() {
        let p: ProtocolParams = serde_json::from_str(r#"{"n_probes": 3, "k": 1}"#).unwrap();
        assert_eq!(p.n_probes, 3);
        assert_eq!(p.scenario(), Scenario::TwoParty);
        assert_eq!(p.p_a, REFERENCE_P_A);
    }
}
