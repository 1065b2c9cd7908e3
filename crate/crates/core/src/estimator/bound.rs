use super::EstimationError;
use crate::protocol::{ProtocolParams, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundScenario {
    Heisenberg,
    SingleParty,
    TwoParty,
    MultiParty,
}

impl BoundScenario {
    /// Identifier attached to predictions in reports.
    pub fn formula_id(self) -> &'static str {
        match self {
            Self::Heisenberg => "bound.heisenberg",
            Self::SingleParty => "bound.single_party",
            Self::TwoParty => "bound.two_party",
            Self::MultiParty => "bound.multi_party",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub scenario: BoundScenario,
    pub n: usize,
    /// Rounds run (not rounds retained).
    pub nu: usize,
    pub p_a: f64,
    pub p_c: f64,
    pub gap: f64,
    pub k: usize,
}

impl BoundSpec {
    pub fn heisenberg(n: usize, nu: usize, gap: f64) -> Self {
        Self {
            scenario: BoundScenario::Heisenberg,
            n,
            nu,
            p_a: 1.0,
            p_c: 1.0,
            gap,
            k: 0,
        }
    }

    /// Bound matching a protocol configuration. A two-party run with a
    /// preshared basis key sifts nothing, so it gets the multi-party form.
    pub fn from_params(params: &ProtocolParams) -> Self {
        let scenario = match params.scenario() {
            Scenario::SingleParty => BoundScenario::SingleParty,
            Scenario::TwoParty if params.preshared_basis_key => BoundScenario::MultiParty,
            Scenario::TwoParty => BoundScenario::TwoParty,
            Scenario::MultiParty => BoundScenario::MultiParty,
        };
        Self {
            scenario,
            n: params.n_probes,
            nu: params.nu,
            p_a: params.p_a,
            p_c: params.p_c,
            gap: params.spectrum.gap(),
            k: params.k,
        }
    }

    pub fn eta(&self) -> f64 {
        (1.0 - self.p_a) / (1.0 - self.p_a * self.p_c)
    }

    fn validate(&self) -> Result<(), EstimationError> {
        let bad = |why: &str| Err(EstimationError::InvalidBound(why.to_owned()));
        if self.n == 0 || self.nu == 0 {
            return bad("N and ν must be positive");
        }
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return bad("gap must be positive");
        }
        if self.scenario != BoundScenario::Heisenberg {
            for (name, p) in [("P_a", self.p_a), ("P_c", self.p_c)] {
                if !(p > 0.0 && p < 1.0) {
                    return bad(&format!("{name} = {p} outside (0, 1)"));
                }
            }
        }
        Ok(())
    }
}

/// Lower bound on the variance of `φ̂`.
///
/// * Heisenberg: `1/(ν (N·gap)²)`
/// * single party: `1/(P_a P_c ν (N·gap)²)`
/// * two party: `2/(ν η P_a P_c (N·gap)²)`, `η = (1−P_a)/(1−P_a P_c)`
/// * multi party: `2/(ν P_a P_c (N·gap)²)`
pub fn bound(spec: &BoundSpec) -> Result<f64, EstimationError> {
    spec.validate()?;
    let fisher = spec.nu as f64 * (spec.n as f64 * spec.gap).powi(2);
    let (num, fraction) = match spec.scenario {
        BoundScenario::Heisenberg => (1.0, 1.0),
        BoundScenario::SingleParty => (1.0, spec.p_a * spec.p_c),
        BoundScenario::TwoParty => (2.0, spec.eta() * spec.p_a * spec.p_c),
        BoundScenario::MultiParty => (2.0, spec.p_a * spec.p_c),
    };
    Ok(num / (fraction * fisher))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(scenario: BoundScenario, nu: usize, n: usize) -> BoundSpec {
        BoundSpec {
            scenario,
            n,
            nu,
            p_a: 2.0 / 3.0,
            p_c: 0.5,
            gap: 1.0,
            k: 1,
        }
    }

    #[test]
    fn heisenberg_unit() {
        assert_relative_eq!(bound(&BoundSpec::heisenberg(1, 1, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn single_party_reference() {
        assert_relative_eq!(bound(&spec(BoundScenario::SingleParty, 300, 4)).unwrap(), 1.0 / 1600.0, max_relative = 1e-12);
    }

    #[test]
    fn two_party_reference() {
        let s = spec(BoundScenario::TwoParty, 10, 4);
        assert_relative_eq!(s.eta(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(bound(&s).unwrap(), 3.0 / (4.0 * 10.0), max_relative = 1e-12);
    }

    #[test]
    fn multi_is_two_party_with_unit_eta() {
        let m = bound(&spec(BoundScenario::MultiParty, 10, 4)).unwrap();
        let t = bound(&spec(BoundScenario::TwoParty, 10, 4)).unwrap();
        assert_relative_eq!(t * 0.5, m, max_relative = 1e-12);
    }

    #[test]
    fn rejects_degenerate() {
        let mut s = spec(BoundScenario::SingleParty, 10, 4);
        s.p_c = 1.0;
        assert!(bound(&s).is_err());
        s.p_c = 0.5;
        s.nu = 0;
        assert!(bound(&s).is_err());
    }
}
