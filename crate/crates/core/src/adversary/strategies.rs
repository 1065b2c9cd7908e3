use serde::{Deserialize, Serialize};

use super::{AdversaryStrategy, Channel, ChannelError, EveObservation, Leg, TamperAction, TamperRecord, Transit};
use crate::qsim::{MeasBasis, SimRng};

/// Never touches the channel.
#[derive(Clone, Debug, Default)]
pub struct Passive;

pub fn passive() -> Passive {
    Passive
}

impl AdversaryStrategy for Passive {
    fn label(&self) -> String {
        "passive".into()
    }

    fn on_probe_transit(&mut self, _: &Transit, _: &mut Channel<'_>, _: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        Ok(Vec::new())
    }
}

/// Adds `θ/N` to every probe returning from Charlie, a bias of `θ` per round.
#[derive(Clone, Debug)]
pub struct PhaseBias {
    pub theta: f64,
}

pub fn phase_bias(theta: f64) -> PhaseBias {
    PhaseBias { theta }
}

impl AdversaryStrategy for PhaseBias {
    fn label(&self) -> String {
        format!("phase_bias({})", self.theta)
    }

    fn on_probe_transit(&mut self, transit: &Transit, channel: &mut Channel<'_>, _: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        if transit.leg != Leg::FromCharlie || self.theta == 0.0 {
            return Ok(Vec::new());
        }
        let per_probe = self.theta / transit.probes_per_round as f64;
        channel.apply_phase(per_probe, &[transit.probe])?;
        Ok(vec![TamperRecord {
            round: transit.round,
            probe: transit.probe,
            leg: transit.leg,
            action: TamperAction::PhaseBias { theta: per_probe },
        }])
    }
}

/// Guess-and-measure attack on the decoy families.
///
/// Eve buffers a round's probes, picks one of the enabled basis families
/// uniformly, measures the whole group in it and forwards the collapsed
/// state.
#[derive(Clone, Debug)]
pub struct BasisGuessInterceptResend {
    pub families: Vec<MeasBasis>,
    pub leg: Leg,
}

pub fn basis_guess_intercept_resend() -> BasisGuessInterceptResend {
    BasisGuessInterceptResend {
        families: vec![MeasBasis::GhzPlusMinus, MeasBasis::Energy],
        leg: Leg::FromCharlie,
    }
}

impl BasisGuessInterceptResend {
    /// Also guesses the `±i` family.
    pub fn extended() -> Self {
        Self {
            families: vec![MeasBasis::GhzPlusMinus, MeasBasis::Energy, MeasBasis::GhzPlusMinusI],
            leg: Leg::FromCharlie,
        }
    }

    pub fn on_leg(mut self, leg: Leg) -> Self {
        self.leg = leg;
        self
    }
}

impl AdversaryStrategy for BasisGuessInterceptResend {
    fn label(&self) -> String {
        format!("basis_guess({} families)", self.families.len())
    }

    fn on_probe_transit(&mut self, transit: &Transit, channel: &mut Channel<'_>, rng: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        if transit.leg != self.leg || !transit.is_last_probe() {
            return Ok(Vec::new());
        }
        let guess = self.families[rng.below(self.families.len())];
        let held = channel.held().to_vec();
        let observation = match guess {
            MeasBasis::Energy => EveObservation::Bits(channel.measure_energy(&held, rng)?),
            MeasBasis::GhzPlusMinus => EveObservation::Ghz(channel.measure_ghz(&held, false, rng)?.outcome),
            MeasBasis::GhzPlusMinusI => EveObservation::Ghz(channel.measure_ghz(&held, true, rng)?.outcome),
        };
        Ok(vec![TamperRecord {
            round: transit.round,
            probe: transit.probe,
            leg: transit.leg,
            action: TamperAction::InterceptResend { guess, observation },
        }])
    }
}

/// Sends `extra` probes of Eve's own through Charlie's device each round.
#[derive(Clone, Debug)]
pub struct ProbeInjector {
    pub extra: usize,
}

pub fn probe_injector(extra: usize) -> ProbeInjector {
    ProbeInjector { extra }
}

impl AdversaryStrategy for ProbeInjector {
    fn label(&self) -> String {
        format!("probe_injector({})", self.extra)
    }

    fn on_probe_transit(&mut self, transit: &Transit, channel: &mut Channel<'_>, _: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        if self.extra == 0 || transit.leg != Leg::ToCharlie || transit.probe != 0 {
            return Ok(Vec::new());
        }
        channel.inject_probes(self.extra);
        Ok(vec![TamperRecord {
            round: transit.round,
            probe: transit.probe,
            leg: transit.leg,
            action: TamperAction::InjectProbes { count: self.extra },
        }])
    }
}

/// Restricts another strategy to the first `rounds` rounds.
#[derive(Clone, Debug)]
pub struct FirstRounds<S> {
    pub inner: S,
    pub rounds: usize,
}

impl<S: AdversaryStrategy> AdversaryStrategy for FirstRounds<S> {
    fn label(&self) -> String {
        format!("{} for {} rounds", self.inner.label(), self.rounds)
    }

    fn on_probe_transit(&mut self, transit: &Transit, channel: &mut Channel<'_>, rng: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        if transit.round < self.rounds {
            self.inner.on_probe_transit(transit, channel, rng)
        } else {
            Ok(Vec::new())
        }
    }

    fn on_classical_message(&mut self, message: &crate::protocol::LoggedMessage) -> Option<String> {
        self.inner.on_classical_message(message)
    }
}

/// Configuration form of a strategy: a tag plus numeric parameters.
///
/// ```json
/// {"tag": "basis_guess", "extended": false, "kappa": 3}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    #[serde(flatten)]
    pub kind: AdversaryKind,
    /// Tamper only with the first `kappa` rounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum AdversaryKind {
    Passive,
    PhaseBias {
        theta: f64,
    },
    BasisGuess {
        #[serde(default)]
        extended: bool,
        #[serde(default = "default_leg")]
        leg: Leg,
    },
    ProbeInjector {
        extra: usize,
    },
}

fn default_leg() -> Leg {
    Leg::FromCharlie
}

impl Default for AdversarySpec {
    fn default() -> Self {
        Self::new(AdversaryKind::Passive)
    }
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind) -> Self {
        Self { kind, kappa: None }
    }

    pub fn basis_guess() -> Self {
        Self::new(AdversaryKind::BasisGuess {
            extended: false,
            leg: Leg::FromCharlie,
        })
    }

    pub fn with_kappa(mut self, kappa: usize) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn build(&self) -> Box<dyn AdversaryStrategy> {
        let base: Box<dyn AdversaryStrategy> = match &self.kind {
            AdversaryKind::Passive => Box::new(Passive),
            AdversaryKind::PhaseBias { theta } => Box::new(phase_bias(*theta)),
            AdversaryKind::BasisGuess { extended, leg } => {
                let s = if *extended {
                    BasisGuessInterceptResend::extended()
                } else {
                    basis_guess_intercept_resend()
                };
                Box::new(s.on_leg(*leg))
            }
            AdversaryKind::ProbeInjector { extra } => Box::new(probe_injector(*extra)),
        };
        match self.kappa {
            Some(rounds) => Box::new(FirstRounds { inner: base, rounds }),
            None => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{JointState, Sign, Spectrum};

    fn transit(leg: Leg, probe: usize, n: usize) -> Transit {
        Transit {
            round: 0,
            leg,
            probe,
            probes_per_round: n,
        }
    }

    #[test]
    fn passive_leaves_state_alone() {
        let mut state = JointState::prepare_noon(3, Sign::Plus).unwrap();
        let before = state.clone();
        let mut rng = SimRng::new(0, 0);
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0, 1, 2]);
        let recs = passive().on_probe_transit(&transit(Leg::FromCharlie, 2, 3), &mut ch, &mut rng).unwrap();
        assert!(recs.is_empty());
        assert_eq!(state, before);
    }

    #[test]
    fn channel_refuses_unheld_probes() {
        let mut state = JointState::prepare_noon(3, Sign::Plus).unwrap();
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0]);
        assert_eq!(ch.apply_phase(0.1, &[1]), Err(ChannelError::NotHeld(1)));
    }

    #[test]
    fn basis_guess_waits_for_last_probe() {
        let mut state = JointState::prepare_noon(3, Sign::Plus).unwrap();
        let mut rng = SimRng::new(0, 0);
        let mut eve = basis_guess_intercept_resend();
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0, 1]);
        assert!(eve.on_probe_transit(&transit(Leg::FromCharlie, 1, 3), &mut ch, &mut rng).unwrap().is_empty());
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0, 1, 2]);
        assert!(eve.on_probe_transit(&transit(Leg::ToCharlie, 2, 3), &mut ch, &mut rng).unwrap().is_empty());
        let recs = eve.on_probe_transit(&transit(Leg::FromCharlie, 2, 3), &mut ch, &mut rng).unwrap();
        assert_eq!(recs.len(), 1);
    }

    #[test]
    fn energy_guess_on_energy_state_is_harmless() {
        let mut rng = SimRng::new(3, 0);
        let eve_only_energy = BasisGuessInterceptResend {
            families: vec![MeasBasis::Energy],
            leg: Leg::FromCharlie,
        };
        let mut eve = eve_only_energy;
        let mut state = JointState::prepare_energy(4, false).unwrap();
        let before = state.clone();
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0, 1, 2, 3]);
        let recs = eve.on_probe_transit(&transit(Leg::FromCharlie, 3, 4), &mut ch, &mut rng).unwrap();
        assert_eq!(
            recs[0].action,
            TamperAction::InterceptResend {
                guess: MeasBasis::Energy,
                observation: EveObservation::Bits(vec![false; 4])
            }
        );
        assert_eq!(state, before);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec: AdversarySpec = serde_json::from_str(r#"{"tag":"basis_guess","kappa":3}"#).unwrap();
        assert_eq!(spec, AdversarySpec::basis_guess().with_kappa(3));
        let spec: AdversarySpec = serde_json::from_str(r#"{"tag":"phase_bias","theta":2.5}"#).unwrap();
        assert_eq!(spec.kind, AdversaryKind::PhaseBias { theta: 2.5 });
        assert!(serde_json::from_str::<AdversarySpec>(r#"{"tag":"nope"}"#).is_err());
    }

    #[test]
    fn injector_zero_is_passive() {
        let mut state = JointState::prepare_noon(2, Sign::Plus).unwrap();
        let mut rng = SimRng::new(0, 0);
        let mut ch = Channel::new(&mut state, Spectrum::default(), vec![0]);
        let recs = probe_injector(0).on_probe_transit(&transit(Leg::ToCharlie, 0, 2), &mut ch, &mut rng).unwrap();
        assert!(recs.is_empty());
        assert_eq!(ch.injected(), 0);
    }
}
