//! Eavesdroppers with full control of the probe channel.
//!
//! A strategy is called at every probe transit on both legs of Charlie's
//! device. It sees the round and probe indices and the public probe count,
//! and can act only on probes that have already reached it on the current
//! leg. Preparations, Charlie's choices and the hidden phase are never
//! passed in.

mod channel;
mod report;
mod strategies;

pub use channel::{Channel, ChannelError, Leg, Transit};
pub use report::{eve_information_report, EveInformationReport, UndetectedFormula};
pub use strategies::{
    basis_guess_intercept_resend, passive, phase_bias, probe_injector, AdversaryKind, AdversarySpec,
    BasisGuessInterceptResend, FirstRounds, Passive, PhaseBias, ProbeInjector,
};

use serde::{Deserialize, Serialize};

use crate::protocol::LoggedMessage;
use crate::qsim::{GhzOutcome, MeasBasis, SimRng};

/// What the eavesdropper saw when she measured.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveObservation {
    Ghz(GhzOutcome),
    Bits(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum TamperAction {
    PhaseBias { theta: f64 },
    InterceptResend { guess: MeasBasis, observation: EveObservation },
    InjectProbes { count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TamperRecord {
    pub round: usize,
    pub probe: usize,
    pub leg: Leg,
    #[serde(flatten)]
    pub action: TamperAction,
}

pub trait AdversaryStrategy: Send {
    fn label(&self) -> String;

    fn on_probe_transit(
        &mut self,
        transit: &Transit,
        channel: &mut Channel<'_>,
        rng: &mut SimRng,
    ) -> Result<Vec<TamperRecord>, ChannelError>;

    /// Read-only view of public traffic.
    fn on_classical_message(&mut self, _message: &LoggedMessage) -> Option<String> {
        None
    }
}

impl<S: AdversaryStrategy + ?Sized> AdversaryStrategy for Box<S> {
    fn label(&self) -> String {
        (**self).label()
    }

    fn on_probe_transit(
        &mut self,
        transit: &Transit,
        channel: &mut Channel<'_>,
        rng: &mut SimRng,
    ) -> Result<Vec<TamperRecord>, ChannelError> {
        (**self).on_probe_transit(transit, channel, rng)
    }

    fn on_classical_message(&mut self, message: &LoggedMessage) -> Option<String> {
        (**self).on_classical_message(message)
    }
}
