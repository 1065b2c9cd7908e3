use serde::{Deserialize, Serialize};

use super::params::{ProtocolParams, Scenario};
use crate::adversary::TamperRecord;
use crate::qsim::{GhzOutcome, JointState, MeasBasis, QsimError, Sign};

/// What Alice put into the channel for one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preparation {
    NoonPlus,
    NoonMinus,
    Energy0,
    Energy1,
    NoonPlusI,
    NoonMinusI,
}

/// Basis family of a preparation, the only thing revealed at sifting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepClass {
    Noon,
    Energy,
    NoonI,
}

impl Preparation {
    pub fn class(self) -> PrepClass {
        match self {
            Preparation::NoonPlus | Preparation::NoonMinus => PrepClass::Noon,
            Preparation::Energy0 | Preparation::Energy1 => PrepClass::Energy,
            Preparation::NoonPlusI | Preparation::NoonMinusI => PrepClass::NoonI,
        }
    }

    /// Sign of a GHZ-family preparation.
    pub fn sign(self) -> Option<Sign> {
        match self {
            Preparation::NoonPlus | Preparation::NoonPlusI => Some(Sign::Plus),
            Preparation::NoonMinus | Preparation::NoonMinusI => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Level of an energy preparation.
    pub fn energy_bit(self) -> Option<bool> {
        match self {
            Preparation::Energy0 => Some(false),
            Preparation::Energy1 => Some(true),
            _ => None,
        }
    }

    pub fn noon(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Preparation::NoonPlus,
            Sign::Minus => Preparation::NoonMinus,
        }
    }

    pub fn energy(high: bool) -> Self {
        if high {
            Preparation::Energy1
        } else {
            Preparation::Energy0
        }
    }

    pub fn state(self, n: usize, cap: usize) -> Result<JointState, QsimError> {
        match self {
            Preparation::NoonPlus => JointState::prepare_ghz(n, Sign::Plus, false, cap),
            Preparation::NoonMinus => JointState::prepare_ghz(n, Sign::Minus, false, cap),
            Preparation::NoonPlusI => JointState::prepare_ghz(n, Sign::Plus, true, cap),
            Preparation::NoonMinusI => JointState::prepare_ghz(n, Sign::Minus, true, cap),
            Preparation::Energy0 => JointState::prepare_energy_capped(n, false, cap),
            Preparation::Energy1 => JointState::prepare_energy_capped(n, true, cap),
        }
    }
}

/// Charlie's per-round choice: `U_{φ+mπ/N}` when `applied_phase`, else the
/// check rotation `U_{mπ/N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharlieAction {
    pub applied_phase: bool,
    pub m: usize,
}

impl CharlieAction {
    /// Per-probe angle imprinted this round.
    pub fn angle(&self, params: &ProtocolParams) -> f64 {
        let offset = self.m as f64 * std::f64::consts::PI / params.n_probes as f64;
        if self.applied_phase {
            params.phi_true + offset
        } else {
            offset
        }
    }

    /// Whether a check rotation swaps `Ψ^+ ↔ Ψ^-`: the relative phase it adds
    /// is `mπ·gap`, so the flip is the parity of `m·gap`.
    pub fn flips(&self, gap: f64) -> bool {
        ((self.m as f64 * gap).round() as i64) % 2 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
    Charlie,
    /// Secret-sharing recipient other than Bob, numbered from 1.
    Recipient(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Collective GHZ-pair measurement.
    Ghz(GhzOutcome),
    /// One bit per measured probe.
    Bits(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyMeasurement {
    pub party: Party,
    pub basis: MeasBasis,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyCheck {
    NotADecoy,
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub preparation: Preparation,
    pub charlie_action: CharlieAction,
    /// Probes Charlie counted through his device.
    pub probes_counted: usize,
    pub adversary_events: Vec<TamperRecord>,
    pub measurements: Vec<PartyMeasurement>,
    pub sift_kept: bool,
    pub decoy_check: DecoyCheck,
}

impl RoundRecord {
    pub fn measurement_of(&self, party: Party) -> Option<&PartyMeasurement> {
        self.measurements.iter().find(|m| m.party == party)
    }
}

/// Classical traffic on the authenticated public channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Message {
    KeyAlignment { recipient: Party, flips: Vec<usize> },
    PreparationBases { rounds: Vec<(usize, PrepClass)> },
    MeasurementBases { rounds: Vec<(usize, MeasBasis)> },
    SiftedRounds { rounds: Vec<usize> },
    EnergyOutcomes { rounds: Vec<(usize, Vec<bool>)> },
    /// Rounds where Charlie applied only `U_{mπ/N}`, with the resulting
    /// flip of the GHZ sign.
    CheckRounds { rounds: Vec<(usize, bool)> },
    CheckSigns { rounds: Vec<(usize, Sign)> },
    CheckOutcomes { rounds: Vec<(usize, Outcome)> },
    CheckVerdict { passed: bool, failures: usize },
    /// Disclosure of `m` on rounds carrying the hidden phase.
    PhaseOffsets { rounds: Vec<(usize, usize)> },
    PreparationSigns { rounds: Vec<(usize, Sign)> },
    MeasurementOutcomes { rounds: Vec<(usize, Outcome)> },
    ProbeCountViolation { round: usize, counted: usize, expected: usize },
    Abort { round: usize, reason: AbortReason },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoggedMessage {
    /// Reveal step (0 = quantum phase or key setup).
    pub step: u8,
    pub sender: Party,
    #[serde(flatten)]
    pub message: Message,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    DecoyMismatch,
    ProbeCount,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abort {
    pub round: usize,
    pub reason: AbortReason,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub scenario: Scenario,
    pub params: ProtocolParams,
    pub rounds: Vec<RoundRecord>,
    pub aborted: Option<Abort>,
    pub probe_count_violation: bool,
    /// Rounds usable for estimation, in round order.
    pub retained_for_estimation: Vec<usize>,
    pub reveal_log: Vec<LoggedMessage>,
    /// Largest number of probes of one round simultaneously in the channel.
    pub max_probes_in_flight: usize,
    /// Notes the eavesdropper produced from public messages.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eve_observations: Vec<String>,
}

impl Transcript {
    pub fn is_aborted(&self) -> bool {
        self.aborted.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `m` values disclosed for phase rounds.
    pub fn disclosed_offsets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.reveal_log.iter().flat_map(|entry| match &entry.message {
            Message::PhaseOffsets { rounds } => rounds.clone(),
            _ => Vec::new(),
        })
    }

    /// Half of the retained rounds each party estimates from: Bob (or the
    /// recipients) learn Alice's signs on even positions, Alice learns the
    /// outcomes on odd positions.
    pub fn retained_half(&self, alice_view: bool) -> Vec<usize> {
        self.retained_for_estimation
            .iter()
            .enumerate()
            .filter(|(pos, _)| (pos % 2 == 1) == alice_view)
            .map(|(_, &r)| r)
            .collect()
    }
}
