//! Protocol state machines.
//!
//! Each run is strictly sequential: probes of a round travel one at a time
//! from the preparer to Charlie and on to the measurer, the eavesdropper hook
//! fires on both legs of every transit, and the classical reveal schedule runs
//! after the quantum phase. Outcomes are recorded in a [`Transcript`].

mod keys;
mod multi;
mod params;
mod schedule;
mod single;
mod transcript;
mod two_party;
mod verify;

pub use keys::{
    align_keys, bb84_exchange, bb84_keygen, Bb84Batch, Bb84Stats, KeyExchange, PartyKey, QBER_ABORT_THRESHOLD,
};
pub use multi::{multi_key_class_probability, run_multi_party, KEY_BITS_PER_ROUND};
pub use params::{ProtocolParams, Scenario, REFERENCE_P_A, REFERENCE_P_C};
pub use single::run_single_party;
pub use transcript::{
    Abort, AbortReason, CharlieAction, DecoyCheck, LoggedMessage, Message, Outcome, Party,
    PartyMeasurement, PrepClass, Preparation, RoundRecord, Transcript,
};
pub use two_party::run_two_party;
pub use verify::{verify_decoy, RevealContext};

use crate::qsim::QsimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("adversary channel misuse: {0}")]
    Channel(#[from] crate::adversary::ChannelError),
    #[error("key length mismatch: {0} vs {1}")]
    KeyLength(usize, usize),
    #[error("need at least two keys to align, got {0}")]
    TooFewKeys(usize),
    #[error("key exchange aborted: sampled QBER {qber:.4} exceeds {threshold}")]
    QberAbort { qber: f64, threshold: f64 },
    #[error("requested key length must be at least 1")]
    EmptyKey,
}

/// Stream ids carved out of a run's seed.
pub(crate) mod streams {
    pub const ALICE: u64 = 1;
    pub const CHARLIE: u64 = 2;
    pub const BOB: u64 = 3;
    pub const EVE: u64 = 4;
    pub const NATURE: u64 = 5;
    pub const KEYS: u64 = 16;
}

/// Runs the protocol selected by `params.k`.
pub fn run_protocol(params: &ProtocolParams, eve: &mut dyn crate::adversary::AdversaryStrategy) -> Result<Transcript, ProtocolError> {
    match params.scenario() {
        Scenario::SingleParty => run_single_party(params, eve),
        Scenario::TwoParty => run_two_party(params, eve),
        Scenario::MultiParty => run_multi_party(params, eve),
    }
}
