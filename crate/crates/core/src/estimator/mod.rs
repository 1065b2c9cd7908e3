//! Phase inversion from transcripts, the NOON-size ladder and analytic
//! precision bounds.

mod bound;
mod circular;
mod expectation;
mod ladder;

pub use bound::{bound, BoundScenario, BoundSpec};
pub use circular::{circular_distance, circular_mean, circular_mse, phase_period, wrap_phase};
pub use expectation::{expectation_from_transcript, expectation_over, quadratures_from_transcript, Quadratures};
pub use ladder::{ladder_estimate, EstimationResult, EstimationStatus, LadderLevel};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("transcript aborted, nothing to estimate")]
    Aborted,
    #[error("no retained rounds at level N = {n}")]
    NoRetainedRounds { n: usize },
    #[error("transcript has N = {found}, expected N = {expected}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("ladder is empty")]
    EmptyLadder,
    #[error("offset m of retained round {round} was never disclosed")]
    MissingOffset { round: usize },
    #[error("invalid bound parameters: {0}")]
    InvalidBound(String),
}
