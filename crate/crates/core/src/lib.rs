//! Seedable simulation of cheat-sensitive quantum phase estimation.
//!
//! A trusted sensor (Charlie) imprints an unknown phase on probes that travel
//! through a channel fully controlled by an eavesdropper. Preparers and
//! measurers interleave phase-sensitive NOON states with decoys whose outcomes
//! are deterministic, so tampering shows up as failed checks while the honest
//! parties still reach Heisenberg-limited precision.
//!
//! * [`qsim`]: exact state vectors for probe registers.
//! * [`protocol`]: single-party, two-party and k-party state machines.
//! * [`adversary`]: pluggable eavesdroppers invoked at every probe transit.
//! * [`estimator`]: phase inversion, the NOON-size ladder and precision bounds.
//! * [`harness`]: configured Monte Carlo experiments, reports and the
//!   acceptance checks.

pub mod adversary;
pub mod estimator;
pub mod harness;
pub mod protocol;
pub mod qsim;
