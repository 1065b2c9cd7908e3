use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{GhzMeasurement, JointState, MeasBasis, QsimError, SimRng, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    ToCharlie,
    FromCharlie,
}

/// Public facts about one probe passing the eavesdropper.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transit {
    pub round: usize,
    pub leg: Leg,
    pub probe: usize,
    /// Probes per round on this channel, known to everyone.
    pub probes_per_round: usize,
}

impl Transit {
    pub fn is_last_probe(&self) -> bool {
        self.probe + 1 == self.probes_per_round
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("probe {0} has not reached the eavesdropper on this leg")]
    NotHeld(usize),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Eavesdropper's handle on the register during one transit.
///
/// Probes that already passed on this leg stay reachable: holding them back
/// and acting later is equivalent to acting now, since nobody else touches a
/// probe between its arrival and the end-of-round measurement.
pub struct Channel<'a> {
    state: &'a mut JointState,
    spectrum: Spectrum,
    held: Vec<usize>,
    injected: usize,
}

impl<'a> Channel<'a> {
    pub(crate) fn new(state: &'a mut JointState, spectrum: Spectrum, held: Vec<usize>) -> Self {
        Self {
            state,
            spectrum,
            held,
            injected: 0,
        }
    }

    /// Register indices of the probes currently reachable.
    pub fn held(&self) -> &[usize] {
        &self.held
    }

    pub(crate) fn injected(&self) -> usize {
        self.injected
    }

    fn check(&self, probes: &[usize]) -> Result<(), ChannelError> {
        match probes.iter().find(|p| !self.held.contains(p)) {
            Some(&p) => Err(ChannelError::NotHeld(p)),
            None => Ok(()),
        }
    }

    pub fn apply_phase(&mut self, theta: f64, probes: &[usize]) -> Result<(), ChannelError> {
        self.check(probes)?;
        Ok(self.state.apply_phase(theta, &self.spectrum, probes)?)
    }

    pub fn measure_ghz(&mut self, probes: &[usize], imaginary: bool, rng: &mut SimRng) -> Result<GhzMeasurement, ChannelError> {
        self.check(probes)?;
        Ok(self.state.measure_ghz(probes, imaginary, rng)?)
    }

    pub fn measure_energy(&mut self, probes: &[usize], rng: &mut SimRng) -> Result<Vec<bool>, ChannelError> {
        self.check(probes)?;
        Ok(self.state.measure_energy(probes, rng)?)
    }

    pub fn measure_single(&mut self, probe: usize, basis: MeasBasis, rng: &mut SimRng) -> Result<bool, ChannelError> {
        self.check(&[probe])?;
        Ok(self.state.measure_single_probe(probe, basis, rng)?.0)
    }

    /// Sends extra probes of the eavesdropper's own toward Charlie.
    pub fn inject_probes(&mut self, count: usize) {
        self.injected += count;
    }
}
