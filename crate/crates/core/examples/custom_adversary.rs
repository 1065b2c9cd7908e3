// Writing an eavesdropper: this one rotates the last probe of every round
// by a small angle, and gets caught on check rounds.

use secure_metrology::adversary::{AdversaryStrategy, Channel, ChannelError, Leg, TamperAction, TamperRecord, Transit};
use secure_metrology::protocol::{run_single_party, ProtocolParams};
use secure_metrology::qsim::SimRng;
use std::error::Error;

struct Nudge(f64);

impl AdversaryStrategy for Nudge {
    fn label(&self) -> String {
        format!("nudge({})", self.0)
    }

    fn on_probe_transit(&mut self, transit: &Transit, channel: &mut Channel<'_>, _rng: &mut SimRng) -> Result<Vec<TamperRecord>, ChannelError> {
        if transit.leg != Leg::FromCharlie || !transit.is_last_probe() {
            return Ok(Vec::new());
        }
        channel.apply_phase(self.0, &[transit.probe])?;
        Ok(vec![TamperRecord {
            round: transit.round,
            probe: transit.probe,
            leg: transit.leg,
            action: TamperAction::PhaseBias { theta: self.0 },
        }])
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for theta in [0.0, 0.2, 0.8] {
        let params = ProtocolParams {
            nu: 200,
            seed: 8,
            ..ProtocolParams::default()
        };
        let t = run_single_party(&params, &mut Nudge(theta))?;
        match t.aborted {
            Some(a) => println!("θ = {theta}: caught at round {} ({:?})", a.round, a.reason),
            None => println!("θ = {theta}: unnoticed over {} rounds", t.rounds.len()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
