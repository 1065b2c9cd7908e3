// One honest party estimating a phase through an untrusted channel.

use secure_metrology::adversary::passive;
use secure_metrology::estimator::{bound, expectation_from_transcript, BoundSpec};
use secure_metrology::protocol::{run_single_party, DecoyCheck, ProtocolParams};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = ProtocolParams {
        n_probes: 4,
        phi_true: 0.3,
        nu: 3000,
        seed: 42,
        ..ProtocolParams::default()
    };
    let transcript = run_single_party(&params, &mut passive())?;
    let checks = transcript.rounds.iter().filter(|r| r.decoy_check != DecoyCheck::NotADecoy).count();
    println!("rounds: {}", transcript.rounds.len());
    println!("verified decoys: {checks}, aborted: {}", transcript.is_aborted());
    println!("retained for estimation: {}", transcript.retained_for_estimation.len());

    let (expectation, used) = expectation_from_transcript(&transcript, params.n_probes)?;
    let target = (params.n_probes as f64 * params.phi_true).cos();
    println!("<O_N> = {expectation:.4} from {used} rounds (cos(Nφ) = {target:.4})");
    println!("variance bound: {:.3e}", bound(&BoundSpec::from_params(&params))?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
