// An eavesdropper guessing the decoy family on every round, against one
// and two honest parties, compared with the closed forms.

use secure_metrology::adversary::{eve_information_report, AdversarySpec};
use secure_metrology::harness::{run_experiment, ExperimentConfig};
use secure_metrology::protocol::ProtocolParams;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (seed, (label, k, preshared)) in [("single party", 0, false), ("two party", 1, false), ("two party, keyed bases", 1, true)].into_iter().enumerate() {
        let params = ProtocolParams {
            k,
            nu: 1,
            preshared_basis_key: preshared,
            ..ProtocolParams::default()
        };
        let config = ExperimentConfig::new(label, params, AdversarySpec::basis_guess(), 20_000, seed as u64);
        let report = run_experiment(&config)?;
        let m = &report.metrics[0];
        let p = m.prediction.as_ref().expect("prediction");
        println!("{label:<24} undetected {:.4} vs {:.4} ({}) z = {:+.2}", m.empirical, p.value, p.formula, m.z.unwrap_or(0.0));
    }
    let params = ProtocolParams::default();
    let eve = eve_information_report(&params, &AdversarySpec::basis_guess(), 3)?;
    println!(
        "three tampered rounds: QFI at most {}, reached with probability {}, undetected {:.4}",
        eve.max_qfi, eve.success_probability, eve.undetected_probability
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
