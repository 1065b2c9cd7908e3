// Three recipients share one phase: each alone sees fair coins, together
// they recover `cos(Nφ)`.

use secure_metrology::adversary::passive;
use secure_metrology::estimator::expectation_from_transcript;
use secure_metrology::protocol::{run_multi_party, Outcome, Party, ProtocolParams};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = ProtocolParams {
        k: 3,
        n_probes: 4,
        phi_true: 0.3,
        nu: 4000,
        seed: 3,
        ..ProtocolParams::default()
    };
    let t = run_multi_party(&params, &mut passive())?;
    for party in [Party::Bob, Party::Recipient(1), Party::Recipient(2)] {
        let ones = t
            .retained_for_estimation
            .iter()
            .filter_map(|&r| match &t.rounds[r].measurement_of(party)?.outcome {
                Outcome::Bits(b) => Some(b.iter().fold(false, |p, &x| p ^ x)),
                Outcome::Ghz(_) => None,
            })
            .filter(|&parity| parity)
            .count();
        println!(
            "{party:?}: odd parity in {ones}/{} rounds",
            t.retained_for_estimation.len()
        );
    }
    let (e, n) = expectation_from_transcript(&t, params.n_probes)?;
    println!("joint <O> = {e:.4} over {n} rounds, cos(Nφ) = {:.4}", (4.0 * 0.3f64).cos());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
