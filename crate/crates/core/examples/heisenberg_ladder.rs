// Resolving an arbitrary phase with NOON states of size 1, 2, 4 and 8.

use secure_metrology::estimator::{circular_distance, ladder_estimate};
use secure_metrology::harness::ladder_transcripts;
use secure_metrology::protocol::ProtocolParams;
use std::error::Error;
use std::f64::consts::TAU;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let phi = 4.1;
    let params = ProtocolParams {
        n_probes: 8,
        phi_true: phi,
        nu: 3000,
        quadrature_split: true,
        seed: 5,
        ..ProtocolParams::default()
    };
    let result = ladder_estimate(&ladder_transcripts(&params)?)?;
    for level in &result.ladder {
        println!(
            "N = {}: {} rounds, cos {:+.3}, sin {:+.3}, φ ≈ {:.4}",
            level.n,
            level.rounds,
            level.expectation,
            level.sine.unwrap_or(f64::NAN),
            level.phi
        );
    }
    println!(
        "φ̂ = {:.4} (true {phi}), error {:.2e}, delta-method σ {:.2e}, bound σ {:.2e}",
        result.phi_hat,
        circular_distance(result.phi_hat, phi, TAU),
        result.empirical_variance.sqrt(),
        result.analytic_bound.sqrt()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
