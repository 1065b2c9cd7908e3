// Experiments as JSON: build a config, save it, load it back and run it.

use secure_metrology::adversary::{AdversaryKind, AdversarySpec};
use secure_metrology::harness::{run_experiment, ExperimentConfig};
use secure_metrology::protocol::ProtocolParams;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = ProtocolParams {
        nu: 5,
        ..ProtocolParams::default()
    };
    let config = ExperimentConfig::new("probe injection", params, AdversarySpec::new(AdversaryKind::ProbeInjector { extra: 1 }), 200, 7);
    let dir = std::env::temp_dir().join("secmet-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("probe_injection.json");
    std::fs::write(&path, config.to_json())?;

    let loaded = ExperimentConfig::from_file(&path)?;
    let report = run_experiment(&loaded)?;
    print!("{}", report.to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
