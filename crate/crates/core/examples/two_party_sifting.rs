// Alice prepares, Bob measures in a basis he guesses; mismatched rounds are
// sifted away and the reveal schedule is printed step by step.

use secure_metrology::adversary::passive;
use secure_metrology::protocol::{run_two_party, Message, ProtocolParams};
use std::error::Error;

fn kind(message: &Message) -> String {
    let json = serde_json::to_value(message).expect("message serializes");
    json["kind"].as_str().unwrap_or("?").to_owned()
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = ProtocolParams {
        k: 1,
        nu: 2000,
        seed: 9,
        ..ProtocolParams::default()
    };
    let transcript = run_two_party(&params, &mut passive())?;
    let kept = transcript.rounds.iter().filter(|r| r.sift_kept).count();
    println!("η = {:.3}", params.eta());
    println!("sifted rounds kept: {kept}/{}", params.nu);
    println!(
        "retained: {} (Alice estimates from {}, Bob from {})",
        transcript.retained_for_estimation.len(),
        transcript.retained_half(true).len(),
        transcript.retained_half(false).len()
    );
    for entry in &transcript.reveal_log {
        println!("  step {} {:?}: {}", entry.step, entry.sender, kind(&entry.message));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
