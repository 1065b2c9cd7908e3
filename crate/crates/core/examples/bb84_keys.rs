// Toy BB84 for the shared keys of the multi-party protocol, and what an
// intercept-resend attack does to it.

use secure_metrology::adversary::basis_guess_intercept_resend;
use secure_metrology::protocol::{align_keys, bb84_exchange, bb84_keygen, ProtocolError};
use secure_metrology::qsim::SimRng;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = SimRng::new(17, 0);
    let to_bob = bb84_keygen(64, &mut rng, None)?;
    let to_carol = bb84_keygen(64, &mut rng, None)?;
    println!("key to Bob: sent {}, QBER {:.3}", to_bob.stats.sent, to_bob.sampled_qber);
    let aligned = align_keys(&[to_bob.alice, to_carol.alice])?;
    println!("published flips for Carol: {} positions", aligned[1].flips.len());

    let mut eve = basis_guess_intercept_resend();
    let batch = bb84_exchange(10_000, &mut rng, Some(&mut eve))?;
    println!("intercept-resend: sift rate {:.3}, QBER {:.3}", batch.stats.sift_rate(), batch.stats.qber());
    match bb84_keygen(64, &mut rng, Some(&mut eve)) {
        Err(ProtocolError::QberAbort { qber, threshold }) => println!("key exchange aborted: {qber:.3} > {threshold}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
