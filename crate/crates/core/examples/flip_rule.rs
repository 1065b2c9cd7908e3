// Charlie's check rotation `U_{mπ/N}` swaps `Ψ^+` and `Ψ^-` exactly when
// `m·gap` is odd, so a check round stays verifiable once `m` is known.

use secure_metrology::qsim::{JointState, Sign, Spectrum};
use std::error::Error;
use std::f64::consts::PI;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spectrum = Spectrum::default();
    let n = 5;
    let probes: Vec<usize> = (0..n).collect();
    let plus = JointState::prepare_noon(n, Sign::Plus)?;
    let minus = JointState::prepare_noon(n, Sign::Minus)?;
    println!("N = {n}, gap = {}", spectrum.gap());
    println!("{:>3}  {:>10}  {:>10}", "m", "F(Ψ+)", "F(Ψ-)");
    for m in 0..n {
        let mut state = plus.clone();
        state.apply_phase(m as f64 * PI / n as f64, &spectrum, &probes)?;
        let (fp, fm) = (state.fidelity(&plus)?, state.fidelity(&minus)?);
        println!("{m:>3}  {fp:>10.6}  {fm:>10.6}");
        let expected = if m % 2 == 1 { fm } else { fp };
        assert!(expected > 1.0 - 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
