use secure_metrology::adversary::basis_guess_intercept_resend;
use secure_metrology::protocol::{run_protocol, ProtocolParams, Transcript};
use std::path::PathBuf;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(name: &str, transcript: &Transcript) {
    let path = golden_path(name);
    let actual = transcript.to_json();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
    assert_eq!(actual, expected, "{name} drifted; rerun with UPDATE_GOLDEN=1 if intended");
    assert_eq!(Transcript::from_json(&expected).unwrap(), *transcript);
}

#[test]
fn two_party_with_eavesdropper() {
    let params = ProtocolParams {
        k: 1,
        nu: 6,
        seed: 2024,
        abort_threshold: 100,
        ..ProtocolParams::default()
    };
    let t = run_protocol(&params, &mut basis_guess_intercept_resend()).unwrap();
    check("two_party_basis_guess.json", &t);
}

#[test]
fn single_party_passive() {
    let params = ProtocolParams {
        nu: 6,
        seed: 7,
        ..ProtocolParams::default()
    };
    let t = run_protocol(&params, &mut secure_metrology::adversary::passive()).unwrap();
    check("single_party_passive.json", &t);
}
