use secure_metrology::adversary::{basis_guess_intercept_resend, passive, probe_injector, EveObservation, TamperAction};
use secure_metrology::protocol::{
    run_protocol, AbortReason, DecoyCheck, Message, PrepClass, ProtocolParams, Transcript,
};
use secure_metrology::qsim::Spectrum;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;

fn params(k: usize, nu: usize, seed: u64) -> ProtocolParams {
    ProtocolParams {
        k,
        nu,
        seed,
        ..ProtocolParams::default()
    }
}

#[test]
fn passive_runs_never_abort() {
    for k in [0, 1, 2, 3] {
        for seed in 0..5 {
            let t = run_protocol(&params(k, 300, seed), &mut passive()).unwrap();
            assert!(!t.is_aborted(), "k = {k}, seed = {seed}");
            assert!(t.rounds.iter().all(|r| r.decoy_check != DecoyCheck::Fail));
            assert!(t.max_probes_in_flight <= 1);
        }
    }
}

#[test]
fn passive_completeness_with_wider_gap_and_quadratures() {
    let mut p = params(0, 500, 1);
    p.spectrum = Spectrum::new(-1.0, 2.0).unwrap();
    p.quadrature_split = true;
    assert!(!run_protocol(&p, &mut passive()).unwrap().is_aborted());
    let mut p = params(0, 500, 2);
    p.extended_decoys = true;
    assert!(!run_protocol(&p, &mut passive()).unwrap().is_aborted());
    let mut p = params(1, 500, 3);
    p.preshared_basis_key = true;
    p.quadrature_split = true;
    assert!(!run_protocol(&p, &mut passive()).unwrap().is_aborted());
}

fn position(t: &Transcript, pred: impl Fn(&Message) -> bool) -> Option<usize> {
    t.reveal_log.iter().position(|e| pred(&e.message))
}

#[test]
fn offsets_are_disclosed_only_after_checks_pass() {
    for k in [0, 1, 3] {
        let t = run_protocol(&params(k, 200, 4), &mut passive()).unwrap();
        let offsets = position(&t, |m| matches!(m, Message::PhaseOffsets { .. })).unwrap();
        let last_verdict = t
            .reveal_log
            .iter()
            .rposition(|e| matches!(e.message, Message::CheckVerdict { passed: true, .. }))
            .unwrap();
        assert!(last_verdict < offsets);
        if k > 0 {
            let signs = position(&t, |m| matches!(m, Message::PreparationSigns { .. })).unwrap();
            assert!(offsets < signs);
        }
    }
}

#[test]
fn aborted_runs_disclose_no_offsets() {
    let t = run_protocol(&params(1, 200, 5), &mut basis_guess_intercept_resend()).unwrap();
    assert_eq!(t.aborted.map(|a| a.reason), Some(AbortReason::DecoyMismatch));
    assert!(position(&t, |m| matches!(m, Message::PhaseOffsets { .. })).is_none());
    assert!(t.retained_for_estimation.is_empty());
}

#[test]
fn probe_injection_aborts_in_first_round() {
    let t = run_protocol(&params(0, 50, 6), &mut probe_injector(1)).unwrap();
    assert!(t.probe_count_violation);
    assert_eq!(t.rounds.len(), 1);
    assert_eq!(t.aborted.map(|a| (a.round, a.reason)), Some((0, AbortReason::ProbeCount)));
}

#[test]
fn decoys_are_balanced_at_reference_parameters() {
    // P_a(2 − P_c) = 1: energy decoys and NOON check rounds are equally likely
    let t = run_protocol(&params(0, 20_000, 7), &mut passive()).unwrap();
    let energy = t.rounds.iter().filter(|r| r.preparation.class() == PrepClass::Energy).count() as f64;
    let checks = t
        .rounds
        .iter()
        .filter(|r| r.preparation.class() == PrepClass::Noon && !r.charlie_action.applied_phase)
        .count() as f64;
    let n = t.rounds.len() as f64;
    // difference of two multinomial cells with p = 1/3 each
    let sigma = (n * (2.0 / 3.0)).sqrt();
    assert!((energy - checks).abs() < 4.0 * sigma, "{energy} vs {checks}");
}

#[test]
fn transcripts_round_trip_through_json() {
    for k in [0, 1, 2] {
        let t = run_protocol(&params(k, 40, 8), &mut basis_guess_intercept_resend()).unwrap();
        let back = Transcript::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}

#[test]
fn same_seed_same_transcript() {
    for k in [0, 1, 3] {
        let a = run_protocol(&params(k, 100, 9), &mut basis_guess_intercept_resend()).unwrap();
        let b = run_protocol(&params(k, 100, 9), &mut basis_guess_intercept_resend()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = run_protocol(&params(k, 100, 10), &mut basis_guess_intercept_resend()).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }
}

fn observation_counts(phi: f64, seed: u64) -> BTreeMap<String, usize> {
    let mut p = params(0, 10_000, seed);
    p.phi_true = phi;
    p.abort_threshold = usize::MAX;
    let t = run_protocol(&p, &mut basis_guess_intercept_resend()).unwrap();
    let mut counts = BTreeMap::new();
    for record in t.rounds.iter().flat_map(|r| &r.adversary_events) {
        if let TamperAction::InterceptResend { guess, observation } = &record.action {
            let key = match observation {
                EveObservation::Ghz(o) => format!("{guess:?}/{o:?}"),
                EveObservation::Bits(b) => format!("{guess:?}/{}", b.iter().filter(|&&x| x).count()),
            };
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

#[test]
fn eve_observations_carry_no_phase_information() {
    let a = observation_counts(0.0, 11);
    let b = observation_counts(0.7, 12);
    let keys: Vec<&String> = a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let rows = [&a, &b];
    let totals: Vec<f64> = rows.iter().map(|r| r.values().sum::<usize>() as f64).collect();
    let grand: f64 = totals.iter().sum();
    let mut stat = 0.0;
    let mut dof = 0usize;
    let mut mutual_information = 0.0;
    for key in &keys {
        let col: f64 = rows.iter().map(|r| *r.get(*key).unwrap_or(&0) as f64).sum();
        if col == 0.0 {
            continue;
        }
        dof += 1;
        for (row, total) in rows.iter().zip(&totals) {
            let observed = *row.get(*key).unwrap_or(&0) as f64;
            let expected = total * col / grand;
            stat += (observed - expected).powi(2) / expected;
            if observed > 0.0 {
                mutual_information += observed / grand * (observed / expected).ln();
            }
        }
    }
    let dof = (dof - 1) as f64;
    let p = ChiSquared::new(dof).unwrap().sf(stat);
    assert!(p > 1e-3, "χ² = {stat} on {dof} dof, p = {p}");
    // plug-in bias of the MI estimate is (cells − 1)/(2·samples)
    assert!(mutual_information < 10.0 * dof / (2.0 * grand), "MI = {mutual_information}");
}
