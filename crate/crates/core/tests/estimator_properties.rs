use secure_metrology::adversary::passive;
use secure_metrology::estimator::{circular_mean, circular_mse, ladder_estimate, phase_period};
use secure_metrology::harness::ladder_transcripts;
use secure_metrology::protocol::{run_protocol, ProtocolParams};
use secure_metrology::qsim::derive_seed;
use std::f64::consts::TAU;

fn ladder_params(phi: f64, seed: u64, nu: usize) -> ProtocolParams {
    ProtocolParams {
        n_probes: 8,
        phi_true: phi,
        nu,
        seed,
        quadrature_split: true,
        ..ProtocolParams::default()
    }
}

#[test]
fn variance_is_bounded_and_close_to_the_bound() {
    let phi = 1.1;
    let estimates: Vec<f64> = (0..200)
        .map(|i| {
            let ts = ladder_transcripts(&ladder_params(phi, derive_seed(77, i), 3000)).unwrap();
            ladder_estimate(&ts).unwrap().phi_hat
        })
        .collect();
    let mse = circular_mse(&estimates, &vec![phi; estimates.len()], TAU);
    let ts = ladder_transcripts(&ladder_params(phi, 1, 3000)).unwrap();
    let bound = ladder_estimate(&ts).unwrap().analytic_bound;
    // 200 samples: the MSE is known to about ±20% at 2σ
    assert!(mse > 0.8 * bound, "mse {mse:.3e} bound {bound:.3e}");
    assert!(mse < 4.0 * bound, "mse {mse:.3e} bound {bound:.3e}");
}

#[test]
fn estimates_near_zero_do_not_wrap() {
    for (i, phi) in [0.002, TAU - 0.002].into_iter().enumerate() {
        let estimates: Vec<f64> = (0..20)
            .map(|j| {
                let ts = ladder_transcripts(&ladder_params(phi, derive_seed(i as u64, j), 2000)).unwrap();
                ladder_estimate(&ts).unwrap().phi_hat
            })
            .collect();
        let mean = circular_mean(&estimates, TAU).unwrap();
        let linear = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let d = secure_metrology::estimator::circular_distance(mean, phi, TAU);
        assert!(d < 0.01, "{phi}: circular mean {mean}, linear mean {linear}");
    }
}

#[test]
fn ladder_finds_uniform_phases() {
    let n_max = 8.0;
    let rounds = 1000.0;
    let mut hits = 0;
    for r in 0..100u64 {
        let seed = derive_seed(4242, r);
        let phi = secure_metrology::qsim::SimRng::new(seed, 0).uniform() * TAU;
        let mut ts = ladder_transcripts(&ladder_params(phi, seed, 3500)).unwrap();
        for t in &mut ts {
            assert!(t.retained_for_estimation.len() >= rounds as usize);
            t.retained_for_estimation.truncate(rounds as usize);
        }
        let est = ladder_estimate(&ts).unwrap();
        if secure_metrology::estimator::circular_distance(est.phi_hat, phi, TAU) < 5.0 / (n_max * f64::sqrt(rounds)) {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn period_follows_gap() {
    let mut p = ProtocolParams {
        nu: 200,
        phi_true: 0.4,
        ..ProtocolParams::default()
    };
    p.spectrum = secure_metrology::qsim::Spectrum::new(0.0, 3.0).unwrap();
    let t = run_protocol(&p, &mut passive()).unwrap();
    assert!((phase_period(t.params.spectrum.gap()) - TAU / 3.0).abs() < 1e-15);
}
