use proptest::prelude::*;
use secure_metrology::qsim::{JointState, MeasBasis, Sign, SimRng, Spectrum};
use std::f64::consts::PI;

fn sign(b: bool) -> Sign {
    if b {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

proptest! {
    #[test]
    fn phase_preserves_norm(n in 1usize..9, theta in -10.0f64..10.0, s in any::<bool>()) {
        let mut state = JointState::prepare_noon(n, sign(s)).unwrap();
        let probes: Vec<usize> = (0..n).collect();
        state.apply_phase(theta, &Spectrum::default(), &probes).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_rule_for_odd_gaps(n in 1usize..9, m_seed in any::<usize>(), half_gap in 0u32..3, s in any::<bool>()) {
        let gap = 2.0 * half_gap as f64 + 1.0;
        let spectrum = Spectrum::new(0.0, gap).unwrap();
        let m = m_seed % n;
        let mut state = JointState::prepare_noon(n, sign(s)).unwrap();
        let probes: Vec<usize> = (0..n).collect();
        state.apply_phase(m as f64 * PI / n as f64, &spectrum, &probes).unwrap();
        let flipped = (m as u64 * gap as u64) % 2 == 1;
        let expected = JointState::prepare_noon(n, sign(s ^ flipped)).unwrap();
        prop_assert!(state.fidelity(&expected).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn measurement_outcomes_are_normalized(n in 2usize..8, seed in any::<u64>(), theta in 0.0f64..6.3) {
        let mut rng = SimRng::new(seed, 0);
        let mut state = JointState::prepare_ghz(n, Sign::Plus, false, 12).unwrap();
        state.apply_phase(theta, &Spectrum::default(), &[0]).unwrap();
        let probes: Vec<usize> = (0..n - 1).collect();
        let (p, m, i) = state.ghz_probabilities(&probes, rng.coin()).unwrap();
        prop_assert!((p + m + i - 1.0).abs() < 1e-12);
        state.measure_single_probe(n - 1, MeasBasis::GhzPlusMinus, &mut rng).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        let bits = state.measure_energy(&probes, &mut rng).unwrap();
        prop_assert_eq!(bits.len(), n - 1);
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noon_states_reject_the_other_sign(n in 1usize..10, s in any::<bool>()) {
        let a = JointState::prepare_noon(n, sign(s)).unwrap();
        let b = JointState::prepare_noon(n, sign(!s)).unwrap();
        prop_assert!(a.fidelity(&b).unwrap() < 1e-12);
    }
}

#[test]
fn even_gap_needs_the_unsafe_constructor() {
    assert!(Spectrum::new(0.0, 2.0).is_err());
    assert!(Spectrum::new_unsafe(0.0, 2.0).is_ok());
}
