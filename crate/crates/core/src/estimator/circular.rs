use std::f64::consts::TAU;

/// Period of `φ` for a given gap: `U_φ` repeats after `2π/gap`.
pub fn phase_period(gap: f64) -> f64 {
    TAU / gap
}

/// Maps `x` into `[0, period)`.
pub fn wrap_phase(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to `period` for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two points of a circle of circumference `period`.
pub fn circular_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap_phase(a - b, period);
    d.min(period - d)
}

/// Mean direction of `samples` on a circle of circumference `period`.
/// `None` when the resultant vanishes or there are no samples.
pub fn circular_mean(samples: &[f64], period: f64) -> Option<f64> {
    let scale = TAU / period;
    let (s, c) = samples
        .iter()
        .fold((0.0, 0.0), |(s, c), &x| (s + (x * scale).sin(), c + (x * scale).cos()));
    if samples.is_empty() || s.hypot(c) < 1e-12 * samples.len() as f64 {
        return None;
    }
    Some(wrap_phase(s.atan2(c) / scale, period))
}

/// Mean squared circular distance of `estimates` from `truth`.
pub fn circular_mse(estimates: &[f64], truth: &[f64], period: f64) -> f64 {
    assert_eq!(estimates.len(), truth.len());
    if estimates.is_empty() {
        return 0.0;
    }
    estimates
        .iter()
        .zip(truth)
        .map(|(&e, &t)| circular_distance(e, t, period).powi(2))
        .sum::<f64>()
        / estimates.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distance_wraps() {
        assert_abs_diff_eq!(circular_distance(0.05, TAU - 0.05, TAU), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(circular_distance(1.0, 1.0 + 3.0 * TAU, TAU), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(circular_distance(0.0, std::f64::consts::PI, TAU), std::f64::consts::PI);
    }

    #[test]
    fn mean_across_zero_has_no_bias() {
        let m = circular_mean(&[0.1, TAU - 0.1, 0.05, TAU - 0.05], TAU).unwrap();
        assert!(circular_distance(m, 0.0, TAU) < 1e-12);
        assert!(circular_mean(&[0.0, std::f64::consts::PI], TAU).is_none());
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_phase(TAU, TAU), 0.0);
        assert!(wrap_phase(-1e-18, TAU) < TAU);
        assert_abs_diff_eq!(wrap_phase(-0.5, 2.0), 1.5);
    }
}
