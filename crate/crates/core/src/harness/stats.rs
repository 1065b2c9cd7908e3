use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Standard error of a proportion `p` estimated from `n` Bernoulli trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `(empirical − predicted)/σ`; zero when both agree exactly and `σ = 0`.
pub fn z_score(empirical: f64, predicted: f64, sigma: f64) -> f64 {
    let diff = empirical - predicted;
    if diff == 0.0 {
        0.0
    } else if sigma == 0.0 {
        diff.signum() * f64::INFINITY
    } else {
        diff / sigma
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope from per-point uncertainties, if given,
    /// otherwise from the residuals.
    pub slope_se: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
///
/// `y_sigma` propagates known per-point errors into the slope error; without
/// it the residual variance is used.
pub fn linear_regression(x: &[f64], y: &[f64], y_sigma: Option<&[f64]>) -> Regression {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points to fit a line");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - slope * xi - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let slope_se = match y_sigma {
        Some(s) => {
            assert_eq!(s.len(), x.len());
            x.iter().zip(s).map(|(xi, si)| ((xi - mx) * si).powi(2)).sum::<f64>().sqrt() / sxx
        }
        None if x.len() > 2 => (ss_res / (n - 2.0) / sxx).sqrt(),
        None => 0.0,
    };
    Regression {
        slope,
        intercept,
        r_squared,
        slope_se,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[usize]) -> ChiSquare {
    assert!(counts.len() >= 2);
    let total: usize = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
    let dof = counts.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let r = linear_regression(&x, &y, None);
        assert_relative_eq!(r.slope, -0.5, epsilon = 1e-12);
        assert_relative_eq!(r.intercept, 2.0, epsilon = 1e-12);
        assert_relative_eq!(r.r_squared, 1.0, epsilon = 1e-12);
        assert!(r.slope_se < 1e-12);
    }

    #[test]
    fn propagated_slope_error() {
        // two points at x = ±1 with σ = 1: slope = (y2−y1)/2, se = √2/2
        let r = linear_regression(&[-1.0, 1.0], &[0.0, 1.0], Some(&[1.0, 1.0]));
        assert_relative_eq!(r.slope_se, 2f64.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn chi_square_reference_values() {
        let flat = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(flat.statistic, 0.0);
        assert_relative_eq!(flat.p_value, 1.0);
        // χ² = 4 on 1 dof: p = 0.0455
        let c = chi_square_uniform(&[60, 40]);
        assert_relative_eq!(c.statistic, 4.0);
        assert_relative_eq!(c.p_value, 0.04550026389635842, epsilon = 1e-9);
    }

    #[test]
    fn binomial_and_z() {
        assert_relative_eq!(binomial_sigma(0.5, 100), 0.05);
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_relative_eq!(z_score(0.6, 0.5, 0.05), 2.0, epsilon = 1e-12);
    }
}
