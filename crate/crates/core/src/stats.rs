//! Small numerical summaries used by the experiments.

use serde::{Deserialize, Serialize};

/// Least-squares line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares. Needs at least two distinct `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LineFit { slope, intercept, r2 })
}

/// Fit of `y` against `log(1/h)`.
pub fn fit_log_inverse(h: &[f64], y: &[f64]) -> Option<LineFit> {
    let x: Vec<f64> = h.iter().map(|v| (1.0 / v).ln()).collect();
    fit_line(&x, y)
}

/// Largest `|x_i - x_ref| / |x_ref|` with the last entry as reference.
pub fn relative_spread_to_last(xs: &[f64]) -> f64 {
    let Some(&r) = xs.last() else { return 0.0 };
    xs.iter().map(|x| (x - r).abs() / r.abs()).fold(0.0, f64::max)
}

/// `(max - min) / min`.
pub fn relative_range(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() {
        0.0
    } else {
        (hi - lo) / lo.abs()
    }
}

pub fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = fit_line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_eq!((f.slope, f.intercept, f.r2), (2.0, 1.0, 1.0));
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn spreads() {
        assert_eq!(relative_spread_to_last(&[1.1, 0.9, 1.0]), 0.10000000000000009);
        assert_eq!(relative_range(&[2.0, 3.0]), 0.5);
        assert!(strictly_increasing(&[1.0, 2.0]) && !strictly_increasing(&[1.0, 1.0]));
    }
}
