//! Small numerical helpers shared by the analysis modules.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Pairwise (cascade) summation. The reduction order depends only on the
/// slice length, so results are reproducible across platforms.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Pairwise sum of `f(i)` over `0..n`.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
    fn go(lo: usize, hi: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
        if hi - lo <= 16 {
            (lo..hi).map(f).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, f)
}

/// Cumulative trapezoidal integral of `y` over `x`, starting at zero.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Linear interpolation into a strictly increasing abscissa, clamped at the ends.
pub fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert!(!xs.is_empty() && xs.len() == ys.len());
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    // first index with xs[i] > x
    let hi = xs.partition_point(|&v| v <= x);
    let lo = hi - 1;
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + w * (ys[hi] - ys[lo])
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_std_error: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean_x = pairwise_sum(x) / nf;
    let mean_y = pairwise_sum(y) / nf;
    let sxx = pairwise_sum_by(n, |i| (x[i] - mean_x) * (x[i] - mean_x));
    if !(sxx > 0.0) {
        return Err(Error::DegenerateWindow);
    }
    let sxy = pairwise_sum_by(n, |i| (x[i] - mean_x) * (y[i] - mean_y));
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| yi - (intercept + slope * xi))
        .collect();
    let slope_std_error = if n > 2 {
        let ssr = pairwise_sum_by(n, |i| residuals[i] * residuals[i]);
        libm::sqrt(ssr / (nf - 2.0) / sxx)
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_std_error,
        residuals,
    })
}

/// Quantile of already sorted data with linear interpolation between order
/// statistics (the "type 7" definition).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = libm::floor(h) as usize;
    let hi = libm::ceil(h) as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sorts a copy of `values` (NaNs last) and returns it.
pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn median(values: &[f64]) -> f64 {
    quantile_sorted(&sorted(values), 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum_by(1000, |i| i as f64), 499_500.0);
    }

    #[test]
    fn trapezoid_of_constant() {
        let x = [0.0, 1.0, 3.0];
        let y = [2.0, 2.0, 2.0];
        assert_eq!(cumulative_trapezoid(&x, &y), vec![0.0, 2.0, 6.0]);
    }

    #[test]
    fn interpolation_clamps() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 10.0, 30.0];
        assert_eq!(interp_clamped(&xs, &ys, -1.0), 0.0);
        assert_eq!(interp_clamped(&xs, &ys, 1.5), 20.0);
        assert_eq!(interp_clamped(&xs, &ys, 9.0), 30.0);
        assert_eq!(interp_clamped(&xs, &ys, 1.0), 10.0);
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 8.0 * v).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope + 8.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.slope_std_error < 1e-12);
    }

    #[test]
    fn degenerate_line() {
        assert_eq!(
            fit_line(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]),
            Err(Error::DegenerateWindow)
        );
    }

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
    }
}
