//! Small statistics helpers shared by the noise checks, experiments, and
//! theory verifiers.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::SeedKey;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Standard error of the mean.
pub fn std_error(values: &[f64]) -> f64 {
    (variance(values) / values.len() as f64).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Sample autocovariance `γ̂(h) = Σ_t x_t x_{t+h} / (n − h)` for
/// `h = 0..=max_lag`, assuming a known zero mean. Computed via FFT.
pub fn autocovariance_zero_mean(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let max_lag = max_lag.min(n.saturating_sub(1));
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    inv.process(&mut buf);
    (0..=max_lag)
        .map(|h| buf[h].re / size as f64 / (n - h) as f64)
        .collect()
}

/// Ordinary least squares `y ≈ a + b·x`; returns `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    linear_fit_weighted(x, y, &vec![1.0; x.len()])
}

/// Weighted least squares with weights `w`; `r²` is the weighted one.
pub fn linear_fit_weighted(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((a, b), wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (a - mx) * (a - mx);
        sxy += wi * (a - mx) * (b - my);
        syy += wi * (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Least-squares fit of `log value` against `log(k + offset)` over
/// checkpoints with `k ≥ k_min`; returns `(slope, intercept, r²)`.
pub fn fit_rate(
    checkpoints: &[usize],
    values: &[f64],
    k_min: usize,
    offset: f64,
) -> Result<(f64, f64, f64)> {
    let (lx, ly, _) = rate_window(checkpoints, values, None, k_min, offset)?;
    Ok(linear_fit(&lx, &ly))
}

/// As [`fit_rate`], weighting each checkpoint by `(value/se)²`, the inverse
/// delta-method variance of `log value`. Falls back to equal weights if any
/// standard error in the window is zero.
pub fn fit_rate_weighted(
    checkpoints: &[usize],
    values: &[f64],
    se: &[f64],
    k_min: usize,
    offset: f64,
) -> Result<(f64, f64, f64)> {
    let (lx, ly, w) = rate_window(checkpoints, values, Some(se), k_min, offset)?;
    Ok(linear_fit_weighted(&lx, &ly, &w))
}

type Window = (Vec<f64>, Vec<f64>, Vec<f64>);

fn rate_window(
    checkpoints: &[usize],
    values: &[f64],
    se: Option<&[f64]>,
    k_min: usize,
    offset: f64,
) -> Result<Window> {
    if checkpoints.len() != values.len() || se.is_some_and(|s| s.len() != values.len()) {
        return Err(Error::RateFit(format!(
            "{} checkpoints but {} values",
            checkpoints.len(),
            values.len()
        )));
    }
    let (mut lx, mut ly, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (i, (&k, &v)) in checkpoints.iter().zip(values).enumerate() {
        if k < k_min {
            continue;
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::RateFit(format!("nonpositive value {v} at k = {k}")));
        }
        lx.push((k as f64 + offset).ln());
        ly.push(v.ln());
        w.push(se.map_or(1.0, |s| (v / s[i]).powi(2)));
    }
    if lx.len() < 8 {
        return Err(Error::RateFit(format!(
            "need at least 8 checkpoints with k >= {k_min}, have {}",
            lx.len()
        )));
    }
    if !w.iter().all(|x| x.is_finite()) {
        w.fill(1.0);
    }
    Ok((lx, ly, w))
}

/// Run-level bootstrap standard error of the mean for several statistics
/// sharing the same runs: `columns[c][r]` is statistic `c` of run `r`. The
/// same resampled run indices are used for every column.
pub fn bootstrap_mean_se(columns: &[Vec<f64>], resamples: usize, key: SeedKey) -> Vec<f64> {
    let Some(n) = columns.first().map(Vec::len) else {
        return Vec::new();
    };
    if n < 2 || resamples < 2 {
        return vec![0.0; columns.len()];
    }
    let mut rng = key.rng();
    let draws: Vec<Vec<u32>> = (0..resamples)
        .map(|_| (0..n).map(|_| rng.random_range(0..n as u32)).collect())
        .collect();
    columns
        .iter()
        .map(|col| {
            let means: Vec<f64> = draws
                .iter()
                .map(|idx| idx.iter().map(|&i| col[i as usize]).sum::<f64>() / n as f64)
                .collect();
            variance(&means).sqrt()
        })
        .collect()
}
