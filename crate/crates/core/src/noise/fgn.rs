use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Autocovariance of unit-variance fractional Gaussian noise at lag `h`:
/// `½(|h+1|^{2H} − 2|h|^{2H} + |h−1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, h: usize) -> f64 {
    let e = 2.0 * hurst;
    let h = h as f64;
    0.5 * ((h + 1.0).powf(e) - 2.0 * h.powf(e) + (h - 1.0).abs().powf(e))
}

/// Circulant embedding for one path length: eigenvalues are computed once
/// and the FFT plan is shared, so many paths of the same length are cheap.
pub struct FgnPlan {
    n: usize,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnPlan {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidParameter(format!("hurst {hurst} outside (0,1)")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("fGn length {n} < 2")));
        }
        let half = (n - 1).next_power_of_two();
        let size = 2 * half;
        let mut row: Vec<Complex<f64>> = (0..size)
            .map(|j| {
                let lag = if j <= half { j } else { size - j };
                Complex::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let mut weights = Vec::with_capacity(size);
        for c in &row {
            if c.re < -1e-9 {
                return Err(Error::NegativeEigenvalue(c.re));
            }
            weights.push((c.re.max(0.0) / size as f64).sqrt());
        }
        Ok(FgnPlan { n, weights, fft })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// One path of length `n`, multiplied by `scale`.
    pub fn generate<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .weights
            .iter()
            .map(|&w| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(w * re, w * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|c| scale * c.re).collect()
    }
}

/// Exact fGn path of length `n` with autocovariance `scale²·γ(h)`.
pub fn fgn_generate<R: Rng + ?Sized>(
    hurst: f64,
    n: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(FgnPlan::new(hurst, n)?.generate(scale, rng))
}
