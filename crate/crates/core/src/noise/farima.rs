use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Moving-average weights of `(1 − B)^{−c}` truncated at lag `trunc`:
/// `ψ_0 = 1`, `ψ_j = ψ_{j−1}(j − 1 + c)/j`.
pub fn farima_coefficients(c: f64, trunc: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(trunc + 1);
    psi.push(1.0);
    for j in 1..=trunc {
        let prev = psi[j - 1];
        psi.push(prev * (j as f64 - 1.0 + c) / j as f64);
    }
    psi
}

fn check_c(c: f64) -> Result<()> {
    if (0.0..0.5).contains(&c) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("FARIMA c = {c} outside [0, 0.5)")))
    }
}

/// Truncated moving average `η_t = scale · Σ_{j≤L} ψ_j ε_{t−j}` for a fixed
/// path length. The convolution runs through a cached FFT of the weights;
/// `trunc` pre-samples are drawn so the first output already sees the full
/// window.
pub struct FarimaPlan {
    n: usize,
    psi: Vec<f64>,
    size: usize,
    psi_hat: Vec<Complex<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FarimaPlan {
    pub fn new(c: f64, trunc: usize, n: usize) -> Result<Self> {
        check_c(c)?;
        if n == 0 {
            return Err(Error::InvalidParameter("FARIMA length 0".into()));
        }
        let psi = farima_coefficients(c, trunc);
        let size = (n + 2 * trunc).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut psi_hat: Vec<Complex<f64>> = psi.iter().map(|&v| Complex::new(v, 0.0)).collect();
        psi_hat.resize(size, Complex::new(0.0, 0.0));
        fwd.process(&mut psi_hat);
        Ok(FarimaPlan {
            n,
            psi,
            size,
            psi_hat,
            fwd,
            inv,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.psi
    }

    pub fn generate<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Vec<f64> {
        let trunc = self.psi.len() - 1;
        let total = self.n + trunc;
        let mut buf: Vec<Complex<f64>> = (0..self.size)
            .map(|i| {
                if i < total {
                    Complex::new(rng.sample(StandardNormal), 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            })
            .collect();
        if trunc == 0 {
            return buf[..self.n].iter().map(|c| scale * c.re).collect();
        }
        self.fwd.process(&mut buf);
        for (b, p) in buf.iter_mut().zip(&self.psi_hat) {
            *b *= p;
        }
        self.inv.process(&mut buf);
        let norm = scale / self.size as f64;
        buf[trunc..trunc + self.n].iter().map(|c| norm * c.re).collect()
    }
}

pub fn farima_generate<R: Rng + ?Sized>(
    c: f64,
    scale: f64,
    trunc: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(FarimaPlan::new(c, trunc, n)?.generate(scale, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedKey;

    #[test]
    fn recurrence_values() {
        assert_eq!(farima_coefficients(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
        let psi = farima_coefficients(0.4, 3);
        for (a, b) in psi.iter().zip([1.0, 0.4, 0.28, 0.224]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficients_decay_like_power_law() {
        let psi = farima_coefficients(0.3, 500);
        let ratio = psi[500] / psi[250];
        let target = 2f64.powf(0.3 - 1.0);
        assert!((ratio / target - 1.0).abs() < 0.05, "{ratio} vs {target}");
        assert!(psi.windows(2).skip(1).all(|w| w[1] <= w[0] && w[1] >= 0.0));
    }

    #[test]
    fn fft_convolution_equals_direct_sum() {
        let (c, trunc, n, scale) = (0.35, 37, 200, 0.7);
        let plan = FarimaPlan::new(c, trunc, n).unwrap();
        let fast = plan.generate(scale, &mut SeedKey::new(5).rng());
        let mut rng = SeedKey::new(5).rng();
        let eps: Vec<f64> = (0..n + trunc).map(|_| rng.sample(StandardNormal)).collect();
        let psi = farima_coefficients(c, trunc);
        for t in 0..n {
            let direct: f64 = scale * (0..=trunc).map(|j| psi[j] * eps[t + trunc - j]).sum::<f64>();
            assert!((fast[t] - direct).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn rejects_c_at_half() {
        assert!(FarimaPlan::new(0.5, 10, 10).is_err());
        assert!(FarimaPlan::new(0.1, 10, 0).is_err());
    }
}
