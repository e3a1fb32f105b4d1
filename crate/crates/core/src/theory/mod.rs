//! Contraction reformulation, explicit bound constants, bound curves, and
//! numerical checks of the supporting lemmas.

mod aux;
mod contraction;
mod verify;

pub use aux::{lemma_aux1_check, lemma_aux2_check, AuxReport};
pub use contraction::{contraction_params, ContractionParams};
pub use verify::{
    verify_u_moment_heavy, verify_u_moment_lrd, UMomentReport, UMomentRow, UMomentSetup,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::sa::StepSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Martingale-difference noise with bounded variance; rate 1.
    Standard,
    /// Bounded `p`-th moment, `p ∈ (1,2)`; rate `p − 1`.
    Heavy,
    /// Long-range dependence with decay exponent `δ`; rate `δ`.
    Lrd,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Standard => "standard",
            Theorem::Heavy => "heavy",
            Theorem::Lrd => "lrd",
        }
    }

    /// Moment of `‖x_k − x*‖` the bound controls.
    pub fn moment_order(&self, p: f64) -> f64 {
        match self {
            Theorem::Heavy => p,
            _ => 2.0,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Theorem::Standard),
            "heavy" => Ok(Theorem::Heavy),
            "lrd" => Ok(Theorem::Lrd),
            other => Err(Error::InvalidParameter(format!("unknown theorem `{other}`"))),
        }
    }
}

/// The three constants of one theorem: thresholds on `β` and `K0`, and the
/// numerator of the bound `c_bound / (k + K0)^rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremConstants {
    pub theorem: Theorem,
    /// `C1`, `C4`, or `C7`: the bound needs `β ≥ beta_threshold`.
    pub beta_threshold: f64,
    /// `C2`, `C5`, or `C8`: the bound needs `K0 ≥ k0_threshold`.
    pub k0_threshold: f64,
    /// `C3`, `C6`, or `C9`.
    pub c_bound: f64,
    pub rate: f64,
    pub beta: f64,
    pub k0: f64,
}

impl TheoremConstants {
    pub fn beta_valid(&self) -> bool {
        self.beta >= self.beta_threshold
    }

    pub fn k0_valid(&self) -> bool {
        self.k0 >= self.k0_threshold
    }

    pub fn is_valid(&self) -> bool {
        self.beta_valid() && self.k0_valid()
    }

    /// `c_bound / (k + K0)^rate`, regardless of validity.
    pub fn evaluate(&self, k: usize) -> f64 {
        self.c_bound / (k as f64 + self.k0).powf(self.rate)
    }
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")))
    }
}

/// `C1 = 2/μ`, `C2 = βL²/μ + βμ`, `C3 = K0·r0² + 2βσ²/μ`.
pub fn constants_standard(
    mu: f64,
    lip: f64,
    beta: f64,
    sigma: f64,
    k0: f64,
    r0: f64,
) -> Result<TheoremConstants> {
    check_positive(&[("mu", mu), ("lip", lip), ("beta", beta), ("K0", k0)])?;
    check_nonneg("sigma", sigma)?;
    check_nonneg("r0", r0)?;
    contraction_params(mu, lip)?;
    Ok(TheoremConstants {
        theorem: Theorem::Standard,
        beta_threshold: 2.0 / mu,
        k0_threshold: beta * lip * lip / mu + beta * mu,
        c_bound: k0 * r0 * r0 + 2.0 * beta * sigma * sigma / mu,
        rate: 1.0,
        beta,
        k0,
    })
}

/// `C4 = (2 + 4(p−1))/(1−λ)·μ/L²`, `C5 = βL²/μ`,
/// `C6 = 2K0·r0^p + 296(μ/L²)σ^p β^{p−1}/(1−λ)²`.
#[allow(clippy::too_many_arguments)]
pub fn constants_heavy(
    mu: f64,
    lip: f64,
    beta: f64,
    sigma: f64,
    p: f64,
    k0: f64,
    r0: f64,
) -> Result<TheoremConstants> {
    check_positive(&[("mu", mu), ("lip", lip), ("beta", beta), ("K0", k0)])?;
    check_nonneg("sigma", sigma)?;
    check_nonneg("r0", r0)?;
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!("moment order p = {p} outside (1,2)")));
    }
    let cp = contraction_params(mu, lip)?;
    let gap = cp.lambda_prime;
    Ok(TheoremConstants {
        theorem: Theorem::Heavy,
        beta_threshold: (2.0 + 4.0 * (p - 1.0)) / gap * cp.zeta,
        k0_threshold: beta / cp.zeta,
        c_bound: 2.0 * k0 * r0.powf(p)
            + 296.0 * cp.zeta * sigma.powf(p) * beta.powf(p - 1.0) / (gap * gap),
        rate: p - 1.0,
        beta,
        k0,
    })
}

/// `C7 = (2 + 4δ)/(1−λ)·μ/L²`, `C8 = βL²/μ`,
/// `C9 = 2K0·r0² + 156(μ/L²)σ²β/((1−δ)(1−λ)²)`.
#[allow(clippy::too_many_arguments)]
pub fn constants_lrd(
    mu: f64,
    lip: f64,
    beta: f64,
    sigma: f64,
    delta: f64,
    k0: f64,
    r0: f64,
) -> Result<TheoremConstants> {
    check_positive(&[("mu", mu), ("lip", lip), ("beta", beta), ("K0", k0)])?;
    check_nonneg("sigma", sigma)?;
    check_nonneg("r0", r0)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("decay exponent delta = {delta} outside (0,1)")));
    }
    let cp = contraction_params(mu, lip)?;
    let gap = cp.lambda_prime;
    Ok(TheoremConstants {
        theorem: Theorem::Lrd,
        beta_threshold: (2.0 + 4.0 * delta) / gap * cp.zeta,
        k0_threshold: beta / cp.zeta,
        c_bound: 2.0 * k0 * r0 * r0
            + 156.0 * cp.zeta * sigma * sigma * beta / ((1.0 - delta) * gap * gap),
        rate: delta,
        beta,
        k0,
    })
}

/// A theorem's guarantee evaluated on a checkpoint grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub constants: TheoremConstants,
    pub checkpoints: Vec<usize>,
    pub values: Vec<f64>,
}

impl BoundCurve {
    pub fn theorem(&self) -> Theorem {
        self.constants.theorem
    }

    pub fn rate(&self) -> f64 {
        self.constants.rate
    }

    pub fn k0(&self) -> f64 {
        self.constants.k0
    }
}

/// Refuses to label a curve as a guarantee when `β` or `K0` is below its
/// threshold.
pub fn bound_curve(constants: &TheoremConstants, checkpoints: &[usize]) -> Result<BoundCurve> {
    if !constants.is_valid() {
        return Err(Error::InvalidConstants(format!(
            "{} bound needs beta >= {} (have {}) and K0 >= {} (have {})",
            constants.theorem,
            constants.beta_threshold,
            constants.beta,
            constants.k0_threshold,
            constants.k0
        )));
    }
    Ok(BoundCurve {
        constants: *constants,
        checkpoints: checkpoints.to_vec(),
        values: checkpoints.iter().map(|&k| constants.evaluate(k)).collect(),
    })
}

/// Averaged-noise `p`-th moment bound `4ζσ^p (β/(k+K0))^{p−1}`.
pub fn u_moment_bound_heavy(
    cp: &ContractionParams,
    sigma: f64,
    p: f64,
    schedule: &StepSchedule,
    k: usize,
) -> f64 {
    4.0 * cp.zeta * sigma.powf(p) * schedule.stepsize(k).powf(p - 1.0)
}

/// Same bound written as `4ζ^p σ^p β̃_k^{p−1}`.
pub fn u_moment_bound_heavy_scaled(
    cp: &ContractionParams,
    sigma: f64,
    p: f64,
    schedule: &StepSchedule,
    k: usize,
) -> f64 {
    let bt = cp.scaled_step(schedule.stepsize(k));
    4.0 * cp.zeta.powf(p) * sigma.powf(p) * bt.powf(p - 1.0)
}

/// Averaged-noise second moment bound `(6ζ²σ²/(1−δ))·k^{1−δ}·β̃_k`.
pub fn u_moment_bound_lrd(
    cp: &ContractionParams,
    sigma: f64,
    delta: f64,
    schedule: &StepSchedule,
    k: usize,
) -> f64 {
    let bt = cp.scaled_step(schedule.stepsize(k));
    6.0 * cp.zeta * cp.zeta * sigma * sigma / (1.0 - delta) * (k as f64).powf(1.0 - delta) * bt
}

/// Right-hand side of the `z_k` `p`-th moment bound under heavy tails:
/// `r0^p·K0/(k+K0) + 144ζσ^p/(1−λ)²·(β/(k+K0))^{p−1}`.
pub fn z_moment_bound_heavy(
    cp: &ContractionParams,
    sigma: f64,
    p: f64,
    schedule: &StepSchedule,
    r0: f64,
    k: usize,
) -> f64 {
    let kk = k as f64 + schedule.k0;
    r0.powf(p) * schedule.k0 / kk
        + 144.0 * cp.zeta * sigma.powf(p) / cp.lambda_prime.powi(2)
            * schedule.stepsize(k).powf(p - 1.0)
}

/// Right-hand side of the `z_k` second moment bound under LRD noise:
/// `r0²·K0/(k+K0) + 72ζσ²/((1−λ)²(1−δ))·β/(k+K0)^δ`.
pub fn z_moment_bound_lrd(
    cp: &ContractionParams,
    sigma: f64,
    delta: f64,
    schedule: &StepSchedule,
    r0: f64,
    k: usize,
) -> f64 {
    let kk = k as f64 + schedule.k0;
    r0 * r0 * schedule.k0 / kk
        + 72.0 * cp.zeta * sigma * sigma / (cp.lambda_prime.powi(2) * (1.0 - delta)) * schedule.beta
            / kk.powf(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sa::checkpoint_grid;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn standard_constants() {
        let c = constants_standard(1.0, 2.0, 2.0, 1.0, 10.0, 1.0).unwrap();
        assert_eq!((c.beta_threshold, c.k0_threshold, c.c_bound), (2.0, 10.0, 14.0));
        assert!(c.is_valid());
        let c = constants_standard(1.0, 1.0, 2.0, 0.0, 4.0, 1.0).unwrap();
        assert_eq!(c.c_bound, 4.0);
        let c = constants_standard(1.0, 2.0, 1.0, 1.0, 10.0, 1.0).unwrap();
        assert!(!c.beta_valid());
    }

    #[test]
    fn heavy_constants() {
        let c = constants_heavy(1.0, 1.0, 4.0, 1.0, 1.5, 4.0, 1.0).unwrap();
        assert!(close(c.beta_threshold, 4.0, 1e-15) && close(c.k0_threshold, 4.0, 1e-15));
        assert!(close(c.c_bound, 600.0, 1e-13));
        // Independent evaluation of 4/(1 − √0.75)·0.25.
        let c = constants_heavy(1.0, 2.0, 4.0, 1.0, 1.5, 4.0, 1.0).unwrap();
        let expected = 4.0 / (1.0 - 0.75f64.sqrt()) * 0.25;
        assert!(close(c.beta_threshold, expected, 1e-14));
        assert!((c.beta_threshold - 7.4641).abs() < 1e-4);
        // p → 1⁺ limit of C4.
        let c = constants_heavy(1.0, 2.0, 4.0, 1.0, 1.0 + 1e-12, 4.0, 1.0).unwrap();
        assert!(close(c.beta_threshold, 2.0 / (1.0 - 0.75f64.sqrt()) * 0.25, 1e-10));
        assert!(constants_heavy(1.0, 2.0, 4.0, 1.0, 2.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn lrd_constants() {
        let c = constants_lrd(1.0, 1.0, 6.0, 1.0, 0.5, 6.0, 1.0).unwrap();
        assert!(close(c.beta_threshold, 4.0, 1e-15) && close(c.k0_threshold, 6.0, 1e-15));
        assert!(close(c.c_bound, 1884.0, 1e-13));
        let c = constants_lrd(1.0, 2.0, 6.0, 1.0, 0.6, 6.0, 1.0).unwrap();
        let expected = 4.4 / (1.0 - 0.75f64.sqrt()) * 0.25;
        assert!(close(c.beta_threshold, expected, 1e-14));
        assert!((c.beta_threshold - 8.2105).abs() < 1e-4);
        let near = constants_lrd(1.0, 1.0, 6.0, 1.0, 1.0 - 1e-9, 6.0, 1.0).unwrap();
        assert!(near.c_bound > 1e11);
    }

    #[test]
    fn constants_monotone_on_grid() {
        for &ratio in &[0.2, 0.5, 0.9] {
            let lip = 1.0 / ratio;
            let c6 = |sigma: f64, k0: f64| {
                constants_heavy(1.0, lip, 4.0, sigma, 1.5, k0, 1.0).unwrap().c_bound
            };
            assert!(c6(2.0, 4.0) > c6(1.0, 4.0) && c6(1.0, 8.0) > c6(1.0, 4.0));
            let c9 = |sigma: f64, delta: f64| {
                constants_lrd(1.0, lip, 6.0, sigma, delta, 6.0, 1.0).unwrap().c_bound
            };
            assert!(c9(2.0, 0.5) > c9(1.0, 0.5) && c9(1.0, 0.9) > c9(1.0, 0.5));
        }
        // Better conditioning (μ/L → 1) lowers the β thresholds.
        let c4 = |lip: f64| constants_heavy(1.0, lip, 4.0, 1.0, 1.5, 4.0, 1.0).unwrap().beta_threshold;
        let c7 = |lip: f64| constants_lrd(1.0, lip, 4.0, 1.0, 0.5, 4.0, 1.0).unwrap().beta_threshold;
        assert!(c4(5.0) > c4(2.0) && c4(2.0) > c4(1.0));
        assert!(c7(5.0) > c7(2.0) && c7(2.0) > c7(1.0));
    }

    #[test]
    fn curve_values() {
        let c = constants_standard(1.0, 2.0, 2.0, 1.0, 10.0, 1.0).unwrap();
        assert_eq!(bound_curve(&c, &[0]).unwrap().values, vec![1.4]);
        let c = constants_heavy(1.0, 1.0, 4.0, 1.0, 1.5, 4.0, 1.0).unwrap();
        assert!(close(bound_curve(&c, &[96]).unwrap().values[0], 60.0, 1e-13));
        let c = constants_lrd(1.0, 1.0, 6.0, 1.0, 0.5, 6.0, 1.0).unwrap();
        assert!(close(bound_curve(&c, &[94]).unwrap().values[0], 188.4, 1e-13));
        let curve = bound_curve(&c, &checkpoint_grid(1000)).unwrap();
        assert!(curve.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn invalid_constants_are_refused() {
        let c = constants_standard(1.0, 2.0, 1.0, 1.0, 10.0, 1.0).unwrap();
        assert!(matches!(bound_curve(&c, &[0, 1]), Err(Error::InvalidConstants(_))));
        let c = constants_heavy(1.0, 1.0, 4.0, 1.0, 1.5, 3.0, 1.0).unwrap();
        assert!(bound_curve(&c, &[0, 1]).is_err());
    }

    #[test]
    fn two_forms_of_heavy_u_bound_agree() {
        for (mu, lip, beta, k0, p) in [(1.0, 1.0, 4.0, 4.0, 1.5), (0.3, 2.0, 30.0, 1500.0, 1.2)] {
            let cp = contraction_params(mu, lip).unwrap();
            let s = StepSchedule::new(beta, k0).unwrap();
            for k in [0, 1, 10, 1000, 100_000] {
                let a = u_moment_bound_heavy(&cp, 1.7, p, &s, k);
                let b = u_moment_bound_heavy_scaled(&cp, 1.7, p, &s, k);
                assert!(close(a, b, 1e-12), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn theorem_bounds_dominate_z_lemma_bounds() {
        let grid = checkpoint_grid(100_000);
        for (mu, lip) in [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0)] {
            let cp = contraction_params(mu, lip).unwrap();
            for &sigma in &[0.1, 1.0, 20.0] {
                for &r0 in &[0.0, 1.0, 5.0] {
                    let p = 1.5;
                    let c = constants_heavy(mu, lip, 1.0, sigma, p, 1.0, r0).unwrap();
                    let (beta, k0) = (c.beta_threshold, c.beta_threshold / cp.zeta);
                    let c = constants_heavy(mu, lip, beta, sigma, p, k0, r0).unwrap();
                    let s = StepSchedule::new(beta, k0).unwrap();
                    let curve = bound_curve(&c, &grid).unwrap();
                    for (&k, &b) in grid.iter().zip(&curve.values) {
                        assert!(z_moment_bound_heavy(&cp, sigma, p, &s, r0, k) <= b);
                    }
                    let delta = 0.6;
                    let c = constants_lrd(mu, lip, 1.0, sigma, delta, 1.0, r0).unwrap();
                    let (beta, k0) = (c.beta_threshold, c.beta_threshold / cp.zeta);
                    let c = constants_lrd(mu, lip, beta, sigma, delta, k0, r0).unwrap();
                    let s = StepSchedule::new(beta, k0).unwrap();
                    let curve = bound_curve(&c, &grid).unwrap();
                    for (&k, &b) in grid.iter().zip(&curve.values) {
                        assert!(z_moment_bound_lrd(&cp, sigma, delta, &s, r0, k) <= b);
                    }
                }
            }
        }
    }
}
