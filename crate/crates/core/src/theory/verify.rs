//! Monte Carlo checks of the averaged-noise moment bounds.

use rayon::prelude::*;

use super::{contraction_params, u_moment_bound_heavy, u_moment_bound_lrd, ContractionParams};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoisePlan};
use crate::rng::{purpose, SeedKey};
use crate::sa::{checkpoint_grid, StepSchedule};
use crate::stats::{bootstrap_mean_se, fit_rate_weighted, mean};
use crate::vecops::norm;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Clone, Debug)]
pub struct UMomentSetup {
    pub model: NoiseModel,
    pub dim: usize,
    pub schedule: StepSchedule,
    pub mu: f64,
    pub lip: f64,
    /// Noise constant, normally from `noise::estimate_sigma`.
    pub sigma: f64,
    pub n_runs: usize,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UMomentRow {
    pub k: usize,
    pub empirical: f64,
    /// Run-level bootstrap standard error of `empirical`.
    pub se: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UMomentReport {
    pub label: &'static str,
    pub order: f64,
    pub rows: Vec<UMomentRow>,
    /// Weighted log-log slope of the empirical moment over `k ≥ horizon/100`;
    /// `None` when the moment vanishes (no noise).
    pub slope: Option<f64>,
    pub slope_range: (f64, f64),
}

impl UMomentReport {
    pub fn bound_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn slope_pass(&self) -> bool {
        match self.slope {
            None => true,
            Some(s) => s >= self.slope_range.0 && s <= self.slope_range.1,
        }
    }

    pub fn passed(&self) -> bool {
        self.bound_pass() && self.slope_pass()
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// `‖U_k‖^order` at the checkpoints for every run, in run order.
fn simulate_u(
    setup: &UMomentSetup,
    cp: &ContractionParams,
    order: f64,
    checkpoints: &[usize],
    key: SeedKey,
) -> Result<Vec<Vec<f64>>> {
    let plan = NoisePlan::new(setup.model, setup.horizon)?;
    let runs_key = key.child(purpose::RUNS);
    (0..setup.n_runs)
        .into_par_iter()
        .map(|r| {
            let mut stream = plan.stream(setup.dim, runs_key.child(r as u64))?;
            let mut u = vec![0.0; setup.dim];
            let mut eta = vec![0.0; setup.dim];
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut cursor = 0;
            for k in 0..=setup.horizon {
                if checkpoints[cursor] == k {
                    out.push(norm(&u).powf(order));
                    cursor += 1;
                }
                if k == setup.horizon {
                    break;
                }
                stream.next_into(&mut eta);
                let bt = cp.scaled_step(setup.schedule.stepsize(k));
                for (ui, ei) in u.iter_mut().zip(&eta) {
                    *ui = (1.0 - bt) * *ui - bt * cp.zeta * ei;
                }
            }
            Ok(out)
        })
        .collect()
}

fn run_check(
    setup: &UMomentSetup,
    label: &'static str,
    order: f64,
    bound: impl Fn(&ContractionParams, usize) -> f64,
    slope_range: (f64, f64),
    key: SeedKey,
) -> Result<UMomentReport> {
    if setup.n_runs < 2 || setup.horizon < 1 {
        return Err(Error::InvalidParameter("need >= 2 runs and horizon >= 1".into()));
    }
    let cp = contraction_params(setup.mu, setup.lip)?;
    let bt0 = cp.scaled_step(setup.schedule.stepsize(0));
    if bt0 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "scaled step beta_0/zeta = {bt0} exceeds 1; raise K0 to at least beta*L^2/mu"
        )));
    }
    let checkpoints = checkpoint_grid(setup.horizon);
    let per_run = simulate_u(setup, &cp, order, &checkpoints, key)?;
    let columns: Vec<Vec<f64>> = (0..checkpoints.len())
        .map(|c| per_run.iter().map(|run| run[c]).collect())
        .collect();
    let ses = bootstrap_mean_se(&columns, BOOTSTRAP_RESAMPLES, key.child(purpose::BOOTSTRAP));
    let rows: Vec<UMomentRow> = checkpoints
        .iter()
        .zip(&columns)
        .zip(&ses)
        .map(|((&k, col), &se)| {
            let empirical = mean(col);
            let b = bound(&cp, k);
            let ratio = if b > 0.0 {
                empirical / b
            } else if empirical == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            UMomentRow {
                k,
                empirical,
                se,
                bound: b,
                ratio,
                pass: empirical <= b + 3.0 * se,
            }
        })
        .collect();
    let means: Vec<f64> = rows.iter().map(|r| r.empirical).collect();
    // A single late, very large draw lifts one stretch of the mean curve and
    // inflates its bootstrap SE there, so the slope is inverse-variance weighted.
    let k_min = setup.horizon / 100;
    let slope = if means.iter().zip(&checkpoints).all(|(&m, &k)| k < k_min || m == 0.0) {
        None
    } else {
        Some(fit_rate_weighted(&checkpoints, &means, &ses, k_min, setup.schedule.k0)?.0)
    };
    Ok(UMomentReport {
        label,
        order,
        rows,
        slope,
        slope_range,
    })
}

/// Checks `E‖U_k‖^p ≤ 4ζσ^p(β/(k+K0))^{p−1}` (plus 3 bootstrap SE) at every
/// checkpoint and that the empirical moment decays with slope at most
/// `−(p − 1) + 0.15`.
pub fn verify_u_moment_heavy(setup: &UMomentSetup, p: f64, key: SeedKey) -> Result<UMomentReport> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!("moment order p = {p} outside (1,2)")));
    }
    if p >= setup.model.moment_ceiling() {
        return Err(Error::InvalidParameter(format!(
            "{} has no finite moment of order {p}",
            setup.model
        )));
    }
    let (sigma, schedule) = (setup.sigma, setup.schedule);
    run_check(
        setup,
        "u-moment-heavy",
        p,
        |cp, k| u_moment_bound_heavy(cp, sigma, p, &schedule, k),
        (f64::NEG_INFINITY, -(p - 1.0) + 0.15),
        key,
    )
}

/// Checks `E‖U_k‖² ≤ (6ζ²σ²/(1−δ))·k^{1−δ}·β̃_k` (plus 3 bootstrap SE) and
/// that the empirical slope lies in `[−δ − 0.25, −δ + 0.15]`.
pub fn verify_u_moment_lrd(setup: &UMomentSetup, delta: f64, key: SeedKey) -> Result<UMomentReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside (0,1)")));
    }
    if let Some(d) = setup.model.lrd_delta() {
        if (d - delta).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} does not match {} (delta {d})",
                setup.model
            )));
        }
    }
    let (sigma, schedule) = (setup.sigma, setup.schedule);
    run_check(
        setup,
        "u-moment-lrd",
        2.0,
        |cp, k| u_moment_bound_lrd(cp, sigma, delta, &schedule, k),
        (-delta - 0.25, -delta + 0.15),
        key,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(model: NoiseModel) -> UMomentSetup {
        UMomentSetup {
            model,
            dim: 1,
            schedule: StepSchedule::new(4.0, 4.0).unwrap(),
            mu: 1.0,
            lip: 1.0,
            sigma: 1.0,
            n_runs: 8,
            horizon: 2000,
        }
    }

    #[test]
    fn zero_noise_passes_trivially() {
        let s = setup(NoiseModel::MdsGaussian { std: 0.0 });
        let r = verify_u_moment_heavy(&s, 1.5, SeedKey::new(1)).unwrap();
        assert!(r.passed() && r.slope.is_none());
        assert!(r.rows.iter().all(|row| row.empirical == 0.0));
        let r = verify_u_moment_lrd(&s, 0.6, SeedKey::new(1)).unwrap();
        assert!(r.passed());
        assert_eq!(r.rows[0].bound, 0.0);
    }

    #[test]
    fn scaled_step_above_one_is_rejected() {
        let mut s = setup(NoiseModel::MdsGaussian { std: 1.0 });
        s.schedule = StepSchedule::new(4.0, 2.0).unwrap();
        assert!(verify_u_moment_heavy(&s, 1.5, SeedKey::new(1)).is_err());
    }

    #[test]
    fn mismatched_delta_is_rejected() {
        let s = setup(NoiseModel::Fgn { hurst: 0.7, scale: 1.0 });
        assert!(verify_u_moment_lrd(&s, 0.5, SeedKey::new(1)).is_err());
        let s = setup(NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 });
        assert!(verify_u_moment_heavy(&s, 1.5, SeedKey::new(1)).is_err());
    }
}
