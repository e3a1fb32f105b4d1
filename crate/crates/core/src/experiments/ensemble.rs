use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::noise::{estimate_sigma, NoiseModel, NoisePlan};
use crate::operators::ProblemInstance;
use crate::rng::{purpose, SeedKey};
use crate::sa::{checkpoint_grid, run_sa, SaOptions, Trajectory};
use crate::stats::{bootstrap_mean_se, mean, quantile_sorted};
use crate::theory::{
    bound_curve, constants_heavy, constants_lrd, constants_standard, BoundCurve, TheoremConstants,
};
use crate::vecops::dist;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Samples used by [`noise_constant`].
pub const SIGMA_SAMPLES: usize = 100_000;

/// Worst structural residuals over all runs of a diagnostic ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticSummary {
    pub runs: usize,
    pub max_reconstruction: f64,
    pub max_delta_excess: f64,
    pub max_form_gap: f64,
}

impl DiagnosticSummary {
    pub fn holds(&self) -> bool {
        self.max_reconstruction <= 1e-9 && self.max_delta_excess <= 1e-12 && self.max_form_gap <= 1e-12
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub checkpoints: Vec<usize>,
    pub moment_orders: Vec<f64>,
    /// `moments[i][c]`: mean of `‖x_k − x*‖^{q_i}` at checkpoint `c`.
    pub moments: Vec<Vec<f64>>,
    pub moment_se: Vec<Vec<f64>>,
    pub quantile_levels: Vec<f64>,
    /// `quantiles[j][c]`: level-`p_j` quantile of `‖x_k − x*‖`.
    pub quantiles: Vec<Vec<f64>>,
    pub n_runs: usize,
    /// Indices of runs that hit a non-finite iterate (excluded from the statistics).
    pub flagged_runs: Vec<usize>,
    pub diagnostics: Option<DiagnosticSummary>,
}

impl EnsembleStats {
    pub fn flagged_run_count(&self) -> usize {
        self.flagged_runs.len()
    }

    pub fn moment(&self, q: f64) -> Option<&[f64]> {
        self.moment_orders
            .iter()
            .position(|&o| o == q)
            .map(|i| self.moments[i].as_slice())
    }

    pub fn moment_se_for(&self, q: f64) -> Option<&[f64]> {
        self.moment_orders
            .iter()
            .position(|&o| o == q)
            .map(|i| self.moment_se[i].as_slice())
    }

    pub fn quantile(&self, level: f64) -> Option<&[f64]> {
        self.quantile_levels
            .iter()
            .position(|&o| o == level)
            .map(|i| self.quantiles[i].as_slice())
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnsembleOptions {
    /// Co-evolve the averaged-noise diagnostics in every run.
    pub diagnostics: bool,
}

/// Builds the instance and runs the ensemble on the current rayon pool.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleStats> {
    let instance = config.problem.build()?;
    run_ensemble_on(config, &instance, &EnsembleOptions::default())
}

/// Run `i` draws its noise from `SeedKey(master).child(RUNS).child(i)`;
/// results are aggregated in run order, so thread count never matters.
pub fn run_ensemble_on(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
    options: &EnsembleOptions,
) -> Result<EnsembleStats> {
    config.validate()?;
    let plan = NoisePlan::new(config.noise, config.horizon)?;
    let master = SeedKey::new(config.master_seed);
    let runs_key = master.child(purpose::RUNS);
    let x0 = config.start.point(instance);
    let checkpoints = checkpoint_grid(config.horizon);
    let sa_opts = SaOptions {
        projected: config.projected,
        diagnostics: options.diagnostics,
        checkpoints: Some(checkpoints.clone()),
    };
    let trajectories: Vec<Trajectory> = (0..config.n_runs)
        .into_par_iter()
        .map(|i| {
            let mut stream = plan.stream(instance.dim(), runs_key.child(i as u64))?;
            run_sa(instance, &mut stream, &config.schedule, config.horizon, &x0, &sa_opts)
        })
        .collect::<Result<_>>()?;

    let flagged_runs: Vec<usize> = trajectories
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_flagged())
        .map(|(i, _)| i)
        .collect();
    if flagged_runs.len() * 100 > config.n_runs {
        return Err(Error::TooManyFlagged {
            flagged: flagged_runs.len(),
            runs: config.n_runs,
        });
    }
    let kept: Vec<&Trajectory> = trajectories.iter().filter(|t| !t.is_flagged()).collect();
    if kept.is_empty() {
        return Err(Error::TooManyFlagged {
            flagged: flagged_runs.len(),
            runs: config.n_runs,
        });
    }

    let n_cp = checkpoints.len();
    let mut moments = Vec::with_capacity(config.moment_orders.len());
    let mut moment_se = Vec::with_capacity(config.moment_orders.len());
    let boot_key = master.child(purpose::BOOTSTRAP);
    for &q in &config.moment_orders {
        let columns: Vec<Vec<f64>> = (0..n_cp)
            .map(|c| kept.iter().map(|t| t.errors[c].powf(q)).collect())
            .collect();
        moments.push(columns.iter().map(|col| mean(col)).collect());
        moment_se.push(bootstrap_mean_se(&columns, BOOTSTRAP_RESAMPLES, boot_key));
    }
    let mut quantiles = vec![Vec::with_capacity(n_cp); config.quantiles.len()];
    for c in 0..n_cp {
        let mut col: Vec<f64> = kept.iter().map(|t| t.errors[c]).collect();
        col.sort_by(f64::total_cmp);
        for (slot, &p) in quantiles.iter_mut().zip(&config.quantiles) {
            slot.push(quantile_sorted(&col, p));
        }
    }
    let diagnostics = options.diagnostics.then(|| {
        let mut s = DiagnosticSummary {
            runs: kept.len(),
            max_reconstruction: 0.0,
            max_delta_excess: f64::NEG_INFINITY,
            max_form_gap: 0.0,
        };
        for d in kept.iter().filter_map(|t| t.diagnostics.as_ref()) {
            s.max_reconstruction = s.max_reconstruction.max(d.max_reconstruction);
            s.max_delta_excess = s.max_delta_excess.max(d.max_delta_excess);
            s.max_form_gap = s.max_form_gap.max(d.max_form_gap);
        }
        s
    });

    Ok(EnsembleStats {
        checkpoints,
        moment_orders: config.moment_orders.clone(),
        moments,
        moment_se,
        quantile_levels: config.quantiles.clone(),
        quantiles,
        n_runs: config.n_runs,
        flagged_runs,
        diagnostics,
    })
}

/// Runs `f` on a dedicated pool with `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Moment order the matching theorem controls: 2 for light tails and LRD,
/// the model's default `p` for heavy tails.
pub fn theorem_moment_order(noise: &NoiseModel) -> f64 {
    noise.default_moment_order()
}

/// `σ` for the bound constants, estimated from the noise model in the
/// instance dimension with a stream derived from the master seed.
pub fn noise_constant(config: &ExperimentConfig, dim: usize) -> Result<f64> {
    let order = theorem_moment_order(&config.noise);
    if let NoiseModel::MdsGaussian { std: 0.0 } = config.noise {
        return Ok(0.0);
    }
    estimate_sigma(
        &config.noise,
        dim,
        order,
        SIGMA_SAMPLES,
        SeedKey::new(config.master_seed).child(purpose::SIGMA),
    )
}

/// Constants of the theorem matching the config's noise kind, with `σ`
/// estimated by [`noise_constant`]. Projected runs are outside the theorems
/// and yield `None`.
pub fn theorem_constants(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
) -> Result<Option<TheoremConstants>> {
    if config.projected && !instance.projection().is_identity() {
        return Ok(None);
    }
    let sigma = noise_constant(config, instance.dim())?;
    let r0 = dist(&config.start.point(instance), instance.root());
    let (mu, lip) = (instance.mu(), instance.lip());
    let (beta, k0) = (config.schedule.beta, config.schedule.k0);
    let c = if let Some(delta) = config.noise.lrd_delta() {
        if !(delta > 0.0 && delta < 1.0) {
            return Ok(None);
        }
        constants_lrd(mu, lip, beta, sigma, delta, k0, r0)?
    } else if config.noise.is_heavy_tailed() {
        let p = config.noise.default_moment_order();
        if p <= 1.0 {
            return Ok(None);
        }
        constants_heavy(mu, lip, beta, sigma, p, k0, r0)?
    } else {
        constants_standard(mu, lip, beta, sigma, k0, r0)?
    };
    Ok(Some(c))
}

/// Bound overlay for the config, when the theorem's thresholds hold.
pub fn config_bound(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
) -> Result<Option<BoundCurve>> {
    match theorem_constants(config, instance)? {
        Some(c) if c.is_valid() => Ok(Some(bound_curve(&c, &checkpoint_grid(config.horizon))?)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::ProblemSpec;

    fn small(noise: NoiseModel) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(ProblemSpec::identity(2), noise);
        c.horizon = 500;
        c.n_runs = 40;
        c.moment_orders = vec![1.0];
        c.schedule.beta = 2.0;
        c.schedule.k0 = 4.0;
        c
    }

    #[test]
    fn zero_noise_band_has_zero_width() {
        let c = small(NoiseModel::MdsGaussian { std: 0.0 });
        let s = run_ensemble(&c).unwrap();
        let lo = s.quantile(0.1).unwrap();
        let hi = s.quantile(0.9).unwrap();
        assert_eq!(lo, hi);
        let mut one = c.clone();
        one.n_runs = 1;
        let single = run_ensemble(&one).unwrap();
        assert_eq!(single.moment(1.0).unwrap(), lo);
        for (m, x) in s.moment(1.0).unwrap().iter().zip(lo) {
            assert!((m - x).abs() <= 1e-14 * x.abs(), "{m} vs {x}");
        }
        let se = s.moment_se_for(1.0).unwrap();
        assert!(se.iter().zip(lo).all(|(e, x)| *e <= 1e-14 * x));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = small(NoiseModel::SymAlphaStable { alpha: 1.4, scale: 0.5 });
        let one = with_threads(1, || run_ensemble(&c)).unwrap().unwrap();
        let four = with_threads(4, || run_ensemble(&c)).unwrap().unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn quantiles_are_ordered() {
        let c = small(NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 });
        let s = run_ensemble(&c).unwrap();
        let (lo, hi) = (s.quantile(0.1).unwrap(), s.quantile(0.9).unwrap());
        assert!(lo.iter().zip(hi).all(|(a, b)| a <= b));
    }

    #[test]
    fn diverging_runs_abort_the_ensemble() {
        let mut c = small(NoiseModel::MdsGaussian { std: 1.0 });
        c.schedule.beta = 1e6;
        c.schedule.k0 = 1e3;
        assert!(matches!(run_ensemble(&c), Err(Error::TooManyFlagged { .. })));
    }

    #[test]
    fn diagnostics_are_summarized() {
        let c = small(NoiseModel::Fgn { hurst: 0.8, scale: 1.0 });
        let inst = c.problem.build().unwrap();
        let opts = EnsembleOptions { diagnostics: true };
        let s = run_ensemble_on(&c, &inst, &opts).unwrap();
        assert!(s.diagnostics.unwrap().holds(), "{:?}", s.diagnostics);
    }

    #[test]
    fn bound_only_for_valid_schedules() {
        let c = small(NoiseModel::MdsGaussian { std: 1.0 });
        let inst = c.problem.build().unwrap();
        let curve = config_bound(&c, &inst).unwrap().unwrap();
        assert_eq!(curve.checkpoints, checkpoint_grid(500));
        let mut bad = c.clone();
        bad.schedule.beta = 1.0;
        assert!(config_bound(&bad, &inst).unwrap().is_none());
    }
}
