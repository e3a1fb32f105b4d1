//! A Monte Carlo ensemble with quantile band, bound overlay, CSV output and
//! a log-log rate fit.
//!
//! cargo run --release --example ensemble_and_rate -- [out.csv]

use std::path::PathBuf;

use sa_lab::experiments::{
    config_bound, fit_rate, run_ensemble_on, write_ensemble_csv, EnsembleOptions, ExperimentConfig, ProblemSpec,
};
use sa_lab::noise::NoiseModel;
use sa_lab::sa::StepSchedule;

fn main() -> sa_lab::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("gaussian.csv"));
    let mut config = ExperimentConfig::new(ProblemSpec::identity(1), NoiseModel::MdsGaussian { std: 1.0 });
    config.schedule = StepSchedule::new(2.0, 4.0)?;
    config.horizon = 20_000;
    config.n_runs = 500;
    config.moment_orders = vec![1.0, 2.0];

    let instance = config.problem.build()?;
    let stats = run_ensemble_on(&config, &instance, &EnsembleOptions::default())?;
    let bound = config_bound(&config, &instance)?;
    write_ensemble_csv(&stats, bound.as_ref(), &out)?;

    let (slope, _, r2) = fit_rate(&stats.checkpoints, stats.moment(2.0).unwrap(), config.horizon / 100, 4.0)?;
    println!("mean squared error decays like k^{slope:.3} (r^2 = {r2:.4}), expected k^-1");
    let lo = stats.quantile(0.1).unwrap();
    let hi = stats.quantile(0.9).unwrap();
    let last = stats.checkpoints.len() - 1;
    println!(
        "final |x - x*|: mean {:.3e}, 10-90% band [{:.3e}, {:.3e}], {} flagged runs",
        stats.moment(1.0).unwrap()[last],
        lo[last],
        hi[last],
        stats.flagged_run_count()
    );
    println!("bound column present: {}; wrote {}", bound.is_some(), out.display());
    Ok(())
}
