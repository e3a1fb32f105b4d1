//! Experiment files: write one, read it back, run it.
//!
//! cargo run --release --example experiment_file

use sa_lab::experiments::{run_ensemble, ExperimentConfig, ProblemSpec};
use sa_lab::noise::NoiseModel;

const TEXT: &str = "\
[problem]
kind = huber
rows = 60
cols = 30
delta = 1.0
matrix_seed = 1

[noise]
kind = stable
alpha = 1.5
scale = 1.0

[schedule]
beta = 1.0
k0 = 1.0

[run]
horizon = 5000
runs = 100
moment_orders = 1
quantiles = 0.1 0.5 0.9
seed = 3
";

fn main() -> sa_lab::Result<()> {
    let config = ExperimentConfig::from_text(TEXT, "inline")?;
    assert_eq!(ExperimentConfig::from_text(&config.to_text(), "round trip")?, config);
    println!("{}", config.to_text());

    let stats = run_ensemble(&config)?;
    let last = stats.checkpoints.len() - 1;
    println!("median final error {:.4}", stats.quantile(0.5).unwrap()[last]);

    // Moments of order at or above the tail index are infinite and rejected.
    let mut bad = ExperimentConfig::new(ProblemSpec::identity(1), NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 });
    bad.moment_orders = vec![2.0];
    println!("order-2 moment under alpha = 1.5: {}", bad.validate().unwrap_err());
    Ok(())
}
