//! Draw from every noise model and print a few summary statistics.
//!
//! cargo run --release --example noise_models

use sa_lab::noise::{estimate_sigma, noise_stream, NoiseModel};
use sa_lab::rng::SeedKey;
use sa_lab::stats::{autocovariance_zero_mean, mean, quantile_sorted};

fn main() -> sa_lab::Result<()> {
    let n = 1 << 16;
    let models = [
        NoiseModel::MdsGaussian { std: 1.0 },
        NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 },
        NoiseModel::SymAlphaStable { alpha: 1.2, scale: 1.0 },
        NoiseModel::Fgn { hurst: 0.8, scale: 1.0 },
        NoiseModel::Farima { c: 0.3, scale: 1.0, trunc: 500 },
    ];
    println!("{:<32} {:>9} {:>9} {:>9} {:>9} {:>9}", "model", "mean", "median", "q99", "acf(1)", "acf(16)");
    for (i, model) in models.iter().enumerate() {
        let mut s = noise_stream(*model, 1, n, SeedKey::new(1).child(i as u64))?;
        let xs: Vec<f64> = (0..n).map(|_| s.next_vec().unwrap()[0]).collect();
        let acf = autocovariance_zero_mean(&xs, 16);
        let mut abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        println!(
            "{:<32} {:>9.4} {:>9.4} {:>9.3} {:>9.4} {:>9.4}",
            model.to_string(),
            mean(&xs),
            quantile_sorted(&sorted, 0.5),
            quantile_sorted(&abs, 0.99),
            acf[1] / acf[0],
            acf[16] / acf[0],
        );
    }

    // Noise constants used by the bounds.
    let pareto = NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 };
    let p = pareto.default_moment_order();
    let sigma = estimate_sigma(&pareto, 30, p, 100_000, SeedKey::new(2))?;
    println!("\npareto in d=30: p = {p}, sigma ~ {sigma:.3}");
    let fgn = NoiseModel::Fgn { hurst: 0.7, scale: 20.0 };
    let sigma = estimate_sigma(&fgn, 1, 2.0, 1 << 16, SeedKey::new(3))?;
    println!("fgn H=0.7 x20: delta = {:.1}, sigma^2 ~ {:.1}", fgn.lrd_delta().unwrap(), sigma * sigma);
    Ok(())
}
