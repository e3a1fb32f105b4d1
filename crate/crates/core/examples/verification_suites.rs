//! The stepsize inequalities, the averaged-noise moment bounds and the
//! noise-generator checks.
//!
//! cargo run --release --example verification_suites

use sa_lab::cli::suites::{lemma_suite, noise_suite, u_moment_suite, NoiseSuiteOptions, UMomentSuiteOptions};
use sa_lab::rng::SeedKey;
use sa_lab::theory::lemma_aux1_check;

fn main() -> sa_lab::Result<()> {
    let r = lemma_aux1_check(1.0, 2.0, 3.0, 100_000);
    println!("single product check: max ratio {:.6} at k = {}\n", r.max_ratio, r.tightest_k);

    println!("{}\n", lemma_suite(100_000));
    let opts = UMomentSuiteOptions {
        runs: 400,
        horizon: 10_000,
        smoke: false,
    };
    println!("{}\n", u_moment_suite(&opts, SeedKey::new(1))?);
    let quick = NoiseSuiteOptions {
        fgn_paths: 64,
        fgn_len: 1 << 14,
        samples: 200_000,
        hurst_offset: 0.0,
    };
    println!("{}", noise_suite(&quick, SeedKey::new(1))?);
    Ok(())
}
