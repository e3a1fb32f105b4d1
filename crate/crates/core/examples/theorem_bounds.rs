//! Finite-time bound constants for the three noise regimes.
//!
//! cargo run --release --example theorem_bounds

use sa_lab::sa::checkpoint_grid;
use sa_lab::theory::{bound_curve, constants_heavy, constants_lrd, constants_standard};

fn main() -> sa_lab::Result<()> {
    let (mu, lip, r0) = (1.0, 2.0, 1.0);
    let all = [
        constants_standard(mu, lip, 2.0, 1.0, 10.0, r0)?,
        constants_heavy(mu, lip, 8.0, 1.0, 1.5, 40.0, r0)?,
        constants_lrd(mu, lip, 12.0, 1.0, 0.6, 60.0, r0)?,
        // beta below its threshold: the bound does not apply.
        constants_standard(mu, lip, 1.0, 1.0, 10.0, r0)?,
    ];
    for c in &all {
        println!(
            "{:<8} beta {:>5} (>= {:<8.4} {}) K0 {:>5} (>= {:<8.4} {}) C = {:<12.4} rate {}",
            c.theorem.name(),
            c.beta,
            c.beta_threshold,
            c.beta_valid(),
            c.k0,
            c.k0_threshold,
            c.k0_valid(),
            c.c_bound,
            c.rate
        );
    }
    let grid = checkpoint_grid(100_000);
    for c in all.iter().filter(|c| c.is_valid()) {
        let curve = bound_curve(c, &grid)?;
        let last = curve.values.len() - 1;
        println!("{:<8} bound at k=0: {:.3e}, at k=1e5: {:.3e}", c.theorem.name(), curve.values[0], curve.values[last]);
    }
    assert!(bound_curve(&all[3], &grid).is_err());
    Ok(())
}
