//! One SA trajectory with the averaged-noise decomposition tracked alongside.
//!
//! cargo run --release --example single_trajectory

use sa_lab::noise::{noise_stream, NoiseModel};
use sa_lab::operators::{HuberLsqProblem, ProblemInstance};
use sa_lab::rng::SeedKey;
use sa_lab::sa::{run_sa, SaOptions, StepSchedule};

fn main() -> sa_lab::Result<()> {
    let inst = ProblemInstance::huber(HuberLsqProblem::random(60, 30, 1.0, SeedKey::new(1))?)?;
    let beta = 1.0;
    // Smallest offset with beta_0 / zeta <= 1, needed for the decomposition.
    let k0 = (beta * inst.lip() * inst.lip() / inst.mu()).ceil();
    let schedule = StepSchedule::new(beta, k0)?;
    let horizon = 50_000;
    let model = NoiseModel::ParetoCentered { alpha: 1.6, scale: 1.0 };
    let mut noise = noise_stream(model, inst.dim(), horizon, SeedKey::new(7))?;
    let opts = SaOptions {
        diagnostics: true,
        ..SaOptions::default()
    };
    let t = run_sa(&inst, &mut noise, &schedule, horizon, &inst.unit_offset_start(), &opts)?;
    let d = t.diagnostics.as_ref().unwrap();
    println!("schedule beta = {beta}, K0 = {k0}; {model}");
    println!("{:>7} {:>12} {:>12} {:>12} {:>12}", "k", "|x - x*|", "|U|", "|z - x*|", "|Delta|");
    for (i, k) in t.checkpoints.iter().enumerate().step_by(4) {
        println!(
            "{k:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            t.errors[i], d.u_norm[i], d.z_error[i], d.delta_norm[i]
        );
    }
    println!(
        "worst residuals: reconstruction {:.1e}, |Delta| - |U| {:.1e}, update forms {:.1e}",
        d.max_reconstruction, d.max_delta_excess, d.max_form_gap
    );
    Ok(())
}
