//! The three operator families: a linear map, Huber regression and the
//! power-control game.
//!
//! cargo run --release --example problems

use sa_lab::operators::{GameSpec, HuberLsqProblem, LinearOperator, PowerControlGame, ProblemInstance};
use sa_lab::rng::{purpose, SeedKey};

fn describe(name: &str, inst: &ProblemInstance) -> sa_lab::Result<()> {
    let root = inst.root();
    // Natural residual x* − Π(x* − F(x*)); equals F(x*) without constraints.
    let f = inst.operator().apply(root)?;
    let mut y: Vec<f64> = root.iter().zip(&f).map(|(x, g)| x - g).collect();
    inst.projection().apply_in_place(&mut y);
    let r = root.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    println!(
        "{name:<14} d = {:>3}  mu = {:.4}  L = {:.4}  residual = {r:.1e}  projected: {}",
        inst.dim(),
        inst.mu(),
        inst.lip(),
        !inst.projection().is_identity()
    );
    Ok(())
}

fn main() -> sa_lab::Result<()> {
    // F(x) = Mx − b with a non-symmetric, strongly monotone M.
    let lin = LinearOperator::new(2, vec![2.0, 1.0, -1.0, 2.0], vec![1.0, -3.0])?;
    describe("linear", &ProblemInstance::linear(lin)?)?;

    let huber = HuberLsqProblem::random(60, 30, 1.0, SeedKey::new(1))?;
    describe("huber", &ProblemInstance::huber(huber)?)?;

    let key = SeedKey::new(1);
    let game = PowerControlGame::random(&GameSpec::default(), key.child(purpose::INSTANCE))?;
    let inst = ProblemInstance::power_control(game, 20_000, key.child(purpose::MU_LIP))?;
    describe("power control", &inst)?;
    let p = inst.root();
    println!("equilibrium powers of player 0: {:?}", p[..4].iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    Ok(())
}
