//! `sa-lab` command line. Exit codes: 0 success, 1 a check failed, 2 bad
//! usage or configuration.

pub mod suites;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{
    config_bound, ensemble_csv_string, fit_rate, reproduce_figure, run_ensemble_on, with_threads,
    CsvTable, EnsembleOptions, ExperimentConfig, FigureId, FigureOverrides, Manifest,
};
use crate::kv::fmt_f64;
use crate::noise::{noise_stream, NoiseModel};
use crate::rng::{purpose, SeedKey};
use crate::sa::checkpoint_grid;
use crate::theory::{bound_curve, constants_heavy, constants_lrd, constants_standard, Theorem};
use suites::{
    lemma_suite, noise_suite, u_moment_suite, NoiseSuiteOptions, SuiteReport, UMomentSuiteOptions,
};

#[derive(Parser, Debug)]
#[command(name = "sa-lab", version, about = "Stochastic approximation under heavy-tailed and long-range dependent noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the ensemble described by a config file and write its CSV.
    Simulate(SimulateArgs),
    /// Print theorem constants, validity flags and the bound curve.
    Bounds(BoundsArgs),
    /// Run verification suites; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Fit a log-log rate to one column of an ensemble CSV.
    Rate(RateArgs),
    /// Reproduce one figure's sweep.
    Figure(FigureArgs),
    /// Write raw noise samples as CSV.
    NoiseDump(NoiseDumpArgs),
}

#[derive(Args, Debug)]
struct ThreadArgs {
    /// Worker threads [default: available parallelism]
    #[arg(long, env = "SA_LAB_THREADS")]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn resolve(&self) -> usize {
        self.threads
            .filter(|&t| t > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Experiment file ([problem], [noise], [schedule], [run] sections)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of runs
    #[arg(long)]
    runs: Option<usize>,
    /// Override the horizon
    #[arg(long)]
    horizon: Option<usize>,
    /// Track the averaged-noise decomposition and check its identities
    #[arg(long)]
    diagnostics: bool,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremArg {
    Standard,
    Heavy,
    Lrd,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    /// Strong monotonicity constant
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Lipschitz constant
    #[arg(long, default_value_t = 1.0)]
    lip: f64,
    /// Stepsize numerator
    #[arg(long)]
    beta: f64,
    /// Stepsize offset
    #[arg(long)]
    k0: f64,
    /// Noise constant
    #[arg(long)]
    sigma: f64,
    /// Initial distance to the root
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    /// Moment order (heavy)
    #[arg(long)]
    p: Option<f64>,
    /// Covariance decay exponent (lrd)
    #[arg(long)]
    delta: Option<f64>,
    /// Last iteration of the printed curve
    #[arg(long, default_value_t = 100_000)]
    k_max: usize,
    /// Also write `k,bound` to this CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
    Noise,
    UMoments,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per averaged-noise check
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    /// Horizon of the averaged-noise checks
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    /// Last k of the stepsize-inequality sweep
    #[arg(long, default_value_t = 100_000)]
    lemma_k_max: usize,
    /// Only the zero-noise averaged-noise case
    #[arg(long)]
    smoke: bool,
    /// Negative control: compare fGn autocovariances against H + OFFSET
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    hurst_offset: f64,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args, Debug)]
struct RateArgs {
    /// Ensemble CSV
    #[arg(long)]
    input: PathBuf,
    /// Column to fit, e.g. moment_q1
    #[arg(long)]
    column: String,
    /// Smallest k in the fit [default: last k / 100]
    #[arg(long)]
    k_min: Option<usize>,
    /// Offset added to k before taking logs
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, value_parser = parse_figure)]
    id: FigureId,
    /// Output directory [default: figures/<id>]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    threads: ThreadArgs,
}

fn parse_figure(s: &str) -> std::result::Result<FigureId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseKind {
    Gaussian,
    Pareto,
    Stable,
    Fgn,
    Farima,
}

#[derive(Args, Debug)]
struct NoiseDumpArgs {
    #[arg(long, value_enum)]
    kind: NoiseKind,
    /// Standard deviation (gaussian)
    #[arg(long, default_value_t = 1.0)]
    std: f64,
    /// Tail index (pareto, stable)
    #[arg(long)]
    alpha: Option<f64>,
    /// Hurst index (fgn)
    #[arg(long)]
    hurst: Option<f64>,
    /// Memory parameter (farima)
    #[arg(long)]
    c: Option<f64>,
    /// Truncation length (farima)
    #[arg(long, default_value_t = 500)]
    trunc: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Number of time steps
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl NoiseDumpArgs {
    fn model(&self) -> Result<NoiseModel> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for this kind")))
        };
        let m = match self.kind {
            NoiseKind::Gaussian => NoiseModel::MdsGaussian { std: self.std },
            NoiseKind::Pareto => NoiseModel::ParetoCentered {
                alpha: need(self.alpha, "alpha")?,
                scale: self.scale,
            },
            NoiseKind::Stable => NoiseModel::SymAlphaStable {
                alpha: need(self.alpha, "alpha")?,
                scale: self.scale,
            },
            NoiseKind::Fgn => NoiseModel::Fgn {
                hurst: need(self.hurst, "hurst")?,
                scale: self.scale,
            },
            NoiseKind::Farima => NoiseModel::Farima {
                c: need(self.c, "c")?,
                scale: self.scale,
                trunc: self.trunc,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

/// What a subcommand concluded, separate from hard errors.
enum Outcome {
    Ok,
    ChecksFailed,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::TooManyFlagged { .. } => 1,
        _ => 2,
    }
}

/// Entry point of the `sa-lab` binary.
pub fn main() -> ExitCode {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::Verify(a) => verify(a),
        Command::Rate(a) => rate(a),
        Command::Figure(a) => figure(a),
        Command::NoiseDump(a) => noise_dump(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let start = Instant::now();
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        config.master_seed = s;
    }
    if let Some(r) = a.runs {
        config.n_runs = r;
    }
    if let Some(h) = a.horizon {
        config.horizon = h;
    }
    config.validate()?;
    let threads = a.threads.resolve();
    create_dir(&a.out)?;
    let instance = config.problem.build()?;
    let opts = EnsembleOptions { diagnostics: a.diagnostics };
    let stats = with_threads(threads, || run_ensemble_on(&config, &instance, &opts))??;
    let bound = config_bound(&config, &instance)?;

    let stem = a
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ensemble".into());
    let csv = a.out.join(format!("{stem}.csv"));
    let text = ensemble_csv_string(&stats, bound.as_ref())?;
    std::fs::write(&csv, text).map_err(|e| Error::io(&csv, e))?;
    let ini = a.out.join(format!("{stem}.resolved.ini"));
    config.save(&ini)?;

    let mut manifest = Manifest::new("simulate", config.master_seed, threads);
    manifest.config_text = config.to_text();
    manifest.outputs = vec![csv.clone(), ini];
    if !stats.flagged_runs.is_empty() {
        manifest.notes.push(format!(
            "{} of {} runs excluded as non-finite: {:?}",
            stats.flagged_run_count(),
            stats.n_runs,
            stats.flagged_runs
        ));
    }
    let mut outcome = Outcome::Ok;
    if let Some(d) = &stats.diagnostics {
        let line = format!(
            "diagnostics over {} runs: reconstruction {:.3e}, delta excess {:.3e}, form gap {:.3e}",
            d.runs, d.max_reconstruction, d.max_delta_excess, d.max_form_gap
        );
        println!("{line}");
        manifest.notes.push(line);
        if !d.holds() {
            outcome = Outcome::ChecksFailed;
        }
    }
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    manifest.write(&a.out)?;

    let last = stats.checkpoints.len() - 1;
    println!(
        "{} runs x {} steps, {} flagged; wrote {}",
        stats.n_runs,
        config.horizon,
        stats.flagged_run_count(),
        csv.display()
    );
    for (q, m) in stats.moment_orders.iter().zip(&stats.moments) {
        println!("final E|x_k - x*|^{} = {}", fmt_f64(*q), fmt_f64(m[last]));
    }
    if bound.is_none() {
        println!("no bound column: theorem constants invalid or not applicable");
    }
    Ok(outcome)
}

fn bounds(a: BoundsArgs) -> Result<Outcome> {
    let c = match a.theorem {
        TheoremArg::Standard => constants_standard(a.mu, a.lip, a.beta, a.sigma, a.k0, a.r0)?,
        TheoremArg::Heavy => {
            let p = a
                .p
                .ok_or_else(|| Error::InvalidParameter("--p is required for the heavy theorem".into()))?;
            constants_heavy(a.mu, a.lip, a.beta, a.sigma, p, a.k0, a.r0)?
        }
        TheoremArg::Lrd => {
            let d = a
                .delta
                .ok_or_else(|| Error::InvalidParameter("--delta is required for the lrd theorem".into()))?;
            constants_lrd(a.mu, a.lip, a.beta, a.sigma, d, a.k0, a.r0)?
        }
    };
    let theorem: Theorem = c.theorem;
    println!("theorem        {}", theorem.name());
    println!("beta           {}  (threshold {}, valid {})", fmt_f64(c.beta), fmt_f64(c.beta_threshold), c.beta_valid());
    println!("k0             {}  (threshold {}, valid {})", fmt_f64(c.k0), fmt_f64(c.k0_threshold), c.k0_valid());
    println!("constant       {}", fmt_f64(c.c_bound));
    println!("rate           {}", fmt_f64(c.rate));
    if !c.is_valid() {
        println!("constants invalid: the bound does not apply to this schedule");
        return Ok(Outcome::Ok);
    }
    let curve = bound_curve(&c, &checkpoint_grid(a.k_max))?;
    let mut text = String::from("k,bound\n");
    for (k, v) in curve.checkpoints.iter().zip(&curve.values) {
        text.push_str(&format!("{k},{}\n", fmt_f64(*v)));
    }
    print!("{text}");
    if let Some(path) = a.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            create_dir(dir)?;
        }
        std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut m = Manifest::new(format!("bounds --theorem {}", theorem.name()), 0, 1);
        m.config_text = format!("{c:?}");
        m.outputs = vec![path.clone()];
        m.write(dir)?;
    }
    Ok(Outcome::Ok)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let threads = a.threads.resolve();
    let key = SeedKey::new(a.seed);
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut reports: Vec<SuiteReport> = Vec::new();
    if want(Suite::Lemmas) {
        reports.push(lemma_suite(a.lemma_k_max));
        println!("{}", reports.last().unwrap());
    }
    if want(Suite::Noise) {
        let opts = NoiseSuiteOptions {
            hurst_offset: a.hurst_offset,
            ..NoiseSuiteOptions::default()
        };
        reports.push(with_threads(threads, || noise_suite(&opts, key.child(purpose::RUNS)))??);
        println!("{}", reports.last().unwrap());
    }
    if want(Suite::UMoments) {
        let opts = UMomentSuiteOptions {
            runs: a.runs,
            horizon: a.horizon,
            smoke: a.smoke,
        };
        reports.push(with_threads(threads, || u_moment_suite(&opts, key.child(purpose::BOOTSTRAP)))??);
        println!("{}", reports.last().unwrap());
    }
    let failed: usize = reports.iter().map(SuiteReport::failures).sum();
    println!("verify: {} suite(s), {failed} failure(s)", reports.len());
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn rate(a: RateArgs) -> Result<Outcome> {
    let table = CsvTable::read(&a.input)?;
    let origin = a.input.display().to_string();
    let ks = table.checkpoints().ok_or_else(|| Error::Config {
        path: origin.clone(),
        msg: "no `k` column".into(),
    })?;
    let values = table.column(&a.column).ok_or_else(|| Error::Config {
        path: origin.clone(),
        msg: format!("no column `{}` (have {})", a.column, table.header.join(", ")),
    })?;
    let k_min = a.k_min.unwrap_or_else(|| ks.last().copied().unwrap_or(0) / 100);
    let (slope, intercept, r2) = fit_rate(&ks, values, k_min, a.k0)?;
    println!("column     {}", a.column);
    println!("k_min      {k_min}");
    println!("slope      {slope:.6}");
    println!("intercept  {intercept:.6}");
    println!("r_squared  {r2:.6}");
    Ok(Outcome::Ok)
}

fn figure(a: FigureArgs) -> Result<Outcome> {
    let threads = a.threads.resolve();
    let out = a.out.unwrap_or_else(|| PathBuf::from("figures").join(a.id.name()));
    let overrides = FigureOverrides {
        runs: a.runs,
        horizon: a.horizon,
        seed: a.seed,
        values: None,
    };
    let report = with_threads(threads, || reproduce_figure(a.id, &out, &overrides, threads))??;
    println!("{:<8} {:>18} {:>10} {:>8}", a.id.parameter(), "final mean error", "slope", "flagged");
    for s in &report.sweeps {
        println!(
            "{:<8} {:>18.6e} {:>10} {:>8}",
            fmt_f64(s.value),
            s.final_mean_error,
            s.slope.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
            s.stats.flagged_run_count()
        );
    }
    println!(
        "ordering {}; wrote {} files to {}",
        if report.ordering_holds() { "as expected" } else { "NOT as expected" },
        report.outputs.len(),
        out.display()
    );
    Ok(Outcome::Ok)
}

fn noise_dump(a: NoiseDumpArgs) -> Result<Outcome> {
    let model = a.model()?;
    let mut stream = noise_stream(model, a.dim, a.n, SeedKey::new(a.seed).child(purpose::RUNS))?;
    let mut text = String::from("k");
    for i in 0..a.dim {
        text.push_str(&format!(",eta{i}"));
    }
    text.push('\n');
    let mut eta = vec![0.0; a.dim];
    let mut k = 0;
    while stream.next_into(&mut eta) {
        text.push_str(&k.to_string());
        for v in &eta {
            text.push(',');
            text.push_str(&fmt_f64(*v));
        }
        text.push('\n');
        k += 1;
    }
    match a.out {
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            create_dir(dir)?;
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            let mut m = Manifest::new(format!("noise-dump --kind {}", model.kind_name()), a.seed, 1);
            m.config_text = model.to_string();
            m.outputs = vec![path.clone()];
            m.write(dir)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
