//! Verification suites behind `sa-lab verify`.

use std::fmt;

use rayon::prelude::*;

use crate::error::Result;
use crate::noise::{
    farima_coefficients, fgn_autocovariance, noise_stream, pareto_abs_moment, FgnPlan, NoiseModel,
};
use crate::rng::{purpose, SeedKey};
use crate::sa::StepSchedule;
use crate::stats::{autocovariance_zero_mean, mean, std_error, variance};
use crate::theory::{
    lemma_aux1_check, lemma_aux2_check, verify_u_moment_heavy, verify_u_moment_lrd, AuxReport,
    UMomentReport, UMomentSetup,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions of the checked statement do not hold for this case.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckRow {
    pub check: String,
    pub detail: String,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, rows: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, detail: impl Into<String>, pass: bool) {
        self.rows.push(CheckRow {
            check: check.into(),
            detail: detail.into(),
            status: if pass { Status::Pass } else { Status::Fail },
        });
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn skipped(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Skipped).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
        writeln!(f, "== suite {} ==", self.name)?;
        for r in &self.rows {
            writeln!(f, "{:<4}  {:<w$}  {}", r.status, r.check, r.detail)?;
        }
        write!(
            f,
            "{}: {} checks, {} failed, {} skipped",
            self.name,
            self.rows.len(),
            self.failures(),
            self.skipped()
        )
    }
}

fn aux_row(report: &mut SuiteReport, name: String, r: AuxReport) {
    match r.precondition_failure {
        Some(why) => report.rows.push(CheckRow {
            check: name,
            detail: format!("precondition: {why}"),
            status: Status::Skipped,
        }),
        None => {
            let detail = format!(
                "violations {} max ratio {:.6} at k={}",
                r.violations, r.max_ratio, r.tightest_k
            );
            report.push(name, detail, r.violations == 0);
        }
    }
}

/// Both stepsize inequalities over `a ∈ {0.5, 1, 2}`, `φ ∈ {1.1, 2, 4}/a`,
/// `K0 = ⌈aφ⌉ + 1` and, for the recursion, `e ∈ {1.2, 1.5, 2}`.
pub fn lemma_suite(k_max: usize) -> SuiteReport {
    let mut report = SuiteReport::new("lemmas");
    for a in [0.5f64, 1.0, 2.0] {
        for m in [1.1, 2.0, 4.0] {
            let phi = m / a;
            let k0 = (a * phi).ceil() + 1.0;
            aux_row(
                &mut report,
                format!("product a={a} phi={phi:.4} K0={k0}"),
                lemma_aux1_check(a, phi, k0, k_max),
            );
            for e in [1.2, 1.5, 2.0] {
                aux_row(
                    &mut report,
                    format!("recursion a={a} phi={phi:.4} K0={k0} e={e}"),
                    lemma_aux2_check(a, 1.0, phi, e, k0, k_max),
                );
            }
        }
    }
    report
}

pub const FGN_HURSTS: [f64; 3] = [0.55, 0.7, 0.9];
pub const FGN_LAGS: [usize; 6] = [0, 1, 2, 4, 8, 16];

#[derive(Clone, Copy, Debug)]
pub struct NoiseSuiteOptions {
    pub fgn_paths: usize,
    pub fgn_len: usize,
    pub samples: usize,
    /// Negative control: compare fGn autocovariances against the closed form
    /// at `H + hurst_offset` instead of the generating `H`.
    pub hurst_offset: f64,
}

impl Default for NoiseSuiteOptions {
    fn default() -> Self {
        NoiseSuiteOptions {
            fgn_paths: 200,
            fgn_len: 1 << 15,
            samples: 1_000_000,
            hurst_offset: 0.0,
        }
    }
}

/// fGn autocovariance against the closed form (3 SE across paths), α-stable
/// at `α = 2` against variance `2σ²` (±3%), FARIMA at `c = 0` against white
/// noise.
pub fn noise_suite(opts: &NoiseSuiteOptions, key: SeedKey) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("noise");
    let key = key.child(purpose::VERIFY);
    let max_lag = *FGN_LAGS.last().unwrap();
    for (hi, &h) in FGN_HURSTS.iter().enumerate() {
        let plan = FgnPlan::new(h, opts.fgn_len)?;
        let hkey = key.child(hi as u64);
        let acfs: Vec<Vec<f64>> = (0..opts.fgn_paths)
            .into_par_iter()
            .map(|i| {
                let path = plan.generate(1.0, &mut hkey.child(i as u64).rng());
                autocovariance_zero_mean(&path, max_lag)
            })
            .collect();
        let claimed = h + opts.hurst_offset;
        for &lag in &FGN_LAGS {
            let col: Vec<f64> = acfs.iter().map(|a| a[lag]).collect();
            let (m, se) = (mean(&col), std_error(&col));
            let exact = fgn_autocovariance(claimed, lag);
            let z = (m - exact).abs() / se;
            report.push(
                format!("fgn H={claimed} lag {lag}"),
                format!("empirical {m:.5} exact {exact:.5} ({z:.2} SE)"),
                z <= 3.0,
            );
        }
    }

    let sigma = 1.0;
    let mut s = noise_stream(
        NoiseModel::SymAlphaStable { alpha: 2.0, scale: sigma },
        1,
        opts.samples,
        key.child(10),
    )?;
    let draws: Vec<f64> = (0..opts.samples).map(|_| s.next_vec().unwrap()[0]).collect();
    let v = variance(&draws);
    let rel = v / (2.0 * sigma * sigma) - 1.0;
    report.push(
        "stable alpha=2 variance",
        format!("{v:.5} vs {:.5} ({:+.2}%)", 2.0 * sigma * sigma, 100.0 * rel),
        rel.abs() <= 0.03,
    );

    let coeffs = farima_coefficients(0.0, 500);
    let white_weights = coeffs[0] == 1.0 && coeffs[1..].iter().all(|&c| c == 0.0);
    report.push(
        "farima c=0 weights",
        format!("psi_0 = {}, {} nonzero tail weights", coeffs[0], coeffs[1..].iter().filter(|&&c| c != 0.0).count()),
        white_weights,
    );
    let mut s = noise_stream(
        NoiseModel::Farima { c: 0.0, scale: 1.0, trunc: 500 },
        1,
        opts.samples,
        key.child(11),
    )?;
    let draws: Vec<f64> = (0..opts.samples).map(|_| s.next_vec().unwrap()[0]).collect();
    let acf = autocovariance_zero_mean(&draws, 8);
    let var_ok = (acf[0] - 1.0).abs() <= 0.03;
    // Lag-h sample covariance of white noise has SE ≈ 1/√n.
    let tol = 4.0 / (opts.samples as f64).sqrt();
    let worst = acf[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    report.push(
        "farima c=0 autocovariance",
        format!("var {:.5}, max |gamma(1..8)| {worst:.5} (tol {tol:.5})", acf[0]),
        var_ok && worst <= tol,
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug)]
pub struct UMomentSuiteOptions {
    pub runs: usize,
    pub horizon: usize,
    /// Only the zero-noise case.
    pub smoke: bool,
}

fn u_row(report: &mut SuiteReport, r: &UMomentReport, case: &str) {
    let slope = r.slope.map(|s| format!("{s:.3}")).unwrap_or_else(|| "n/a".into());
    let detail = format!(
        "max empirical/bound {:.4}, bound violations {}, slope {slope} (allowed [{:.2}, {:.2}])",
        r.max_ratio(),
        r.rows.iter().filter(|row| !row.pass).count(),
        r.slope_range.0,
        r.slope_range.1
    );
    report.push(format!("{} {case}", r.label), detail, r.passed());
}

/// Averaged-noise moment bounds on `F(x) = x` with `β = K0 = 4`: Pareto
/// `α = 1.5` at `p = 1.4` and fGn `H = 0.7` (`δ = 0.6`), plus a zero-noise
/// case.
pub fn u_moment_suite(opts: &UMomentSuiteOptions, key: SeedKey) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("u-moments");
    let base = UMomentSetup {
        model: NoiseModel::MdsGaussian { std: 0.0 },
        dim: 1,
        schedule: StepSchedule::new(4.0, 4.0)?,
        mu: 1.0,
        lip: 1.0,
        sigma: 0.0,
        n_runs: opts.runs.max(2),
        horizon: opts.horizon,
    };
    let key = key.child(purpose::VERIFY);
    u_row(&mut report, &verify_u_moment_heavy(&base, 1.5, key.child(0))?, "zero noise");
    u_row(&mut report, &verify_u_moment_lrd(&base, 0.6, key.child(1))?, "zero noise");
    if opts.smoke {
        return Ok(report);
    }

    let (alpha, p) = (1.5, 1.4);
    let heavy = UMomentSetup {
        model: NoiseModel::ParetoCentered { alpha, scale: 1.0 },
        sigma: pareto_abs_moment(alpha, 1.0, p).powf(1.0 / p),
        ..base.clone()
    };
    u_row(
        &mut report,
        &verify_u_moment_heavy(&heavy, p, key.child(2))?,
        &format!("pareto alpha={alpha} p={p}"),
    );

    // Scalar fGn: σ² = max_h γ(h)(1+h)^δ from the closed form.
    let (hurst, delta) = (0.7, 0.6);
    let sigma2 = (0..=1000usize)
        .map(|h| fgn_autocovariance(hurst, h).abs() * (1.0 + h as f64).powf(delta))
        .fold(0.0, f64::max);
    let lrd = UMomentSetup {
        model: NoiseModel::Fgn { hurst, scale: 1.0 },
        sigma: sigma2.sqrt(),
        ..base
    };
    u_row(
        &mut report,
        &verify_u_moment_lrd(&lrd, delta, key.child(3))?,
        &format!("fgn H={hurst} delta={delta}"),
    );
    Ok(report)
}
