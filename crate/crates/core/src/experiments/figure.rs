//! The four figure sweeps.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use super::config::{value_label, ExperimentConfig, ProblemSpec, DEFAULT_MU_LIP_PAIRS};
use super::csv::write_ensemble_csv;
use super::ensemble::{config_bound, run_ensemble_on, EnsembleOptions, EnsembleStats};
use super::manifest::Manifest;
use crate::error::{Error, Result};
use crate::kv::fmt_f64;
use crate::noise::NoiseModel;
use crate::operators::GameSpec;
use crate::stats::fit_rate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    /// Huber regression, Pareto noise, tail-index sweep.
    Fig1,
    /// Huber regression, fGn scaled by 20, Hurst sweep.
    Fig2,
    /// Power-control game, α-stable noise, tail-index sweep.
    Fig3a,
    /// Power-control game, FARIMA noise, memory sweep.
    Fig3b,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3a, FigureId::Fig3b];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
        }
    }

    /// Name of the swept noise parameter.
    pub fn parameter(&self) -> &'static str {
        match self {
            FigureId::Fig1 | FigureId::Fig3a => "alpha",
            FigureId::Fig2 => "hurst",
            FigureId::Fig3b => "c",
        }
    }

    pub fn sweep(&self) -> &'static [f64] {
        match self {
            FigureId::Fig1 => &[1.2, 1.4, 1.6, 1.8],
            FigureId::Fig2 => &[0.6, 0.7, 0.8, 0.9],
            FigureId::Fig3a => &[1.0, 1.4, 1.7, 2.0],
            FigureId::Fig3b => &[0.0, 0.15, 0.3, 0.45],
        }
    }

    pub fn noise(&self, value: f64) -> NoiseModel {
        match self {
            FigureId::Fig1 => NoiseModel::ParetoCentered { alpha: value, scale: 1.0 },
            FigureId::Fig2 => NoiseModel::Fgn { hurst: value, scale: 20.0 },
            FigureId::Fig3a => NoiseModel::SymAlphaStable { alpha: value, scale: 0.2 },
            FigureId::Fig3b => NoiseModel::Farima { c: value, scale: 0.2, trunc: 500 },
        }
    }

    pub fn problem(&self) -> ProblemSpec {
        match self {
            FigureId::Fig1 | FigureId::Fig2 => ProblemSpec::Huber {
                rows: 60,
                cols: 30,
                delta: 1.0,
                matrix_seed: 1,
            },
            FigureId::Fig3a | FigureId::Fig3b => ProblemSpec::PowerControl {
                game: GameSpec::default(),
                game_seed: 1,
                mu_lip_pairs: DEFAULT_MU_LIP_PAIRS,
            },
        }
    }

    /// Whether the figure also shows a single trajectory.
    pub fn has_single_run(&self) -> bool {
        matches!(self, FigureId::Fig1 | FigureId::Fig2)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure `{s}` (fig1|fig2|fig3a|fig3b)")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct FigureOverrides {
    pub runs: Option<usize>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    /// Replace the default sweep values.
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub value: f64,
    pub config: ExperimentConfig,
    pub stats: EnsembleStats,
    /// Mean error at the last checkpoint.
    pub final_mean_error: f64,
    /// Log-log slope of the mean error over `k ≥ horizon/100`.
    pub slope: Option<f64>,
    pub csv: PathBuf,
}

#[derive(Clone, Debug)]
pub struct FigureReport {
    pub figure: FigureId,
    pub sweeps: Vec<SweepResult>,
    pub outputs: Vec<PathBuf>,
}

impl FigureReport {
    pub fn final_errors(&self) -> Vec<f64> {
        self.sweeps.iter().map(|s| s.final_mean_error).collect()
    }

    /// The ordering the figure is meant to show: heavier tails (smaller α)
    /// or longer memory (larger H or c) give larger final error.
    pub fn ordering_holds(&self) -> bool {
        let e = self.final_errors();
        match self.figure {
            FigureId::Fig1 | FigureId::Fig3a => e.windows(2).all(|w| w[0] > w[1]),
            FigureId::Fig2 | FigureId::Fig3b => e.windows(2).all(|w| w[0] < w[1]),
        }
    }

    pub fn sweep(&self, value: f64) -> Option<&SweepResult> {
        self.sweeps.iter().find(|s| s.value == value)
    }
}

/// Config for one sweep value, before overrides.
pub fn figure_config(figure: FigureId, value: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(figure.problem(), figure.noise(value));
    c.projected = matches!(figure, FigureId::Fig3a | FigureId::Fig3b);
    c
}

fn apply(c: &mut ExperimentConfig, o: &FigureOverrides) {
    if let Some(r) = o.runs {
        c.n_runs = r;
    }
    if let Some(h) = o.horizon {
        c.horizon = h;
    }
    if let Some(s) = o.seed {
        c.master_seed = s;
    }
}

fn mean_slope(stats: &EnsembleStats, config: &ExperimentConfig) -> Option<f64> {
    let m = stats.moment(1.0)?;
    fit_rate(&stats.checkpoints, m, config.horizon / 100, config.schedule.k0)
        .ok()
        .map(|f| f.0)
}

/// Runs every sweep value of `figure` on the current rayon pool and writes
/// `<fig>_<param><value>.csv` (+ `.ini`), a `<fig>_single_...` CSV for the
/// single-trajectory panels, `<fig>_summary.csv` and the manifest into `out_dir`.
pub fn reproduce_figure(
    figure: FigureId,
    out_dir: &Path,
    overrides: &FigureOverrides,
    threads: usize,
) -> Result<FigureReport> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let instance = figure.problem().build()?;
    let values = overrides.values.clone().unwrap_or_else(|| figure.sweep().to_vec());
    let mut manifest = Manifest::new(format!("figure --id {figure}"), 0, threads);
    let mut outputs = Vec::new();
    let mut sweeps = Vec::new();
    let mut summary = format!("{},final_mean_error,slope,flagged_runs\n", figure.parameter());

    for &value in &values {
        let mut config = figure_config(figure, value);
        apply(&mut config, overrides);
        manifest.seed = config.master_seed;
        let stem = format!("{figure}_{}{}", figure.parameter(), value_label(value));
        let stats = run_ensemble_on(&config, &instance, &EnsembleOptions::default())?;
        let bound = config_bound(&config, &instance)?;
        let csv = out_dir.join(format!("{stem}.csv"));
        write_ensemble_csv(&stats, bound.as_ref(), &csv)?;
        let ini = out_dir.join(format!("{stem}.ini"));
        config.save(&ini)?;
        manifest.config_text.push_str(&config.to_text());
        outputs.extend([csv.clone(), ini]);

        if figure.has_single_run() {
            let mut single = config.clone();
            single.n_runs = 1;
            let s = run_ensemble_on(&single, &instance, &EnsembleOptions::default())?;
            let path = out_dir.join(format!("{figure}_single_{}{}.csv", figure.parameter(), value_label(value)));
            write_ensemble_csv(&s, None, &path)?;
            outputs.push(path);
        }

        let final_mean_error = *stats.moment(1.0).and_then(|m| m.last()).unwrap_or(&f64::NAN);
        let slope = mean_slope(&stats, &config);
        summary.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(value),
            fmt_f64(final_mean_error),
            slope.map(fmt_f64).unwrap_or_else(|| "nan".into()),
            stats.flagged_run_count()
        ));
        if !stats.flagged_runs.is_empty() {
            manifest
                .notes
                .push(format!("{stem}: {} runs excluded as non-finite", stats.flagged_run_count()));
        }
        sweeps.push(SweepResult {
            value,
            config,
            stats,
            final_mean_error,
            slope,
            csv,
        });
    }

    let summary_path = out_dir.join(format!("{figure}_summary.csv"));
    std::fs::write(&summary_path, summary).map_err(|e| Error::io(&summary_path, e))?;
    outputs.push(summary_path);
    manifest.outputs = outputs.clone();
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    outputs.push(manifest.write(out_dir)?);
    Ok(FigureReport {
        figure,
        sweeps,
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig4".parse::<FigureId>().is_err());
    }

    #[test]
    fn configs_are_valid() {
        for f in FigureId::ALL {
            for &v in f.sweep() {
                figure_config(f, v).validate().unwrap();
            }
        }
    }

    #[test]
    fn small_fig1_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let o = FigureOverrides {
            runs: Some(20),
            horizon: Some(300),
            seed: Some(5),
            values: Some(vec![1.5, 1.8]),
        };
        let r = reproduce_figure(FigureId::Fig1, dir.path(), &o, 1).unwrap();
        assert_eq!(r.sweeps.len(), 2);
        for name in [
            "fig1_alpha1.5.csv",
            "fig1_alpha1.5.ini",
            "fig1_single_alpha1.8.csv",
            "fig1_summary.csv",
            "manifest.json",
        ] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let back = ExperimentConfig::load(&dir.path().join("fig1_alpha1.8.ini")).unwrap();
        assert_eq!(back, r.sweeps[1].config);
    }
}
