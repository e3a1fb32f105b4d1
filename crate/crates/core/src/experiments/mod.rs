//! Seeded Monte Carlo ensembles, figure sweeps and their CSV output.

mod config;
mod csv;
mod ensemble;
mod figure;
mod manifest;

pub use crate::stats::fit_rate;
pub use config::{ExperimentConfig, ProblemSpec, StartPoint, DEFAULT_MU_LIP_PAIRS};
pub use csv::{ensemble_csv_string, write_ensemble_csv, CsvTable};
pub use ensemble::{
    config_bound, noise_constant, run_ensemble, run_ensemble_on, theorem_constants,
    theorem_moment_order, with_threads, DiagnosticSummary, EnsembleOptions, EnsembleStats,
    BOOTSTRAP_RESAMPLES, SIGMA_SAMPLES,
};
pub use figure::{
    figure_config, reproduce_figure, FigureId, FigureOverrides, FigureReport, SweepResult,
};
pub use manifest::{sha256_hex, Manifest, MANIFEST_FILE};
