//! Experiment files.
//!
//! ```text
//! [problem]
//! kind = huber            # huber | power_control | linear
//! rows = 60
//! cols = 30
//! delta = 1.0
//! matrix_seed = 1
//!
//! [noise]
//! kind = pareto           # gaussian | pareto | stable | fgn | farima
//! alpha = 1.5
//! scale = 1.0
//!
//! [schedule]
//! beta = 1.0
//! k0 = 1.0
//!
//! [run]
//! horizon = 100000
//! runs = 1000
//! moment_orders = 1
//! quantiles = 0.1 0.9
//! seed = 1
//! projected = false
//! start = unit_offset     # unit_offset | origin
//! ```
//!
//! Keys per problem kind: `huber` takes rows, cols, delta (`inf` for plain
//! least squares), matrix_seed. `power_control` takes players, channels,
//! direct_gain_min/max, cross_gain_min/max, noise_floor, game_seed,
//! mu_lip_pairs. `linear` takes dim and optional row-major `matrix`
//! (default identity) and `rhs` (default zero), for `F(x) = Mx − rhs`.
//!
//! Keys per noise kind: gaussian `std`; pareto and stable `alpha`, `scale`;
//! fgn `hurst`, `scale`; farima `c`, `scale`, `trunc`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kv::{fmt_f64, fmt_f64_list, KvDoc, KvWriter};
use crate::noise::NoiseModel;
use crate::operators::{
    GameSpec, HuberLsqProblem, LinearOperator, PowerControlGame, ProblemInstance,
};
use crate::rng::{purpose, SeedKey};
use crate::sa::StepSchedule;

/// Number of feasible pairs used to estimate a game's μ and L.
pub const DEFAULT_MU_LIP_PAIRS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Huber {
        rows: usize,
        cols: usize,
        delta: f64,
        matrix_seed: u64,
    },
    PowerControl {
        game: GameSpec,
        game_seed: u64,
        mu_lip_pairs: usize,
    },
    Linear {
        dim: usize,
        matrix: Option<Vec<f64>>,
        rhs: Option<Vec<f64>>,
    },
}

impl ProblemSpec {
    /// `F(x) = x` in dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        ProblemSpec::Linear {
            dim,
            matrix: None,
            rhs: None,
        }
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        match self {
            ProblemSpec::Huber {
                rows,
                cols,
                delta,
                matrix_seed,
            } => ProblemInstance::huber(HuberLsqProblem::random(
                *rows,
                *cols,
                *delta,
                SeedKey::new(*matrix_seed),
            )?),
            ProblemSpec::PowerControl {
                game,
                game_seed,
                mu_lip_pairs,
            } => {
                let key = SeedKey::new(*game_seed);
                let g = PowerControlGame::random(game, key.child(purpose::INSTANCE))?;
                ProblemInstance::power_control(g, *mu_lip_pairs, key.child(purpose::MU_LIP))
            }
            ProblemSpec::Linear { dim, matrix, rhs } => {
                let m = match matrix {
                    Some(m) => m.clone(),
                    None => LinearOperator::identity(*dim).matrix().to_vec(),
                };
                let r = rhs.clone().unwrap_or_else(|| vec![0.0; *dim]);
                ProblemInstance::linear(LinearOperator::new(*dim, m, r)?)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartPoint {
    /// `x* + 1/√d · 1`, at unit distance from the root.
    UnitOffset,
    Origin,
}

impl StartPoint {
    pub fn point(&self, instance: &ProblemInstance) -> Vec<f64> {
        match self {
            StartPoint::UnitOffset => instance.unit_offset_start(),
            StartPoint::Origin => vec![0.0; instance.dim()],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            StartPoint::UnitOffset => "unit_offset",
            StartPoint::Origin => "origin",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub noise: NoiseModel,
    pub schedule: StepSchedule,
    pub horizon: usize,
    pub n_runs: usize,
    /// Orders `q` of the reported moments `E‖x_k − x*‖^q`.
    pub moment_orders: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub master_seed: u64,
    pub projected: bool,
    pub start: StartPoint,
}

impl ExperimentConfig {
    /// Config with the defaults used across the figures: `β_k = 1/(k+1)`,
    /// horizon 1e5, 1000 runs, mean error and the 10%/90% quantiles.
    pub fn new(problem: ProblemSpec, noise: NoiseModel) -> Self {
        let projected = matches!(problem, ProblemSpec::PowerControl { .. });
        ExperimentConfig {
            problem,
            noise,
            schedule: StepSchedule { beta: 1.0, k0: 1.0 },
            horizon: 100_000,
            n_runs: 1000,
            moment_orders: vec![1.0],
            quantiles: vec![0.1, 0.9],
            master_seed: 1,
            projected,
            start: StartPoint::UnitOffset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        StepSchedule::new(self.schedule.beta, self.schedule.k0)?;
        if self.horizon == 0 || self.n_runs == 0 {
            return Err(Error::InvalidParameter("horizon and runs must be >= 1".into()));
        }
        // Projection onto a bounded set keeps every error moment finite.
        let bounded = self.projected && matches!(self.problem, ProblemSpec::PowerControl { .. });
        for &q in &self.moment_orders {
            if !(1.0..=2.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("moment order {q} outside [1,2]")));
            }
            if !bounded && q >= self.noise.moment_ceiling() {
                return Err(Error::InvalidParameter(format!(
                    "moment order {q} is infinite under {}",
                    self.noise
                )));
            }
        }
        if let Some(&p) = self.quantiles.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!("quantile level {p} outside [0,1]")));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut w = KvWriter::new();
        match &self.problem {
            ProblemSpec::Huber {
                rows,
                cols,
                delta,
                matrix_seed,
            } => {
                w.set("problem", "kind", "huber")
                    .set("problem", "rows", rows.to_string())
                    .set("problem", "cols", cols.to_string())
                    .set_f64("problem", "delta", *delta)
                    .set("problem", "matrix_seed", matrix_seed.to_string());
            }
            ProblemSpec::PowerControl {
                game,
                game_seed,
                mu_lip_pairs,
            } => {
                w.set("problem", "kind", "power_control")
                    .set("problem", "players", game.players.to_string())
                    .set("problem", "channels", game.channels.to_string())
                    .set_f64("problem", "direct_gain_min", game.direct_range.0)
                    .set_f64("problem", "direct_gain_max", game.direct_range.1)
                    .set_f64("problem", "cross_gain_min", game.cross_range.0)
                    .set_f64("problem", "cross_gain_max", game.cross_range.1)
                    .set_f64("problem", "noise_floor", game.noise_floor)
                    .set("problem", "game_seed", game_seed.to_string())
                    .set("problem", "mu_lip_pairs", mu_lip_pairs.to_string());
            }
            ProblemSpec::Linear { dim, matrix, rhs } => {
                w.set("problem", "kind", "linear")
                    .set("problem", "dim", dim.to_string());
                if let Some(m) = matrix {
                    w.set_f64s("problem", "matrix", m);
                }
                if let Some(r) = rhs {
                    w.set_f64s("problem", "rhs", r);
                }
            }
        }
        w.set("noise", "kind", self.noise.kind_name());
        match self.noise {
            NoiseModel::MdsGaussian { std } => {
                w.set_f64("noise", "std", std);
            }
            NoiseModel::ParetoCentered { alpha, scale }
            | NoiseModel::SymAlphaStable { alpha, scale } => {
                w.set_f64("noise", "alpha", alpha).set_f64("noise", "scale", scale);
            }
            NoiseModel::Fgn { hurst, scale } => {
                w.set_f64("noise", "hurst", hurst).set_f64("noise", "scale", scale);
            }
            NoiseModel::Farima { c, scale, trunc } => {
                w.set_f64("noise", "c", c)
                    .set_f64("noise", "scale", scale)
                    .set("noise", "trunc", trunc.to_string());
            }
        }
        w.set_f64("schedule", "beta", self.schedule.beta)
            .set_f64("schedule", "k0", self.schedule.k0)
            .set("run", "horizon", self.horizon.to_string())
            .set("run", "runs", self.n_runs.to_string())
            .set_f64s("run", "moment_orders", &self.moment_orders)
            .set("run", "quantiles", fmt_f64_list(&self.quantiles))
            .set("run", "seed", self.master_seed.to_string())
            .set("run", "projected", self.projected.to_string())
            .set("run", "start", self.start.name());
        w.render()
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let doc = KvDoc::parse(text, origin)?;
        let problem = match doc.req_str("problem", "kind")? {
            "huber" => ProblemSpec::Huber {
                rows: doc.req("problem", "rows")?,
                cols: doc.req("problem", "cols")?,
                delta: doc.req("problem", "delta")?,
                matrix_seed: doc.req("problem", "matrix_seed")?,
            },
            "power_control" => {
                let d = GameSpec::default();
                let game = GameSpec {
                    players: doc.opt("problem", "players")?.unwrap_or(d.players),
                    channels: doc.opt("problem", "channels")?.unwrap_or(d.channels),
                    direct_range: (
                        doc.opt("problem", "direct_gain_min")?.unwrap_or(d.direct_range.0),
                        doc.opt("problem", "direct_gain_max")?.unwrap_or(d.direct_range.1),
                    ),
                    cross_range: (
                        doc.opt("problem", "cross_gain_min")?.unwrap_or(d.cross_range.0),
                        doc.opt("problem", "cross_gain_max")?.unwrap_or(d.cross_range.1),
                    ),
                    noise_floor: doc.opt("problem", "noise_floor")?.unwrap_or(d.noise_floor),
                };
                ProblemSpec::PowerControl {
                    game,
                    game_seed: doc.req("problem", "game_seed")?,
                    mu_lip_pairs: doc
                        .opt("problem", "mu_lip_pairs")?
                        .unwrap_or(DEFAULT_MU_LIP_PAIRS),
                }
            }
            "linear" => ProblemSpec::Linear {
                dim: doc.req("problem", "dim")?,
                matrix: doc.list("problem", "matrix")?,
                rhs: doc.list("problem", "rhs")?,
            },
            other => return Err(doc.err(format!("unknown problem kind `{other}`"))),
        };
        let noise = match doc.req_str("noise", "kind")? {
            "gaussian" => NoiseModel::MdsGaussian {
                std: doc.req("noise", "std")?,
            },
            "pareto" => NoiseModel::ParetoCentered {
                alpha: doc.req("noise", "alpha")?,
                scale: doc.req("noise", "scale")?,
            },
            "stable" => NoiseModel::SymAlphaStable {
                alpha: doc.req("noise", "alpha")?,
                scale: doc.req("noise", "scale")?,
            },
            "fgn" => NoiseModel::Fgn {
                hurst: doc.req("noise", "hurst")?,
                scale: doc.req("noise", "scale")?,
            },
            "farima" => NoiseModel::Farima {
                c: doc.req("noise", "c")?,
                scale: doc.req("noise", "scale")?,
                trunc: doc.opt("noise", "trunc")?.unwrap_or(500),
            },
            other => return Err(doc.err(format!("unknown noise kind `{other}`"))),
        };
        let schedule = StepSchedule {
            beta: doc.req("schedule", "beta")?,
            k0: doc.req("schedule", "k0")?,
        };
        let start = match doc.raw("run", "start").unwrap_or("unit_offset") {
            "unit_offset" => StartPoint::UnitOffset,
            "origin" => StartPoint::Origin,
            other => return Err(doc.err(format!("unknown start `{other}`"))),
        };
        let default_projected = matches!(problem, ProblemSpec::PowerControl { .. });
        let config = ExperimentConfig {
            problem,
            noise,
            schedule,
            horizon: doc.req("run", "horizon")?,
            n_runs: doc.req("run", "runs")?,
            moment_orders: doc.list("run", "moment_orders")?.unwrap_or_else(|| vec![1.0]),
            quantiles: doc.list("run", "quantiles")?.unwrap_or_else(|| vec![0.1, 0.9]),
            master_seed: doc.opt("run", "seed")?.unwrap_or(1),
            projected: doc.opt("run", "projected")?.unwrap_or(default_projected),
            start,
        };
        config.validate().map_err(|e| doc.err(e.to_string()))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_text(&text, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Short label for a sweep value in file names, e.g. `1.5` → `"1.5"`.
pub(crate) fn value_label(v: f64) -> String {
    let s = fmt_f64(v);
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}
