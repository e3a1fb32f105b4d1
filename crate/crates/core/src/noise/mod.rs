//! Noise models: i.i.d. Gaussian, heavy-tailed (centered Pareto, symmetric
//! α-stable) and long-range dependent (fractional Gaussian noise,
//! FARIMA(0,c,0)). Vector noise is `d` independent scalar copies, one RNG
//! stream per coordinate.

mod farima;
mod fgn;
mod heavy;

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};

pub use farima::{farima_coefficients, farima_generate, FarimaPlan};
pub use fgn::{fgn_autocovariance, fgn_generate, FgnPlan};
pub use heavy::{pareto_abs_moment, pareto_mean, sample_pareto_centered, sample_sym_alpha_stable};

use crate::error::{Error, Result};
use crate::rng::{SaRng, SeedKey};
use crate::stats::autocovariance_zero_mean;

/// Default cap on pre-generated LRD samples (`d × horizon`) per stream.
pub const DEFAULT_LRD_SAMPLE_BUDGET: usize = 1 << 27;

/// Largest lag scanned when estimating the LRD envelope constant.
pub const LRD_ENVELOPE_MAX_LAG: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    MdsGaussian { std: f64 },
    ParetoCentered { alpha: f64, scale: f64 },
    SymAlphaStable { alpha: f64, scale: f64 },
    Fgn { hurst: f64, scale: f64 },
    Farima { c: f64, scale: f64, trunc: usize },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            NoiseModel::MdsGaussian { std } if !(std >= 0.0 && std.is_finite()) => {
                bad(format!("gaussian std {std} must be finite and >= 0"))
            }
            NoiseModel::ParetoCentered { alpha, .. } if !(alpha > 1.0 && alpha < 2.0) => {
                bad(format!("pareto alpha {alpha} outside (1,2)"))
            }
            NoiseModel::SymAlphaStable { alpha, .. } if !(alpha > 0.0 && alpha <= 2.0) => {
                bad(format!("stable alpha {alpha} outside (0,2]"))
            }
            NoiseModel::Fgn { hurst, .. } if !(hurst > 0.0 && hurst < 1.0) => {
                bad(format!("hurst {hurst} outside (0,1)"))
            }
            NoiseModel::Farima { c, .. } if !(0.0..0.5).contains(&c) => {
                bad(format!("FARIMA c {c} outside [0,0.5)"))
            }
            NoiseModel::ParetoCentered { scale, .. }
            | NoiseModel::SymAlphaStable { scale, .. }
            | NoiseModel::Fgn { scale, .. }
            | NoiseModel::Farima { scale, .. }
                if !(scale > 0.0 && scale.is_finite()) =>
            {
                bad(format!("noise scale {scale} must be finite and > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseModel::MdsGaussian { .. } => "gaussian",
            NoiseModel::ParetoCentered { .. } => "pareto",
            NoiseModel::SymAlphaStable { .. } => "stable",
            NoiseModel::Fgn { .. } => "fgn",
            NoiseModel::Farima { .. } => "farima",
        }
    }

    /// Infinite variance (α-stable at `α = 2` is Gaussian and does not count).
    pub fn is_heavy_tailed(&self) -> bool {
        match *self {
            NoiseModel::ParetoCentered { .. } => true,
            NoiseModel::SymAlphaStable { alpha, .. } => alpha < 2.0,
            _ => false,
        }
    }

    pub fn is_lrd(&self) -> bool {
        matches!(self, NoiseModel::Fgn { .. } | NoiseModel::Farima { .. })
    }

    /// Moments of order `q` are finite iff `q < moment_ceiling()`.
    pub fn moment_ceiling(&self) -> f64 {
        match *self {
            NoiseModel::ParetoCentered { alpha, .. } => alpha,
            NoiseModel::SymAlphaStable { alpha, .. } if alpha < 2.0 => alpha,
            _ => f64::INFINITY,
        }
    }

    /// Default moment order: `α − 0.1` for heavy tails, 2 otherwise.
    pub fn default_moment_order(&self) -> f64 {
        if self.is_heavy_tailed() {
            self.moment_ceiling() - 0.1
        } else {
            2.0
        }
    }

    /// Autocovariance decay exponent: `2 − 2H` for fGn, `1 − 2c` for FARIMA.
    pub fn lrd_delta(&self) -> Option<f64> {
        match *self {
            NoiseModel::Fgn { hurst, .. } => Some(2.0 - 2.0 * hurst),
            NoiseModel::Farima { c, .. } => Some(1.0 - 2.0 * c),
            _ => None,
        }
    }

    /// Scalar variance per coordinate where it is finite and known in closed form.
    pub fn coordinate_variance(&self) -> Option<f64> {
        match *self {
            NoiseModel::MdsGaussian { std } => Some(std * std),
            NoiseModel::SymAlphaStable { alpha: 2.0, scale } => Some(2.0 * scale * scale),
            NoiseModel::Fgn { scale, .. } => Some(scale * scale),
            NoiseModel::Farima { c, scale, trunc } => Some(
                scale * scale * farima_coefficients(c, trunc).iter().map(|p| p * p).sum::<f64>(),
            ),
            _ => None,
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoiseModel::MdsGaussian { std } => write!(f, "gaussian(std={std})"),
            NoiseModel::ParetoCentered { alpha, scale } => {
                write!(f, "pareto(alpha={alpha}, scale={scale})")
            }
            NoiseModel::SymAlphaStable { alpha, scale } => {
                write!(f, "stable(alpha={alpha}, scale={scale})")
            }
            NoiseModel::Fgn { hurst, scale } => write!(f, "fgn(hurst={hurst}, scale={scale})"),
            NoiseModel::Farima { c, scale, trunc } => {
                write!(f, "farima(c={c}, scale={scale}, trunc={trunc})")
            }
        }
    }
}

#[derive(Clone)]
enum PlanKind {
    Iid,
    Fgn(Arc<FgnPlan>),
    Farima(Arc<FarimaPlan>),
}

/// Per-horizon precomputation shared by all runs of an ensemble
/// (circulant eigenvalues, FARIMA weight spectrum). Cheap to clone.
#[derive(Clone)]
pub struct NoisePlan {
    model: NoiseModel,
    horizon: usize,
    budget: usize,
    kind: PlanKind,
}

impl NoisePlan {
    pub fn new(model: NoiseModel, horizon: usize) -> Result<Self> {
        model.validate()?;
        if horizon == 0 {
            return Err(Error::InvalidParameter("noise horizon must be >= 1".into()));
        }
        let kind = match model {
            // A single fGn sample needs no embedding; pad to the minimum length.
            NoiseModel::Fgn { hurst, .. } => {
                PlanKind::Fgn(Arc::new(FgnPlan::new(hurst, horizon.max(2))?))
            }
            NoiseModel::Farima { c, trunc, .. } => {
                PlanKind::Farima(Arc::new(FarimaPlan::new(c, trunc, horizon)?))
            }
            _ => PlanKind::Iid,
        };
        Ok(NoisePlan {
            model,
            horizon,
            budget: DEFAULT_LRD_SAMPLE_BUDGET,
            kind,
        })
    }

    pub fn with_budget(mut self, samples: usize) -> Self {
        self.budget = samples;
        self
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Stream of `horizon` vectors in `R^d`; coordinate `i` draws from
    /// `key.child(i)`.
    pub fn stream(&self, d: usize, key: SeedKey) -> Result<NoiseStream> {
        if d == 0 {
            return Err(Error::InvalidParameter("noise dimension must be >= 1".into()));
        }
        let source = match &self.kind {
            PlanKind::Iid => Source::Iid((0..d).map(|i| key.child(i as u64).rng()).collect()),
            lrd => {
                let needed = d.saturating_mul(self.horizon);
                if needed > self.budget {
                    return Err(Error::MemoryBudget {
                        needed,
                        budget: self.budget,
                    });
                }
                let scale = match self.model {
                    NoiseModel::Fgn { scale, .. } | NoiseModel::Farima { scale, .. } => scale,
                    _ => unreachable!(),
                };
                let paths = (0..d)
                    .map(|i| {
                        let mut rng = key.child(i as u64).rng();
                        match lrd {
                            PlanKind::Fgn(p) => p.generate(scale, &mut rng),
                            PlanKind::Farima(p) => p.generate(scale, &mut rng),
                            PlanKind::Iid => unreachable!(),
                        }
                    })
                    .collect();
                Source::Paths(paths)
            }
        };
        Ok(NoiseStream {
            model: self.model,
            dim: d,
            horizon: self.horizon,
            emitted: 0,
            source,
        })
    }
}

enum Source {
    Iid(Vec<SaRng>),
    Paths(Vec<Vec<f64>>),
}

/// Single-owner iterator over the noise vectors `η_0, …, η_{horizon−1}`.
pub struct NoiseStream {
    model: NoiseModel,
    dim: usize,
    horizon: usize,
    emitted: usize,
    source: Source,
}

impl NoiseStream {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    /// Writes the next vector into `out`; returns `false` once `horizon`
    /// vectors have been emitted.
    pub fn next_into(&mut self, out: &mut [f64]) -> bool {
        assert_eq!(out.len(), self.dim, "noise buffer has wrong length");
        if self.emitted == self.horizon {
            return false;
        }
        let t = self.emitted;
        match &mut self.source {
            Source::Iid(rngs) => {
                for (o, rng) in out.iter_mut().zip(rngs.iter_mut()) {
                    *o = draw_iid(&self.model, rng);
                }
            }
            Source::Paths(paths) => {
                for (o, path) in out.iter_mut().zip(paths.iter()) {
                    *o = path[t];
                }
            }
        }
        self.emitted += 1;
        true
    }

    pub fn next_vec(&mut self) -> Option<Vec<f64>> {
        let mut v = vec![0.0; self.dim];
        self.next_into(&mut v).then_some(v)
    }
}

#[inline]
fn draw_iid(model: &NoiseModel, rng: &mut SaRng) -> f64 {
    match *model {
        NoiseModel::MdsGaussian { std } => {
            let z: f64 = StandardNormal.sample(rng);
            std * z
        }
        NoiseModel::ParetoCentered { alpha, scale } => sample_pareto_centered(alpha, scale, rng),
        NoiseModel::SymAlphaStable { alpha, scale } => sample_sym_alpha_stable(alpha, scale, rng),
        NoiseModel::Fgn { .. } | NoiseModel::Farima { .. } => unreachable!("LRD kinds are pre-generated"),
    }
}

/// Convenience wrapper: plan and stream in one call.
pub fn noise_stream(model: NoiseModel, d: usize, horizon: usize, key: SeedKey) -> Result<NoiseStream> {
    NoisePlan::new(model, horizon)?.stream(d, key)
}

/// Empirical noise constant for the bounds.
///
/// Non-LRD kinds: `(mean ‖η‖^order)^{1/order}` over `n_samples` vectors.
/// LRD kinds: `sqrt(max_{h ≤ 1000} |γ̂(h)|·(1+h)^δ)` where `γ̂` is the
/// inner-product autocovariance of one stream of length `n_samples`; `order`
/// must be 2.
pub fn estimate_sigma(
    model: &NoiseModel,
    d: usize,
    order: f64,
    n_samples: usize,
    key: SeedKey,
) -> Result<f64> {
    model.validate()?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter("estimate_sigma needs >= 2 samples".into()));
    }
    if let Some(delta) = model.lrd_delta() {
        if order != 2.0 {
            return Err(Error::InvalidParameter(format!(
                "LRD noise constant is a second-moment envelope; order {order} given"
            )));
        }
        let plan = NoisePlan::new(*model, n_samples)?;
        let mut stream = plan.stream(d, key)?;
        let mut coords = vec![Vec::with_capacity(n_samples); d];
        let mut buf = vec![0.0; d];
        while stream.next_into(&mut buf) {
            for (c, v) in coords.iter_mut().zip(&buf) {
                c.push(*v);
            }
        }
        let max_lag = LRD_ENVELOPE_MAX_LAG.min(n_samples - 1);
        let mut gamma = vec![0.0; max_lag + 1];
        for c in &coords {
            for (g, v) in gamma.iter_mut().zip(autocovariance_zero_mean(c, max_lag)) {
                *g += v;
            }
        }
        let env = gamma
            .iter()
            .enumerate()
            .map(|(h, g)| g.abs() * (1.0 + h as f64).powf(delta))
            .fold(0.0, f64::max);
        return Ok(env.sqrt());
    }
    if !(order > 0.0 && order < model.moment_ceiling()) {
        return Err(Error::InvalidParameter(format!(
            "moment order {order} must lie in (0, {}) for {model}",
            model.moment_ceiling()
        )));
    }
    let mut stream = noise_stream(*model, d, n_samples, key)?;
    let mut buf = vec![0.0; d];
    let mut acc = 0.0;
    while stream.next_into(&mut buf) {
        acc += crate::vecops::norm(&buf).powf(order);
    }
    Ok((acc / n_samples as f64).powf(1.0 / order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_ranges() {
        assert!(NoiseModel::ParetoCentered { alpha: 2.0, scale: 1.0 }.validate().is_err());
        assert!(NoiseModel::SymAlphaStable { alpha: 2.0, scale: 1.0 }.validate().is_ok());
        assert!(NoiseModel::SymAlphaStable { alpha: 1.5, scale: 0.0 }.validate().is_err());
        assert!(NoiseModel::Farima { c: 0.5, scale: 1.0, trunc: 3 }.validate().is_err());
        assert!(NoiseModel::MdsGaussian { std: 0.0 }.validate().is_ok());
    }

    #[test]
    fn theory_parameters() {
        let fgn = NoiseModel::Fgn { hurst: 0.7, scale: 1.0 };
        assert!((fgn.lrd_delta().unwrap() - 0.6).abs() < 1e-15);
        let far = NoiseModel::Farima { c: 0.3, scale: 1.0, trunc: 10 };
        assert!((far.lrd_delta().unwrap() - 0.4).abs() < 1e-15);
        let p = NoiseModel::ParetoCentered { alpha: 1.6, scale: 1.0 };
        assert!((p.default_moment_order() - 1.5).abs() < 1e-15);
        assert!(!NoiseModel::SymAlphaStable { alpha: 2.0, scale: 1.0 }.is_heavy_tailed());
    }

    #[test]
    fn replay_is_bit_identical() {
        for model in [
            NoiseModel::MdsGaussian { std: 1.0 },
            NoiseModel::SymAlphaStable { alpha: 1.3, scale: 0.5 },
            NoiseModel::Fgn { hurst: 0.8, scale: 2.0 },
            NoiseModel::Farima { c: 0.2, scale: 1.0, trunc: 16 },
        ] {
            let draw = || {
                let mut s = noise_stream(model, 3, 2, SeedKey::new(77)).unwrap();
                let a = s.next_vec().unwrap();
                let b = s.next_vec().unwrap();
                assert!(s.next_vec().is_none());
                (a, b)
            };
            assert_eq!(draw(), draw());
        }
    }

    #[test]
    fn budget_error_for_lrd() {
        let plan = NoisePlan::new(NoiseModel::Fgn { hurst: 0.7, scale: 1.0 }, 1000)
            .unwrap()
            .with_budget(1500);
        assert!(matches!(
            plan.stream(2, SeedKey::new(1)),
            Err(Error::MemoryBudget { needed: 2000, budget: 1500 })
        ));
        assert!(plan.stream(1, SeedKey::new(1)).is_ok());
    }

    #[test]
    fn single_step_fgn_stream() {
        let mut s = noise_stream(NoiseModel::Fgn { hurst: 0.6, scale: 1.0 }, 2, 1, SeedKey::new(3))
            .unwrap();
        assert!(s.next_vec().is_some());
        assert!(s.next_vec().is_none());
    }

    #[test]
    fn gaussian_sigma_estimate() {
        let s = estimate_sigma(&NoiseModel::MdsGaussian { std: 1.0 }, 1, 2.0, 200_000, SeedKey::new(4))
            .unwrap();
        assert!((s - 1.0).abs() < 0.02, "{s}");
    }

    #[test]
    fn sigma_order_must_be_below_tail_index() {
        let m = NoiseModel::ParetoCentered { alpha: 1.5, scale: 1.0 };
        assert!(estimate_sigma(&m, 1, 1.5, 100, SeedKey::new(1)).is_err());
        let f = NoiseModel::Fgn { hurst: 0.7, scale: 1.0 };
        assert!(estimate_sigma(&f, 1, 1.5, 100, SeedKey::new(1)).is_err());
    }
}
