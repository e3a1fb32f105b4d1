use crate::error::{Error, Result};
use crate::operators::Operator;

/// `G(x) = x − ζF(x)` with `ζ = μ/L²` is a `λ`-contraction,
/// `λ = √(1 − μ²/L²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionParams {
    pub mu: f64,
    pub lip: f64,
    pub zeta: f64,
    pub lambda: f64,
    /// `1 − λ`.
    pub lambda_prime: f64,
}

pub fn contraction_params(mu: f64, lip: f64) -> Result<ContractionParams> {
    if !(mu > 0.0 && lip.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need mu > 0 and finite lip (got mu={mu}, lip={lip})"
        )));
    }
    if mu > lip {
        return Err(Error::InvalidParameter(format!(
            "strong monotonicity constant {mu} exceeds Lipschitz constant {lip}"
        )));
    }
    let ratio = mu / lip;
    let lambda = (1.0 - ratio * ratio).max(0.0).sqrt();
    Ok(ContractionParams {
        mu,
        lip,
        zeta: mu / (lip * lip),
        lambda,
        lambda_prime: 1.0 - lambda,
    })
}

impl ContractionParams {
    /// `out = G(x)`; `scratch` receives `F(x)`.
    #[inline]
    pub fn apply_g(&self, op: &Operator, x: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        op.apply_into(x, scratch);
        for ((o, xi), fi) in out.iter_mut().zip(x).zip(scratch.iter()) {
            *o = xi - self.zeta * fi;
        }
    }

    /// `β̃ = β_k / ζ`.
    pub fn scaled_step(&self, step: f64) -> f64 {
        step / self.zeta
    }
}
