//! The SA iteration `x_{k+1} = x_k − β_k (F(x_k) + η_k)` with
//! `β_k = β/(k + K0)`, optional projection, and the averaged-noise
//! diagnostics `U_k`, `z_k = x_k − U_k`, `Δ_k = G(x_k) − G(z_k)`.

use crate::error::{check_dim, Error, Result};
use crate::noise::NoiseStream;
use crate::operators::ProblemInstance;
use crate::theory::{contraction_params, ContractionParams};
use crate::vecops::{dist, norm};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSchedule {
    pub beta: f64,
    pub k0: f64,
}

impl StepSchedule {
    pub fn new(beta: f64, k0: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite() && k0 > 0.0 && k0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stepsize needs beta > 0 and K0 > 0 (got beta={beta}, K0={k0})"
            )));
        }
        Ok(StepSchedule { beta, k0 })
    }

    #[inline]
    pub fn stepsize(&self, k: usize) -> f64 {
        self.beta / (k as f64 + self.k0)
    }

    /// Whether `β_k ≤ min(1/μ, μ/L²)` for every `k`, i.e.
    /// `K0 ≥ β·max(μ, L²/μ)`.
    pub fn is_small_for(&self, mu: f64, lip: f64) -> bool {
        self.k0 >= self.beta * mu.max(lip * lip / mu)
    }

    pub fn validate_for(&self, mu: f64, lip: f64) -> Result<()> {
        if self.is_small_for(mu, lip) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "K0 = {} below beta*max(mu, L^2/mu) = {}",
                self.k0,
                self.beta * mu.max(lip * lip / mu)
            )))
        }
    }
}

pub fn stepsize(schedule: &StepSchedule, k: usize) -> f64 {
    schedule.stepsize(k)
}

/// `{0} ∪ {⌊1.15^j⌋} ∪ {horizon}`, increasing and deduplicated.
pub fn checkpoint_grid(horizon: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut j = 0i32;
    loop {
        let k = 1.15f64.powi(j).floor() as usize;
        if k >= horizon {
            break;
        }
        if k > *out.last().unwrap() {
            out.push(k);
        }
        j += 1;
    }
    if horizon > 0 {
        out.push(horizon);
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct SaOptions {
    /// Apply the instance's projection after every update.
    pub projected: bool,
    /// Co-evolve `U_k` and `z_k` and check the structural identities.
    pub diagnostics: bool,
    /// Custom checkpoints (must start at 0 and end at the horizon).
    pub checkpoints: Option<Vec<usize>>,
}

/// Per-checkpoint diagnostic norms plus the worst structural residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub u_norm: Vec<f64>,
    /// `‖z_k − x*‖`.
    pub z_error: Vec<f64>,
    pub delta_norm: Vec<f64>,
    /// max over checkpoints of `‖z_k + U_k − x_k‖ / (1 + ‖x_k‖)`.
    pub max_reconstruction: f64,
    /// max over checkpoints of `‖Δ_k‖ − ‖U_k‖` (nonpositive when the bound holds).
    pub max_delta_excess: f64,
    /// max over steps of the gap between the two update forms, relative to
    /// the magnitude of the terms being combined.
    pub max_form_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// The iterate became non-finite at this iteration; the run stopped.
    NonFinite { iteration: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub checkpoints: Vec<usize>,
    /// `‖x_k − x*‖` at each recorded checkpoint.
    pub errors: Vec<f64>,
    pub diagnostics: Option<Diagnostics>,
    /// Last finite iterate.
    pub final_iterate: Vec<f64>,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn is_flagged(&self) -> bool {
        self.status != RunStatus::Completed
    }
}

/// `U_{k+1} = (1 − β̃_k) U_k + β̃_k η̃_k`, in place.
#[inline]
pub fn averaged_noise_step_in_place(u: &mut [f64], beta_tilde: f64, eta_tilde: &[f64]) {
    for (ui, ei) in u.iter_mut().zip(eta_tilde) {
        *ui = (1.0 - beta_tilde) * *ui + beta_tilde * ei;
    }
}

pub fn averaged_noise_step(u: &[f64], beta_tilde: f64, eta_tilde: &[f64]) -> Result<Vec<f64>> {
    check_dim(u.len(), eta_tilde.len())?;
    if !(beta_tilde > 0.0 && beta_tilde <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scaled step {beta_tilde} outside (0, 1]"
        )));
    }
    let mut out = u.to_vec();
    averaged_noise_step_in_place(&mut out, beta_tilde, eta_tilde);
    Ok(out)
}

struct DiagState {
    cp: ContractionParams,
    u: Vec<f64>,
    z: Vec<f64>,
    g_x: Vec<f64>,
    g_z: Vec<f64>,
    scratch: Vec<f64>,
    out: Diagnostics,
}

impl DiagState {
    fn record(&mut self, instance: &ProblemInstance, x: &[f64]) {
        let op = instance.operator();
        self.cp.apply_g(op, x, &mut self.scratch, &mut self.g_x);
        self.cp.apply_g(op, &self.z, &mut self.scratch, &mut self.g_z);
        let u_norm = norm(&self.u);
        let delta = dist(&self.g_x, &self.g_z);
        let recon = self
            .z
            .iter()
            .zip(&self.u)
            .zip(x)
            .map(|((z, u), x)| (z + u - x).powi(2))
            .sum::<f64>()
            .sqrt()
            / (1.0 + norm(x));
        let d = &mut self.out;
        d.u_norm.push(u_norm);
        d.z_error.push(dist(&self.z, instance.root()));
        d.delta_norm.push(delta);
        d.max_reconstruction = d.max_reconstruction.max(recon);
        d.max_delta_excess = d.max_delta_excess.max(delta - u_norm);
    }
}

/// Runs `horizon` SA steps from `x0`, drawing `η_k` from `noise`.
pub fn run_sa(
    instance: &ProblemInstance,
    noise: &mut NoiseStream,
    schedule: &StepSchedule,
    horizon: usize,
    x0: &[f64],
    options: &SaOptions,
) -> Result<Trajectory> {
    let d = instance.dim();
    check_dim(d, x0.len())?;
    check_dim(d, noise.dim())?;
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    if noise.horizon() - noise.emitted() < horizon {
        return Err(Error::InvalidParameter(format!(
            "noise stream has {} vectors left, run needs {horizon}",
            noise.horizon() - noise.emitted()
        )));
    }
    let checkpoints = match &options.checkpoints {
        None => checkpoint_grid(horizon),
        Some(c) => {
            let ok = c.first() == Some(&0)
                && c.last() == Some(&horizon)
                && c.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidParameter(
                    "checkpoints must increase from 0 to the horizon".into(),
                ));
            }
            c.clone()
        }
    };
    let projection = instance.projection();
    let project = options.projected && !projection.is_identity();
    let mut diag = if options.diagnostics {
        if project {
            return Err(Error::InvalidParameter(
                "averaged-noise diagnostics are defined for the unprojected iteration".into(),
            ));
        }
        let cp = contraction_params(instance.mu(), instance.lip())?;
        // With β̃ > 1 the U and z recursions amplify rounding by |1 − β̃| per
        // step even though x_k itself is fine.
        let bt0 = cp.scaled_step(schedule.stepsize(0));
        if bt0 > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "diagnostics need beta_0/zeta <= 1, got {bt0}; raise K0 to at least beta*L^2/mu"
            )));
        }
        Some(DiagState {
            cp,
            u: vec![0.0; d],
            z: x0.to_vec(),
            g_x: vec![0.0; d],
            g_z: vec![0.0; d],
            scratch: vec![0.0; d],
            out: Diagnostics {
                u_norm: Vec::with_capacity(checkpoints.len()),
                z_error: Vec::with_capacity(checkpoints.len()),
                delta_norm: Vec::with_capacity(checkpoints.len()),
                max_reconstruction: 0.0,
                max_delta_excess: f64::NEG_INFINITY,
                max_form_gap: 0.0,
            },
        })
    } else {
        None
    };

    let op = instance.operator();
    let root = instance.root();
    let mut x = x0.to_vec();
    let mut next = vec![0.0; d];
    let mut f = vec![0.0; d];
    let mut eta = vec![0.0; d];
    let mut errors = Vec::with_capacity(checkpoints.len());
    let mut recorded = Vec::with_capacity(checkpoints.len());
    let mut status = RunStatus::Completed;
    let mut cursor = 0;

    for k in 0..=horizon {
        if checkpoints[cursor] == k {
            errors.push(dist(&x, root));
            recorded.push(k);
            if let Some(ds) = diag.as_mut() {
                ds.record(instance, &x);
            }
            cursor += 1;
        }
        if k == horizon {
            break;
        }
        noise.next_into(&mut eta);
        op.apply_into(&x, &mut f);
        let step = schedule.stepsize(k);
        for i in 0..d {
            next[i] = x[i] - step * (f[i] + eta[i]);
        }
        if let Some(ds) = diag.as_mut() {
            let zeta = ds.cp.zeta;
            let bt = ds.cp.scaled_step(step);
            let mut gap2 = 0.0;
            let mut scale2 = 0.0;
            for i in 0..d {
                let g = x[i] - zeta * f[i];
                let eta_t = -zeta * eta[i];
                let alt = x[i] + bt * (g - x[i] + eta_t);
                gap2 += (alt - next[i]).powi(2);
                scale2 += (x[i].abs() + step * (f[i].abs() + eta[i].abs())).powi(2);
                ds.u[i] = (1.0 - bt) * ds.u[i] + bt * eta_t;
                ds.z[i] += bt * (g - ds.z[i]);
            }
            if scale2 > 0.0 {
                let gap = (gap2 / scale2).sqrt();
                ds.out.max_form_gap = ds.out.max_form_gap.max(gap);
            }
        }
        if !next.iter().all(|v| v.is_finite()) {
            status = RunStatus::NonFinite { iteration: k + 1 };
            break;
        }
        if project {
            projection.apply_in_place(&mut next);
        }
        std::mem::swap(&mut x, &mut next);
    }

    Ok(Trajectory {
        checkpoints: recorded,
        errors,
        diagnostics: diag.map(|ds| ds.out),
        final_iterate: x,
        status,
    })
}
