use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

/// Zero-mean Pareto draw by inverse CDF: `scale·U^(−1/α) − scale·α/(α−1)`.
/// The uncentered part is supported on `[scale, ∞)`.
#[inline]
pub fn sample_pareto_centered<R: Rng + ?Sized>(alpha: f64, scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    scale * u.powf(-1.0 / alpha) - pareto_mean(alpha, scale)
}

/// Mean of the uncentered Pareto law, `scale·α/(α−1)`.
pub fn pareto_mean(alpha: f64, scale: f64) -> f64 {
    scale * alpha / (alpha - 1.0)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `E|X|^p` for the centered Pareto law, by quadrature in `u = P(raw > x)`.
/// The tail piece is further substituted `u = u_m·v^20` to tame the
/// `u^(−p/α)` singularity. Requires `p < α`.
///
/// Monte Carlo estimates of this moment converge very slowly once `p` nears
/// `α` (the summands have tail index `α/p`), so checks that need a noise
/// constant for scalar Pareto noise use this instead.
pub fn pareto_abs_moment(alpha: f64, scale: f64, p: f64) -> f64 {
    let m = pareto_mean(alpha, 1.0);
    let u_m = m.powf(-alpha);
    let dev = |u: f64| (u.powf(-1.0 / alpha) - m).abs().powf(p);
    let e = 20.0;
    let tail = simpson(
        |v: f64| if v == 0.0 { 0.0 } else { dev(u_m * v.powf(e)) * u_m * e * v.powf(e - 1.0) },
        0.0,
        1.0,
        400_000,
    );
    let body = simpson(dev, u_m, 1.0, 400_000);
    scale.powf(p) * (tail + body)
}

/// Symmetric α-stable draw (location 0) by Chambers–Mallows–Stuck:
/// `X = scale · sin(αV)/cos(V)^(1/α) · (cos((1−α)V)/W)^((1−α)/α)` with
/// `V ~ U(−π/2, π/2)`, `W ~ Exp(1)`. At `α = 2` this is `N(0, 2·scale²)`.
#[inline]
pub fn sample_sym_alpha_stable<R: Rng + ?Sized>(alpha: f64, scale: f64, rng: &mut R) -> f64 {
    if alpha == 2.0 {
        let z: f64 = rng.sample(StandardNormal);
        return scale * SQRT_2 * z;
    }
    let u: f64 = rng.sample(Open01);
    let v = PI * u - FRAC_PI_2;
    if alpha == 1.0 {
        return scale * v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    let head = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let tail = ((1.0 - alpha) * v).cos() / w;
    scale * head * tail.powf((1.0 - alpha) / alpha)
}
