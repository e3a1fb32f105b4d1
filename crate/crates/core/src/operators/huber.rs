use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::rng::SeedKey;

/// Huber-regularized least squares
/// `g(x) = ½‖Ax − b‖² + Σᵢ φ_δ(xᵢ)`.
///
/// `delta = +∞` switches the Huber penalty off and leaves plain least
/// squares.
#[derive(Clone, Debug, PartialEq)]
pub struct HuberLsqProblem {
    m: usize,
    d: usize,
    /// Row-major m×d.
    a: Vec<f64>,
    b: Vec<f64>,
    delta: f64,
    /// Row-major AᵀA.
    gram: Vec<f64>,
    atb: Vec<f64>,
}

impl HuberLsqProblem {
    pub fn new(m: usize, d: usize, a: Vec<f64>, b: Vec<f64>, delta: f64) -> Result<Self> {
        if m <= d || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "Huber least squares needs m > d >= 1 (got m={m}, d={d})"
            )));
        }
        check_dim(m * d, a.len())?;
        check_dim(m, b.len())?;
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Huber threshold must be positive (got {delta})"
            )));
        }
        let mat = DMatrix::from_row_slice(m, d, &a);
        let gram_m = mat.transpose() * &mat;
        let atb_v = mat.transpose() * nalgebra::DVector::from_column_slice(&b);
        let gram = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| gram_m[(i, j)])
            .collect();
        let problem = HuberLsqProblem {
            m,
            d,
            a,
            b,
            delta,
            gram,
            atb: atb_v.iter().copied().collect(),
        };
        let (lo, _) = problem.gram_eigen_range();
        if !(lo > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "AᵀA is not positive definite (smallest eigenvalue {lo:e})"
            )));
        }
        Ok(problem)
    }

    /// Gaussian design with entries N(0, 1/m) and an N(0, 1) response.
    pub fn random(m: usize, d: usize, delta: f64, key: SeedKey) -> Result<Self> {
        let mut rng = key.rng();
        let scale = 1.0 / (m as f64).sqrt();
        let a: Vec<f64> = (0..m * d)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let b: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        HuberLsqProblem::new(m, d, a, b, delta)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn penalized(&self) -> bool {
        self.delta.is_finite()
    }

    /// Extreme eigenvalues of AᵀA.
    pub fn gram_eigen_range(&self) -> (f64, f64) {
        let g = DMatrix::from_row_slice(self.d, self.d, &self.gram);
        let eig = SymmetricEigen::new(g).eigenvalues;
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Strong monotonicity modulus and Lipschitz constant of ∇g:
    /// λmin(AᵀA) and λmax(AᵀA) + 1 (the Huber derivative has slope at most 1).
    pub fn mu_lip(&self) -> (f64, f64) {
        let (lo, hi) = self.gram_eigen_range();
        (lo, if self.penalized() { hi + 1.0 } else { hi })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut resid = 0.0;
        for (row, bi) in self.a.chunks(self.d).zip(&self.b) {
            let r: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bi;
            resid += r * r;
        }
        let penalty: f64 = if self.penalized() {
            x.iter().map(|&t| huber(t, self.delta)).sum()
        } else {
            0.0
        };
        0.5 * resid + penalty
    }

    pub(crate) fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        for ((o, row), b) in out.iter_mut().zip(self.gram.chunks_exact(d)).zip(&self.atb) {
            let mut acc = -b;
            for (g, xj) in row.iter().zip(x) {
                acc += g * xj;
            }
            *o = acc;
        }
        if self.penalized() {
            for (o, &t) in out.iter_mut().zip(x) {
                *o += huber_derivative(t, self.delta);
            }
        }
    }
}

pub fn huber(t: f64, delta: f64) -> f64 {
    if t.abs() <= delta {
        0.5 * t * t
    } else {
        delta * (t.abs() - 0.5 * delta)
    }
}

pub fn huber_derivative(t: f64, delta: f64) -> f64 {
    if t.abs() <= delta {
        t
    } else {
        delta * t.signum()
    }
}

/// ∇g(x) = Aᵀ(Ax − b) + φ'_δ(x) componentwise.
pub fn huber_gradient(problem: &HuberLsqProblem, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(problem.d, x.len())?;
    let mut out = vec![0.0; problem.d];
    problem.gradient_into(x, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_problem() -> HuberLsqProblem {
        // m must exceed d: stack I₂ on a zero row.
        HuberLsqProblem::new(3, 2, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![0.0; 3], 1.0).unwrap()
    }

    #[test]
    fn gradient_at_minimizer_is_zero() {
        let g = huber_gradient(&identity_problem(), &[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_closed_form() {
        let g = huber_gradient(&identity_problem(), &[0.5, 0.5]).unwrap();
        assert_eq!(g, vec![1.0, 1.0]);
        // outside the threshold the Huber part saturates at delta
        let g = huber_gradient(&identity_problem(), &[2.0, -3.0]).unwrap();
        assert_eq!(g, vec![3.0, -4.0]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            huber_gradient(&identity_problem(), &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(HuberLsqProblem::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 2], 1.0).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = HuberLsqProblem::random(12, 5, 0.7, SeedKey::new(3)).unwrap();
        let mut rng = SeedKey::new(4).rng();
        for _ in 0..100 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = huber_gradient(&p, &x).unwrap();
            let h = 1e-5;
            for i in 0..5 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (p.objective(&xp) - p.objective(&xm)) / (2.0 * h);
                let rel = (fd - g[i]).abs() / g[i].abs().max(1.0);
                assert!(rel < 1e-6, "coord {i}: fd {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn mu_lip_brackets_gram_spectrum() {
        let p = HuberLsqProblem::random(60, 30, 1.0, SeedKey::new(9)).unwrap();
        let (mu, lip) = p.mu_lip();
        let (lo, hi) = p.gram_eigen_range();
        assert!(mu > 0.0 && mu == lo);
        assert_eq!(lip, hi + 1.0);
    }
}
