//! Strongly monotone operators, root solving, and feasible-set projection.

mod game;
mod huber;
mod io;
mod projection;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

pub use game::{game_pseudogradient, GameSpec, PowerControlGame};
pub use huber::{huber, huber_derivative, huber_gradient, HuberLsqProblem};
pub use projection::{project_box_capped_simplex, project_box_capped_simplex_in_place, Projection};

use crate::error::{check_dim, Error, Result};
use crate::rng::SeedKey;
use crate::vecops::{dist, dot, norm};

/// Affine operator `F(x) = Mx − r`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
}

impl LinearOperator {
    pub fn new(dim: usize, matrix: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_dim(dim * dim, matrix.len())?;
        check_dim(dim, rhs.len())?;
        Ok(LinearOperator { dim, matrix, rhs })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut matrix = vec![0.0; d * d];
        for (i, &v) in diag.iter().enumerate() {
            matrix[i * d + i] = v;
        }
        LinearOperator {
            dim: d,
            matrix,
            rhs: vec![0.0; d],
        }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `(λmin((M + Mᵀ)/2), σmax(M))`.
    pub fn mu_lip(&self) -> (f64, f64) {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.matrix);
        let sym = (&m + m.transpose()) * 0.5;
        let mu = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let lip = m
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max);
        (mu, lip)
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for ((o, row), b) in out.iter_mut().zip(self.matrix.chunks_exact(d)).zip(&self.rhs) {
            *o = dot(row, x) - b;
        }
    }
}

/// The operator families the lab knows how to build, serialize, and simulate.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Linear(LinearOperator),
    HuberLsq(HuberLsqProblem),
    /// Gradient play: the operator is `−H`.
    PowerControl(PowerControlGame),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Linear(op) => op.dim,
            Operator::HuberLsq(p) => p.dim(),
            Operator::PowerControl(g) => g.dim(),
        }
    }

    /// `out = F(x)`. Callers guarantee matching lengths.
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            Operator::Linear(op) => op.apply_into(x, out),
            Operator::HuberLsq(p) => p.gradient_into(x, out),
            Operator::PowerControl(g) => {
                g.pseudogradient_into(x, out);
                out.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Operator::Linear(_) => "linear",
            Operator::HuberLsq(_) => "huber",
            Operator::PowerControl(_) => "power_control",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSolveOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for RootSolveOptions {
    fn default() -> Self {
        RootSolveOptions {
            tol: 1e-10,
            max_iters: 10_000_000,
        }
    }
}

/// Noiseless projected fixed-step iteration `x ← Π(x − ζF(x))`, `ζ = μ/L²`.
///
/// The map is a λ-contraction with `λ = √(1 − μ²/L²)`, so the loop stops once
/// the a-posteriori bound `λ/(1−λ)·‖step‖` on the distance to the fixed point
/// drops below `tol` (which also forces the residual below `tol`).
pub fn solve_root(
    operator: &Operator,
    projection: &Projection,
    mu: f64,
    lip: f64,
    start: &[f64],
    opts: RootSolveOptions,
) -> Result<Vec<f64>> {
    check_dim(operator.dim(), start.len())?;
    if !(mu > 0.0 && mu <= lip) {
        return Err(Error::InvalidParameter(format!(
            "root solve needs 0 < mu <= lip (got mu={mu}, lip={lip})"
        )));
    }
    let zeta = mu / (lip * lip);
    let lambda = (1.0 - (mu / lip).powi(2)).max(0.0).sqrt();
    let step_tol = if lambda > 0.0 {
        opts.tol * ((1.0 - lambda) / lambda).min(1.0)
    } else {
        opts.tol
    };
    let mut x = projection.apply(start);
    let mut fx = vec![0.0; x.len()];
    let mut next = vec![0.0; x.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iters {
        operator.apply_into(&x, &mut fx);
        for ((n, xi), fi) in next.iter_mut().zip(&x).zip(&fx) {
            *n = xi - zeta * fi;
        }
        projection.apply_in_place(&mut next);
        residual = dist(&next, &x);
        if !residual.is_finite() {
            break;
        }
        std::mem::swap(&mut x, &mut next);
        if residual <= step_tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iters: opts.max_iters,
        residual,
    })
}

/// `‖x − Π(x − ζF(x))‖`, the fixed-point residual used as the root criterion.
pub fn fixed_point_residual(
    operator: &Operator,
    projection: &Projection,
    mu: f64,
    lip: f64,
    x: &[f64],
) -> Result<f64> {
    let zeta = mu / (lip * lip);
    let fx = operator.apply(x)?;
    let mut y: Vec<f64> = x.iter().zip(&fx).map(|(a, b)| a - zeta * b).collect();
    projection.apply_in_place(&mut y);
    Ok(dist(&y, x))
}

/// Where [`estimate_mu_lip`] draws its point pairs.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleRegion {
    /// Uniform in the Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Uniform in a product of capped simplices `{y ≥ 0, Σy ≤ cap}`.
    CappedSimplexBlocks { dim: usize, block: usize, cap: f64 },
}

impl SampleRegion {
    fn dim(&self) -> usize {
        match self {
            SampleRegion::Ball { center, .. } => center.len(),
            SampleRegion::CappedSimplexBlocks { dim, .. } => *dim,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            SampleRegion::Ball { center, radius } => {
                let d = center.len();
                let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let len = norm(&dir);
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
                center
                    .iter()
                    .zip(&dir)
                    .map(|(c, u)| c + r * u / len)
                    .collect()
            }
            SampleRegion::CappedSimplexBlocks { dim, block, cap } => {
                let mut out = Vec::with_capacity(*dim);
                while out.len() < *dim {
                    // Dirichlet(1, …, 1) over block + 1 parts; the slack part is dropped.
                    let e: Vec<f64> = (0..=*block).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                    let total: f64 = e.iter().sum();
                    out.extend(e[..*block].iter().map(|v| cap * v / total));
                }
                out.truncate(*dim);
                out
            }
        }
    }
}

/// Sampled strong-monotonicity and Lipschitz ratios:
/// `μ̂ = min ⟨F(x₁)−F(x₂), x₁−x₂⟩/‖x₁−x₂‖²`, `L̂ = max ‖F(x₁)−F(x₂)‖/‖x₁−x₂‖`.
pub fn estimate_mu_lip(
    operator: &Operator,
    region: &SampleRegion,
    n_pairs: usize,
    key: SeedKey,
) -> Result<(f64, f64)> {
    if n_pairs < 2 {
        return Err(Error::InvalidParameter("estimate_mu_lip needs n_pairs >= 2".into()));
    }
    check_dim(operator.dim(), region.dim())?;
    let mut rng = key.rng();
    let d = operator.dim();
    let (mut f1, mut f2) = (vec![0.0; d], vec![0.0; d]);
    let mut mu_hat = f64::INFINITY;
    let mut lip_hat: f64 = 0.0;
    let mut seen = 0;
    while seen < n_pairs {
        let x1 = region.sample(&mut rng);
        let x2 = region.sample(&mut rng);
        let dx: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
        let dx2 = dot(&dx, &dx);
        if dx2 == 0.0 {
            continue;
        }
        operator.apply_into(&x1, &mut f1);
        operator.apply_into(&x2, &mut f2);
        let df: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| a - b).collect();
        mu_hat = mu_hat.min(dot(&df, &dx) / dx2);
        lip_hat = lip_hat.max(norm(&df) / norm(&dx));
        seen += 1;
    }
    if !(mu_hat > 0.0) {
        return Err(Error::NotStronglyMonotone(mu_hat));
    }
    Ok((mu_hat, lip_hat))
}

/// Operator plus its monotonicity constants, solved root, and feasible set.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    operator: Operator,
    mu: f64,
    lip: f64,
    root: Vec<f64>,
    projection: Projection,
}

impl ProblemInstance {
    /// Assemble from a previously solved root.
    pub fn from_parts(
        operator: Operator,
        mu: f64,
        lip: f64,
        root: Vec<f64>,
        projection: Projection,
    ) -> Result<Self> {
        check_dim(operator.dim(), root.len())?;
        if !(mu > 0.0 && mu <= lip) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < mu <= lip (got mu={mu}, lip={lip})"
            )));
        }
        Ok(ProblemInstance {
            operator,
            mu,
            lip,
            root,
            projection,
        })
    }

    /// Solve for the root from the origin (projected) and assemble.
    pub fn solve(
        operator: Operator,
        mu: f64,
        lip: f64,
        projection: Projection,
        opts: RootSolveOptions,
    ) -> Result<Self> {
        let start = vec![0.0; operator.dim()];
        let root = solve_root(&operator, &projection, mu, lip, &start, opts)?;
        ProblemInstance::from_parts(operator, mu, lip, root, projection)
    }

    pub fn linear(op: LinearOperator) -> Result<Self> {
        let (mu, lip) = op.mu_lip();
        ProblemInstance::solve(
            Operator::Linear(op),
            mu,
            lip,
            Projection::Identity,
            RootSolveOptions::default(),
        )
    }

    pub fn huber(problem: HuberLsqProblem) -> Result<Self> {
        let (mu, lip) = problem.mu_lip();
        ProblemInstance::solve(
            Operator::HuberLsq(problem),
            mu,
            lip,
            Projection::Identity,
            RootSolveOptions::default(),
        )
    }

    /// Game instance: μ and L are estimated from `n_pairs` pairs sampled
    /// uniformly in the feasible set, then the equilibrium is solved.
    pub fn power_control(game: PowerControlGame, n_pairs: usize, key: SeedKey) -> Result<Self> {
        let region = SampleRegion::CappedSimplexBlocks {
            dim: game.dim(),
            block: game.channels(),
            cap: 1.0,
        };
        let projection = Projection::CappedSimplexBlocks {
            block: game.channels(),
            cap: 1.0,
        };
        let operator = Operator::PowerControl(game);
        let (mu, lip) = estimate_mu_lip(&operator, &region, n_pairs, key)?;
        ProblemInstance::solve(operator, mu, lip, projection, RootSolveOptions::default())
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn root(&self) -> &[f64] {
        &self.root
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    /// Region used to sample pairs when checking the instance's constants.
    pub fn sample_region(&self, radius: f64) -> SampleRegion {
        match self.projection {
            Projection::CappedSimplexBlocks { block, cap } => SampleRegion::CappedSimplexBlocks {
                dim: self.dim(),
                block,
                cap,
            },
            Projection::Identity => SampleRegion::Ball {
                center: self.root.clone(),
                radius,
            },
        }
    }

    /// `x* + 1/√d · 1`, the default starting point with `‖x₀ − x*‖ = 1`.
    pub fn unit_offset_start(&self) -> Vec<f64> {
        let s = 1.0 / (self.dim() as f64).sqrt();
        self.root.iter().map(|r| r + s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_root_is_origin() {
        let inst = ProblemInstance::linear(LinearOperator::identity(3)).unwrap();
        assert!(norm(inst.root()) <= 1e-10);
        assert_eq!((inst.mu(), inst.lip()), (1.0, 1.0));
    }

    #[test]
    fn least_squares_root_without_penalty() {
        // delta = +∞ switches the Huber term off, so the root solves the
        // normal equations AᵀA x = Aᵀb.
        let mut p = HuberLsqProblem::random(8, 3, 1.0, SeedKey::new(21)).unwrap();
        p = HuberLsqProblem::new(8, 3, p.matrix().to_vec(), p.rhs().to_vec(), f64::INFINITY)
            .unwrap();
        let a = DMatrix::from_row_slice(8, 3, p.matrix());
        let b = nalgebra::DVector::from_column_slice(p.rhs());
        let normal = (a.transpose() * &a)
            .cholesky()
            .unwrap()
            .solve(&(a.transpose() * b));
        let (mu, lip) = p.mu_lip();
        let root = solve_root(
            &Operator::HuberLsq(p),
            &Projection::Identity,
            mu,
            lip,
            &[0.0; 3],
            RootSolveOptions {
                tol: 1e-12,
                max_iters: 10_000_000,
            },
        )
        .unwrap();
        for (r, n) in root.iter().zip(normal.iter()) {
            assert!((r - n).abs() < 1e-8, "{r} vs {n}");
        }
    }

    #[test]
    fn game_root_is_a_fixed_point() {
        let game = PowerControlGame::random(&GameSpec::default(), SeedKey::new(31)).unwrap();
        let inst = ProblemInstance::power_control(game, 20_000, SeedKey::new(32)).unwrap();
        let tol = RootSolveOptions::default().tol;
        let res = fixed_point_residual(
            inst.operator(),
            inst.projection(),
            inst.mu(),
            inst.lip(),
            inst.root(),
        )
        .unwrap();
        assert!(res <= tol, "residual {res}");
        let again = solve_root(
            inst.operator(),
            inst.projection(),
            inst.mu(),
            inst.lip(),
            inst.root(),
            RootSolveOptions::default(),
        )
        .unwrap();
        assert!(dist(&again, inst.root()) <= tol);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let err = solve_root(
            &Operator::Linear(LinearOperator::diagonal(&[1.0, 100.0])),
            &Projection::Identity,
            1.0,
            100.0,
            &[1.0, 1.0],
            RootSolveOptions {
                tol: 1e-12,
                max_iters: 10,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iters: 10, .. }));
    }

    #[test]
    fn mu_lip_identity_exact() {
        let region = SampleRegion::Ball {
            center: vec![0.0; 3],
            radius: 2.0,
        };
        let (mu, lip) = estimate_mu_lip(
            &Operator::Linear(LinearOperator::identity(3)),
            &region,
            100,
            SeedKey::new(1),
        )
        .unwrap();
        assert_eq!((mu, lip), (1.0, 1.0));
    }

    #[test]
    fn mu_lip_brackets_diagonal_spectrum() {
        let op = Operator::Linear(LinearOperator::diagonal(&[1.0, 2.0]));
        let region = SampleRegion::Ball {
            center: vec![0.0; 2],
            radius: 1.0,
        };
        let mut prev = (f64::INFINITY, 0.0);
        for n in [10, 1_000, 100_000] {
            let (mu, lip) = estimate_mu_lip(&op, &region, n, SeedKey::new(2)).unwrap();
            assert!((1.0..=2.0).contains(&mu) && (1.0..=2.0).contains(&lip));
            assert!(mu <= prev.0 + 1e-12 || n == 10);
            prev = (mu, lip);
        }
        assert!(prev.0 < 1.001 && prev.1 > 1.999, "{prev:?}");
    }

    #[test]
    fn reversed_sign_is_not_monotone() {
        let op = Operator::Linear(LinearOperator::diagonal(&[-1.0, -1.0]));
        let region = SampleRegion::Ball {
            center: vec![0.0; 2],
            radius: 1.0,
        };
        assert!(matches!(
            estimate_mu_lip(&op, &region, 10, SeedKey::new(3)),
            Err(Error::NotStronglyMonotone(m)) if m < 0.0
        ));
    }

    #[test]
    fn capped_simplex_samples_are_feasible() {
        let region = SampleRegion::CappedSimplexBlocks {
            dim: 12,
            block: 4,
            cap: 1.0,
        };
        let mut rng = SeedKey::new(4).rng();
        for _ in 0..100 {
            let x = region.sample(&mut rng);
            assert_eq!(x.len(), 12);
            for b in x.chunks(4) {
                assert!(b.iter().all(|&v| v >= 0.0) && b.iter().sum::<f64>() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn unit_offset_start_has_unit_distance() {
        let p = HuberLsqProblem::random(20, 5, 1.0, SeedKey::new(5)).unwrap();
        let inst = ProblemInstance::huber(p).unwrap();
        assert!((dist(&inst.unit_offset_start(), inst.root()) - 1.0).abs() < 1e-12);
    }
}
