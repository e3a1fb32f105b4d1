//! Numerical checks of the two product/recursion inequalities used for
//! stepsizes `φ_k = φ/(k + K0)`.

#[derive(Clone, Debug, PartialEq)]
pub struct AuxReport {
    /// `None` when the preconditions hold; otherwise why they fail. A
    /// failed precondition is not a violation of the inequality.
    pub precondition_failure: Option<String>,
    pub k_max: usize,
    /// Number of `k ≤ k_max` where lhs exceeds rhs beyond rounding.
    pub violations: usize,
    /// Largest `lhs/rhs` over `k ≤ k_max` and where it occurs.
    pub max_ratio: f64,
    pub tightest_k: usize,
}

impl AuxReport {
    pub fn passed(&self) -> bool {
        self.precondition_failure.is_none() && self.violations == 0
    }

    fn skipped(k_max: usize, why: String) -> Self {
        AuxReport {
            precondition_failure: Some(why),
            k_max,
            violations: 0,
            max_ratio: f64::NAN,
            tightest_k: 0,
        }
    }
}

const ROUNDING: f64 = 1e-12;

/// Checks `Π_{i<k}(1 − aφ_i) ≤ K0/(k + K0)` for `k = 0..=k_max`.
/// Preconditions: `φ > 1/a` and `aφ_k ≤ 1` (i.e. `aφ ≤ K0`). The product is
/// accumulated in log space.
pub fn lemma_aux1_check(a: f64, phi: f64, k0: f64, k_max: usize) -> AuxReport {
    if !(a > 0.0 && phi > 0.0 && k0 > 0.0) {
        return AuxReport::skipped(k_max, "a, phi, K0 must be positive".into());
    }
    if phi <= 1.0 / a {
        return AuxReport::skipped(k_max, format!("phi = {phi} <= 1/a = {}", 1.0 / a));
    }
    if a * phi > k0 {
        return AuxReport::skipped(k_max, format!("a*phi = {} > K0 = {k0}", a * phi));
    }
    let mut log_prod = 0.0f64;
    let mut report = AuxReport {
        precondition_failure: None,
        k_max,
        violations: 0,
        max_ratio: f64::NEG_INFINITY,
        tightest_k: 0,
    };
    for k in 0..=k_max {
        let log_rhs = (k0 / (k as f64 + k0)).ln();
        let log_ratio = log_prod - log_rhs;
        if log_ratio > ROUNDING {
            report.violations += 1;
        }
        let ratio = log_ratio.exp();
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.tightest_k = k;
        }
        log_prod += (-a * phi / (k as f64 + k0)).ln_1p();
    }
    report
}

/// Checks `s_k ≤ (2/a)·ε_k/φ_k` for `k = 0..=k_max`, where
/// `s_{k+1} = (1 − aφ_k)s_k + ε_k`, `s_0 = 0`, `ε_k = ε/(k + K0)^e`.
/// Preconditions: `e ∈ (1, 2]`, `φ ≥ 2(e − 1)/a`, `aφ ≤ K0`.
pub fn lemma_aux2_check(a: f64, eps: f64, phi: f64, e: f64, k0: f64, k_max: usize) -> AuxReport {
    if !(a > 0.0 && eps > 0.0 && phi > 0.0 && k0 > 0.0) {
        return AuxReport::skipped(k_max, "a, eps, phi, K0 must be positive".into());
    }
    if !(e > 1.0 && e <= 2.0) {
        return AuxReport::skipped(k_max, format!("exponent e = {e} outside (1, 2]"));
    }
    if phi < 2.0 * (e - 1.0) / a {
        return AuxReport::skipped(
            k_max,
            format!("phi = {phi} < 2(e-1)/a = {}", 2.0 * (e - 1.0) / a),
        );
    }
    if a * phi > k0 {
        return AuxReport::skipped(k_max, format!("a*phi = {} > K0 = {k0}", a * phi));
    }
    let mut s = 0.0f64;
    let mut report = AuxReport {
        precondition_failure: None,
        k_max,
        violations: 0,
        max_ratio: f64::NEG_INFINITY,
        tightest_k: 0,
    };
    for k in 0..=k_max {
        let kk = k as f64 + k0;
        let eps_k = eps / kk.powf(e);
        let rhs = 2.0 / a * eps_k / (phi / kk);
        let ratio = s / rhs;
        if ratio > 1.0 + ROUNDING {
            report.violations += 1;
        }
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.tightest_k = k;
        }
        s = (1.0 - a * phi / kk) * s + eps_k;
    }
    report
}
