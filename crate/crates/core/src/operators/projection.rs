/// Euclidean projection onto `{y : y >= 0, sum(y) <= cap}`.
///
/// Negative entries are clipped first; if the clipped vector already fits
/// under the cap it is the projection, otherwise the sorted-threshold simplex
/// projection onto `{y >= 0, sum(y) = cap}` is applied.
pub fn project_box_capped_simplex(x: &[f64], cap: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    project_box_capped_simplex_in_place(&mut out, cap);
    out
}

pub fn project_box_capped_simplex_in_place(x: &mut [f64], cap: f64) {
    debug_assert!(cap > 0.0);
    let mut total = 0.0;
    for v in x.iter_mut() {
        if *v < 0.0 || v.is_nan() {
            *v = 0.0;
        }
        total += *v;
    }
    if total <= cap {
        return;
    }
    let theta = simplex_threshold(x, cap);
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Threshold `theta` such that `sum(max(x - theta, 0)) = cap`.
fn simplex_threshold(x: &[f64], cap: f64) -> f64 {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - cap) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

/// Feasible-set projection attached to a problem instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    Identity,
    /// Consecutive blocks of `block` coordinates, each projected onto the
    /// capped simplex with the given cap (one block per player).
    CappedSimplexBlocks { block: usize, cap: f64 },
}

impl Projection {
    pub fn apply_in_place(&self, x: &mut [f64]) {
        match *self {
            Projection::Identity => {}
            Projection::CappedSimplexBlocks { block, cap } => {
                for chunk in x.chunks_mut(block) {
                    project_box_capped_simplex_in_place(chunk, cap);
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Projection::Identity)
    }
}
