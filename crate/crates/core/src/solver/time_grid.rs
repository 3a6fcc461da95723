use crate::error::{invalid, Result};

/// Backward time steps with a common BDF2 leading coefficient `β₀`.
///
/// Step 1 is backward Euler with `τ¹ = β₀`; for `l ≥ 2`, with
/// `ω = τ^l / τ^{l−1}`, `β₀ = τ^l (1 + ω)/(1 + 2ω)`,
/// `β₁ = (1 + ω)²/(1 + 2ω)` and `β₂ = ω²/(1 + 2ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub maturity: f64,
    pub tau: Vec<f64>,
    pub beta0: f64,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
}

impl TimeGrid {
    pub fn steps(&self) -> usize {
        self.tau.len()
    }

    /// Time to maturity after each step.
    pub fn levels(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .tau
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = self.maturity;
        }
        out
    }

    /// `β₀` recomputed from the steps of level `l` (0-based).
    pub fn beta0_at(&self, l: usize) -> f64 {
        if l == 0 {
            return self.tau[0];
        }
        let w = self.tau[l] / self.tau[l - 1];
        self.tau[l] * (1.0 + w) / (1.0 + 2.0 * w)
    }
}

/// Positive root of `t² + (p − 2β₀) t − β₀ p = 0`.
fn next_step(p: f64, beta0: f64) -> f64 {
    let b = p - 2.0 * beta0;
    let disc = (b * b + 4.0 * beta0 * p).sqrt();
    if b < 0.0 {
        0.5 * (disc - b)
    } else {
        // avoids cancellation
        2.0 * beta0 * p / (disc + b)
    }
}

/// `M` steps summing to `T` with constant `β₀`. The step recurrence is
/// homogeneous in `β₀`, so the steps for `β₀ = 1` are simply rescaled.
pub fn build_time_grid(maturity: f64, m: usize) -> Result<TimeGrid> {
    if m < 2 {
        return invalid(format!("need at least 2 time steps, got {m}"));
    }
    if !(maturity > 0.0 && maturity.is_finite()) {
        return invalid(format!("maturity must be positive, got {maturity}"));
    }
    let mut unit = vec![1.0];
    for _ in 1..m {
        let p = *unit.last().unwrap();
        unit.push(next_step(p, 1.0));
    }
    let total: f64 = unit.iter().sum();
    let beta0 = maturity / total;
    let tau: Vec<f64> = unit.iter().map(|t| t * beta0).collect();
    let mut beta1 = vec![1.0];
    let mut beta2 = vec![0.0];
    for l in 1..m {
        let w = unit[l] / unit[l - 1];
        beta1.push((1.0 + w) * (1.0 + w) / (1.0 + 2.0 * w));
        beta2.push(w * w / (1.0 + 2.0 * w));
    }
    Ok(TimeGrid {
        maturity,
        tau,
        beta0,
        beta1,
        beta2,
    })
}
