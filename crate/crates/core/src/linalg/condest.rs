//! Hager's 1-norm estimator, in the form refined by Higham (LAPACK `xLACON`).

use crate::error::Result;

/// Something that can apply `A⁻¹` and `A⁻ᵀ` to a vector.
pub trait InverseAction {
    fn dim(&self) -> usize;
    fn apply_inverse(&self, b: &[f64]) -> Result<Vec<f64>>;
    fn apply_inverse_transpose(&self, b: &[f64]) -> Result<Vec<f64>>;
}

const MAX_SWEEPS: usize = 5;

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Lower-bound estimate of `‖A⁻¹‖₁`.
pub fn inverse_norm1_estimate(op: &impl InverseAction) -> Result<f64> {
    let n = op.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut y = op.apply_inverse(&x)?;
    let mut est = norm1(&y);
    if n == 1 {
        return Ok(est);
    }
    let mut xi: Vec<f64> = y.iter().map(|&v| sign(v)).collect();
    let mut z = op.apply_inverse_transpose(&xi)?;

    for _ in 1..MAX_SWEEPS {
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bj, bv), (i, &v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bj, bv)
                }
            });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
        y = op.apply_inverse(&x)?;
        let new_est = norm1(&y);
        let new_xi: Vec<f64> = y.iter().map(|&v| sign(v)).collect();
        if new_xi == xi || new_est <= est {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        xi = new_xi;
        z = op.apply_inverse_transpose(&xi)?;
    }

    // Alternating test vector guards against the power-iteration stalling.
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n - 1) as f64)
        })
        .collect();
    let w = op.apply_inverse(&alt)?;
    let alt_est = 2.0 * norm1(&w) / (3.0 * n as f64);
    Ok(est.max(alt_est))
}

/// `‖A‖₁ · est(‖A⁻¹‖₁)`.
pub fn condition_estimate_1(matrix_norm1: f64, op: &impl InverseAction) -> Result<f64> {
    Ok(matrix_norm1 * inverse_norm1_estimate(op)?)
}
