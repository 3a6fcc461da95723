use super::OperatorCoeffs;
use crate::error::{invalid, Result};
use crate::Point;

/// Polyharmonic spline `φ(r) = r^q` (odd `q`) or `r^q ln r` (even `q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhsBasis {
    q: u32,
}

impl PhsBasis {
    /// Odd `q ≥ 3`, or even `q ≥ 4` for the logarithmic branch.
    pub fn new(q: u32) -> Result<Self> {
        if q < 3 || q == 2 || (q % 2 == 0 && q < 4) {
            return invalid(format!("PHS exponent must be ≥ 3 (even ≥ 4), got {q}"));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_odd(&self) -> bool {
        self.q % 2 == 1
    }

    pub fn value(&self, r: f64) -> f64 {
        phs_value(r, self.q)
    }

    /// `(f1, f2)` with `∇φ = f1·d` and `∇²φ = f1·I + f2·d dᵀ`, `d = x − xᵢ`.
    fn radial_factors(&self, r: f64) -> (f64, f64) {
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let q = self.q as f64;
        let rq2 = r.powi(self.q as i32 - 2);
        let rq4 = rq2 / (r * r);
        if self.is_odd() {
            (q * rq2, q * (q - 2.0) * rq4)
        } else {
            let g = q * r.ln() + 1.0;
            (rq2 * g, rq4 * ((q - 2.0) * g + q))
        }
    }

    /// `Lφ(‖x − node‖)` evaluated at `x = center`.
    pub fn apply(&self, center: &Point, node: &Point, coeffs: &OperatorCoeffs) -> f64 {
        let d = [center[0] - node[0], center[1] - node[1]];
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let (f1, f2) = self.radial_factors(r);
        let a = &coeffs.a;
        let second = f1 * (a[0][0] + a[1][1])
            + f2 * (a[0][0] * d[0] * d[0]
                + (a[0][1] + a[1][0]) * d[0] * d[1]
                + a[1][1] * d[1] * d[1]);
        let first = f1 * (coeffs.b[0] * d[0] + coeffs.b[1] * d[1]);
        second + first + coeffs.c * self.value(r)
    }
}

impl Default for PhsBasis {
    fn default() -> Self {
        Self { q: 5 }
    }
}

/// `r^q` for odd `q`, `r^q ln r` for even `q` (0 at `r = 0`).
pub fn phs_value(r: f64, q: u32) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let v = r.powi(q as i32);
    if q % 2 == 1 {
        v
    } else {
        v * r.ln()
    }
}

/// Operator applied to the PHS centred at `node`, evaluated at `center`.
///
/// Panics if `q < 3`.
pub fn phs_operator_apply(center: &Point, node: &Point, coeffs: &OperatorCoeffs, q: u32) -> f64 {
    PhsBasis::new(q)
        .expect("PHS exponent")
        .apply(center, node, coeffs)
}
