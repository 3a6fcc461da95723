use std::f64::consts::PI;

use crate::black::norm_cdf;
use crate::quadrature::integrate_adaptive;
use crate::table::ReferencePrice;
use crate::{OracleError, Result};

/// Two-asset lognormal market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasketMarket {
    pub r: f64,
    pub sigma: [f64; 2],
    pub rho: f64,
    pub strike: f64,
    pub maturity: f64,
}

impl BasketMarket {
    pub(crate) fn validate(&self, s: &[f64; 2]) -> Result<()> {
        let ok = self.sigma.iter().all(|v| *v > 0.0)
            && (-1.0..=1.0).contains(&self.rho)
            && self.maturity > 0.0
            && self.strike >= 0.0
            && s.iter().all(|v| *v >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(OracleError::InvalidInput(format!(
                "bad basket input {self:?} at {s:?}"
            )))
        }
    }
}

/// Absolute quadrature tolerances of the two resolutions, in units of the strike.
const TOLERANCES: [f64; 2] = [1e-9, 1e-12];
const AGREEMENT: f64 = 1e-7;
/// Prices below this fraction of the strike are compared in absolute terms.
const ABS_FLOOR: f64 = 1e-2;
/// Half-width of the integration range of the conditioning Gaussian.
const Z_MAX: f64 = 15.0;

/// Undiscounted `E[max((S₁ + S₂)/2 − K, 0)]`.
///
/// Conditioning on the first asset's Gaussian factor `z` leaves a lognormal
/// second asset, so by put-call parity the inner expectation is the forward
/// minus the strike plus a Black put with strike `K' = 2K − S₁(z)`. That put
/// vanishes for `z ≥ z₀` where `S₁(z₀) = 2K`; the remaining one-dimensional
/// integral over `(−∞, z₀)` is done by adaptive Gauss–Kronrod.
fn call_expectation(m: &BasketMarket, s: &[f64; 2], tol: f64) -> f64 {
    let t = m.maturity;
    let sd = [m.sigma[0] * t.sqrt(), m.sigma[1] * t.sqrt()];
    let mu = [
        (m.r - 0.5 * m.sigma[0] * m.sigma[0]) * t,
        (m.r - 0.5 * m.sigma[1] * m.sigma[1]) * t,
    ];
    // Z₂ = ρ Z₁ + √(1 − ρ²) Y
    let c = sd[1] * (1.0 - m.rho * m.rho).max(0.0).sqrt();
    let k = m.strike;
    let put = |z: f64| -> f64 {
        let kk = 2.0 * k - s[0] * (mu[0] + sd[0] * z).exp();
        if kk <= 0.0 {
            return 0.0;
        }
        let b = s[1] * (mu[1] + sd[1] * m.rho * z).exp();
        if c == 0.0 || b == 0.0 {
            return (kk - b).max(0.0);
        }
        let fwd = b * (0.5 * c * c).exp();
        let d1 = ((fwd / kk).ln() + 0.5 * c * c) / c;
        kk * norm_cdf(c - d1) - fwd * norm_cdf(-d1)
    };
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let z0 = if s[0] > 0.0 {
        (((2.0 * k / s[0]).ln() - mu[0]) / sd[0]).min(Z_MAX)
    } else {
        Z_MAX
    };
    // the put is smooth except near the roots of S₁(z) + F₂(z) = 2K, where it
    // steepens into a kink as c → 0; those roots become breakpoints
    let excess = |z: f64| {
        s[0] * (mu[0] + sd[0] * z).exp() + s[1] * (mu[1] + sd[1] * m.rho * z).exp() - 2.0 * k
    };
    let mut cuts = vec![-Z_MAX];
    cuts.extend(
        convex_roots(excess, -Z_MAX, z0)
            .into_iter()
            .filter(|z| *z > -Z_MAX && *z < z0),
    );
    cuts.push(z0);
    let tail = if z0 > -Z_MAX {
        let share = tol / (cuts.len() - 1) as f64;
        cuts.windows(2)
            .map(|w| integrate_adaptive(|z| put(z) * density(z), w[0], w[1], share).value)
            .sum()
    } else {
        0.0
    };
    0.5 * (s[0] + s[1]) * (m.r * t).exp() - k + 0.5 * tail
}

/// Roots in `[a, b]` of a convex function: golden-section search for the
/// minimum, then bisection on each side of it.
fn convex_roots(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    if !(b > a) {
        return Vec::new();
    }
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let zmin = 0.5 * (lo + hi);
    let bisect = |mut neg: f64, mut pos: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (neg + pos);
            if f(mid) < 0.0 {
                neg = mid;
            } else {
                pos = mid;
            }
        }
        0.5 * (neg + pos)
    };
    let mut roots = Vec::new();
    if f(zmin) < 0.0 {
        if f(a) > 0.0 {
            roots.push(bisect(zmin, a));
        }
        if f(b) > 0.0 {
            roots.push(bisect(zmin, b));
        }
    }
    roots
}

/// Reference price of the arithmetic basket call at spot `s`, computed at
/// two quadrature tolerances.
pub fn basket_call_reference(m: &BasketMarket, s: [f64; 2]) -> Result<ReferencePrice> {
    m.validate(&s)?;
    let df = (-m.r * m.maturity).exp();
    // integrate the asset with the larger price volatility analytically; the
    // outer integrand is then smoother
    let (mm, ss) = if s[1] * m.sigma[1] >= s[0] * m.sigma[0] {
        (*m, s)
    } else {
        (
            BasketMarket {
                sigma: [m.sigma[1], m.sigma[0]],
                ..*m
            },
            [s[1], s[0]],
        )
    };
    let scale = m.strike.max(f64::MIN_POSITIVE);
    let coarse = df * call_expectation(&mm, &ss, TOLERANCES[0] * scale);
    let fine = df * call_expectation(&mm, &ss, TOLERANCES[1] * scale);
    let diff = (fine - coarse).abs();
    if !fine.is_finite() || diff > AGREEMENT * fine.abs().max(ABS_FLOOR * scale) {
        return Err(OracleError::NoConvergence {
            method: "basket conditional quadrature",
            coarse,
            fine,
        });
    }
    Ok(ReferencePrice::new(
        "basket_european_call",
        s,
        fine.max(0.0),
        diff,
        "conditional Black + adaptive Gauss-Kronrod",
    ))
}

/// European basket put by parity.
pub fn basket_put_reference(m: &BasketMarket, s: [f64; 2]) -> Result<ReferencePrice> {
    let call = basket_call_reference(m, s)?;
    let fwd = 0.5 * (s[0] + s[1]) - m.strike * (-m.r * m.maturity).exp();
    Ok(ReferencePrice {
        model: "basket_european_put".into(),
        value: call.value - fwd,
        method: format!("{} + parity", call.method),
        ..call
    })
}
