use crate::basket::BasketMarket;
use crate::table::ReferencePrice;
use crate::{OracleError, Result};

/// Grid and solver settings for the American basket put oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmericanGridOptions {
    /// Intervals per axis on the finest grid; the two coarser grids use a
    /// half and a quarter.
    pub intervals: usize,
    /// Time steps on the finest grid, halved with the intervals.
    pub steps: usize,
    /// Side of the computational square; `None` means `8K`.
    pub width: Option<f64>,
    /// Width of the sinh clustering around the strike, relative to `width`.
    pub cluster: f64,
    pub omega: f64,
    /// Bound on the largest PSOR update at convergence.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for AmericanGridOptions {
    fn default() -> Self {
        Self {
            intervals: 512,
            steps: 200,
            width: None,
            cluster: 0.05,
            omega: 1.5,
            tol: 1e-9,
            max_sweeps: 20_000,
        }
    }
}

/// Oracle output: Richardson-extrapolated prices and the raw grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct AmericanPutSolution {
    pub prices: Vec<ReferencePrice>,
    /// Values at the points on the three grids, coarsest first.
    pub grid_values: [Vec<f64>; 3],
    /// Largest number of PSOR sweeps taken by any step.
    pub max_sweeps: usize,
    /// Smallest `u − g` over both grids and all steps.
    pub min_gap: f64,
}

/// Clustered 1D grid `x = K + H·sinh(z)` on `[0, w]` with equispaced `z`.
fn sinh_axis(strike: f64, width: f64, cluster: f64, n: usize) -> Vec<f64> {
    let h = cluster * width;
    let z0 = (-strike / h).asinh();
    let z1 = ((width - strike) / h).asinh();
    let mut x: Vec<f64> = (0..=n)
        .map(|i| strike + h * (z0 + (z1 - z0) * i as f64 / n as f64).sinh())
        .collect();
    x[0] = 0.0;
    x[n] = width;
    x
}

/// Three-point weights `(w₋, w₀, w₊)` for the first and second derivative.
fn fd_weights(hm: f64, hp: f64) -> ([f64; 3], [f64; 3]) {
    let d1 = [
        -hp / (hm * (hm + hp)),
        (hp - hm) / (hm * hp),
        hm / (hp * (hm + hp)),
    ];
    let d2 = [
        2.0 / (hm * (hm + hp)),
        -2.0 / (hm * hp),
        2.0 / (hp * (hm + hp)),
    ];
    (d1, d2)
}

struct Grid {
    x: Vec<f64>,
    n: usize,
    /// Off-diagonal operator entries in row-compressed form.
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    /// `true` where the value is fixed at zero.
    fixed: Vec<bool>,
    payoff: Vec<f64>,
}

impl Grid {
    fn build(m: &BasketMarket, width: f64, opts: &AmericanGridOptions, n: usize) -> Self {
        let x = sinh_axis(m.strike, width, opts.cluster, n);
        let idx = |i: usize, j: usize| i * (n + 1) + j;
        let np = (n + 1) * (n + 1);
        let (s1, s2) = (m.sigma[0], m.sigma[1]);
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = vec![0.0; np];
        let mut fixed = vec![false; np];
        let mut payoff = vec![0.0; np];
        for i in 0..=n {
            for j in 0..=n {
                let k = idx(i, j);
                let (a, b) = (x[i], x[j]);
                payoff[k] = (m.strike - 0.5 * (a + b)).max(0.0);
                // same truncation as the triangular domain: u = 0 on and beyond s₁ + s₂ = w
                if a + b >= width * (1.0 - 1e-12) {
                    fixed[k] = true;
                    row_ptr.push(cols.len());
                    continue;
                }
                let mut entries: Vec<(usize, f64)> = Vec::with_capacity(8);
                let mut center = -m.r;
                if i > 0 {
                    let (d1, d2) = fd_weights(a - x[i - 1], x[i + 1] - a);
                    let (diff, drift) = (0.5 * s1 * s1 * a * a, m.r * a);
                    entries.push((idx(i - 1, j), diff * d2[0] + drift * d1[0]));
                    entries.push((idx(i + 1, j), diff * d2[2] + drift * d1[2]));
                    center += diff * d2[1] + drift * d1[1];
                }
                if j > 0 {
                    let (d1, d2) = fd_weights(b - x[j - 1], x[j + 1] - b);
                    let (diff, drift) = (0.5 * s2 * s2 * b * b, m.r * b);
                    entries.push((idx(i, j - 1), diff * d2[0] + drift * d1[0]));
                    entries.push((idx(i, j + 1), diff * d2[2] + drift * d1[2]));
                    center += diff * d2[1] + drift * d1[1];
                }
                if i > 0 && j > 0 {
                    let c =
                        m.rho * s1 * s2 * a * b / ((x[i + 1] - x[i - 1]) * (x[j + 1] - x[j - 1]));
                    entries.push((idx(i + 1, j + 1), c));
                    entries.push((idx(i - 1, j - 1), c));
                    entries.push((idx(i + 1, j - 1), -c));
                    entries.push((idx(i - 1, j + 1), -c));
                }
                diag[k] = center;
                for (c, v) in entries {
                    cols.push(c);
                    vals.push(v);
                }
                row_ptr.push(cols.len());
            }
        }
        Self {
            x,
            n,
            row_ptr,
            cols,
            vals,
            diag,
            fixed,
            payoff,
        }
    }

    /// Projected SOR for `(α − kL) u = rhs`, `u ≥ g`; returns the sweep count.
    fn psor(
        &self,
        u: &mut [f64],
        rhs: &[f64],
        alpha: f64,
        k: f64,
        opts: &AmericanGridOptions,
        step: usize,
    ) -> Result<usize> {
        let mut last = f64::INFINITY;
        for sweep in 1..=opts.max_sweeps {
            let mut change: f64 = 0.0;
            for row in 0..u.len() {
                if self.fixed[row] {
                    continue;
                }
                let mut acc = rhs[row];
                for p in self.row_ptr[row]..self.row_ptr[row + 1] {
                    acc += k * self.vals[p] * u[self.cols[p]];
                }
                let gs = acc / (alpha - k * self.diag[row]);
                let old = u[row];
                let new = (old + opts.omega * (gs - old)).max(self.payoff[row]);
                change = change.max((new - old).abs());
                u[row] = new;
            }
            if change <= opts.tol {
                return Ok(sweep);
            }
            last = change;
        }
        Err(OracleError::Stagnation {
            step,
            iterations: opts.max_sweeps,
            update: last,
        })
    }

    /// Variable-step BDF2 on `τ_k = T (k/M)²` with a BDF1 first step.
    fn solve(
        &self,
        m: &BasketMarket,
        steps: usize,
        opts: &AmericanGridOptions,
    ) -> Result<(Vec<f64>, usize, f64)> {
        let tau = |k: usize| m.maturity * (k as f64 / steps as f64).powi(2);
        let mut prev = self.payoff.clone();
        let mut u = self.payoff.clone();
        let mut rhs = vec![0.0; u.len()];
        let mut max_sweeps = 0;
        let mut min_gap = f64::INFINITY;
        for step in 1..=steps {
            let kn = tau(step) - tau(step - 1);
            let alpha = if step == 1 {
                for (r, v) in rhs.iter_mut().zip(&u) {
                    *r = *v;
                }
                1.0
            } else {
                let w = kn / (tau(step - 1) - tau(step - 2));
                for ((r, v), p) in rhs.iter_mut().zip(&u).zip(&prev) {
                    *r = (1.0 + w) * v - w * w / (1.0 + w) * p;
                }
                (1.0 + 2.0 * w) / (1.0 + w)
            };
            let mut next = u.clone();
            max_sweeps = max_sweeps.max(self.psor(&mut next, &rhs, alpha, kn, opts, step)?);
            for ((v, g), f) in next.iter().zip(&self.payoff).zip(&self.fixed) {
                if !f {
                    min_gap = min_gap.min(v - g);
                }
            }
            prev = std::mem::replace(&mut u, next);
        }
        Ok((u, max_sweeps, min_gap))
    }

    /// Tensor cubic Lagrange interpolation from the four surrounding nodes per axis.
    fn interpolate(&self, u: &[f64], p: [f64; 2]) -> f64 {
        let stencil = |v: f64| -> (usize, [f64; 4]) {
            let cell = self.x.partition_point(|&t| t <= v).clamp(1, self.n) - 1;
            let start = cell.saturating_sub(1).min(self.n - 3);
            let xs = &self.x[start..start + 4];
            let mut w = [1.0; 4];
            for a in 0..4 {
                for b in 0..4 {
                    if a != b {
                        w[a] *= (v - xs[b]) / (xs[a] - xs[b]);
                    }
                }
            }
            (start, w)
        };
        let (i0, wi) = stencil(p[0]);
        let (j0, wj) = stencil(p[1]);
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                acc += wi[a] * wj[b] * u[(i0 + a) * (self.n + 1) + j0 + b];
            }
        }
        acc
    }
}

/// American basket put values at `points` (price units) by PSOR on three
/// nested grids. Each adjacent pair is Richardson-extrapolated assuming
/// second order in space and time; the finer extrapolation is quoted and
/// its distance from the coarser one is the accuracy.
pub fn american_put_reference(
    m: &BasketMarket,
    points: &[[f64; 2]],
    opts: &AmericanGridOptions,
) -> Result<AmericanPutSolution> {
    let width = opts.width.unwrap_or(8.0 * m.strike);
    for p in points {
        m.validate(p)?;
        if p[0] + p[1] >= width {
            return Err(OracleError::InvalidInput(format!(
                "point {p:?} lies outside the truncated domain"
            )));
        }
    }
    if !(width > 0.0
        && opts.intervals >= 16
        && opts.intervals % 4 == 0
        && opts.steps >= 8
        && opts.steps % 4 == 0)
    {
        return Err(OracleError::InvalidInput(format!(
            "bad grid options {opts:?}"
        )));
    }
    if !(opts.omega > 0.0 && opts.omega < 2.0 && opts.cluster > 0.0) {
        return Err(OracleError::InvalidInput(format!(
            "bad PSOR options {opts:?}"
        )));
    }
    let mut sweeps = 0;
    let mut gap = f64::INFINITY;
    let mut run = |div: usize| -> Result<Vec<f64>> {
        let grid = Grid::build(m, width, opts, opts.intervals / div);
        let (u, s, g) = grid.solve(m, opts.steps / div, opts)?;
        sweeps = sweeps.max(s);
        gap = gap.min(g);
        Ok(points.iter().map(|p| grid.interpolate(&u, *p)).collect())
    };
    let grid_values = [run(4)?, run(2)?, run(1)?];
    let extrapolate = |c: f64, f: f64| f + (f - c) / 3.0;
    let prices = (0..points.len())
        .map(|k| {
            let [v0, v1, v2] = [grid_values[0][k], grid_values[1][k], grid_values[2][k]];
            let coarse = extrapolate(v0, v1);
            let fine = extrapolate(v1, v2);
            ReferencePrice::new(
                "basket_american_put",
                points[k],
                fine,
                (fine - coarse).abs(),
                "PSOR BDF2 three-grid Richardson",
            )
        })
        .collect();
    Ok(AmericanPutSolution {
        prices,
        grid_values,
        max_sweeps: sweeps,
        min_gap: gap,
    })
}
