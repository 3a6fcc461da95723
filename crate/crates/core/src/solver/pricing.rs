use std::fmt::Write as _;
use std::time::Instant;

use super::{build_time_grid, condition_estimate, evaluate_at, TimeGrid};
use crate::error::{invalid, Result};
use crate::linalg::{gmres, CsrMatrix, GmresOptions, GmresReport, Ilu0, Triplet};
use crate::models::ScaledProblem;
use crate::nodegen::NodeLayout;
use crate::rbffd::{matrix_from_rows, stencil_rows, SparseOperator, WeightOptions};
use crate::stencils::make_stencils;

#[derive(Debug, Clone, PartialEq)]
pub struct PricingOptions {
    pub weights: WeightOptions,
    pub stencil_size: usize,
    pub steps: usize,
    pub gmres: GmresOptions,
    /// Start each linear solve from the previous time level.
    pub warm_start: bool,
    pub estimate_condition: bool,
}

impl Default for PricingOptions {
    /// `q = 5`, `p = 4`, `n = 75`, `M = 100`, GMRES tolerance `1e-8`.
    fn default() -> Self {
        Self {
            weights: WeightOptions::default(),
            stencil_size: 75,
            steps: 100,
            gmres: GmresOptions::default(),
            warm_start: true,
            estimate_condition: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLog {
    pub step: usize,
    /// Time to maturity reached by this step.
    pub tau: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    /// Stencil search and weight solves.
    pub weights: f64,
    /// Sparse assembly of `L`, `C` and the incomplete factorization.
    pub assemble: f64,
    pub step: f64,
}

impl Timings {
    pub fn total(&self) -> f64 {
        self.weights + self.assemble + self.step
    }
}

/// Extremes of the complementarity conditions over all steps and nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcpStats {
    pub min_gap: f64,
    pub min_lambda: f64,
    pub max_product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    /// Nodal values at `τ = T`, in scaled price units.
    pub u: Vec<f64>,
    /// Values at the problem's evaluation points, in model price units.
    pub eval_values: Vec<f64>,
    pub log: Vec<StepLog>,
    pub timings: Timings,
    pub factorizations: usize,
    pub cond1: Option<f64>,
    pub lcp: Option<LcpStats>,
}

/// Differentiation and time-stepping matrices for one layout.
pub struct Discretization {
    pub l: SparseOperator,
    pub c: SparseOperator,
    pub grid: TimeGrid,
    pub ilu: Ilu0,
    pub factorizations: usize,
    pub timings: Timings,
}

/// `C = E − β₀ L` with unit rows on Dirichlet nodes.
pub fn step_matrix(l: &SparseOperator, beta0: f64, dirichlet: &[bool]) -> SparseOperator {
    let n = l.nrows();
    let mut t: Vec<Triplet> = Vec::with_capacity(l.nnz() + n);
    for (i, &fixed) in dirichlet.iter().enumerate() {
        if fixed {
            t.push((i, i, 1.0));
            continue;
        }
        let (cols, vals) = l.row(i);
        t.extend(cols.iter().zip(vals).map(|(&j, &v)| (i, j, -beta0 * v)));
        t.push((i, i, 1.0));
    }
    CsrMatrix::from_triplets(n, n, t)
}

/// Solves `C x = rhs` with ILU(0)-preconditioned GMRES; `x` is the initial
/// guess on entry.
pub fn linear_solve(
    c: &SparseOperator,
    ilu: &Ilu0,
    rhs: &[f64],
    x: &mut [f64],
    opts: &GmresOptions,
) -> Result<GmresReport> {
    gmres(
        |v, y| c.matvec_into(v, y),
        |v| ilu.apply_in_place(v),
        rhs,
        x,
        opts,
    )
}

/// Weights, `L`, the time grid, `C` and its single incomplete factorization.
pub fn discretize(
    problem: &ScaledProblem,
    layout: &NodeLayout,
    opts: &PricingOptions,
) -> Result<Discretization> {
    let t0 = Instant::now();
    let stencils = make_stencils(layout, opts.stencil_size)?;
    let rows = stencil_rows(
        &layout.nodes,
        &stencils,
        |x| problem.coeffs(x),
        &opts.weights,
    )?;
    let t1 = Instant::now();
    let l = matrix_from_rows(layout.len(), &stencils, rows);
    let grid = build_time_grid(problem.spec.maturity(), opts.steps)?;
    let c = step_matrix(&l, grid.beta0, &layout.dirichlet_mask());
    let ilu = Ilu0::new(&c)?;
    let t2 = Instant::now();
    Ok(Discretization {
        l,
        c,
        grid,
        ilu,
        factorizations: 1,
        timings: Timings {
            weights: (t1 - t0).as_secs_f64(),
            assemble: (t2 - t1).as_secs_f64(),
            step: 0.0,
        },
    })
}

/// European or American pricing depending on the problem kind.
pub fn price(
    problem: &ScaledProblem,
    layout: &NodeLayout,
    opts: &PricingOptions,
) -> Result<PricingResult> {
    march(problem, layout, opts, problem.spec.kind.is_american())
}

pub fn price_european(
    problem: &ScaledProblem,
    layout: &NodeLayout,
    opts: &PricingOptions,
) -> Result<PricingResult> {
    march(problem, layout, opts, false)
}

/// Operator splitting: `C ũ = β₁u^{l−1} − β₂u^{l−2} + β₀λ^{l−1}`, then
/// `λ^l = max(0, λ^{l−1} + (g − ũ)/β₀)` and `u^l = max(ũ − β₀λ^{l−1}, g)`.
pub fn price_american(
    problem: &ScaledProblem,
    layout: &NodeLayout,
    opts: &PricingOptions,
) -> Result<PricingResult> {
    if !problem.spec.kind.is_american() {
        return invalid(format!("{} has no early exercise", problem.spec.kind));
    }
    march(problem, layout, opts, true)
}

fn march(
    problem: &ScaledProblem,
    layout: &NodeLayout,
    opts: &PricingOptions,
    american: bool,
) -> Result<PricingResult> {
    if layout.domain != problem.spec.domain {
        return invalid("layout was generated for a different domain");
    }
    let mut disc = discretize(problem, layout, opts)?;
    let t_step = Instant::now();
    let n = layout.len();
    let grid = &disc.grid;
    let beta0 = grid.beta0;
    let g: Vec<f64> = layout.nodes.iter().map(|x| problem.payoff(x)).collect();
    let fixed: Vec<Option<usize>> = (0..n)
        .map(|i| layout.roles[i].is_dirichlet().then_some(i))
        .collect();

    let mut u_prev2 = g.clone();
    let mut u_prev = g.clone();
    let mut lambda = vec![0.0; n];
    let mut stats = LcpStats {
        min_gap: f64::INFINITY,
        min_lambda: f64::INFINITY,
        max_product: 0.0,
    };
    let mut rhs = vec![0.0; n];
    let mut log = Vec::with_capacity(grid.steps());
    for (l, tau) in grid.levels().into_iter().enumerate() {
        let (b1, b2) = (grid.beta1[l], grid.beta2[l]);
        for i in 0..n {
            rhs[i] = match fixed[i] {
                Some(_) => problem
                    .boundary_value(&layout.nodes[i], layout.roles[i], tau)?
                    .expect("Dirichlet role has data"),
                None => {
                    let v = b1 * u_prev[i] - b2 * u_prev2[i];
                    if american {
                        v + beta0 * lambda[i]
                    } else {
                        v
                    }
                }
            };
        }
        let mut x = if opts.warm_start {
            u_prev.clone()
        } else {
            vec![0.0; n]
        };
        let report = linear_solve(&disc.c, &disc.ilu, &rhs, &mut x, &opts.gmres)?;
        // identity rows are solved only to the Krylov tolerance; pin them exactly
        for (i, f) in fixed.iter().enumerate() {
            if f.is_some() {
                x[i] = rhs[i];
            }
        }
        log.push(StepLog {
            step: l + 1,
            tau,
            iterations: report.iterations,
            residual: report.relative_residual,
        });
        if american {
            for i in 0..n {
                if fixed[i].is_some() {
                    lambda[i] = 0.0;
                    continue;
                }
                let old = lambda[i];
                let new = (old + (g[i] - x[i]) / beta0).max(0.0);
                x[i] = if new > 0.0 {
                    g[i]
                } else {
                    (x[i] - beta0 * old).max(g[i])
                };
                lambda[i] = new;
            }
            for i in 0..n {
                stats.min_gap = stats.min_gap.min(x[i] - g[i]);
                stats.min_lambda = stats.min_lambda.min(lambda[i]);
                stats.max_product = stats.max_product.max((lambda[i] * (x[i] - g[i])).abs());
            }
        }
        u_prev2 = std::mem::replace(&mut u_prev, x);
    }
    disc.timings.step = t_step.elapsed().as_secs_f64();

    let cond1 = if opts.estimate_condition {
        Some(condition_estimate(&disc.c, &disc.ilu)?)
    } else {
        None
    };
    let eval_values = evaluate_at(layout, &u_prev, &problem.eval_points)?
        .into_iter()
        .map(|v| problem.unscale_price(v))
        .collect();
    Ok(PricingResult {
        u: u_prev,
        eval_values,
        log,
        timings: disc.timings,
        factorizations: disc.factorizations,
        cond1,
        lcp: american.then_some(stats),
    })
}

/// One `x y u` line per node, scaled coordinates and model price units.
pub fn solution_text(layout: &NodeLayout, u: &[f64], price_scale: f64) -> String {
    let mut out = String::with_capacity(48 * u.len());
    for (p, v) in layout.nodes.iter().zip(u) {
        let _ = writeln!(out, "{:e} {:e} {:e}", p[0], p[1], v * price_scale);
    }
    out
}

/// Per-step iteration counts and residuals.
pub fn solver_log_csv(log: &[StepLog]) -> String {
    let mut out = String::from("step,tau,iterations,residual\n");
    for s in log {
        let _ = writeln!(
            out,
            "{},{:e},{},{:e}",
            s.step, s.tau, s.iterations, s.residual
        );
    }
    out
}
