use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{CsrMatrix, DenseMatrix, GmresOptions, Ilu0, Triplet};
use crate::models::{BasketParams, Model, ProblemKind, ProblemSpec, ScaledProblem};
use crate::nodegen::{smooth_layout_with_count, Domain2D, NodeLayout};

fn layout_for(spec: &ProblemSpec, target: usize) -> NodeLayout {
    let scaled = spec.scaled();
    smooth_layout_with_count(
        &spec.domain,
        &spec.radius_shape(),
        &scaled.eval_points,
        target,
        4,
        32,
    )
    .unwrap()
}

fn quick() -> PricingOptions {
    PricingOptions {
        steps: 40,
        ..Default::default()
    }
}

struct Run {
    problem: ScaledProblem,
    layout: NodeLayout,
    result: PricingResult,
}

fn run(kind: ProblemKind) -> &'static Run {
    static CACHE: [OnceLock<Run>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = ProblemKind::ALL.iter().position(|k| *k == kind).unwrap();
    CACHE[slot].get_or_init(|| {
        let spec = ProblemSpec::preset(kind);
        let layout = layout_for(&spec, 2500);
        let problem = spec.scaled();
        let result = price(&problem, &layout, &quick()).unwrap();
        Run {
            problem,
            layout,
            result,
        }
    })
}

#[test]
fn zero_operator_gives_identity() {
    let l = CsrMatrix::from_triplets(4, 4, vec![]);
    let c = step_matrix(&l, 0.3, &[false; 4]);
    assert_eq!(c.triplets(), CsrMatrix::identity(4).triplets());
}

#[test]
fn dirichlet_rows_are_unit_vectors() {
    let t: Vec<Triplet> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j, 1.0 + (i * 3 + j) as f64)))
        .collect();
    let l = CsrMatrix::from_triplets(3, 3, t);
    let c = step_matrix(&l, 0.5, &[false, true, false]);
    assert_eq!(c.row(1), (&[1usize][..], &[1.0][..]));
    assert_eq!(c.get(0, 0), 1.0 - 0.5 * 1.0);
    assert_eq!(c.get(2, 1), -0.5 * 8.0);
}

#[test]
fn heat_step_matrix_has_positive_definite_symmetric_part() {
    // L = tridiag(1, −2, 1)/h² on 10 interior points
    let n = 10;
    let h = 1.0 / (n + 1) as f64;
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, -2.0 / (h * h)));
        if i > 0 {
            t.push((i, i - 1, 1.0 / (h * h)));
        }
        if i + 1 < n {
            t.push((i, i + 1, 1.0 / (h * h)));
        }
    }
    let l = CsrMatrix::from_triplets(n, n, t);
    let c = step_matrix(&l, 1e-3, &vec![false; n]);
    let dense = DMatrix::from_fn(n, n, |i, j| 0.5 * (c.get(i, j) + c.get(j, i)));
    let eig = SymmetricEigen::new(dense);
    assert!(
        eig.eigenvalues.iter().all(|&e| e > 1.0 - 1e-12),
        "{}",
        eig.eigenvalues
    );
}

fn opts(tol: f64) -> GmresOptions {
    GmresOptions {
        tol,
        ..Default::default()
    }
}

#[test]
fn identity_solve_returns_rhs() {
    let c = CsrMatrix::identity(5);
    let ilu = Ilu0::new(&c).unwrap();
    let rhs = [1.0, -2.0, 3.0, 0.5, 0.0];
    let mut x = vec![0.0; 5];
    let rep = linear_solve(&c, &ilu, &rhs, &mut x, &opts(1e-8)).unwrap();
    assert_eq!(x, rhs);
    assert!(rep.iterations <= 1);
}

#[test]
fn zero_rhs_gives_zero() {
    let c = CsrMatrix::identity(3).scaled_plus_identity(2.0, 1.0);
    let ilu = Ilu0::new(&c).unwrap();
    let mut x = vec![5.0; 3];
    linear_solve(&c, &ilu, &[0.0; 3], &mut x, &opts(1e-8)).unwrap();
    assert_eq!(x, vec![0.0; 3]);
}

#[test]
fn diagonally_dominant_system_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 50;
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j && rng.gen_bool(0.2) {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        let off: f64 = row.iter().map(|v: &f64| v.abs()).sum();
        row[i] = off + 1.0;
    }
    let t: Vec<Triplet> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(j, v)| (i, j, *v))
        })
        .collect();
    let c = CsrMatrix::from_triplets(n, n, t);
    let ilu = Ilu0::new(&c).unwrap();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut x = vec![0.0; n];
    linear_solve(&c, &ilu, &b, &mut x, &opts(1e-12)).unwrap();
    let exact = DenseMatrix::from_rows(&rows).lu().unwrap().solve(&b);
    for (a, e) in x.iter().zip(&exact) {
        assert!((a - e).abs() < 1e-7);
    }
}

#[test]
fn tiny_maturity_returns_the_payoff() {
    let BasketParams {
        r,
        sigma,
        rho,
        strike,
        ..
    } = BasketParams::paper();
    let params = BasketParams::new(r, sigma, rho, strike, 1e-12).unwrap();
    let spec = ProblemSpec::basket_european_call(params).unwrap();
    let layout = layout_for(&spec, 1500);
    let problem = spec.scaled();
    let res = price(&problem, &layout, &quick()).unwrap();
    for (x, u) in layout.nodes.iter().zip(&res.u) {
        assert!((u - problem.payoff(x)).abs() < 1e-6, "{x:?}");
    }
}

#[test]
fn vanishing_strike_prices_the_basket() {
    let BasketParams {
        r,
        sigma,
        rho,
        maturity,
        ..
    } = BasketParams::paper();
    let params = BasketParams::new(r, sigma, rho, 1e-8, maturity).unwrap();
    let pts = vec![[90.0, 90.0], [100.0, 100.0], [110.0, 110.0]];
    let spec = ProblemSpec::new(
        ProblemKind::BasketEuropeanCall,
        Model::Basket(params),
        Domain2D::triangle(800.0).unwrap(),
        pts.clone(),
    )
    .unwrap();
    let layout = layout_for(&spec, 2000);
    let res = price(&spec.scaled(), &layout, &quick()).unwrap();
    for (p, v) in pts.iter().zip(&res.eval_values) {
        let mean = 0.5 * (p[0] + p[1]);
        assert!((v - mean).abs() < 1e-3 * mean, "{v} vs {mean}");
    }
}

#[test]
fn one_factorization_per_run() {
    for kind in ProblemKind::ALL {
        assert_eq!(run(kind).result.factorizations, 1);
        assert_eq!(run(kind).result.log.len(), quick().steps);
    }
}

#[test]
fn european_values_are_ordered() {
    let v = &run(ProblemKind::BasketEuropeanCall).result.eval_values;
    assert!(v[2] >= v[1] && v[1] >= v[0] && v[0] >= 0.0, "{v:?}");
    let h = &run(ProblemKind::HestonEuropeanCall).result.eval_values;
    assert!(h[2] >= h[1] && h[1] >= h[0] && h[0] >= 0.0, "{h:?}");
}

#[test]
fn dirichlet_nodes_hold_boundary_data() {
    for kind in ProblemKind::ALL {
        let run = run(kind);
        let t = run.problem.spec.maturity();
        for (i, x) in run.layout.nodes.iter().enumerate() {
            if let Some(b) = run
                .problem
                .boundary_value(x, run.layout.roles[i], t)
                .unwrap()
            {
                assert_eq!(run.result.u[i], b, "{kind} node {i}");
            }
        }
    }
}

#[test]
fn american_complementarity_and_early_exercise() {
    let run = run(ProblemKind::BasketAmericanPut);
    let lcp = run.result.lcp.unwrap();
    assert!(lcp.min_gap >= 0.0 && lcp.min_lambda >= 0.0);
    assert_eq!(lcp.max_product, 0.0);
    let scale = run.problem.price_scale;
    for (x, u) in run.layout.nodes.iter().zip(&run.result.u) {
        let g = run.problem.payoff(x);
        assert!(u - g >= -1e-10);
        // mean(s) ≤ 20: deep in the money, held at the payoff K − mean(s)
        if 0.5 * (x[0] + x[1]) * scale <= 20.0 {
            assert_eq!(*u, g, "{x:?}");
        }
    }
    let pts = &run.problem.spec.eval_points;
    for (p, v) in pts.iter().zip(&run.result.eval_values) {
        assert!(*v >= 100.0 - 0.5 * (p[0] + p[1]));
    }
    assert!(run.result.log.iter().all(|s| s.residual <= 1e-8));
}

#[test]
fn american_requires_an_american_problem() {
    let run = run(ProblemKind::BasketEuropeanCall);
    assert!(price_american(&run.problem, &run.layout, &quick()).is_err());
}

#[test]
fn warm_start_does_not_change_the_answer() {
    let warm = run(ProblemKind::BasketEuropeanCall);
    let cold_opts = PricingOptions {
        warm_start: false,
        ..quick()
    };
    let cold = price(&warm.problem, &warm.layout, &cold_opts).unwrap();
    // the solver state is in scaled price units
    for (a, b) in warm.result.u.iter().zip(&cold.u) {
        assert!((a - b).abs() < 5e-8, "{a} vs {b}");
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let first = run(ProblemKind::HestonEuropeanCall);
    let again = price(&first.problem, &first.layout, &quick()).unwrap();
    assert_eq!(first.result.u, again.u);
}

#[test]
fn layout_for_other_domain_is_rejected() {
    let basket = run(ProblemKind::BasketEuropeanCall);
    let heston = run(ProblemKind::HestonEuropeanCall);
    assert!(price(&basket.problem, &heston.layout, &quick()).is_err());
}

#[test]
fn text_outputs() {
    let run = run(ProblemKind::BasketEuropeanCall);
    let text = solution_text(&run.layout, &run.result.u, run.problem.price_scale);
    assert_eq!(text.lines().count(), run.layout.len());
    assert!(text.lines().all(|l| l.split_whitespace().count() == 3));
    let csv = solver_log_csv(&run.result.log);
    assert_eq!(csv.lines().next(), Some("step,tau,iterations,residual"));
    assert_eq!(csv.lines().count(), run.result.log.len() + 1);
}
