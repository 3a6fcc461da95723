use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::nodegen::{cartesian_layout, Domain2D};
use crate::stencils::{make_stencils, stencils_for};
use crate::{Error, Point};

/// Full saddle system in model coordinates solved by SVD pseudo-inverse; the
/// weight block is unique even when the polynomial block is rank deficient.
fn oracle_weights(pts: &[Point], coeffs: &OperatorCoeffs, q: i32, p: usize) -> Vec<f64> {
    let mons: Vec<(i32, i32)> = (0..=p as i32)
        .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
        .collect();
    let (n, m) = (pts.len(), mons.len());
    let c = pts[0];
    let mut a = DMatrix::<f64>::zeros(n + m, n + m);
    let mut rhs = DVector::<f64>::zeros(n + m);
    for i in 0..n {
        for k in 0..n {
            let r = ((pts[i][0] - pts[k][0]).powi(2) + (pts[i][1] - pts[k][1]).powi(2)).sqrt();
            a[(i, k)] = r.powi(q);
        }
        for (t, &(ex, ey)) in mons.iter().enumerate() {
            let v = pts[i][0].powi(ex) * pts[i][1].powi(ey);
            a[(i, n + t)] = v;
            a[(n + t, i)] = v;
        }
        // L r^q with d = c − x_i, written out directly
        let d = [c[0] - pts[i][0], c[1] - pts[i][1]];
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let qf = q as f64;
        let (f1, f2) = if r == 0.0 {
            (0.0, 0.0)
        } else {
            (qf * r.powi(q - 2), qf * (qf - 2.0) * r.powi(q - 4))
        };
        let mut v = coeffs.c * r.powi(q);
        for k in 0..2 {
            v += coeffs.b[k] * f1 * d[k];
            for l in 0..2 {
                let delta = if k == l { 1.0 } else { 0.0 };
                v += coeffs.a[k][l] * (f1 * delta + f2 * d[k] * d[l]);
            }
        }
        rhs[i] = v;
    }
    for (t, &(ex, ey)) in mons.iter().enumerate() {
        let pw = |x: f64, e: i32| if e < 0 { 0.0 } else { x.powi(e) };
        let (x, y) = (c[0], c[1]);
        let (fx, fy) = (ex as f64, ey as f64);
        rhs[n + t] = coeffs.c * pw(x, ex) * pw(y, ey)
            + coeffs.b[0] * fx * pw(x, ex - 1) * pw(y, ey)
            + coeffs.b[1] * fy * pw(x, ex) * pw(y, ey - 1)
            + coeffs.a[0][0] * fx * (fx - 1.0) * pw(x, ex - 2) * pw(y, ey)
            + (coeffs.a[0][1] + coeffs.a[1][0]) * fx * fy * pw(x, ex - 1) * pw(y, ey - 1)
            + coeffs.a[1][1] * fy * (fy - 1.0) * pw(x, ex) * pw(y, ey - 2);
    }
    let sol = a.svd(true, true).solve(&rhs, 1e-12).unwrap();
    sol.as_slice()[..n].to_vec()
}

fn cross(h: f64) -> Vec<Point> {
    vec![[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]]
}

#[test]
fn five_point_laplacian() {
    let opts = WeightOptions::new(3, 2).unwrap();
    for h in [1.0, 0.01] {
        let pts = cross(h);
        let w = local_weights(&pts, &OperatorCoeffs::laplacian(), &opts).unwrap();
        let oracle = oracle_weights(&pts, &OperatorCoeffs::laplacian(), 3, 2);
        let classical = [-4.0, 1.0, 1.0, 1.0, 1.0].map(|v| v / (h * h));
        for i in 0..5 {
            assert_abs_diff_eq!(w[i], oracle[i], epsilon = 1e-10 / (h * h));
            assert_abs_diff_eq!(w[i], classical[i], epsilon = 1e-10 / (h * h));
        }
    }
}

#[test]
fn central_first_derivative() {
    let opts = WeightOptions::new(3, 2).unwrap();
    let h = 0.05;
    let pts = cross(h);
    let w = local_weights(&pts, &OperatorCoeffs::first_derivative(0), &opts).unwrap();
    let oracle = oracle_weights(&pts, &OperatorCoeffs::first_derivative(0), 3, 2);
    let classical = [0.0, 0.5 / h, -0.5 / h, 0.0, 0.0];
    for i in 0..5 {
        assert_abs_diff_eq!(w[i], oracle[i], epsilon = 1e-10 / h);
        assert_abs_diff_eq!(w[i], classical[i], epsilon = 1e-10 / h);
    }
}

fn scattered(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![[0.3, 0.4]];
    while pts.len() < n {
        pts.push([
            0.3 + 0.2 * rng.gen::<f64>() - 0.1,
            0.4 + 0.2 * rng.gen::<f64>() - 0.1,
        ]);
    }
    pts
}

fn general_coeffs() -> OperatorCoeffs {
    OperatorCoeffs {
        a: [[0.011, 0.0056], [0.0056, 0.011]],
        b: [0.004, -0.002],
        c: -0.03,
    }
}

#[test]
fn matches_oracle_on_scattered_stencil() {
    let pts = scattered(30, 7);
    let coeffs = general_coeffs();
    let w = local_weights(&pts, &coeffs, &WeightOptions::new(3, 2).unwrap()).unwrap();
    let oracle = oracle_weights(&pts, &coeffs, 3, 2);
    let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in w.iter().zip(&oracle) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-8 * scale);
    }
}

#[test]
fn weight_sum_equals_zeroth_order_coefficient() {
    let pts = scattered(75, 3);
    let coeffs = general_coeffs();
    let w = local_weights(&pts, &coeffs, &WeightOptions::default()).unwrap();
    assert_abs_diff_eq!(w.iter().sum::<f64>(), coeffs.c, epsilon = 1e-9);
}

#[test]
fn reproduces_degree_four_polynomials() {
    let pts = scattered(75, 11);
    let coeffs = general_coeffs();
    let opts = WeightOptions::default();
    let w = local_weights(&pts, &coeffs, &opts).unwrap();
    let exact = opts.poly.apply(&pts[0], &coeffs);
    for k in 0..opts.poly.len() {
        let got: f64 = pts
            .iter()
            .zip(&w)
            .map(|(p, w)| opts.poly.eval(p)[k] * w)
            .sum();
        assert_abs_diff_eq!(got, exact[k], epsilon = 1e-8);
    }
}

#[test]
fn even_branch_reproduces_polynomials() {
    let pts = scattered(60, 5);
    let opts = WeightOptions::new(4, 3).unwrap();
    let w = local_weights(&pts, &OperatorCoeffs::laplacian(), &opts).unwrap();
    let exact = opts.poly.apply(&pts[0], &OperatorCoeffs::laplacian());
    for k in 0..opts.poly.len() {
        let got: f64 = pts
            .iter()
            .zip(&w)
            .map(|(p, w)| opts.poly.eval(p)[k] * w)
            .sum();
        assert_abs_diff_eq!(got, exact[k], epsilon = 1e-6);
    }
}

#[test]
fn duplicate_nodes_fail_with_node_id() {
    let mut pts = scattered(20, 1);
    pts[5] = pts[4];
    let st = crate::stencils::Stencil {
        center: 0,
        members: (0..20).collect(),
        scale: 1.0,
    };
    let mut relabeled = st.clone();
    relabeled.center = 0;
    let err = stencil_weights(
        &relabeled,
        &pts,
        &OperatorCoeffs::laplacian(),
        &WeightOptions::new(3, 2).unwrap(),
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::StencilFailure { node: 0, .. }),
        "{err}"
    );
    let opts = WeightOptions::new(5, 4).unwrap();
    assert!(local_weights(&scattered(10, 2), &OperatorCoeffs::laplacian(), &opts).is_err());
}

fn dyadic(v: f64) -> f64 {
    (v * 1048576.0).round() / 1048576.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    // dyadic coordinates and shifts keep the translated coordinates exact
    #[test]
    fn translation_invariance(kx in -4096i32..4096, ky in -4096i32..4096, seed in 0u64..1000) {
        let pts: Vec<Point> = scattered(40, seed).iter().map(|p| [dyadic(p[0]), dyadic(p[1])]).collect();
        let (dx, dy) = (kx as f64 / 1024.0, ky as f64 / 1024.0);
        let moved: Vec<Point> = pts.iter().map(|p| [p[0] + dx, p[1] + dy]).collect();
        let opts = WeightOptions::new(5, 3).unwrap();
        let c = general_coeffs();
        let a = local_weights(&pts, &c, &opts).unwrap();
        let b = local_weights(&moved, &c, &opts).unwrap();
        let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * scale, "{} vs {}", x, y);
        }
    }
}

#[test]
fn assembled_operator_properties() {
    let layout = cartesian_layout(&Domain2D::triangle(1.0).unwrap(), 30).unwrap();
    let st = make_stencils(&layout, 40).unwrap();
    let opts = WeightOptions::new(5, 3).unwrap();
    let field = |p: &Point| OperatorCoeffs {
        a: [
            [0.5 * p[0] * p[0], 0.1 * p[0] * p[1]],
            [0.1 * p[0] * p[1], 0.5 * p[1] * p[1]],
        ],
        b: [0.03 * p[0], 0.03 * p[1]],
        c: -0.03,
    };
    let l = assemble(&layout.nodes, &st, field, &opts).unwrap();
    assert!(l.nnz() <= 40 * layout.len());
    for s in &st {
        let (cols, _) = l.row(s.center);
        let mut members = s.members.clone();
        members.sort_unstable();
        assert_eq!(cols, &members[..]);
    }
    for (i, role) in layout.roles.iter().enumerate() {
        if role.is_dirichlet() {
            assert!(l.row(i).0.is_empty());
        }
    }
    // reversed stencil order gives bitwise the same matrix
    let rev: Vec<_> = st.iter().rev().cloned().collect();
    let l2 = assemble(&layout.nodes, &rev, field, &opts).unwrap();
    assert_eq!(l.triplets(), l2.triplets());
    // polynomial reproduction
    for (k, &(ex, ey)) in opts.poly.exponents().iter().enumerate() {
        let u: Vec<f64> = layout
            .nodes
            .iter()
            .map(|p| p[0].powi(ex as i32) * p[1].powi(ey as i32))
            .collect();
        let lu = l.matvec(&u);
        for s in &st {
            let exact = opts
                .poly
                .apply(&layout.nodes[s.center], &field(&layout.nodes[s.center]))[k];
            assert_abs_diff_eq!(lu[s.center], exact, epsilon = 1e-8);
        }
    }
}

#[test]
fn stencil_helper_matches_local() {
    let pts = scattered(50, 9);
    let st = stencils_for(&pts, &[0], 30).unwrap();
    let members: Vec<Point> = st[0].members.iter().map(|&i| pts[i]).collect();
    let opts = WeightOptions::default();
    let a = stencil_weights(&st[0], &pts, &general_coeffs(), &opts).unwrap();
    let b = local_weights(&members, &general_coeffs(), &opts).unwrap();
    assert_eq!(a, b);
}
