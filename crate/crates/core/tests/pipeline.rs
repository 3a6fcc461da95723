//! End-to-end runs through the public API: layout, stencils, weights,
//! time stepping, evaluation. Reference values come from the independent
//! oracle crate.

use rbffd::models::{BasketParams, HestonParams, ProblemKind, ProblemSpec};
use rbffd::nodegen::{parse_layout_text, smooth_layout_with_count, NodeLayout};
use rbffd::solver::{price, PricingOptions};
use rbffd_oracles::{basket_call_reference, heston_call_reference, BasketMarket, HestonMarket};

fn smooth(spec: &ProblemSpec, target: usize) -> NodeLayout {
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

fn basket_references() -> Vec<f64> {
    let p = BasketParams::paper();
    let m = BasketMarket {
        r: p.r,
        sigma: p.sigma,
        rho: p.rho,
        strike: p.strike,
        maturity: p.maturity,
    };
    ProblemSpec::preset(ProblemKind::BasketEuropeanCall)
        .eval_points
        .iter()
        .map(|s| basket_call_reference(&m, *s).unwrap().value)
        .collect()
}

fn max_error(values: &[f64], refs: &[f64]) -> f64 {
    values
        .iter()
        .zip(refs)
        .map(|(v, r)| (v - r).abs())
        .fold(0.0, f64::max)
}

#[test]
fn basket_call_is_close_to_the_quadrature_price() {
    let spec = ProblemSpec::preset(ProblemKind::BasketEuropeanCall);
    let layout = smooth(&spec, 4000);
    let res = price(&spec.scaled(), &layout, &PricingOptions::default()).unwrap();
    let err = max_error(&res.eval_values, &basket_references());
    assert!(err < 5e-3, "max error {err}");
}

#[test]
fn heston_call_is_close_to_the_transform_price() {
    let spec = ProblemSpec::preset(ProblemKind::HestonEuropeanCall);
    let p = HestonParams::paper();
    let m = HestonMarket {
        r: p.r,
        kappa: p.kappa,
        eta: p.eta,
        sigma: p.sigma,
        rho: p.rho,
        strike: p.strike,
        maturity: p.maturity,
    };
    let layout = smooth(&spec, 4000);
    let res = price(&spec.scaled(), &layout, &PricingOptions::default()).unwrap();
    let refs: Vec<f64> = spec
        .eval_points
        .iter()
        .map(|x| heston_call_reference(&m, x[0], x[1]).unwrap().value)
        .collect();
    let err = max_error(&res.eval_values, &refs);
    assert!(err < 1e-2, "max error {err}");
}

#[test]
fn doubling_steps_moves_less_than_the_spatial_error() {
    let spec = ProblemSpec::preset(ProblemKind::BasketEuropeanCall);
    let layout = smooth(&spec, 10_000);
    let problem = spec.scaled();
    let coarse = price(&problem, &layout, &PricingOptions::default()).unwrap();
    let fine = price(
        &problem,
        &layout,
        &PricingOptions {
            steps: 200,
            ..Default::default()
        },
    )
    .unwrap();
    let spatial = max_error(&fine.eval_values, &basket_references());
    let temporal = max_error(&coarse.eval_values, &fine.eval_values);
    assert!(temporal < spatial, "time {temporal} vs space {spatial}");
}

#[test]
fn layout_text_round_trip() {
    let spec = ProblemSpec::preset(ProblemKind::BasketAmericanPut);
    let layout = smooth(&spec, 1500);
    let file = parse_layout_text(&layout.to_text()).unwrap();
    assert_eq!(file.domain, layout.domain.kind);
    assert_eq!(file.nodes, layout.nodes);
    assert_eq!(file.roles, layout.roles);
}
