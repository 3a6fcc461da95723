use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rbffd::models::{Model, ProblemKind, ProblemSpec};
use rbffd::nodegen::{
    adapted_layout, cartesian_layout, nodes_per_axis_for, smooth_layout_with_count, LayoutKind,
    NodeLayout,
};
use rbffd::solver::{price, solution_text, solver_log_csv, PricingResult};
use rbffd::stencils::KdTree;
use rbffd_oracles::{
    american_put_reference, basket_call_reference, heston_call_reference, reference_table_csv,
    BasketMarket, HestonMarket, ReferencePrice,
};
use serde::Serialize;

use crate::config::RunConfig;

pub const CSV_HEADER: &str = "N,du_max,t_weights,t_assemble,t_step,t_total,cond1";

/// Layout of the configured kind with roughly `target` nodes.
pub fn build_layout(cfg: &RunConfig, spec: &ProblemSpec, target: usize) -> Result<NodeLayout> {
    let problem = spec.scaled();
    let per_axis = || {
        cfg.nodes
            .per_axis
            .unwrap_or_else(|| nodes_per_axis_for(&spec.domain, target))
    };
    let layout = match cfg.layout {
        LayoutKind::Smooth => smooth_layout_with_count(
            &spec.domain,
            &cfg.radius_shape(spec)?,
            &problem.eval_points,
            target,
            cfg.nodes.a,
            cfg.nodes.b,
        )?,
        LayoutKind::Cartesian => cartesian_layout(&spec.domain, per_axis())?,
        LayoutKind::Adapted => {
            adapted_layout(&spec.domain, per_axis(), cfg.nodes.h, problem.k_hat)?
        }
    };
    Ok(layout)
}

/// Nearest-neighbour distances in scaled units: `(min, mean, max)`.
pub fn spacing_stats(layout: &NodeLayout) -> Result<(f64, f64, f64)> {
    let tree = KdTree::build(&layout.nodes)?;
    let mut d = Vec::with_capacity(layout.len());
    for p in &layout.nodes {
        d.push(tree.nearest(p, 2)?[1].1);
    }
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.iter().copied().fold(0.0, f64::max);
    Ok((min, d.iter().sum::<f64>() / d.len() as f64, max))
}

/// Reference prices at the problem's evaluation points.
pub fn reference_prices(cfg: &RunConfig, spec: &ProblemSpec) -> Result<Vec<ReferencePrice>> {
    let refs = match (spec.kind, &spec.model) {
        (ProblemKind::BasketEuropeanCall, Model::Basket(p)) => spec
            .eval_points
            .iter()
            .map(|s| basket_call_reference(&basket_market(p), *s))
            .collect::<Result<Vec<_>, _>>()?,
        (ProblemKind::BasketAmericanPut, Model::Basket(p)) => {
            american_put_reference(&basket_market(p), &spec.eval_points, &cfg.american_grid())?
                .prices
        }
        (ProblemKind::HestonEuropeanCall, Model::Heston(p)) => {
            let m = HestonMarket {
                r: p.r,
                kappa: p.kappa,
                eta: p.eta,
                sigma: p.sigma,
                rho: p.rho,
                strike: p.strike,
                maturity: p.maturity,
            };
            spec.eval_points
                .iter()
                .map(|x| heston_call_reference(&m, x[0], x[1]))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => unreachable!("problem specs pair kinds with models"),
    };
    Ok(refs)
}

pub fn basket_market(p: &rbffd::models::BasketParams) -> BasketMarket {
    BasketMarket {
        r: p.r,
        sigma: p.sigma,
        rho: p.rho,
        strike: p.strike,
        maturity: p.maturity,
    }
}

pub fn max_error(values: &[f64], refs: &[ReferencePrice]) -> f64 {
    values
        .iter()
        .zip(refs)
        .map(|(v, r)| (v - r.value).abs())
        .fold(0.0, f64::max)
}

/// One member of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub du_max: f64,
    pub t_weights: f64,
    pub t_assemble: f64,
    pub t_step: f64,
    pub t_total: f64,
    pub cond1: f64,
}

impl ConvergenceRecord {
    pub fn new(n: usize, du_max: f64, res: &PricingResult) -> Self {
        let t = res.timings;
        Self {
            n,
            du_max,
            t_weights: t.weights,
            t_assemble: t.assemble,
            t_step: t.step,
            t_total: t.total(),
            cond1: res.cond1.unwrap_or(f64::NAN),
        }
    }
}

pub fn records_csv(records: &[ConvergenceRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        return Ok(format!("{CSV_HEADER}\n"));
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Convergence order: minus the least-squares slope of `log Δu_max` against
/// `log √N`. `None` with fewer than two usable records.
pub fn fit_order(records: &[ConvergenceRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.du_max > 0.0)
        .map(|r| ((r.n as f64).sqrt().ln(), r.du_max.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Result of pricing one configuration.
pub struct PriceRun {
    pub spec: ProblemSpec,
    pub layout: NodeLayout,
    pub result: PricingResult,
    pub references: Vec<ReferencePrice>,
    pub du_max: f64,
    pub layout_seconds: f64,
}

pub fn price_one(
    cfg: &RunConfig,
    target: usize,
    references: &[ReferencePrice],
) -> Result<PriceRun> {
    let spec = cfg.spec()?;
    let t0 = Instant::now();
    let layout = build_layout(cfg, &spec, target)?;
    let layout_seconds = t0.elapsed().as_secs_f64();
    let result = price(&spec.scaled(), &layout, &cfg.pricing_options()?)
        .with_context(|| format!("pricing with {} nodes", layout.len()))?;
    let du_max = max_error(&result.eval_values, references);
    Ok(PriceRun {
        spec,
        layout,
        result,
        references: references.to_vec(),
        du_max,
        layout_seconds,
    })
}

fn write(out: &Path, name: &str, text: &str) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `layout.txt` and returns a summary line.
pub fn cmd_nodes(cfg: &RunConfig, out: &Path) -> Result<String> {
    fs::create_dir_all(out)?;
    let spec = cfg.spec()?;
    let target = *cfg.counts.last().expect("non-empty counts");
    let layout = build_layout(cfg, &spec, target)?;
    write(out, "layout.txt", &layout.to_text())?;
    let (min, mean, max) = spacing_stats(&layout)?;
    Ok(format!(
        "{} layout: {} nodes ({} evaluation), nearest-neighbour spacing min {min:.3e} mean {mean:.3e} max {max:.3e}",
        cfg.layout,
        layout.len(),
        layout.eval_nodes.len(),
    ))
}

/// Prices the largest configured `N`; writes the layout, solution, step log,
/// reference table and a text report, and returns the report.
pub fn cmd_price(cfg: &RunConfig, out: &Path) -> Result<String> {
    fs::create_dir_all(out)?;
    let spec = cfg.spec()?;
    let refs = reference_prices(cfg, &spec)?;
    let target = *cfg.counts.last().expect("non-empty counts");
    let run = price_one(cfg, target, &refs)?;
    let res = &run.result;
    let problem = spec.scaled();
    write(out, "layout.txt", &run.layout.to_text())?;
    write(
        out,
        "solution.txt",
        &solution_text(&run.layout, &res.u, problem.price_scale),
    )?;
    write(out, "solver_log.csv", &solver_log_csv(&res.log))?;
    write(out, "reference.csv", &reference_table_csv(&refs))?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "problem {} on a {} layout with {} nodes",
        spec.kind,
        cfg.layout,
        run.layout.len()
    );
    let _ = writeln!(
        s,
        "{:>10} {:>10} {:>14} {:>14} {:>10}",
        "s1", "s2", "value", "reference", "error"
    );
    for ((p, v), r) in spec.eval_points.iter().zip(&res.eval_values).zip(&refs) {
        let _ = writeln!(
            s,
            "{:>10.4} {:>10.4} {v:>14.8} {:>14.8} {:>10.2e}",
            p[0],
            p[1],
            r.value,
            (v - r.value).abs()
        );
    }
    let _ = writeln!(s, "du_max {:.6e}", run.du_max);
    let t = res.timings;
    let _ = writeln!(
        s,
        "seconds: layout {:.3} weights {:.3} assemble {:.3} step {:.3} total {:.3}",
        run.layout_seconds,
        t.weights,
        t.assemble,
        t.step,
        t.total()
    );
    if let Some(c) = res.cond1 {
        let _ = writeln!(s, "cond1 {c:.4e}");
    }
    if let Some(l) = res.lcp {
        let _ = writeln!(
            s,
            "complementarity: min(u - g) {:.3e} min(lambda) {:.3e} max|lambda (u - g)| {:.3e}",
            l.min_gap, l.min_lambda, l.max_product
        );
    }
    write(out, "report.txt", &s)?;
    Ok(s)
}

/// Outcome of a sweep.
pub struct Sweep {
    pub records: Vec<ConvergenceRecord>,
    pub order: Option<f64>,
}

/// Sweeps the configured node counts in ascending order. `convergence.csv`
/// is rewritten after every member, so a failure keeps the finished rows.
pub fn cmd_converge(
    cfg: &RunConfig,
    out: &Path,
    mut progress: impl FnMut(&ConvergenceRecord),
) -> Result<Sweep> {
    fs::create_dir_all(out)?;
    let spec = cfg.spec()?;
    let refs = reference_prices(cfg, &spec)?;
    write(out, "reference.csv", &reference_table_csv(&refs))?;
    let mut records = Vec::with_capacity(cfg.counts.len());
    write(out, "convergence.csv", &records_csv(&records)?)?;
    for &target in &cfg.counts {
        let run = price_one(cfg, target, &refs)?;
        let rec = ConvergenceRecord::new(run.layout.len(), run.du_max, &run.result);
        progress(&rec);
        records.push(rec);
        write(out, "convergence.csv", &records_csv(&records)?)?;
    }
    let order = fit_order(&records);
    let fit = match order {
        Some(o) => format!("order {o:.4}\n"),
        None => "order none\n".to_string(),
    };
    write(out, "fit.txt", &fit)?;
    Ok(Sweep { records, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, du: f64) -> ConvergenceRecord {
        ConvergenceRecord {
            n,
            du_max: du,
            t_weights: 1.0,
            t_assemble: 1.0,
            t_step: 1.0,
            t_total: 3.0,
            cond1: 10.0,
        }
    }

    #[test]
    fn exact_power_law_gives_its_order() {
        let recs: Vec<_> = [1000usize, 4000, 16000]
            .iter()
            .map(|&n| rec(n, 3.0 / n as f64))
            .collect();
        assert!((fit_order(&recs).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_record_has_no_order() {
        assert_eq!(fit_order(&[rec(1000, 0.1)]), None);
        assert_eq!(fit_order(&[rec(1000, 0.1), rec(1000, 0.2)]), None);
    }

    #[test]
    fn csv_header_is_stable() {
        let csv = records_csv(&[rec(1000, 0.5)]).unwrap();
        assert_eq!(csv.lines().next(), Some(CSV_HEADER));
        assert_eq!(records_csv(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
