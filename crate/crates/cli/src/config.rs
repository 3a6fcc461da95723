use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rbffd::linalg::GmresOptions;
use rbffd::models::{BasketParams, HestonParams, ProblemKind, ProblemSpec};
use rbffd::nodegen::{LayoutKind, RadiusParams};
use rbffd::rbffd::WeightOptions;
use rbffd::solver::PricingOptions;
use rbffd_oracles::AmericanGridOptions;
use serde::Deserialize;

/// One node count or a list of them.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    One(usize),
    Many(Vec<usize>),
}

impl Counts {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Counts::One(n) => vec![*n],
            Counts::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// PHS exponent.
    pub q: u32,
    /// Polynomial degree.
    pub p: usize,
    /// Stencil size.
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            q: 5,
            p: 4,
            n: 75,
            m: 100,
            tol: 1e-8,
            restart: 50,
            max_iter: 200,
        }
    }
}

/// Layout parameters. `P`, `Q`, `G`, `X1`, `X2` default to the problem's
/// own radius shape when left out.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodesSection {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    #[serde(rename = "X1")]
    pub x1: Option<f64>,
    #[serde(rename = "X2")]
    pub x2: Option<f64>,
    /// Repel sweeps.
    pub a: usize,
    /// Free nodes moved per boundary node.
    pub b: usize,
    /// Grid nodes per axis for cartesian and adapted layouts; overrides `N`.
    pub per_axis: Option<usize>,
}

impl Default for NodesSection {
    fn default() -> Self {
        Self {
            h: 0.1,
            p: None,
            q: None,
            g: None,
            x1: None,
            x2: None,
            a: 4,
            b: 32,
            per_axis: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasketSection {
    pub r: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
}

impl Default for BasketSection {
    fn default() -> Self {
        let p = BasketParams::paper();
        Self {
            r: p.r,
            sigma1: p.sigma[0],
            sigma2: p.sigma[1],
            rho: p.rho,
            strike: p.strike,
            maturity: p.maturity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HestonSection {
    pub r: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sigma: f64,
    pub rho: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
}

impl Default for HestonSection {
    fn default() -> Self {
        let p = HestonParams::paper();
        Self {
            r: p.r,
            kappa: p.kappa,
            eta: p.eta,
            sigma: p.sigma,
            rho: p.rho,
            strike: p.strike,
            maturity: p.maturity,
        }
    }
}

/// Settings of the American put reference grids.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub psor_intervals: usize,
    pub psor_steps: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        let d = AmericanGridOptions::default();
        Self {
            psor_intervals: d.intervals,
            psor_steps: d.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: String,
    #[serde(default = "default_layout")]
    layout: String,
    #[serde(rename = "N", default = "default_counts")]
    counts: Counts,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    nodes: NodesSection,
    #[serde(default)]
    basket: BasketSection,
    #[serde(default)]
    heston: HestonSection,
    #[serde(default)]
    oracle: OracleSection,
}

fn default_layout() -> String {
    "smooth".into()
}

fn default_counts() -> Counts {
    Counts::One(4000)
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub layout: LayoutKind,
    /// Requested node counts, ascending.
    pub counts: Vec<usize>,
    pub solver: SolverSection,
    pub nodes: NodesSection,
    pub basket: BasketSection,
    pub heston: HestonSection,
    pub oracle: OracleSection,
}

impl RunConfig {
    /// Paper defaults for `problem` on a smooth layout with `N = 4000`.
    pub fn defaults(problem: ProblemKind) -> Self {
        Self {
            problem,
            layout: LayoutKind::Smooth,
            counts: vec![4000],
            solver: SolverSection::default(),
            nodes: NodesSection::default(),
            basket: BasketSection::default(),
            heston: HestonSection::default(),
            oracle: OracleSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("bad config")?;
        let problem: ProblemKind = raw.problem.parse()?;
        let layout: LayoutKind = raw.layout.parse()?;
        let mut counts = raw.counts.to_vec();
        if counts.is_empty() {
            bail!("N must list at least one node count");
        }
        counts.sort_unstable();
        counts.dedup();
        let cfg = Self {
            problem,
            layout,
            counts,
            solver: raw.solver,
            nodes: raw.nodes,
            basket: raw.basket,
            heston: raw.heston,
            oracle: raw.oracle,
        };
        // surfaces parameter errors before any work starts
        cfg.spec()?;
        cfg.pricing_options()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        let spec = match self.problem {
            ProblemKind::BasketEuropeanCall | ProblemKind::BasketAmericanPut => {
                let b = &self.basket;
                let params =
                    BasketParams::new(b.r, [b.sigma1, b.sigma2], b.rho, b.strike, b.maturity)?;
                if self.problem.is_american() {
                    ProblemSpec::basket_american_put(params)?
                } else {
                    ProblemSpec::basket_european_call(params)?
                }
            }
            ProblemKind::HestonEuropeanCall => {
                let h = &self.heston;
                let params =
                    HestonParams::new(h.r, h.kappa, h.eta, h.sigma, h.rho, h.strike, h.maturity)?;
                ProblemSpec::heston_european_call(params)?
            }
        };
        Ok(spec)
    }

    /// Radius shape with the configured overrides applied.
    pub fn radius_shape(&self, spec: &ProblemSpec) -> Result<RadiusParams> {
        let d = spec.radius_shape();
        let n = &self.nodes;
        Ok(RadiusParams::new(
            1.0,
            n.x1.unwrap_or(d.x1),
            n.x2.unwrap_or(d.x2),
            n.p.unwrap_or(d.p),
            n.q.unwrap_or(d.q),
            n.g.unwrap_or(d.g),
        )?)
    }

    pub fn pricing_options(&self) -> Result<PricingOptions> {
        let s = &self.solver;
        Ok(PricingOptions {
            weights: WeightOptions::new(s.q, s.p)?,
            stencil_size: s.n,
            steps: s.m,
            gmres: GmresOptions {
                tol: s.tol,
                restart: s.restart,
                max_iter: s.max_iter,
            },
            warm_start: true,
            estimate_condition: true,
        })
    }

    pub fn american_grid(&self) -> AmericanGridOptions {
        AmericanGridOptions {
            intervals: self.oracle.psor_intervals,
            steps: self.oracle.psor_steps,
            ..Default::default()
        }
    }
}
