//! Pricing problems: operators, payoffs, boundary data and scaling to the
//! unit computational domain.
//!
//! Coordinates on the computational domain are `x = s / s_max` per axis
//! (for Heston the second axis is `y = v / v_max`). Prices are divided by
//! the width of the first axis, so the payoff slope stays `O(1)`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use crate::error::{invalid, Result};
use crate::nodegen::{Domain2D, DomainKind, RadiusParams, Role, BOUNDARY_EPS};
use crate::rbffd::OperatorCoeffs;
use crate::Point;

/// Two-asset Black–Scholes–Merton parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasketParams {
    pub r: f64,
    pub sigma: [f64; 2],
    /// Correlation between the two driving Wiener processes.
    pub rho: f64,
    pub strike: f64,
    pub maturity: f64,
}

impl BasketParams {
    pub fn new(r: f64, sigma: [f64; 2], rho: f64, strike: f64, maturity: f64) -> Result<Self> {
        if !(sigma[0] > 0.0 && sigma[1] > 0.0) {
            return invalid(format!("volatilities must be positive, got {sigma:?}"));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return invalid(format!("correlation must lie in [-1, 1], got {rho}"));
        }
        if !(maturity > 0.0) || !(strike >= 0.0) || !r.is_finite() {
            return invalid("maturity must be positive and strike non-negative");
        }
        Ok(Self {
            r,
            sigma,
            rho,
            strike,
            maturity,
        })
    }

    /// r = 0.03, σ₁ = σ₂ = 0.15, ρ = 0.5, K = 100, T = 1.
    pub fn paper() -> Self {
        Self::new(0.03, [0.15, 0.15], 0.5, 100.0, 1.0).expect("valid preset")
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            self.rho
        }
    }
}

/// Heston stochastic volatility parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    pub r: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sigma: f64,
    pub rho: f64,
    pub strike: f64,
    pub maturity: f64,
}

impl HestonParams {
    pub fn new(
        r: f64,
        kappa: f64,
        eta: f64,
        sigma: f64,
        rho: f64,
        strike: f64,
        maturity: f64,
    ) -> Result<Self> {
        if !(kappa > 0.0 && eta > 0.0 && sigma > 0.0) {
            return invalid("kappa, eta and sigma must be positive");
        }
        if !(-1.0..=1.0).contains(&rho) {
            return invalid(format!("correlation must lie in [-1, 1], got {rho}"));
        }
        if !(maturity > 0.0) || !(strike >= 0.0) || !r.is_finite() {
            return invalid("maturity must be positive and strike non-negative");
        }
        Ok(Self {
            r,
            kappa,
            eta,
            sigma,
            rho,
            strike,
            maturity,
        })
    }

    /// r = 0.03, κ = 2, η = 0.0225, σ = 0.25, ρ = −0.5, K = 100, T = 1.
    pub fn paper() -> Self {
        Self::new(0.03, 2.0, 0.0225, 0.25, -0.5, 100.0, 1.0).expect("valid preset")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    BasketEuropeanCall,
    BasketAmericanPut,
    HestonEuropeanCall,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::BasketEuropeanCall,
        ProblemKind::BasketAmericanPut,
        ProblemKind::HestonEuropeanCall,
    ];

    pub fn is_american(self) -> bool {
        self == ProblemKind::BasketAmericanPut
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::BasketEuropeanCall => "basket_european_call",
            ProblemKind::BasketAmericanPut => "basket_american_put",
            ProblemKind::HestonEuropeanCall => "heston_european_call",
        })
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .map_or_else(|| invalid(format!("unknown problem '{s}'")), Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Basket(BasketParams),
    Heston(HestonParams),
}

impl Model {
    pub fn strike(&self) -> f64 {
        match self {
            Model::Basket(p) => p.strike,
            Model::Heston(p) => p.strike,
        }
    }

    pub fn rate(&self) -> f64 {
        match self {
            Model::Basket(p) => p.r,
            Model::Heston(p) => p.r,
        }
    }

    pub fn maturity(&self) -> f64 {
        match self {
            Model::Basket(p) => p.maturity,
            Model::Heston(p) => p.maturity,
        }
    }
}

/// A pricing problem in model units.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub model: Model,
    pub domain: Domain2D,
    /// Points where prices are reported, in model units.
    pub eval_points: Vec<Point>,
}

/// Far-field truncation of the basket domain in units of the strike.
pub const BASKET_WIDTH_IN_STRIKES: f64 = 8.0;
/// Far-field truncation of the Heston price axis in units of the strike.
pub const HESTON_WIDTH_IN_STRIKES: f64 = 4.0;
pub const HESTON_V_MAX: f64 = 0.5;

impl ProblemSpec {
    pub fn new(
        kind: ProblemKind,
        model: Model,
        domain: Domain2D,
        eval_points: Vec<Point>,
    ) -> Result<Self> {
        let consistent = matches!(
            (kind, &model, domain.kind),
            (
                ProblemKind::BasketEuropeanCall | ProblemKind::BasketAmericanPut,
                Model::Basket(_),
                DomainKind::Triangle
            ) | (
                ProblemKind::HestonEuropeanCall,
                Model::Heston(_),
                DomainKind::Rectangle
            )
        );
        if !consistent {
            return invalid(format!("{kind} does not match the model or domain"));
        }
        for p in &eval_points {
            let x = domain.to_scaled(p);
            if !(domain.contains(&x, 0.0) && domain.boundary_distance(&x) > BOUNDARY_EPS) {
                return invalid(format!(
                    "evaluation point {p:?} is not strictly inside the domain"
                ));
            }
        }
        Ok(Self {
            kind,
            model,
            domain,
            eval_points,
        })
    }

    fn basket(kind: ProblemKind, params: BasketParams) -> Result<Self> {
        let k = params.strike;
        Self::new(
            kind,
            Model::Basket(params),
            Domain2D::triangle(BASKET_WIDTH_IN_STRIKES * k)?,
            vec![[0.9 * k, 0.9 * k], [k, k], [1.1 * k, 1.1 * k]],
        )
    }

    /// Triangle with legs `8K`; evaluation at `(0.9K, 0.9K)`, `(K, K)`, `(1.1K, 1.1K)`.
    pub fn basket_european_call(params: BasketParams) -> Result<Self> {
        Self::basket(ProblemKind::BasketEuropeanCall, params)
    }

    pub fn basket_american_put(params: BasketParams) -> Result<Self> {
        Self::basket(ProblemKind::BasketAmericanPut, params)
    }

    /// Rectangle `[0, 4K] × [0, 0.5]`; evaluation at `s ∈ {0.9K, K, 1.1K}`, `v = η`.
    pub fn heston_european_call(params: HestonParams) -> Result<Self> {
        let k = params.strike;
        let v = params.eta;
        Self::new(
            ProblemKind::HestonEuropeanCall,
            Model::Heston(params),
            Domain2D::rectangle(HESTON_WIDTH_IN_STRIKES * k, HESTON_V_MAX)?,
            vec![[0.9 * k, v], [k, v], [1.1 * k, v]],
        )
    }

    /// Paper parameter set for `kind`.
    pub fn preset(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::BasketEuropeanCall => Self::basket_european_call(BasketParams::paper()),
            ProblemKind::BasketAmericanPut => Self::basket_american_put(BasketParams::paper()),
            ProblemKind::HestonEuropeanCall => Self::heston_european_call(HestonParams::paper()),
        }
        .expect("valid preset")
    }

    pub fn strike(&self) -> f64 {
        self.model.strike()
    }

    pub fn maturity(&self) -> f64 {
        self.model.maturity()
    }

    pub fn payoff(&self, s: &Point) -> f64 {
        payoff(self.kind, self.strike(), s)
    }

    /// Dirichlet value at a boundary point (model units) and time to
    /// maturity `tau`; `None` for nodes that get PDE rows.
    pub fn boundary_value(&self, s: &Point, role: Role, tau: f64) -> Result<Option<f64>> {
        if !role.is_dirichlet() {
            return Ok(None);
        }
        let at = self.domain.role_at(&self.domain.to_scaled(s));
        if at != role {
            return invalid(format!(
                "point {s:?} has role {} but {} was requested",
                at.code(),
                role.code()
            ));
        }
        let k = self.strike();
        let disc = k * (-self.model.rate() * tau).exp();
        let v = match (self.kind, role) {
            (ProblemKind::BasketEuropeanCall, Role::CloseField) => 0.0,
            (ProblemKind::BasketEuropeanCall, _) => 0.5 * (s[0] + s[1]) - disc,
            (ProblemKind::BasketAmericanPut, Role::CloseField) => self.payoff(s),
            (ProblemKind::BasketAmericanPut, _) => 0.0,
            (ProblemKind::HestonEuropeanCall, Role::CloseField) => 0.0,
            (ProblemKind::HestonEuropeanCall, _) => s[0] - disc,
        };
        Ok(Some(v))
    }

    /// Scaled strike on the first axis (`1/8` for baskets, `1/4` for Heston).
    pub fn k_hat(&self) -> f64 {
        self.strike() / self.domain.scale[0]
    }

    /// Default radius-function shape for smooth layouts; density is set later.
    pub fn radius_shape(&self) -> RadiusParams {
        let kh = self.k_hat();
        match self.model {
            Model::Basket(_) => RadiusParams::new(1.0, kh, kh, 0.25, 0.75, FRAC_PI_4),
            Model::Heston(p) => {
                RadiusParams::new(1.0, kh, p.eta / self.domain.scale[1], 0.75, 0.25, 0.0)
            }
        }
        .expect("valid radius shape")
    }

    pub fn scaled(&self) -> ScaledProblem {
        scale_problem(self)
    }
}

/// Arithmetic basket call/put on the mean of `s`, or a vanilla call on `s[0]`.
pub fn payoff(kind: ProblemKind, strike: f64, s: &Point) -> f64 {
    match kind {
        ProblemKind::BasketEuropeanCall => (0.5 * (s[0] + s[1]) - strike).max(0.0),
        ProblemKind::BasketAmericanPut => (strike - 0.5 * (s[0] + s[1])).max(0.0),
        ProblemKind::HestonEuropeanCall => (s[0] - strike).max(0.0),
    }
}

/// Black–Scholes–Merton operator in `x = s / s_max`; the operator is
/// invariant under a common scaling of both axes.
pub fn bs_coeffs(x: &Point, p: &BasketParams) -> OperatorCoeffs {
    let mut a = [[0.0; 2]; 2];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * p.correlation(i, j) * p.sigma[i] * p.sigma[j] * x[i] * x[j];
        }
    }
    OperatorCoeffs {
        a,
        b: [p.r * x[0], p.r * x[1]],
        c: -p.r,
    }
}

/// Heston operator in `x = s / s_max`, `y = v / v_max`.
pub fn heston_coeffs(x: &Point, p: &HestonParams, v_max: f64) -> OperatorCoeffs {
    let (s, y) = (x[0], x[1]);
    let cross = 0.5 * p.rho * p.sigma * s * y;
    OperatorCoeffs {
        a: [
            [0.5 * v_max * y * s * s, cross],
            [cross, 0.5 * p.sigma * p.sigma * y / v_max],
        ],
        b: [p.r * s, p.kappa * (p.eta - v_max * y) / v_max],
        c: -p.r,
    }
}

/// A problem on the unit computational domain with prices divided by
/// `price_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledProblem {
    pub spec: ProblemSpec,
    pub price_scale: f64,
    pub k_hat: f64,
    pub eval_points: Vec<Point>,
}

/// Maps a problem onto the unit triangle or square.
pub fn scale_problem(spec: &ProblemSpec) -> ScaledProblem {
    ScaledProblem {
        price_scale: spec.domain.scale[0],
        k_hat: spec.k_hat(),
        eval_points: spec
            .eval_points
            .iter()
            .map(|p| spec.domain.to_scaled(p))
            .collect(),
        spec: spec.clone(),
    }
}

impl ScaledProblem {
    pub fn domain(&self) -> &Domain2D {
        &self.spec.domain
    }

    pub fn coeffs(&self, x: &Point) -> OperatorCoeffs {
        match &self.spec.model {
            Model::Basket(p) => bs_coeffs(x, p),
            Model::Heston(p) => heston_coeffs(x, p, self.spec.domain.scale[1]),
        }
    }

    pub fn payoff(&self, x: &Point) -> f64 {
        self.spec.payoff(&self.spec.domain.to_model(x)) / self.price_scale
    }

    pub fn boundary_value(&self, x: &Point, role: Role, tau: f64) -> Result<Option<f64>> {
        Ok(self
            .spec
            .boundary_value(&self.spec.domain.to_model(x), role, tau)?
            .map(|v| v / self.price_scale))
    }

    pub fn scale_price(&self, u: f64) -> f64 {
        u / self.price_scale
    }

    pub fn unscale_price(&self, u: f64) -> f64 {
        u * self.price_scale
    }
}
