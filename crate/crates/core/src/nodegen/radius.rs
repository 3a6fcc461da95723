use crate::error::{invalid, Result};
use crate::Point;

/// Parameters of the elliptic radius function that sets the local node spacing.
///
/// `n` is the density parameter, `(x1, x2)` the densest point, `p` and `q`
/// the semi-axis scales of the elliptic level sets and `g` their rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusParams {
    pub n: f64,
    pub x1: f64,
    pub x2: f64,
    pub p: f64,
    pub q: f64,
    pub g: f64,
}

impl RadiusParams {
    pub fn new(n: f64, x1: f64, x2: f64, p: f64, q: f64, g: f64) -> Result<Self> {
        if !(n >= 1.0) {
            return invalid(format!("density parameter must be >= 1, got {n}"));
        }
        if !(p > 0.0 && q > 0.0) {
            return invalid(format!("ellipse scales must be positive, got P={p}, Q={q}"));
        }
        Ok(Self { n, x1, x2, p, q, g })
    }

    /// Dimensionless shape factor `((Δ·e₁)/P)² + ((Δ·e₂)/Q)² + 1 ≥ 1`.
    pub fn shape(&self, pt: &Point) -> f64 {
        let (s, c) = self.g.sin_cos();
        let d1 = pt[0] - self.x1;
        let d2 = pt[1] - self.x2;
        let u = (d1 * c + d2 * s) / self.p;
        let v = (d1 * s - d2 * c) / self.q;
        u * u + v * v + 1.0
    }

    pub fn with_density(&self, n: f64) -> Self {
        Self { n, ..*self }
    }
}

/// Local node spacing `R(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Elliptic(RadiusParams),
    /// Uniform spacing; used to check packing density.
    Constant(f64),
}

impl Radius {
    pub fn at(&self, pt: &Point) -> f64 {
        match self {
            Radius::Elliptic(p) => p.shape(pt) / p.n.sqrt(),
            Radius::Constant(h) => *h,
        }
    }
}

/// `R(x)` for the elliptic radius function.
pub fn radius(params: &RadiusParams, pt: &Point) -> f64 {
    Radius::Elliptic(*params).at(pt)
}
