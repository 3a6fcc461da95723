use std::fmt;

use crate::error::{invalid, Result};
use crate::Point;

/// Tolerance used when classifying points as lying on the boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// Unit right triangle with vertices (0,0), (1,0), (0,1).
    Triangle,
    /// Unit square.
    Rectangle,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Triangle => f.write_str("triangle"),
            DomainKind::Rectangle => f.write_str("rectangle"),
        }
    }
}

impl std::str::FromStr for DomainKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangle" => Ok(DomainKind::Triangle),
            "rectangle" => Ok(DomainKind::Rectangle),
            other => invalid(format!("unknown domain kind '{other}'")),
        }
    }
}

/// Role of a node in the discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Gets a PDE row (includes boundary nodes without Dirichlet data).
    Interior,
    /// Dirichlet node on the close-field boundary.
    CloseField,
    /// Dirichlet node on the far-field boundary.
    FarField,
    /// Pinned node where the price is read off; gets a PDE row.
    Evaluation,
}

impl Role {
    pub fn is_dirichlet(self) -> bool {
        matches!(self, Role::CloseField | Role::FarField)
    }

    pub fn code(self) -> &'static str {
        match self {
            Role::Interior => "I",
            Role::CloseField => "CF",
            Role::FarField => "FF",
            Role::Evaluation => "EV",
        }
    }

    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "I" => Ok(Role::Interior),
            "CF" => Ok(Role::CloseField),
            "FF" => Ok(Role::FarField),
            "EV" => Ok(Role::Evaluation),
            other => invalid(format!("unknown role code '{other}'")),
        }
    }
}

/// Scaled 2D computational domain.
///
/// Coordinates are dimensionless; `scale[k]` converts axis `k` back to model
/// units (price or variance per unit coordinate).
///
/// Boundary roles follow the two problem families: on the triangle (baskets)
/// only the origin is close field and the hypotenuse is far field; on the
/// rectangle (Heston) the `x = 0` edge is close field and `x = 1` is far
/// field. All other boundary points receive PDE rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain2D {
    pub kind: DomainKind,
    pub scale: [f64; 2],
}

impl Domain2D {
    pub fn new(kind: DomainKind, scale: [f64; 2]) -> Result<Self> {
        if !(scale[0] > 0.0 && scale[1] > 0.0) || !scale.iter().all(|s| s.is_finite()) {
            return invalid(format!(
                "domain scale factors must be positive, got {scale:?}"
            ));
        }
        Ok(Self { kind, scale })
    }

    pub fn triangle(leg: f64) -> Result<Self> {
        Self::new(DomainKind::Triangle, [leg, leg])
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        Self::new(DomainKind::Rectangle, [width, height])
    }

    /// Closed-domain membership with tolerance `eps`.
    pub fn contains(&self, p: &Point, eps: f64) -> bool {
        let box_ok = p[0] >= -eps && p[1] >= -eps && p[1] <= 1.0 + eps && p[0] <= 1.0 + eps;
        match self.kind {
            DomainKind::Rectangle => box_ok,
            DomainKind::Triangle => box_ok && p[0] + p[1] <= 1.0 + eps,
        }
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        let mut d = p[0].min(p[1]);
        match self.kind {
            DomainKind::Rectangle => {
                d = d.min(1.0 - p[0]).min(1.0 - p[1]);
            }
            DomainKind::Triangle => {
                d = d.min((1.0 - p[0] - p[1]) / std::f64::consts::SQRT_2);
            }
        }
        d
    }

    /// Boundary role of a point assumed to lie in the closed domain.
    pub fn role_at(&self, p: &Point) -> Role {
        let e = BOUNDARY_EPS;
        match self.kind {
            DomainKind::Triangle => {
                if p[0].abs() <= e && p[1].abs() <= e {
                    Role::CloseField
                } else if (p[0] + p[1] - 1.0).abs() <= e {
                    Role::FarField
                } else {
                    Role::Interior
                }
            }
            DomainKind::Rectangle => {
                if p[0].abs() <= e {
                    Role::CloseField
                } else if (p[0] - 1.0).abs() <= e {
                    Role::FarField
                } else {
                    Role::Interior
                }
            }
        }
    }

    /// Corner points in counter-clockwise order.
    pub fn vertices(&self) -> Vec<Point> {
        match self.kind {
            DomainKind::Triangle => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            DomainKind::Rectangle => vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        }
    }

    /// Scaled coordinates → model units.
    pub fn to_model(&self, p: &Point) -> Point {
        [p[0] * self.scale[0], p[1] * self.scale[1]]
    }

    /// Model units → scaled coordinates.
    pub fn to_scaled(&self, p: &Point) -> Point {
        [p[0] / self.scale[0], p[1] / self.scale[1]]
    }

    pub fn area(&self) -> f64 {
        match self.kind {
            DomainKind::Triangle => 0.5,
            DomainKind::Rectangle => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_must_be_positive() {
        assert!(Domain2D::rectangle(0.0, 1.0).is_err());
        assert!(Domain2D::triangle(-1.0).is_err());
        assert!(Domain2D::triangle(800.0).is_ok());
    }

    #[test]
    fn triangle_roles() {
        let d = Domain2D::triangle(800.0).unwrap();
        assert_eq!(d.role_at(&[0.0, 0.0]), Role::CloseField);
        assert_eq!(d.role_at(&[0.5, 0.5]), Role::FarField);
        assert_eq!(d.role_at(&[1.0, 0.0]), Role::FarField);
        assert_eq!(d.role_at(&[0.3, 0.0]), Role::Interior);
        assert!(d.contains(&[0.5, 0.5], 0.0));
        assert!(!d.contains(&[0.6, 0.5], 1e-9));
    }

    #[test]
    fn rectangle_roles() {
        let d = Domain2D::rectangle(400.0, 0.5).unwrap();
        assert_eq!(d.role_at(&[0.0, 0.3]), Role::CloseField);
        assert_eq!(d.role_at(&[1.0, 1.0]), Role::FarField);
        assert_eq!(d.role_at(&[0.5, 0.0]), Role::Interior);
        assert_eq!(d.to_scaled(&[100.0, 0.0225]), [0.25, 0.045]);
    }
}
