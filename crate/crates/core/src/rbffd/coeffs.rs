/// Pointwise coefficients of `Lu = Σ_kl a_kl ∂²u/∂x_k∂x_l + Σ_k b_k ∂u/∂x_k + c u`.
///
/// The sum runs over the full index pair, so a mixed term `ρ u_xy` is stored
/// as `a[0][1] = a[1][0] = ρ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorCoeffs {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
    pub c: f64,
}

impl OperatorCoeffs {
    pub const ZERO: Self = Self {
        a: [[0.0; 2]; 2],
        b: [0.0; 2],
        c: 0.0,
    };

    pub fn laplacian() -> Self {
        Self {
            a: [[1.0, 0.0], [0.0, 1.0]],
            ..Self::ZERO
        }
    }

    pub fn first_derivative(axis: usize) -> Self {
        let mut b = [0.0; 2];
        b[axis] = 1.0;
        Self { b, ..Self::ZERO }
    }

    pub fn identity() -> Self {
        Self {
            c: 1.0,
            ..Self::ZERO
        }
    }

    /// Coefficients acting on `ξ = (x − x₀)/h`: second-order terms pick up
    /// `h⁻²`, first-order terms `h⁻¹`.
    pub fn in_local_frame(&self, h: f64) -> Self {
        let s2 = 1.0 / (h * h);
        let s1 = 1.0 / h;
        Self {
            a: [
                [self.a[0][0] * s2, self.a[0][1] * s2],
                [self.a[1][0] * s2, self.a[1][1] * s2],
            ],
            b: [self.b[0] * s1, self.b[1] * s1],
            c: self.c,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a
            .iter()
            .flatten()
            .chain(&self.b)
            .all(|v| v.is_finite())
            && self.c.is_finite()
    }

    pub fn is_symmetric(&self) -> bool {
        self.a[0][1] == self.a[1][0]
    }
}
