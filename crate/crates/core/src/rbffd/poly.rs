use super::OperatorCoeffs;
use crate::Point;

/// Bivariate monomials `xⁱ yʲ` with `i + j ≤ p`, graded by total degree and,
/// within a degree, by decreasing power of `x`: `1, x, y, x², xy, y², …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySpace {
    degree: usize,
    exponents: Vec<(u32, u32)>,
}

impl PolySpace {
    pub fn new(degree: usize) -> Self {
        let mut exponents = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
        for d in 0..=degree as u32 {
            for j in 0..=d {
                exponents.push((d - j, j));
            }
        }
        Self { degree, exponents }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of terms, `(p + 1)(p + 2)/2`.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exponents
    }

    /// All monomials evaluated at `pt`.
    pub fn eval(&self, pt: &Point) -> Vec<f64> {
        let px = powers(pt[0], self.degree);
        let py = powers(pt[1], self.degree);
        self.exponents
            .iter()
            .map(|&(i, j)| px[i as usize] * py[j as usize])
            .collect()
    }

    /// The operator applied to every monomial, evaluated at `pt`.
    pub fn apply(&self, pt: &Point, coeffs: &OperatorCoeffs) -> Vec<f64> {
        let px = powers(pt[0], self.degree);
        let py = powers(pt[1], self.degree);
        let pw = |v: &[f64], e: u32, drop: u32| -> f64 {
            if e < drop {
                0.0
            } else {
                v[(e - drop) as usize]
            }
        };
        let a = &coeffs.a;
        self.exponents
            .iter()
            .map(|&(i, j)| {
                let (fi, fj) = (i as f64, j as f64);
                let mut v = coeffs.c * px[i as usize] * py[j as usize];
                v += coeffs.b[0] * fi * pw(&px, i, 1) * py[j as usize];
                v += coeffs.b[1] * fj * px[i as usize] * pw(&py, j, 1);
                v += a[0][0] * fi * (fi - 1.0) * pw(&px, i, 2) * py[j as usize];
                v += (a[0][1] + a[1][0]) * fi * fj * pw(&px, i, 1) * pw(&py, j, 1);
                v += a[1][1] * fj * (fj - 1.0) * px[i as usize] * pw(&py, j, 2);
                v
            })
            .collect()
    }
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        v.push(acc);
        acc *= x;
    }
    v
}

/// Exact `L p_k(center)` for all monomials of total degree `≤ p`.
pub fn monomial_operator_apply(center: &Point, coeffs: &OperatorCoeffs, p: usize) -> Vec<f64> {
    PolySpace::new(p).apply(center, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_size() {
        let s = PolySpace::new(4);
        assert_eq!(s.len(), 15);
        assert_eq!(
            &s.exponents()[..6],
            &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
        assert_eq!(PolySpace::new(0).len(), 1);
        assert_eq!(
            PolySpace::new(2).eval(&[2.0, 3.0]),
            vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]
        );
    }

    #[test]
    fn examples() {
        let mut id = OperatorCoeffs::ZERO;
        id.c = 0.7;
        assert_eq!(monomial_operator_apply(&[0.3, 0.4], &id, 2)[0], 0.7);
        let lap = OperatorCoeffs::laplacian();
        let s = PolySpace::new(2);
        let v = s.apply(&[0.3, -0.2], &lap);
        assert_eq!(v[3], 2.0); // x²
        assert_eq!(v[5], 2.0); // y²
        assert_eq!(v[4], 0.0); // xy
        let cross = OperatorCoeffs {
            a: [[0.0, 0.5], [0.5, 0.0]],
            ..OperatorCoeffs::ZERO
        };
        assert_eq!(s.apply(&[0.9, 0.1], &cross)[4], 1.0);
    }

    #[test]
    fn general_monomial() {
        // x³y² at (2, 3): u_xx = 6xy² = 108, u_xy = 6x²y = 72, u_yy = 2x³ = 16,
        // u_x = 3x²y² = 108, u_y = 2x³y = 48, u = 72
        let coeffs = OperatorCoeffs {
            a: [[1.0, 0.25], [0.25, 2.0]],
            b: [0.5, -1.0],
            c: 3.0,
        };
        let s = PolySpace::new(5);
        let k = s.exponents().iter().position(|&e| e == (3, 2)).unwrap();
        let want = 108.0 + 2.0 * 0.25 * 72.0 + 2.0 * 16.0 + 0.5 * 108.0 - 48.0 + 3.0 * 72.0;
        assert_eq!(s.apply(&[2.0, 3.0], &coeffs)[k], want);
    }
}
