use crate::error::Result;
use crate::linalg::{condition_estimate_1, gmres, CsrMatrix, GmresOptions, Ilu0, InverseAction};

/// `C⁻¹` and `C⁻ᵀ` applied by preconditioned GMRES; the incomplete factors
/// of `C` serve `Cᵀ` through their transposes.
struct IterativeInverse<'a> {
    c: &'a CsrMatrix,
    ct: CsrMatrix,
    ilu: &'a Ilu0,
    opts: GmresOptions,
}

impl InverseAction for IterativeInverse<'_> {
    fn dim(&self) -> usize {
        self.c.nrows()
    }

    fn apply_inverse(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; b.len()];
        gmres(
            |v, y| self.c.matvec_into(v, y),
            |v| self.ilu.apply_in_place(v),
            b,
            &mut x,
            &self.opts,
        )?;
        Ok(x)
    }

    fn apply_inverse_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; b.len()];
        gmres(
            |v, y| self.ct.matvec_into(v, y),
            |v| self.ilu.apply_transpose_in_place(v),
            b,
            &mut x,
            &self.opts,
        )?;
        Ok(x)
    }
}

/// Estimate of `κ₁(C) = ‖C‖₁ ‖C⁻¹‖₁` reusing the existing preconditioner.
pub fn condition_estimate(c: &CsrMatrix, ilu: &Ilu0) -> Result<f64> {
    let inv = IterativeInverse {
        c,
        ct: c.transpose(),
        ilu,
        opts: GmresOptions {
            tol: 1e-10,
            restart: 50,
            max_iter: 5000,
        },
    };
    condition_estimate_1(c.norm1(), &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn csr(a: &DMatrix<f64>) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if a[(i, j)] != 0.0 || i == j {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        CsrMatrix::from_triplets(a.nrows(), a.ncols(), t)
    }

    fn exact_kappa1(a: &DMatrix<f64>) -> f64 {
        let n1 = |m: &DMatrix<f64>| {
            (0..m.ncols())
                .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        n1(a) * n1(&a.clone().try_inverse().unwrap())
    }

    #[test]
    fn identity_and_diagonal() {
        let id = CsrMatrix::identity(5);
        let ilu = Ilu0::new(&id).unwrap();
        assert!((condition_estimate(&id, &ilu).unwrap() - 1.0).abs() < 1e-12);
        let d = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 10.0)]);
        let ilu = Ilu0::new(&d).unwrap();
        assert!((condition_estimate(&d, &ilu).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn random_dense_within_factor_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..5 {
            let a = DMatrix::from_fn(30, 30, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if i == j {
                    v + 4.0
                } else {
                    v
                }
            });
            let c = csr(&a);
            let ilu = Ilu0::new(&c).unwrap();
            let est = condition_estimate(&c, &ilu).unwrap();
            let exact = exact_kappa1(&a);
            assert!(
                est <= exact * (1.0 + 1e-6) && est >= exact / 3.0,
                "{est} vs {exact}"
            );
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let c = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 0.0)]);
        assert!(matches!(
            Ilu0::new(&c),
            Err(Error::SingularPivot { row: 1 })
        ));
    }
}
