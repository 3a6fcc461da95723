use crate::error::{Error, Result};

use super::sparse::CsrMatrix;

/// Zero-fill incomplete LU factorization on the sparsity pattern of `A`.
///
/// The strictly lower part holds `L` (unit diagonal implied), the rest holds `U`.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "ILU(0) needs a square matrix");
        let row_ptr = a.row_ptr().to_vec();
        let col_idx = a.col_idx().to_vec();
        let mut values = a.values().to_vec();

        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                if col_idx[k] == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(Error::SingularPivot { row: i });
            }
        }

        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (row_ptr[i], row_ptr[i + 1]);
            for k in start..end {
                pos[col_idx[k]] = k;
            }
            for kk in start..end {
                let k = col_idx[kk];
                if k >= i {
                    break;
                }
                let pivot = values[diag[k]];
                let f = values[kk] / pivot;
                values[kk] = f;
                for jj in diag[k] + 1..row_ptr[k + 1] {
                    let p = pos[col_idx[jj]];
                    if p != usize::MAX {
                        values[p] -= f * values[jj];
                    }
                }
            }
            let d = values[diag[i]];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SingularPivot { row: i });
            }
            for k in start..end {
                pos[col_idx[k]] = usize::MAX;
            }
        }

        Ok(Self {
            row_ptr,
            col_idx,
            values,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `x ← (LU)⁻¹ x`.
    pub fn apply_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = x[i];
            for k in self.row_ptr[i]..self.diag[i] {
                s -= self.values[k] * x[self.col_idx[k]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in self.diag[i] + 1..self.row_ptr[i + 1] {
                s -= self.values[k] * x[self.col_idx[k]];
            }
            x[i] = s / self.values[self.diag[i]];
        }
    }

    /// `x ← (LU)⁻ᵀ x`.
    pub fn apply_transpose_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let zi = x[i] / self.values[self.diag[i]];
            x[i] = zi;
            for k in self.diag[i] + 1..self.row_ptr[i + 1] {
                x[self.col_idx[k]] -= self.values[k] * zi;
            }
        }
        for i in (0..n).rev() {
            let xi = x[i];
            for k in self.row_ptr[i]..self.diag[i] {
                x[self.col_idx[k]] -= self.values[k] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -2.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn exact_for_tridiagonal() {
        // no fill occurs for tridiagonal matrices, so ILU(0) is the exact LU
        let a = tridiag(12);
        let ilu = Ilu0::new(&a).unwrap();
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let mut x = b.clone();
        ilu.apply_in_place(&mut x);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
        let at = a.transpose();
        let mut y = b.clone();
        ilu.apply_transpose_in_place(&mut y);
        let r = at.matvec(&y);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
    }

    #[test]
    fn missing_diagonal_names_row() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 1.0)]);
        assert_eq!(Ilu0::new(&a).unwrap_err(), Error::SingularPivot { row: 1 });
    }

    #[test]
    fn zero_pivot_names_row() {
        let a = CsrMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        );
        assert_eq!(Ilu0::new(&a).unwrap_err(), Error::SingularPivot { row: 1 });
    }
}
