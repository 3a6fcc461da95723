use std::fmt::Write as _;

/// `(row, col, value)` entry.
pub type Triplet = (usize, usize, f64);

/// Compressed sparse row matrix with column indices sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from triplets. Duplicates are summed; entries are
    /// ordered by `(row, col)` so the result does not depend on input order.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<Triplet>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<Triplet> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            out.extend(cols.iter().zip(vals).map(|(&c, &v)| (i, c, v)));
        }
        out
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            let mut s = 0.0;
            for (c, v) in self.col_idx[range.clone()].iter().zip(&self.values[range]) {
                s += v * x[*c];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = next[c];
                col_idx[k] = i;
                values[k] = v;
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// `alpha * self + beta * I`, keeping the sparsity pattern plus the diagonal.
    pub fn scaled_plus_identity(&self, alpha: f64, beta: f64) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let mut t: Vec<Triplet> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (i, j, alpha * v))
            .collect();
        t.extend((0..self.nrows).map(|i| (i, i, beta)));
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (&c, v) in self.col_idx.iter().zip(&self.values) {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Text dump, one `row col value` triplet per line.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for (i, j, v) in self.triplets() {
            let _ = writeln!(s, "{i} {j} {v:e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_order_is_canonical() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(1, 0, 2.0), (0, 1, 1.0), (1, 0, 3.0)]);
        let b = CsrMatrix::from_triplets(2, 2, vec![(1, 0, 3.0), (1, 0, 2.0), (0, 1, 1.0)]);
        assert_eq!(a, b);
        assert_eq!(a.get(1, 0), 5.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn transpose_matches_definition() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 2, 1.5), (1, 0, -2.0), (1, 1, 4.0)]);
        let t = a.transpose();
        assert_eq!(t.nrows(), 3);
        for (i, j, v) in a.triplets() {
            assert_eq!(t.get(j, i), v);
        }
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn identity_shift() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 2.0)]);
        let c = a.scaled_plus_identity(-0.5, 1.0);
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(0, 1), -1.0);
        assert_eq!(c.get(1, 1), 1.0);
        assert_eq!(c.norm1(), 2.0);
    }
}
