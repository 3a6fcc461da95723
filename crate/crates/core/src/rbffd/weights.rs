use rayon::prelude::*;

use super::{OperatorCoeffs, PhsBasis, PolySpace};
use crate::error::{Error, Result};
use crate::linalg::{condition_estimate_1, CsrMatrix, DenseMatrix, Triplet};
use crate::stencils::Stencil;
use crate::{dist, Point};

/// Differentiation matrix `L` (and time-stepping matrices built from it).
pub type SparseOperator = CsrMatrix;

/// Stencils whose local saddle matrix has a larger 1-norm condition estimate
/// are rejected.
pub const MAX_STENCIL_CONDITION: f64 = 1e14;

/// Bound on the normwise backward error of each saddle solve.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightOptions {
    pub phs: PhsBasis,
    pub poly: PolySpace,
    pub max_condition: f64,
}

impl WeightOptions {
    pub fn new(q: u32, p: usize) -> Result<Self> {
        Ok(Self {
            phs: PhsBasis::new(q)?,
            poly: PolySpace::new(p),
            max_condition: MAX_STENCIL_CONDITION,
        })
    }
}

impl Default for WeightOptions {
    fn default() -> Self {
        Self::new(5, 4).expect("default PHS exponent")
    }
}

fn failure<T>(reason: impl Into<String>) -> Result<T> {
    Err(Error::StencilFailure {
        node: 0,
        reason: reason.into(),
    })
}

/// Weights for the stencil `members` (centre first) in model coordinates.
/// Monomials that are linearly dependent on the stencil (e.g. `xy` on a
/// five-point cross) are left out of the saddle system and checked
/// afterwards. Failures report node 0; [`stencil_weights`] relabels them.
pub fn local_weights(
    members: &[Point],
    coeffs: &OperatorCoeffs,
    opts: &WeightOptions,
) -> Result<Vec<f64>> {
    let n = members.len();
    if !coeffs.is_finite() {
        return failure("non-finite operator coefficients");
    }
    let c = members[0];
    let h = members.iter().map(|p| dist(&c, p)).fold(0.0, f64::max);
    if !(h > 0.0) {
        return failure("stencil has zero extent");
    }
    let local: Vec<Point> = members
        .iter()
        .map(|p| [(p[0] - c[0]) / h, (p[1] - c[1]) / h])
        .collect();
    let lc = coeffs.in_local_frame(h);
    let phs = &opts.phs;

    // polynomial block: rows are monomials sampled on the stencil
    let all_cols: Vec<Vec<f64>> = local.iter().map(|p| opts.poly.eval(p)).collect();
    let poly_rows: Vec<Vec<f64>> = (0..opts.poly.len())
        .map(|k| all_cols.iter().map(|v| v[k]).collect())
        .collect();
    let poly_rhs = opts.poly.apply(&[0.0, 0.0], &lc);
    let kept = independent_rows(&poly_rows);
    let m = kept.len();
    if n < m {
        return failure(format!("{n} stencil nodes cannot support {m} monomials"));
    }

    let dim = n + m;
    let mut mat = DenseMatrix::zeros(dim, dim);
    for i in 0..n {
        for k in i + 1..n {
            let v = phs.value(dist(&local[i], &local[k]));
            mat[(i, k)] = v;
            mat[(k, i)] = v;
        }
        for (t, &k) in kept.iter().enumerate() {
            let v = poly_rows[k][i];
            mat[(i, n + t)] = v;
            mat[(n + t, i)] = v;
        }
    }
    let mut rhs: Vec<f64> = local
        .iter()
        .map(|xi| phs.apply(&[0.0, 0.0], xi, &lc))
        .collect();
    rhs.extend(kept.iter().map(|&k| poly_rhs[k]));

    let check = mat.clone();
    let lu = match mat.lu() {
        Ok(lu) => lu,
        Err(_) => return failure("singular saddle matrix"),
    };
    let sol = lu.solve(&rhs);

    let res = check.matvec(&sol);
    let res_inf = res
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = check.norm_inf() * inf(&sol) + inf(&rhs);
    if !(res_inf <= RESIDUAL_TOL * scale) {
        return failure(format!("saddle residual {:e} too large", res_inf / scale));
    }
    let cond = condition_estimate_1(lu.matrix_norm1(), &lu)?;
    if !(cond <= opts.max_condition) {
        return failure(format!("saddle matrix condition estimate {cond:e}"));
    }
    let w = &sol[..n];
    // monomials dropped as dependent must still be reproduced
    for (k, row) in poly_rows.iter().enumerate() {
        if kept.contains(&k) {
            continue;
        }
        let got: f64 = row.iter().zip(w).map(|(p, w)| p * w).sum();
        let size: f64 =
            row.iter().zip(w).map(|(p, w)| (p * w).abs()).sum::<f64>() + poly_rhs[k].abs();
        if (got - poly_rhs[k]).abs() > RESIDUAL_TOL.sqrt() * size.max(1.0) {
            return failure(format!("monomial {k} is not reproduced on this stencil"));
        }
    }
    Ok(w.to_vec())
}

/// Greedy maximal linearly independent subset of `rows`, in order.
fn independent_rows(rows: &[Vec<f64>]) -> Vec<usize> {
    const TOL: f64 = 1e-9;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let norm0 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = row.clone();
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, q)| *x -= d * q);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > TOL * norm0 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
            kept.push(k);
        }
    }
    kept
}

/// Weights `w` with `Lu(x_c) ≈ Σ w_i u(x_i)` over the stencil members.
pub fn stencil_weights(
    stencil: &Stencil,
    points: &[Point],
    coeffs: &OperatorCoeffs,
    opts: &WeightOptions,
) -> Result<Vec<f64>> {
    let members: Vec<Point> = stencil.members.iter().map(|&i| points[i]).collect();
    local_weights(&members, coeffs, opts).map_err(|e| match e {
        Error::StencilFailure { reason, .. } => Error::StencilFailure {
            node: stencil.center,
            reason,
        },
        other => other,
    })
}

/// Weights of every stencil, in stencil order. Solves run in parallel; the
/// result does not depend on the schedule.
pub fn stencil_rows<F>(
    points: &[Point],
    stencils: &[Stencil],
    coeff_field: F,
    opts: &WeightOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Point) -> OperatorCoeffs + Sync,
{
    stencils
        .par_iter()
        .map(|s| stencil_weights(s, points, &coeff_field(&points[s.center]), opts))
        .collect()
}

/// Sparse matrix with row `s.center` holding `rows[k]` on `s.members`; rows of
/// nodes without a stencil stay empty.
pub fn matrix_from_rows(dim: usize, stencils: &[Stencil], rows: Vec<Vec<f64>>) -> SparseOperator {
    let mut triplets: Vec<Triplet> = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    for (s, w) in stencils.iter().zip(rows) {
        triplets.extend(s.members.iter().zip(w).map(|(&col, v)| (s.center, col, v)));
    }
    CsrMatrix::from_triplets(dim, dim, triplets)
}

/// Differentiation matrix with one row per stencil; rows of nodes without a
/// stencil (Dirichlet nodes) stay empty.
pub fn assemble<F>(
    points: &[Point],
    stencils: &[Stencil],
    coeff_field: F,
    opts: &WeightOptions,
) -> Result<SparseOperator>
where
    F: Fn(&Point) -> OperatorCoeffs + Sync,
{
    let rows = stencil_rows(points, stencils, coeff_field, opts)?;
    Ok(matrix_from_rows(points.len(), stencils, rows))
}
