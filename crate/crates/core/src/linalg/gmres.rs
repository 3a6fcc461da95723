use crate::error::{Error, Result};

/// Restarted GMRES settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Krylov dimension between restarts.
    pub restart: usize,
    /// Cap on the total number of Arnoldi steps.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            restart: 50,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GmresReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// Relative residual after every Arnoldi step (estimates) and at every
    /// restart (true residuals).
    pub history: Vec<f64>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned restarted GMRES.
///
/// `matvec(x, y)` computes `y = A x`; `precond(v)` overwrites `v` with
/// `M⁻¹ v`. `x` holds the initial guess on entry and the solution on exit.
pub fn gmres<A, P>(
    matvec: A,
    precond: P,
    b: &[f64],
    x: &mut [f64],
    opts: &GmresOptions,
) -> Result<GmresReport>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&mut [f64]),
{
    let n = b.len();
    assert_eq!(x.len(), n);
    let bnorm = norm2(b);
    let mut report = GmresReport::default();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        report.history.push(0.0);
        return Ok(report);
    }
    let m = opts.restart.max(1);
    let target = opts.tol * bnorm;

    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];

    loop {
        matvec(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm2(&r);
        report.relative_residual = beta / bnorm;
        report.history.push(report.relative_residual);
        if beta <= target {
            return Ok(report);
        }
        if report.iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: report.iterations,
                residual: report.relative_residual,
                history: report.history,
            });
        }

        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k = 0;
        while k < m && report.iterations < opts.max_iter {
            let mut z = basis[k].clone();
            precond(&mut z);
            matvec(&z, &mut w);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(&w, v);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let hnext = norm2(&w);
            h[k + 1][k] = hnext;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = cs[k] * h[k][k] + sn[k] * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            report.iterations += 1;
            k += 1;
            report.history.push(g[k].abs() / bnorm);
            if g[k].abs() <= target || hnext == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        // back substitution for the k×k upper triangular system
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vj) in update.iter_mut().zip(v) {
                *u += yi * vj;
            }
        }
        precond(&mut update);
        for (xi, u) in x.iter_mut().zip(&update) {
            *xi += u;
        }
    }
}
