use std::f64::consts::PI;

/// Orthonormal Hermite functions `ψ_n(z)` and `ψ_{n−1}(z)`, which carry the
/// factor `e^{−z²/2}` and so stay bounded.
fn hermite_functions(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// Gauss–Hermite nodes and weights for `∫ f(x) e^{−x²} dx`, nodes ascending.
///
/// Positive roots are bracketed by a sign scan finer than the smallest root
/// gap, then polished by bisection-safeguarded Newton steps.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!((1..=600).contains(&n), "supported rule sizes are 1..=600");
    let nf = n as f64;
    let top = (2.0 * nf + 1.0).sqrt() + 1.0;
    // the smallest gap between roots is about π/√(2n+1)
    let scan = (top / (0.05 * PI / (2.0 * nf + 1.0).sqrt())).ceil() as usize;
    let mut pos = Vec::with_capacity(n / 2 + 1);
    if n % 2 == 1 {
        pos.push(0.0);
    }
    let f = |z: f64| hermite_functions(n, z).0;
    let mut lo = if n % 2 == 1 { 1e-9 } else { 0.0 };
    let mut flo = f(lo);
    for k in 1..=scan {
        let hi = top * k as f64 / scan as f64;
        let fhi = f(hi);
        if flo * fhi < 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            let mut z = 0.5 * (a + b);
            for _ in 0..200 {
                let (p1, p2) = hermite_functions(n, z);
                // ψ_n' = √(2n) ψ_{n−1} − z ψ_n
                let dp = (2.0 * nf).sqrt() * p2 - z * p1;
                if fa * p1 > 0.0 {
                    a = z;
                    fa = p1;
                } else {
                    b = z;
                }
                let newton = z - p1 / dp;
                let next = if newton > a && newton < b {
                    newton
                } else {
                    0.5 * (a + b)
                };
                let done = (next - z).abs() <= 4.0 * f64::EPSILON * z.max(1.0)
                    || b - a <= 4.0 * f64::EPSILON * z.max(1.0);
                z = next;
                if done {
                    break;
                }
            }
            pos.push(z);
        }
        lo = hi;
        flo = fhi;
    }
    assert_eq!(pos.len(), n.div_ceil(2), "root scan missed a root");
    let weight = |z: f64| {
        let (_, p2) = hermite_functions(n, z);
        // 2/H'² with the Gaussian factor restored: e^{−z²}·2/(√(2n)·ψ_{n−1})²
        (-z * z).exp() / (nf * p2 * p2)
    };
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for &z in pos.iter().rev() {
        if z > 0.0 {
            x.push(-z);
            w.push(weight(z));
        }
    }
    for &z in &pos {
        x.push(z);
        w.push(weight(z));
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn moments() {
        for n in [1, 2, 5, 20, 100, 200] {
            let (x, w) = gauss_hermite(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let m0: f64 = w.iter().sum();
            assert_abs_diff_eq!(m0, PI.sqrt(), epsilon = 1e-12);
            if n >= 3 {
                // ∫ x⁴ e^{−x²} = 3√π/4
                let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
                assert_abs_diff_eq!(m4, 0.75 * PI.sqrt(), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn three_point_rule() {
        let (x, w) = gauss_hermite(3);
        assert_abs_diff_eq!(x[2], 1.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 2.0 * PI.sqrt() / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_expectation_of_exponential() {
        // E[e^{aZ}] = e^{a²/2}, Z ~ N(0,1)
        let (x, w) = gauss_hermite(60);
        let a = 0.7;
        let e: f64 = x
            .iter()
            .zip(&w)
            .map(|(x, w)| w * (a * 2f64.sqrt() * x).exp())
            .sum::<f64>()
            / PI.sqrt();
        assert_abs_diff_eq!(e, (0.5 * a * a).exp(), epsilon = 1e-13);
    }
}
