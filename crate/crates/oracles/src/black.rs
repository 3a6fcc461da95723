use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Black–Scholes call on a non-dividend asset.
pub fn bs_call_1d(s: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let df = (-r * t).exp();
    if k <= 0.0 {
        return s;
    }
    let sd = sigma * t.sqrt();
    if sd <= 0.0 {
        return (s - k * df).max(0.0);
    }
    let d1 = ((s / k).ln() + r * t) / sd + 0.5 * sd;
    let d2 = d1 - sd;
    s * norm_cdf(d1) - k * df * norm_cdf(d2)
}

/// Black–Scholes put.
pub fn bs_put_1d(s: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let df = (-r * t).exp();
    if k <= 0.0 {
        return 0.0;
    }
    let sd = sigma * t.sqrt();
    if sd <= 0.0 {
        return (k * df - s).max(0.0);
    }
    let d1 = ((s / k).ln() + r * t) / sd + 0.5 * sd;
    let d2 = d1 - sd;
    k * df * norm_cdf(-d2) - s * norm_cdf(-d1)
}
