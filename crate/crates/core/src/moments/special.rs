//! Chernoff rate function and the `1 − (1+x)e^{−x}` family, evaluated
//! without cancellation.

use serde::Serialize;

use crate::error::{Error, Result};

/// `φ(x) = (1+x) ln(1+x) − x` for `x > −1`.
pub fn phi(x: f64) -> Result<f64> {
    if !(x > -1.0) {
        return Err(Error::domain(format!("phi needs x > -1, got {x}")));
    }
    Ok(phi_unchecked(x))
}

fn phi_unchecked(x: f64) -> f64 {
    if x == -1.0 {
        return 1.0;
    }
    if x.abs() < 1e-3 {
        // Σ_{n≥2} (−1)^n xⁿ / (n(n−1))
        let mut term = x * x;
        let mut sum = 0.0;
        for n in 2..12 {
            sum += term / (n * (n - 1)) as f64;
            term *= -x;
        }
        return sum;
    }
    (1.0 + x) * x.ln_1p() - x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBounds {
    /// Bound on `P[X > μ + t]`.
    pub upper: f64,
    /// Bound on `P[X < μ − t]`; `None` when `t > μ` (the event is empty).
    pub lower: Option<f64>,
}

/// `exp(−μ φ(t/μ))` and `exp(−μ φ(−t/μ))` for a binomial with mean `μ`.
pub fn chernoff_tails(mu: f64, t: f64) -> Result<ChernoffBounds> {
    if !(mu > 0.0) || !(t > 0.0) {
        return Err(Error::domain("chernoff_tails needs mu > 0 and t > 0"));
    }
    let upper = (-mu * phi_unchecked(t / mu)).exp();
    let lower = (t <= mu).then(|| (-mu * phi_unchecked(-t / mu)).exp());
    Ok(ChernoffBounds { upper, lower })
}

/// `P[X > tμ] ≤ exp(−tμ ln(t/e))` for `t > 1`.
pub fn chernoff_multiplicative(mu: f64, t: f64) -> Result<f64> {
    if !(mu > 0.0) || !(t > 1.0) {
        return Err(Error::domain("multiplicative form needs mu > 0 and t > 1"));
    }
    Ok((-t * mu * (t.ln() - 1.0)).exp())
}

/// Below this `x` the series is used for `1 − (1+x)e^{−x}`.
pub const SERIES_CROSSOVER: f64 = 0.5;

/// `1 − (1+x)e^{−x}` for `x ≥ 0`; the probability that a Poisson(x)
/// variable is at least 2.
pub fn at_least_two(x: f64) -> f64 {
    if x < SERIES_CROSSOVER {
        // Σ_{n≥2} (−1)ⁿ (n−1) xⁿ / n!  = x²/2 − x³/3 + x⁴/8 − …
        let mut term = x * x / 2.0; // xⁿ/n!
        let mut sum = 0.0;
        let mut n = 2u32;
        loop {
            let add = (n - 1) as f64 * term;
            let signed = if n.is_multiple_of(2) { add } else { -add };
            sum += signed;
            if add.abs() <= 1e-18 * sum.abs() || n > 40 {
                break;
            }
            n += 1;
            term *= x / n as f64;
        }
        sum
    } else {
        -(-x).exp_m1() - x * (-x).exp()
    }
}

/// `ln(1 − (1+x)e^{−x})`; `−∞` at `x = 0`.
pub fn ln_at_least_two(x: f64) -> f64 {
    if x > 2.0 {
        (-(1.0 + x) * (-x).exp()).ln_1p()
    } else {
        at_least_two(x).ln()
    }
}

/// Derivative of `1 − (1+x)e^{−x}`.
pub fn at_least_two_prime(x: f64) -> f64 {
    x * (-x).exp()
}
