//! Rate function for the expected number of k-covers with class profile
//! `(α₀, α₁, …, α_k)`, where `α₀` is the fraction of zero vertices.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use super::first_moment::entropy;
use super::special::{at_least_two, at_least_two_prime, ln_at_least_two};
use crate::error::{Error, Result};

/// All ingredients of the cover rate at one profile. `p[0]` is the zero-class
/// factor and `p[i]` the factor of color `i`; `ln_p` holds the same values in
/// log form, which stays accurate where `p` under- or overflows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverRateTerms {
    pub alpha: Vec<f64>,
    #[serde(rename = "F")]
    pub f: f64,
    pub p: Vec<f64>,
    pub ln_p: Vec<f64>,
    pub entropy: f64,
    /// `−∞` when some class has positive mass but factor zero.
    pub rate: f64,
}

fn check_alpha(k: u32, alpha: &[f64]) -> Result<()> {
    if k < 2 {
        return Err(Error::domain("need k >= 2"));
    }
    if alpha.len() != k as usize + 1 {
        return Err(Error::domain(format!("alpha must have length k+1 = {}", k + 1)));
    }
    if alpha.iter().any(|a| !(*a >= 0.0)) {
        return Err(Error::domain("alpha entries must be nonnegative"));
    }
    let s: f64 = alpha.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("alpha must sum to 1, sums to {s}")));
    }
    Ok(())
}

/// `F`, the `p` factors and the pieces of the rate.
pub fn cover_terms(k: u32, d: f64, alpha: &[f64]) -> Result<CoverRateTerms> {
    check_alpha(k, alpha)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain("d must be finite and nonnegative"));
    }
    let colored = &alpha[1..];
    let f: f64 = colored.iter().map(|a| a * a).sum();
    if f >= 1.0 {
        return Err(Error::domain("F must be below 1"));
    }
    let scale = d / (1.0 - f);
    let x: Vec<f64> = colored.iter().map(|a| a * scale).collect();

    // ln p_i = Σ_{j≠i} ln q(x_j), with zero factors tracked separately.
    let lq: Vec<f64> = x.iter().map(|&xj| ln_at_least_two(xj)).collect();
    let zeros = lq.iter().filter(|v| v.is_infinite()).count();
    let finite_sum: f64 = lq.iter().filter(|v| v.is_finite()).sum();
    let mut ln_p = Vec::with_capacity(k as usize + 1);
    ln_p.push(ln_p0(&x));
    for &l in &lq {
        let v = match (zeros, l.is_finite()) {
            (0, _) => finite_sum - l,
            (1, false) => finite_sum,
            _ => f64::NEG_INFINITY,
        };
        ln_p.push(v);
    }
    let p: Vec<f64> = ln_p.iter().map(|l| l.exp()).collect();

    let h = entropy(alpha);
    let mut penalty = 0.0;
    for (a, l) in alpha.iter().zip(&ln_p) {
        if *a > 0.0 {
            penalty += a * l;
        }
    }
    let rate = if penalty == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        h + 0.5 * d * (-f).ln_1p() + penalty
    };
    Ok(CoverRateTerms {
        alpha: alpha.to_vec(),
        f,
        p,
        ln_p,
        entropy: h,
        rate,
    })
}

/// `ln Σ_{i≠j} (½ + x_j) e^{−x_i−x_j}`, shifted by the smallest `x` so
/// that large degrees do not underflow.
fn ln_p0(x: &[f64]) -> f64 {
    let m = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = x.iter().map(|xj| (-(xj - m)).exp()).collect();
    let s: f64 = e.iter().sum();
    let total: f64 = x.iter().zip(&e).map(|(xj, ej)| (0.5 + xj) * ej * (s - ej)).sum();
    total.ln() - 2.0 * m
}

/// The cover rate. With `n_for_entropy = Some(n)` the Shannon entropy is
/// replaced by `(1/n) ln` of the multinomial coefficient, which requires
/// every `αᵢ n` to be an integer.
pub fn cover_rate(k: u32, d: f64, alpha: &[f64], n_for_entropy: Option<u64>) -> Result<f64> {
    let t = cover_terms(k, d, alpha)?;
    let Some(n) = n_for_entropy else {
        return Ok(t.rate);
    };
    if n == 0 {
        return Err(Error::domain("n_for_entropy must be positive"));
    }
    let mut parts = Vec::with_capacity(alpha.len());
    for a in alpha {
        let v = a * n as f64;
        if (v - v.round()).abs() > 1e-9 * n as f64 {
            return Err(Error::domain(format!("alpha*n = {v} is not an integer")));
        }
        parts.push(v.round() as u64);
    }
    if parts.iter().sum::<u64>() != n {
        return Err(Error::domain("class counts do not sum to n"));
    }
    if t.rate == f64::NEG_INFINITY {
        return Ok(t.rate);
    }
    let exact = (ln_factorial(n) - parts.iter().map(|&v| ln_factorial(v)).sum::<f64>()) / n as f64;
    Ok(t.rate - t.entropy + exact)
}

/// Pieces of the balanced cover rate, where every color class has mass
/// `(1 − α₀)/k`.
struct Balanced {
    a: f64,
    f: f64,
    one_f: f64,
    x: f64,
    q: f64,
    ln_q: f64,
    ln_p0: f64,
}

fn balanced(k: u32, d: f64, alpha0: f64) -> Balanced {
    let kf = k as f64;
    let a = (1.0 - alpha0) / kf;
    let f = kf * a * a;
    let one_f = 1.0 - f;
    let x = a * d / one_f;
    let q = at_least_two(x);
    Balanced {
        a,
        f,
        one_f,
        x,
        q,
        ln_q: ln_at_least_two(x),
        ln_p0: (kf * (kf - 1.0)).ln() + (0.5 + x).ln() - 2.0 * x,
    }
}

/// Cover rate at `α = (α₀, a, …, a)` with `a = (1 − α₀)/k`, in O(1).
pub fn balanced_cover_rate(k: u32, d: f64, alpha0: f64) -> Result<f64> {
    if k < 2 || !(0.0..=1.0).contains(&alpha0) || !(d >= 0.0) {
        return Err(Error::domain("need k >= 2, alpha0 in [0,1], d >= 0"));
    }
    let kf = k as f64;
    let b = balanced(k, d, alpha0);
    let h0 = if alpha0 > 0.0 { -alpha0 * alpha0.ln() } else { 0.0 };
    let hc = if b.a > 0.0 { -(1.0 - alpha0) * b.a.ln() } else { 0.0 };
    let zero_part = if alpha0 > 0.0 { alpha0 * b.ln_p0 } else { 0.0 };
    let col_part = if alpha0 < 1.0 {
        if b.ln_q == f64::NEG_INFINITY && k > 1 {
            return Ok(f64::NEG_INFINITY);
        }
        (1.0 - alpha0) * (kf - 1.0) * b.ln_q
    } else {
        0.0
    };
    Ok(h0 + hc + 0.5 * d * (-b.f).ln_1p() + zero_part + col_part)
}

/// Derivative of [`balanced_cover_rate`] in `α₀`, for `0 < α₀ < 1`.
pub fn balanced_cover_rate_prime(k: u32, d: f64, alpha0: f64) -> f64 {
    let kf = k as f64;
    let b = balanced(k, d, alpha0);
    let dx = d * (-1.0 / (kf * b.one_f) - 2.0 * b.a * b.a / (b.one_f * b.one_f));
    -alpha0.ln() + b.a.ln() + b.x + b.ln_p0 + alpha0 * (1.0 / (0.5 + b.x) - 2.0) * dx - (kf - 1.0) * b.ln_q
        + (1.0 - alpha0) * (kf - 1.0) * at_least_two_prime(b.x) / b.q * dx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalAlpha0 {
    pub alpha0: f64,
    pub rate: f64,
    /// The maximum sits at the upper end `k^{−2/3}` of the search interval.
    pub at_boundary: bool,
}

const ALPHA0_GRID: usize = 400;

/// Maximizes the balanced cover rate over `α₀ ∈ (0, k^{−2/3}]`: sign changes
/// of the derivative are located on a geometric grid, refined by bisection
/// to relative tolerance 1e−10, and compared with the right endpoint.
pub fn optimal_alpha0(k: u32, d: f64) -> Result<OptimalAlpha0> {
    if k < 2 || !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain("need k >= 2 and d > 0"));
    }
    let hi = (k as f64).powf(-2.0 / 3.0).min(0.5);
    let lo = hi * 1e-12;
    let ratio = (hi / lo).powf(1.0 / (ALPHA0_GRID - 1) as f64);
    let grid: Vec<f64> = (0..ALPHA0_GRID)
        .map(|i| {
            if i + 1 == ALPHA0_GRID {
                hi
            } else {
                lo * ratio.powi(i as i32)
            }
        })
        .collect();
    let deriv: Vec<f64> = grid.iter().map(|&a| balanced_cover_rate_prime(k, d, a)).collect();

    let mut best = OptimalAlpha0 {
        alpha0: hi,
        rate: balanced_cover_rate(k, d, hi)?,
        at_boundary: true,
    };
    for i in 0..ALPHA0_GRID - 1 {
        if deriv[i] > 0.0 && deriv[i + 1] <= 0.0 {
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            while b - a > 1e-10 * b {
                let mid = 0.5 * (a + b);
                if balanced_cover_rate_prime(k, d, mid) > 0.0 {
                    a = mid
                } else {
                    b = mid
                }
            }
            let x = 0.5 * (a + b);
            let r = balanced_cover_rate(k, d, x)?;
            if r > best.rate {
                best = OptimalAlpha0 {
                    alpha0: x,
                    rate: r,
                    at_boundary: false,
                };
            }
        }
    }
    Ok(best)
}
