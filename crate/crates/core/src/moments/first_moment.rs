//! First moment of the number of proper k-colorings with a given class
//! profile: the exact finite-n expectation and its exponential rate.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// `(k, d)` with the offset `c` in `d = 2k ln k − ln k − c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateParams {
    pub k: u32,
    pub d: f64,
}

impl RateParams {
    pub fn new(k: u32, d: f64) -> Result<Self> {
        if k < 2 || !d.is_finite() || d < 0.0 {
            return Err(Error::domain(format!(
                "need k >= 2 and finite d >= 0, got k={k}, d={d}"
            )));
        }
        Ok(RateParams { k, d })
    }

    pub fn from_c(k: u32, c: f64) -> Result<Self> {
        Self::new(k, d_first(k) - c)
    }

    pub fn c(&self) -> f64 {
        d_first(self.k) - self.d
    }
}

/// `2k ln k − ln k`.
pub fn d_first(k: u32) -> f64 {
    let kf = k as f64;
    (2.0 * kf - 1.0) * kf.ln()
}

fn ln_multinomial(n: u64, parts: impl IntoIterator<Item = u64>) -> f64 {
    ln_factorial(n) - parts.into_iter().map(ln_factorial).sum::<f64>()
}

/// Exact `E[Z_ν]` in `G'(n, m)`: `n!/Π νᵢ! · (1 − Σ (νᵢ/n)²)^m`.
pub fn expected_colorings_exact(n: usize, m: usize, nu: &[usize]) -> Result<f64> {
    if nu.is_empty() || nu.iter().sum::<usize>() != n || n == 0 {
        return Err(Error::domain("profile must be nonempty and sum to n > 0"));
    }
    let nf = n as f64;
    let same: f64 = nu.iter().map(|&v| (v as f64 / nf).powi(2)).sum();
    let q = 1.0 - same;
    let mult = if n <= 20 {
        // exact in u64, then one rounding
        let mut c: u64 = 1;
        let mut placed = 0u64;
        for &v in nu {
            for j in 1..=v as u64 {
                placed += 1;
                c = c * placed / j;
            }
        }
        c as f64
    } else {
        ln_multinomial(n as u64, nu.iter().map(|&v| v as u64)).exp()
    };
    Ok(mult * q.powi(m as i32))
}

fn check_simplex(alpha: &[f64], len: usize) -> Result<()> {
    if alpha.len() != len {
        return Err(Error::domain(format!(
            "alpha must have length {len}, got {}",
            alpha.len()
        )));
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

pub(crate) fn entropy(alpha: &[f64]) -> f64 {
    -alpha.iter().filter(|&&a| a > 0.0).map(|a| a * a.ln()).sum::<f64>()
}

/// `−Σ αᵢ ln αᵢ + (d/2) ln(1 − Σ αᵢ²)`.
pub fn coloring_rate(k: u32, d: f64, alpha: &[f64]) -> Result<f64> {
    check_simplex(alpha, k as usize)?;
    let s: f64 = alpha.iter().map(|a| a * a).sum();
    if s >= 1.0 {
        return Err(Error::domain("sum of squares must be below 1"));
    }
    Ok(entropy(alpha) + 0.5 * d * (-s).ln_1p())
}

/// `ln k + (d/2) ln(1 − 1/k)`.
pub fn balanced_coloring_rate(k: u32, d: f64) -> f64 {
    let kf = k as f64;
    kf.ln() + 0.5 * d * (-1.0 / kf).ln_1p()
}

/// The `d` at which the balanced rate vanishes, `−2 ln k / ln(1 − 1/k)`.
pub fn balanced_coloring_root(k: u32) -> f64 {
    let kf = k as f64;
    -2.0 * kf.ln() / (-1.0 / kf).ln_1p()
}

fn interior(alpha: &[f64], k: u32) -> Result<f64> {
    check_simplex(alpha, k as usize)?;
    if alpha.iter().any(|&a| a <= 0.0) {
        return Err(Error::domain("alpha must lie in the open simplex"));
    }
    Ok(1.0 - alpha.iter().map(|a| a * a).sum::<f64>())
}

/// Gradient of the rate in the coordinates `α₁ … α_{k−1}`, with
/// `α_k = 1 − Σ_{i<k} αᵢ`. `alpha` is the full length-k vector.
pub fn grad_f(k: u32, d: f64, alpha: &[f64]) -> Result<DVector<f64>> {
    let one_s = interior(alpha, k)?;
    let ak = alpha[k as usize - 1];
    Ok(DVector::from_iterator(
        k as usize - 1,
        alpha[..k as usize - 1]
            .iter()
            .map(|&ai| (ak / ai).ln() + d * (ak - ai) / one_s),
    ))
}

/// Hessian in the same coordinates as [`grad_f`].
pub fn hessian_f(k: u32, d: f64, alpha: &[f64]) -> Result<DMatrix<f64>> {
    let one_s = interior(alpha, k)?;
    let m = k as usize - 1;
    let ak = alpha[m];
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let (ai, aj) = (alpha[i], alpha[j]);
        let mut h = -1.0 / ak - d / one_s - 2.0 * d * (ak - ai) * (ak - aj) / (one_s * one_s);
        if i == j {
            h += -1.0 / ai - d / one_s;
        }
        h
    }))
}

/// `c/(2k) + C ln k / k² − (d/2) ‖α − k⁻¹1‖²`; `big_c` is the constant of
/// the second order remainder.
pub fn taylor_bound(k: u32, d: f64, c: f64, alpha: &[f64], big_c: f64) -> Result<f64> {
    check_simplex(alpha, k as usize)?;
    let want = d_first(k) - d;
    if (want - c).abs() > 1e-9 * d.abs().max(1.0) {
        return Err(Error::domain(format!("inconsistent offset: c={c} but d gives {want}")));
    }
    let kf = k as f64;
    let dev: f64 = alpha.iter().map(|a| (a - 1.0 / kf).powi(2)).sum();
    Ok(c / (2.0 * kf) + big_c * kf.ln() / (kf * kf) - 0.5 * d * dev)
}
