//! The degree at which the optimized cover rate crosses zero, and the table
//! of classical bounds it is compared against.

use serde::Serialize;

use super::cover::optimal_alpha0;
use super::first_moment::d_first;
use crate::error::{Error, Result};

/// Grid resolution of the scan over `[k ln k, 3k ln k]`.
const SCAN_POINTS: usize = 240;

/// `g(d) = max_{α₀} cover rate` with balanced color classes.
pub fn optimized_cover_rate(k: u32, d: f64) -> Result<f64> {
    Ok(optimal_alpha0(k, d)?.rate)
}

/// Zero of `g` on `[k ln k, 3k ln k]`, to absolute tolerance 1e−8 in `d`.
///
/// `g` rises and then falls on this interval, so the endpoints alone do not
/// bracket the root. The interval is scanned, the last positive grid point
/// is taken as the left end of the bracket, `g` is checked to be strictly
/// decreasing from there on, and the bracket is bisected.
pub fn cover_threshold(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(Error::domain("cover_threshold needs k >= 3"));
    }
    let kl = k as f64 * (k as f64).ln();
    let (lo, hi) = (kl, 3.0 * kl);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let ds: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let gs = ds
        .iter()
        .map(|&d| optimized_cover_rate(k, d))
        .collect::<Result<Vec<_>>>()?;

    let (arg, max) = gs.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &g)| if g > acc.1 { (i, g) } else { acc },
    );
    let last_pos = gs.iter().rposition(|&g| g > 0.0);
    let i = match last_pos {
        Some(i) if i + 1 < SCAN_POINTS => i,
        _ => {
            return Err(Error::NoSignChange {
                k,
                lo,
                hi,
                max_rate: max,
                argmax: ds[arg],
            })
        }
    };
    if gs[arg..].windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NotMonotone { k, d: ds[i] });
    }
    let (mut a, mut b) = (ds[i], ds[i + 1]);
    while b - a > 1e-8 {
        let mid = 0.5 * (a + b);
        if optimized_cover_rate(k, mid)? > 0.0 {
            a = mid
        } else {
            b = mid
        }
    }
    Ok(0.5 * (a + b))
}

/// `2(k−1) ln(k−1)`.
pub fn d_an(k: u32) -> f64 {
    let km = k as f64 - 1.0;
    2.0 * km * km.ln()
}

/// `2k ln k − ln k − 2 ln 2`. The true bound carries an additional `o(1)`
/// term that has no explicit form; only this part is tabulated.
pub fn d_second(k: u32) -> f64 {
    d_first(k) - 2.0 * 2f64.ln()
}

/// `2k ln k − ln k − 1`.
pub fn d_cavity(k: u32) -> f64 {
    d_first(k) - 1.0
}

/// Upper bound on the 3-colorability threshold known from the literature;
/// carried as metadata, not computed.
pub const REFERENCE_D3_UPPER: f64 = 4.9364;

/// One row of the bounds table. Field names are the column names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub k: u32,
    pub d_first: f64,
    #[serde(rename = "d_AN")]
    pub d_an: f64,
    pub d_second: f64,
    pub d_cavity: f64,
    /// `None` when the cover threshold has no crossing in its bracket.
    pub d_cover: Option<f64>,
}

pub const BOUNDS_COLUMNS: [&str; 6] = ["k", "d_first", "d_AN", "d_second", "d_cavity", "d_cover"];

pub fn bounds_table(k: u32) -> Result<BoundsRow> {
    if k < 3 {
        return Err(Error::domain("bounds_table needs k >= 3"));
    }
    let d_cover = match cover_threshold(k) {
        Ok(d) => Some(d),
        Err(Error::NoSignChange { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundsRow {
        k,
        d_first: d_first(k),
        d_an: d_an(k),
        d_second: d_second(k),
        d_cavity: d_cavity(k),
        d_cover,
    })
}
