//! Balls into bins and its Poissonization.
//!
//! `balls_bins_joint` is the multinomial law of the bin occupancies;
//! `poisson_conditioned_joint` recomputes the same probability from
//! independent Poisson pmfs conditioned on their sum. The two share no code
//! path beyond `ln_factorial`, so their agreement is a real check.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

fn check_counts(mu: u64, t: &[u64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::domain("need at least one bin"));
    }
    if t.iter().sum::<u64>() != mu {
        return Err(Error::domain(format!("occupancies must sum to mu={mu}")));
    }
    Ok(())
}

/// `P[e_i = t_i ∀i] = μ!/(Π t_i!) · ν^{−μ}` for `μ` balls in `ν = t.len()` bins.
pub fn balls_bins_joint(mu: u64, t: &[u64]) -> Result<f64> {
    check_counts(mu, t)?;
    let nu = t.len() as f64;
    if mu <= 20 {
        // exact integer multinomial
        let mut coef: u128 = 1;
        let mut placed = 0u64;
        for &ti in t {
            for j in 1..=ti {
                placed += 1;
                coef = coef * placed as u128 / j as u128;
            }
        }
        return Ok(coef as f64 * nu.powi(-(mu as i32)));
    }
    let ln = ln_factorial(mu) - t.iter().map(|&x| ln_factorial(x)).sum::<f64>() - mu as f64 * nu.ln();
    Ok(ln.exp())
}

/// `P[Po(λ) = j]`.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * lambda.ln() - lambda - ln_factorial(j)).exp()
}

/// `Π P[Po(λ)=t_i] / P[Po(νλ)=μ]`: the law of independent Poisson(λ)
/// occupancies conditioned on their total being `μ`.
pub fn poisson_conditioned_joint(lambda: f64, t: &[u64], mu: u64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("lambda must be positive"));
    }
    check_counts(mu, t)?;
    let joint: f64 = t.iter().map(|&ti| poisson_pmf(lambda, ti)).product();
    Ok(joint / poisson_pmf(t.len() as f64 * lambda, mu))
}

/// Ratio `P[e = t] / (√μ · Π P[Po(μ/ν) = t_i])`, the constant hidden in the
/// `O(√μ)` Poissonization bound.
pub fn poissonization_constant(mu: u64, t: &[u64]) -> Result<f64> {
    if mu == 0 {
        return Err(Error::domain("the bound needs mu > 0"));
    }
    let exact = balls_bins_joint(mu, t)?;
    let lambda = mu as f64 / t.len() as f64;
    let pois: f64 = t.iter().map(|&ti| poisson_pmf(lambda, ti)).product();
    Ok(exact / ((mu as f64).sqrt() * pois))
}

/// Every occupancy vector of `mu` balls in `nu` bins, in lexicographic order.
pub fn compositions(mu: u64, nu: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, slots: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nu > 0 {
        rec(mu, nu, &mut Vec::with_capacity(nu), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Occupancy probability by listing all ν^μ throws.
    fn enumerate_throws(mu: u32, nu: usize, t: &[u64]) -> f64 {
        let total = (nu as u64).pow(mu);
        let hits = (0..total)
            .filter(|&code| {
                let mut occ = vec![0u64; nu];
                let mut x = code;
                for _ in 0..mu {
                    occ[(x % nu as u64) as usize] += 1;
                    x /= nu as u64;
                }
                occ == t
            })
            .count();
        hits as f64 / total as f64
    }

    #[test]
    fn examples() {
        assert_eq!(balls_bins_joint(2, &[1, 1]).unwrap(), 0.5);
        assert_eq!(balls_bins_joint(3, &[3]).unwrap(), 1.0);
        assert_eq!(balls_bins_joint(2, &[2, 0]).unwrap(), 0.25);
        assert!(balls_bins_joint(2, &[1, 0]).is_err());
        assert!((poisson_conditioned_joint(1.0, &[1, 1], 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((poisson_conditioned_joint(5.0, &[1, 1], 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((poisson_conditioned_joint(0.3, &[4], 4).unwrap() - 1.0).abs() < 1e-14);
        assert!(poisson_conditioned_joint(0.0, &[1], 1).is_err());
    }

    #[test]
    fn multinomial_matches_enumeration() {
        for mu in 0..=5u32 {
            for nu in 1..=3usize {
                for t in compositions(mu as u64, nu) {
                    let want = enumerate_throws(mu, nu, &t);
                    let got = balls_bins_joint(mu as u64, &t).unwrap();
                    assert!((got - want).abs() < 1e-15, "{mu} {nu} {t:?}");
                }
            }
        }
    }

    #[test]
    fn large_mu_uses_log_path() {
        let t = vec![10u64; 3];
        let p = balls_bins_joint(30, &t).unwrap();
        let direct = (ln_factorial(30) - 3.0 * ln_factorial(10) - 30.0 * 3f64.ln()).exp();
        assert!((p - direct).abs() < 1e-14);
        let q = poisson_conditioned_joint(2.0, &t, 30).unwrap();
        assert!((p - q).abs() < 1e-13);
    }

    #[test]
    fn compositions_count() {
        // C(μ+ν−1, ν−1)
        assert_eq!(compositions(6, 4).len(), 84);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
    }
}
