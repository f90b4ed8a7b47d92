//! A series that converges more slowly than a given summable one.
//!
//! For a positive non-increasing summable sequence `λ_j` with tails
//! `ρ_j = Σ_{k≥j} λ_k`, the terms `κ_j = λ_j / √ρ_j` still sum to at most
//! `2√ρ_1`, while `κ_j / λ_j = 1/√ρ_j` grows without bound. This is how a
//! nuclear covariance operator has a densely defined but
//! unbounded pseudo-inverse; on finite data it serves as a diagnostic.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SlowSeries {
    /// `ρ_j` for each supplied term.
    pub tails: Vec<f64>,
    /// `κ_j = λ_j / √ρ_j`.
    pub kappas: Vec<f64>,
    /// `2√ρ_1`.
    pub bound: f64,
}

impl SlowSeries {
    /// `Σ κ_j` over the supplied prefix.
    pub fn kappa_sum(&self) -> f64 {
        self.kappas.iter().sum()
    }

    /// `κ_j / λ_j = 1/√ρ_j`.
    pub fn growth(&self) -> Vec<f64> {
        self.tails.iter().map(|r| 1.0 / libm::sqrt(*r)).collect()
    }
}

/// Builds the slow series for a finite prefix of `λ` plus the exact sum of
/// the omitted tail (`0` when the prefix is the whole sequence).
pub fn slow_series(lambdas: &[f64], tail: f64) -> Result<SlowSeries> {
    for (i, &l) in lambdas.iter().enumerate() {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::NonPositive { index: i });
        }
        if i > 0 && l > lambdas[i - 1] {
            return Err(Error::Increasing { index: i });
        }
    }
    if !(tail.is_finite() && tail >= 0.0) {
        return Err(Error::NonPositive { index: lambdas.len() });
    }

    // Accumulate from the small end.
    let mut tails = alloc::vec![0.0; lambdas.len()];
    let mut rho = tail;
    for (t, &l) in tails.iter_mut().zip(lambdas).rev() {
        rho += l;
        *t = rho;
    }
    let kappas = lambdas.iter().zip(&tails).map(|(l, r)| l / libm::sqrt(*r)).collect();
    let bound = 2.0 * libm::sqrt(tails.first().copied().unwrap_or(tail));
    Ok(SlowSeries { tails, kappas, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term() {
        let s = slow_series(&[1.0], 0.0).unwrap();
        assert_eq!(s.kappas, vec![1.0]);
        assert_eq!(s.bound, 2.0);
    }

    #[test]
    fn geometric_terms_have_closed_form() {
        // λ_j = 2^{-j}, ρ_j = 2^{1-j}, κ_j = 2^{-(j+1)/2}.
        let n = 40;
        let lambdas: Vec<f64> = (1..=n).map(|j| 0.5f64.powi(j)).collect();
        let s = slow_series(&lambdas, 0.5f64.powi(n)).unwrap();
        for (j, k) in (1..=n).zip(&s.kappas) {
            let expected = 2f64.powf(-(j as f64 + 1.0) / 2.0);
            assert!((k - expected).abs() <= 1e-15 * expected.max(1e-300) + 1e-300, "j={j}");
        }
        assert_eq!(s.bound, 2.0);
        let infinite_sum = 0.5 / (1.0 - 0.5f64.sqrt());
        assert!(s.kappa_sum() <= infinite_sum && s.kappa_sum() > infinite_sum - 1e-5);
        assert!(infinite_sum <= s.bound);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert_eq!(slow_series(&[1.0, 0.0], 0.0), Err(Error::NonPositive { index: 1 }));
        assert_eq!(slow_series(&[1.0, 2.0], 0.0), Err(Error::Increasing { index: 1 }));
        assert_eq!(slow_series(&[1.0], -1.0), Err(Error::NonPositive { index: 1 }));
    }
}
