//! Input retrieval from Fourier coefficients: a model with known covariances.
//!
//! The outcome is a sequence `ω_1, ω_2, …` of independent variables, uniform
//! on `[−1, 1]` (variance 1/3). The estimand is the sawtooth-like series
//! `g_j = (−1)^{j+1} ω_j / j` and the observable couples neighbouring
//! outcomes on the odd coefficients only:
//!
//! ```text
//! f_{2k−1} = (ω_k + ω_{k+1}) / (2k−1),   f_{2k} = 0.
//! ```
//!
//! Two finite truncations of `f` are provided. [`Truncation::Leading`]
//! keeps the full definition for every retained coordinate, so the last one
//! still involves `ω_{n+1}`. [`Truncation::Proximate`] gives the last retained
//! odd coordinate `ω_n / (2n−1)` alone; with it `f` determines
//! `ω_1..ω_n` exactly, the pseudo-inverse of `E_ff` is the leading block of
//! the infinite closed form and the optimal filter recovers `g` without
//! error.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::covariance::CovarianceTriple;
use crate::error::{Error, Result};
use crate::filter::{apply, solve};
use crate::matrix::Matrix;
use crate::pinv::RankPolicy;
use crate::stats::RunningMean;

/// Variance of a uniform variable on `[−1, 1]`.
pub const OMEGA_VARIANCE: f64 = 1.0 / 3.0;

/// The four reference trial outcomes `(trial number, ω_1..ω_8)`.
pub const REFERENCE_TRIALS: [(u32, [f64; 8]); 4] = [
    (2, [0.9150, 0.9298, -0.6848, 0.9412, 0.9143, -0.0292, 0.6006, -0.7162]),
    (4, [0.3575, 0.5155, 0.4863, -0.2155, 0.3110, -0.6576, 0.4121, -0.9363]),
    (5, [-0.4462, -0.9077, -0.8057, 0.6469, 0.3897, -0.3658, 0.9004, -0.9311]),
    (6, [-0.1225, -0.2369, 0.5310, 0.5904, -0.6263, -0.0205, -0.1088, 0.2926]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Last retained odd coordinate is `ω_n / (2n−1)`.
    #[default]
    Proximate,
    /// Every retained coordinate uses `(ω_k + ω_{k+1}) / (2k−1)`.
    Leading,
}

/// `n_est` estimand coefficients observed through `n_obs = 2·n_est`
/// coefficients of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleModel {
    n_est: usize,
    truncation: Truncation,
}

impl ExampleModel {
    /// Model with the proximate truncation.
    ///
    /// # Panics
    /// If `n_est` is zero.
    pub fn new(n_est: usize) -> Self {
        assert!(n_est > 0, "the example needs at least one estimand coefficient");
        Self {
            n_est,
            truncation: Truncation::Proximate,
        }
    }

    pub fn with_truncation(self, truncation: Truncation) -> Self {
        Self { truncation, ..self }
    }

    pub fn n_est(&self) -> usize {
        self.n_est
    }

    pub fn n_obs(&self) -> usize {
        2 * self.n_est
    }

    /// Outcome coordinates needed to realize `f` and `g`.
    pub fn n_omega(&self) -> usize {
        match self.truncation {
            Truncation::Proximate => self.n_est,
            Truncation::Leading => self.n_est + 1,
        }
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }
}

fn odd(k: usize) -> f64 {
    (2 * k - 1) as f64
}

/// Entry `(i, j)` (1-based) of `E_ff` truncated to `n_odd` odd coordinates.
pub fn ff_entry(i: usize, j: usize, n_odd: usize, truncation: Truncation) -> f64 {
    if i % 2 == 0 || j % 2 == 0 || i > 2 * n_odd || j > 2 * n_odd {
        return 0.0;
    }
    let (k, l) = (i.div_ceil(2), j.div_ceil(2));
    if k == l {
        let weight = if k == n_odd && truncation == Truncation::Proximate {
            OMEGA_VARIANCE
        } else {
            2.0 * OMEGA_VARIANCE
        };
        weight / (odd(k) * odd(k))
    } else if k.abs_diff(l) == 1 {
        OMEGA_VARIANCE / (odd(k) * odd(l))
    } else {
        0.0
    }
}

/// Entry `(i, j)` (1-based) of `E_gf`; the same for both truncations.
pub fn gf_entry(i: usize, j: usize) -> f64 {
    if j % 2 == 0 {
        return 0.0;
    }
    let k = j.div_ceil(2);
    if k == i || k + 1 == i {
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        sign * OMEGA_VARIANCE / (i as f64 * odd(k))
    } else {
        0.0
    }
}

/// Entry `(i, j)` (1-based) of `E_gg = diag(1/(3 j²))`.
pub fn gg_entry(i: usize, j: usize) -> f64 {
    if i == j {
        OMEGA_VARIANCE / (i * i) as f64
    } else {
        0.0
    }
}

/// Closed-form covariance triple of the model.
pub fn build_triple(model: &ExampleModel) -> CovarianceTriple {
    let (n, m) = (model.n_est(), model.n_obs());
    let e_ff = Matrix::from_fn(m, m, |i, j| ff_entry(i + 1, j + 1, n, model.truncation));
    let e_gf = Matrix::from_fn(n, m, |i, j| gf_entry(i + 1, j + 1));
    let e_gg = Matrix::from_fn(n, n, |i, j| gg_entry(i + 1, j + 1));
    CovarianceTriple::new(e_ff, e_gf, e_gg).expect("closed forms are symmetric and finite")
}

/// `trace(E_ff)` over `n_odd` odd coordinates without forming the matrix.
/// Summed from the smallest term up.
pub fn ff_trace(n_odd: usize, truncation: Truncation) -> f64 {
    (1..=n_odd)
        .rev()
        .map(|k| ff_entry(2 * k - 1, 2 * k - 1, n_odd, truncation))
        .sum()
}

/// `f` truncated to `n_odd` odd coordinates (length `2·n_odd`).
pub fn observable(omega: &[f64], n_odd: usize, truncation: Truncation) -> Result<Vec<f64>> {
    let needed = match truncation {
        Truncation::Proximate => n_odd,
        Truncation::Leading => n_odd + 1,
    };
    if omega.len() < needed {
        return Err(Error::InsufficientOmega {
            needed,
            got: omega.len(),
        });
    }
    let mut f = vec![0.0; 2 * n_odd];
    for k in 1..=n_odd {
        let numerator = if k == n_odd && truncation == Truncation::Proximate {
            omega[k - 1]
        } else {
            omega[k - 1] + omega[k]
        };
        f[2 * k - 2] = numerator / odd(k);
    }
    Ok(f)
}

/// `g_j = (−1)^{j+1} ω_j / j` for `j = 1..n`.
pub fn estimand(omega: &[f64], n: usize) -> Result<Vec<f64>> {
    if omega.len() < n {
        return Err(Error::InsufficientOmega {
            needed: n,
            got: omega.len(),
        });
    }
    Ok((1..=n)
        .map(|j| {
            let v = omega[j - 1] / j as f64;
            if j % 2 == 1 {
                v
            } else {
                -v
            }
        })
        .collect())
}

/// One draw of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub omega: Vec<f64>,
    pub label: String,
}

impl Outcome {
    pub fn new(omega: Vec<f64>, label: impl Into<String>) -> Self {
        Self {
            omega,
            label: label.into(),
        }
    }

    /// The reference outcomes, labelled by trial number.
    pub fn reference_trials() -> Vec<Outcome> {
        REFERENCE_TRIALS
            .iter()
            .map(|(t, w)| Outcome::new(w.to_vec(), alloc::format!("reference trial {t}")))
            .collect()
    }
}

/// `(f, g)` for an outcome, truncated as the model says.
pub fn realize(model: &ExampleModel, outcome: &Outcome) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = observable(&outcome.omega, model.n_est(), model.truncation())?;
    let g = estimand(&outcome.omega, model.n_est())?;
    Ok((f, g))
}

/// Deterministic source of outcome coordinates.
///
/// ChaCha8 keyed by a 64-bit seed (via `SeedableRng::seed_from_u64`);
/// independent streams of the same seed are selected with
/// [`OutcomeRng::with_stream`]. Each coordinate takes the top 53 bits of a
/// 64-bit word: `u = (w >> 11) · 2⁻⁵³ ∈ [0, 1)`, then `ω = 2u − 1`.
#[derive(Debug, Clone)]
pub struct OutcomeRng {
    inner: ChaCha8Rng,
    draws: u64,
}

impl OutcomeRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner, draws: 0 }
    }

    /// Uniform on `[−1, 1)`.
    pub fn next_omega(&mut self) -> f64 {
        self.draws += 1;
        let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    /// Number of coordinates drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// Draws `model.n_omega()` coordinates.
pub fn sample_outcome(model: &ExampleModel, rng: &mut OutcomeRng) -> Outcome {
    let start = rng.draws();
    let omega = (0..model.n_omega()).map(|_| rng.next_omega()).collect();
    Outcome::new(omega, alloc::format!("draw {start}"))
}

/// Sign-corrected closed form of the infinite `E_ff^†` on odd coordinates:
/// entry `(2k−1, 2ℓ−1)` is `(−1)^{k+ℓ} · min(k, ℓ) · 3(2k−1)(2ℓ−1)`.
///
/// `k` and `ℓ` count odd coordinates from 1.
pub fn closed_form_dagger_entry(k: usize, l: usize) -> f64 {
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    sign * k.min(l) as f64 * 3.0 * odd(k) * odd(l)
}

/// Closed form of the optimal filter at matrix position `(i, j)` (1-based):
/// for odd `j = 2ℓ−1` with `ℓ ≥ i` it is `(−1)^{ℓ−1} (2ℓ−1) / i`, otherwise 0.
pub fn closed_form_filter_entry(i: usize, j: usize) -> f64 {
    if i == 0 || j % 2 == 0 {
        return 0.0;
    }
    let l = j.div_ceil(2);
    if l < i {
        return 0.0;
    }
    let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
    sign * odd(l) / i as f64
}

/// `max |x_ij − closed form|` over all entries of `x`.
pub fn filter_block_deviation(x: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            worst = worst.max((x[(i, j)] - closed_form_filter_entry(i + 1, j + 1)).abs());
        }
    }
    worst
}

/// Pivot `c²_kk = (k+1) / (3k(2k−1)²)` of the outer-product reduction of the
/// untruncated `E_ff` (k counts odd coordinates from 1).
pub fn closed_form_pivot(k: usize) -> f64 {
    (k + 1) as f64 / (3.0 * k as f64 * odd(k) * odd(k))
}

/// One application of the filter to a realized outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub outcome: Outcome,
    pub f_real: Vec<f64>,
    pub g_true: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub max_abs_err: f64,
}

impl TrialReport {
    /// `‖ĝ − g‖_∞` from the stored vectors.
    pub fn recomputed_max_abs_err(&self) -> f64 {
        self.g_hat
            .iter()
            .zip(&self.g_true)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }
}

/// Builds the optimal filter from the closed-form triple and applies it to
/// each outcome.
pub fn run_trials(model: &ExampleModel, outcomes: &[Outcome]) -> Result<Vec<TrialReport>> {
    let filter = solve(&build_triple(model), RankPolicy::default())?;
    outcomes
        .iter()
        .map(|outcome| {
            let (f_real, g_true) = realize(model, outcome)?;
            let g_hat = apply(&filter.x, &f_real)?;
            let mut report = TrialReport {
                outcome: outcome.clone(),
                f_real,
                g_true,
                g_hat,
                max_abs_err: 0.0,
            };
            report.max_abs_err = report.recomputed_max_abs_err();
            Ok(report)
        })
        .collect()
}

/// `E[‖f_{2n−1} − f‖²]` with `f` kept to `k_odd ≥ n` odd coordinates:
/// `(1/3)/(2n−1)² + (2/3) Σ_{k=n+1}^{k_odd} 1/(2k−1)²`.
pub fn observation_error_law(n: usize, k_odd: usize) -> f64 {
    let tail: f64 = ((n + 1)..=k_odd).rev().map(|k| 1.0 / (odd(k) * odd(k))).sum();
    OMEGA_VARIANCE / (odd(n) * odd(n)) + 2.0 * OMEGA_VARIANCE * tail
}

/// `E[‖ĝ_{2n−1} − g‖²]` with `g` kept to `j_max ≥ n` coefficients:
/// `Var(ω) · Σ_{j=n+1}^{j_max} 1/j²`.
pub fn estimate_error_law(n: usize, j_max: usize) -> f64 {
    let tail: f64 = ((n + 1)..=j_max).rev().map(|j| 1.0 / (j * j) as f64).sum();
    OMEGA_VARIANCE * tail
}

/// Monte-Carlo accumulators for the two truncation error laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationErrors {
    /// `‖f_{2n−1} − f‖²`
    pub observation: RunningMean,
    /// `‖ĝ_{2n−1} − g‖²`
    pub estimate: RunningMean,
}

/// Simulates the proximate observation `f_{2n−1}` against `f` kept to
/// `k_odd` odd coordinates, and `ĝ_{2n−1} = X f_{2n−1}` against `g` kept to
/// `k_odd` coefficients. `X` comes from [`solve`] on the `n`-coefficient
/// model.
pub fn simulate_truncation_errors(
    n: usize,
    k_odd: usize,
    samples: usize,
    rng: &mut OutcomeRng,
) -> Result<TruncationErrors> {
    if k_odd < n {
        return Err(Error::InsufficientOmega { needed: n, got: k_odd });
    }
    let x = solve(&build_triple(&ExampleModel::new(n)), RankPolicy::default())?.x;
    let mut observation = RunningMean::new();
    let mut estimate = RunningMean::new();
    let mut omega = vec![0.0; k_odd + 1];
    for _ in 0..samples {
        for w in omega.iter_mut() {
            *w = rng.next_omega();
        }
        let f = observable(&omega, k_odd, Truncation::Leading)?;
        let f_n = observable(&omega, n, Truncation::Proximate)?;
        let g = estimand(&omega, k_odd)?;
        let g_hat = apply(&x, &f_n)?;

        let df: f64 = f
            .iter()
            .enumerate()
            .map(|(i, fi)| {
                let d = f_n.get(i).copied().unwrap_or(0.0) - fi;
                d * d
            })
            .sum();
        let dg: f64 = g
            .iter()
            .enumerate()
            .map(|(i, gi)| {
                let d = g_hat.get(i).copied().unwrap_or(0.0) - gi;
                d * d
            })
            .sum();
        observation.push(df);
        estimate.push(dg);
    }
    Ok(TruncationErrors { observation, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_covariance_entries() {
        let t = build_triple(&ExampleModel::new(8));
        assert_eq!(t.e_ff()[(0, 0)], 2.0 / 3.0);
        assert_eq!(t.e_ff()[(0, 2)], 1.0 / 9.0);
        assert_eq!(t.e_gf()[(0, 0)], 1.0 / 3.0);
        assert_eq!(t.e_gg().diagonal()[..3], [1.0 / 3.0, 1.0 / 12.0, 1.0 / 27.0]);
    }

    #[test]
    fn truncations_differ_only_in_last_diagonal() {
        let p = build_triple(&ExampleModel::new(5));
        let l = build_triple(&ExampleModel::new(5).with_truncation(Truncation::Leading));
        let diff = l.e_ff().sub(p.e_ff()).unwrap();
        assert_eq!(diff[(8, 8)], (1.0 / 3.0) / 81.0);
        assert_eq!(diff.as_slice().iter().filter(|x| **x != 0.0).count(), 1);
        assert_eq!(l.e_gf(), p.e_gf());
    }

    #[test]
    fn realize_by_substitution() {
        let model = ExampleModel::new(3).with_truncation(Truncation::Leading);
        let (f, g) = realize(&model, &Outcome::new(vec![1.0, 1.0, 0.0, 0.0], "")).unwrap();
        assert_eq!(f, vec![2.0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(g, vec![1.0, -0.5, 0.0]);

        let (f, g) = realize(&ExampleModel::new(4), &Outcome::new(vec![0.0; 4], "")).unwrap();
        assert!(f.iter().chain(&g).all(|x| *x == 0.0));
    }

    #[test]
    fn realize_reference_outcome() {
        let w = REFERENCE_TRIALS[0].1;
        let (_, g) = realize(&ExampleModel::new(8), &Outcome::new(w.to_vec(), "")).unwrap();
        assert_eq!(g[0], 0.9150);
        assert_eq!(g[1], -0.9298 / 2.0);
        assert_eq!(g[2], -0.6848 / 3.0);
    }

    #[test]
    fn insufficient_omega() {
        let leading = ExampleModel::new(8).with_truncation(Truncation::Leading);
        let out = Outcome::new(REFERENCE_TRIALS[0].1.to_vec(), "");
        assert_eq!(
            realize(&leading, &out),
            Err(Error::InsufficientOmega { needed: 9, got: 8 })
        );
    }

    #[test]
    fn closed_form_dagger_entries() {
        assert_eq!(closed_form_dagger_entry(1, 1), 3.0);
        assert_eq!(closed_form_dagger_entry(1, 2), -9.0);
        assert_eq!(closed_form_dagger_entry(2, 2), 54.0);
        assert_eq!(closed_form_dagger_entry(3, 3), 225.0);
        assert_eq!(closed_form_dagger_entry(4, 4), 588.0);
        assert_eq!(closed_form_dagger_entry(3, 1), 15.0);
        assert_eq!(closed_form_dagger_entry(4, 3), -315.0);
    }

    #[test]
    fn closed_form_filter_entries() {
        assert_eq!(closed_form_filter_entry(1, 1), 1.0);
        assert_eq!(closed_form_filter_entry(1, 3), -3.0);
        assert_eq!(closed_form_filter_entry(1, 5), 5.0);
        assert_eq!(closed_form_filter_entry(2, 3), -1.5);
        assert_eq!(closed_form_filter_entry(4, 7), -7.0 / 4.0);
        assert_eq!(closed_form_filter_entry(3, 1), 0.0);
        assert_eq!(closed_form_filter_entry(4, 5), 0.0);
        assert_eq!(closed_form_filter_entry(1, 2), 0.0);
    }

    #[test]
    fn rng_is_reproducible_and_in_range() {
        let mut a = OutcomeRng::new(42);
        let mut b = OutcomeRng::new(42);
        let mut c = OutcomeRng::with_stream(42, 1);
        let xs: Vec<f64> = (0..1000).map(|_| a.next_omega()).collect();
        let ys: Vec<f64> = (0..1000).map(|_| b.next_omega()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|x| (-1.0..1.0).contains(x)));
        assert_ne!(c.next_omega(), xs[0]);
        assert_eq!(a.draws(), 1000);
    }

    #[test]
    fn error_laws_at_small_sizes() {
        // n = k_odd: only the dropped ω_{n+1} term remains.
        assert_eq!(observation_error_law(1, 1), 1.0 / 3.0);
        assert_eq!(estimate_error_law(2, 2), 0.0);
        assert!((estimate_error_law(1, 2) - 1.0 / 12.0).abs() < 1e-17);
    }
}
