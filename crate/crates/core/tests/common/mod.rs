#![allow(dead_code)]

use optfilter_core::example::OutcomeRng;
use optfilter_core::{CovarianceTriple, Matrix, SampleSet};

/// Dense matrix with entries uniform on [-1, 1).
pub fn random_matrix(rng: &mut OutcomeRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.next_omega())
}

/// `BᵀB` with `B` of shape `rank × n`.
pub fn random_psd(rng: &mut OutcomeRng, n: usize, rank: usize) -> Matrix {
    let b = random_matrix(rng, rank, n);
    b.transpose().matmul(&b).unwrap().symmetrize().unwrap()
}

/// Sample-built triple where `g = A f + noise`, `k` realizations.
pub fn sample_triple(rng: &mut OutcomeRng, m: usize, n: usize, k: usize, noise: f64) -> (SampleSet, CovarianceTriple) {
    let f = random_matrix(rng, m, k);
    let a = random_matrix(rng, n, m);
    let e = random_matrix(rng, n, k).scale(noise);
    let g = a.matmul(&f).unwrap().add(&e).unwrap();
    let s = SampleSet::new(f, g).unwrap();
    let t = CovarianceTriple::from_samples(&s).unwrap();
    (s, t)
}

/// `Q·diag(λ)·Qᵀ` with a random orthogonal `Q`; `rank` eigenvalues drawn
/// from `[lo, hi]`, the rest exactly zero.
pub fn random_psd_with_spectrum(rng: &mut OutcomeRng, n: usize, rank: usize, lo: f64, hi: f64) -> Matrix {
    let q = to_nalgebra(&random_matrix(rng, n, n)).qr().q();
    let lambdas: Vec<f64> = (0..n)
        .map(|i| {
            if i < rank {
                lo + (hi - lo) * 0.5 * (rng.next_omega() + 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambdas));
    from_nalgebra(&(&q * d * q.transpose())).symmetrize().unwrap()
}

/// Ratio of the largest to the smallest retained eigenvalue of `E_ff`.
///
/// Absolute residual bounds such as `‖X E_ff − E_gf‖ ≤ 1e-9` only hold when
/// this is moderate; rounding is amplified by it.
pub fn retained_condition(t: &CovarianceTriple) -> f64 {
    let p = optfilter_core::pinv(t.e_ff(), optfilter_core::RankPolicy::default()).unwrap();
    let l = p.source().eigenvalues();
    match p.retained_rank() {
        0 => 1.0,
        r => l[0] / l[r - 1],
    }
}

pub const MAX_CONDITION: f64 = 1e6;

pub fn to_nalgebra(m: &Matrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Reads a `#`-commented comma-separated fixture into rows.
pub fn read_fixture(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.trim().parse().unwrap()).collect())
        .collect()
}
