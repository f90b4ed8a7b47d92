//! Spectral Moore–Penrose inverse of symmetric matrices.

use crate::eig::{symmetric_eig, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tolerances::NEGATIVE_CLAMP_FACTOR;

/// How the numerical rank of a symmetric matrix is decided.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankPolicy {
    /// Cutoff `dim · ε · max|λ|`.
    #[default]
    Relative,
    /// Fixed absolute eigenvalue cutoff.
    Absolute(f64),
}

impl RankPolicy {
    /// Eigenvalue cutoff for a decomposition of the given size and spectral radius.
    pub fn cutoff(self, dim: usize, spectral_radius: f64) -> f64 {
        match self {
            RankPolicy::Relative => dim as f64 * f64::EPSILON * spectral_radius,
            RankPolicy::Absolute(tau) => tau.abs(),
        }
    }
}

/// `A^† = V_r · diag(1/λ_r) · V_rᵀ` over the eigenpairs above the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoInverse {
    source: SpectralDecomposition,
    retained_rank: usize,
    tolerance: f64,
    dagger: Matrix,
}

impl PseudoInverse {
    pub fn source(&self) -> &SpectralDecomposition {
        &self.source
    }

    /// Number of eigenpairs with eigenvalue above [`tolerance`](Self::tolerance).
    /// They are the leading columns of the source decomposition.
    pub fn retained_rank(&self) -> usize {
        self.retained_rank
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dagger(&self) -> &Matrix {
        &self.dagger
    }

    pub fn into_dagger(self) -> Matrix {
        self.dagger
    }

    /// Orthonormal basis of the numerical null space, one vector per column.
    pub fn null_space_basis(&self) -> Matrix {
        let n = self.source.source_dim();
        let v = self.source.eigenvectors();
        let cols: alloc::vec::Vec<usize> = (self.retained_rank..n).collect();
        let rows: alloc::vec::Vec<usize> = (0..n).collect();
        v.select(&rows, &cols)
    }
}

/// Pseudo-inverse of a symmetric positive semi-definite matrix.
///
/// Eigenvalues at or below the policy cutoff `τ` are discarded. Negative
/// eigenvalues down to `−10τ` are treated as rounding and discarded too;
/// anything more negative means the input is not a valid covariance.
pub fn pinv(a: &Matrix, policy: RankPolicy) -> Result<PseudoInverse> {
    pinv_from_decomposition(symmetric_eig(a)?, policy)
}

pub fn pinv_from_decomposition(source: SpectralDecomposition, policy: RankPolicy) -> Result<PseudoInverse> {
    let n = source.source_dim();
    let tolerance = policy.cutoff(n, source.spectral_radius());
    let limit = NEGATIVE_CLAMP_FACTOR * tolerance;
    if let Some(&worst) = source.eigenvalues().last() {
        if worst < -limit {
            return Err(Error::NegativeEigenvalueBeyondTolerance { value: worst, limit });
        }
    }
    let retained_rank = source.eigenvalues().iter().take_while(|&&l| l > tolerance).count();

    let v = source.eigenvectors();
    let inv: alloc::vec::Vec<f64> = source.eigenvalues()[..retained_rank].iter().map(|l| 1.0 / l).collect();
    let mut dagger = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..retained_rank).map(|k| v[(i, k)] * inv[k] * v[(j, k)]).sum();
            dagger[(i, j)] = s;
            dagger[(j, i)] = s;
        }
    }
    Ok(PseudoInverse {
        source,
        retained_rank,
        tolerance,
        dagger,
    })
}

/// Frobenius residuals of the four Moore–Penrose conditions for `(A, D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpResiduals {
    /// `‖A D A − A‖`
    pub ada: f64,
    /// `‖D A D − D‖`
    pub dad: f64,
    /// `‖(A D)ᵀ − A D‖`
    pub ad_symmetric: f64,
    /// `‖(D A)ᵀ − D A‖`
    pub da_symmetric: f64,
}

impl MpResiduals {
    pub fn max(&self) -> f64 {
        self.ada.max(self.dad).max(self.ad_symmetric).max(self.da_symmetric)
    }

    pub fn as_array(&self) -> [(&'static str, f64); 4] {
        [
            ("ada", self.ada),
            ("dad", self.dad),
            ("ad_symmetric", self.ad_symmetric),
            ("da_symmetric", self.da_symmetric),
        ]
    }
}

/// Residuals of `A D A = A`, `D A D = D`, `(AD)ᵀ = AD`, `(DA)ᵀ = DA`.
///
/// `A` is `m×n` and `D` must be `n×m`. Pass/fail is left to the caller.
pub fn mp_property_check(a: &Matrix, d: &Matrix) -> Result<MpResiduals> {
    if a.rows() != d.cols() || a.cols() != d.rows() {
        return Err(Error::DimensionMismatch {
            op: "mp_property_check",
            left: a.shape(),
            right: d.shape(),
        });
    }
    let ad = a.matmul(d)?;
    let da = d.matmul(a)?;
    Ok(MpResiduals {
        ada: ad.matmul(a)?.sub(a)?.frobenius_norm(),
        dad: da.matmul(d)?.sub(d)?.frobenius_norm(),
        ad_symmetric: ad.transpose().sub(&ad)?.frobenius_norm(),
        da_symmetric: da.transpose().sub(&da)?.frobenius_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_with_zero() {
        let p = pinv(&Matrix::from_diagonal(&[2.0, 0.0]), RankPolicy::default()).unwrap();
        assert_eq!(p.dagger().as_slice(), &[0.5, 0.0, 0.0, 0.0]);
        assert_eq!(p.retained_rank(), 1);
        assert_eq!(p.null_space_basis().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let p = pinv(&Matrix::identity(5), RankPolicy::default()).unwrap();
        assert_eq!(p.dagger(), &Matrix::identity(5));
    }

    #[test]
    fn mp_check_on_exact_pairs() {
        let r = mp_property_check(&Matrix::identity(3), &Matrix::identity(3)).unwrap();
        assert_eq!(r.max(), 0.0);
        let r = mp_property_check(&Matrix::from_diagonal(&[2.0, 0.0]), &Matrix::from_diagonal(&[0.5, 0.0])).unwrap();
        assert_eq!(r.max(), 0.0);
        assert!(mp_property_check(&Matrix::identity(2), &Matrix::identity(3)).is_err());
    }

    #[test]
    fn small_negative_is_clamped_large_is_rejected() {
        let p = pinv(&Matrix::from_diagonal(&[1.0, -1e-17]), RankPolicy::default()).unwrap();
        assert_eq!(p.retained_rank(), 1);
        assert!(matches!(
            pinv(&Matrix::from_diagonal(&[1.0, -1e-3]), RankPolicy::default()),
            Err(Error::NegativeEigenvalueBeyondTolerance { .. })
        ));
    }

    #[test]
    fn absolute_policy_cuts_small_eigenvalues() {
        let a = Matrix::from_diagonal(&[4.0, 1e-6]);
        let p = pinv(&a, RankPolicy::Absolute(1e-5)).unwrap();
        assert_eq!(p.retained_rank(), 1);
        assert_eq!(p.tolerance(), 1e-5);
        assert_eq!(p.dagger()[(1, 1)], 0.0);
        let p = pinv(&a, RankPolicy::Relative).unwrap();
        assert_eq!(p.retained_rank(), 2);
    }
}
