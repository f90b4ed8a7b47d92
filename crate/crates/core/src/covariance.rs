//! Second-moment models of an observable `f` and an estimand `g`.
//!
//! A [`CovarianceTriple`] holds `E_ff = E[f fᵀ]`, `E_gf = E[g fᵀ]` and
//! `E_gg = E[g gᵀ]`. Both random vectors are taken to be zero-mean, so the
//! sample estimators divide by `k` and subtract nothing unless centering is
//! asked for explicitly.

use alloc::vec::Vec;

use crate::eig::{symmetric_eig, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::pinv::RankPolicy;
use crate::tolerances::{COVARIANCE_PSD, NULL_CONTAINMENT, SYMMETRY_REL};

/// Paired realizations: column `j` of `f` and of `g` come from the same outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    f: Matrix,
    g: Matrix,
}

impl SampleSet {
    pub fn new(f: Matrix, g: Matrix) -> Result<Self> {
        if f.cols() != g.cols() {
            return Err(Error::DimensionMismatch {
                op: "SampleSet::new",
                left: f.shape(),
                right: g.shape(),
            });
        }
        if f.cols() == 0 {
            return Err(Error::EmptySampleSet);
        }
        f.check_finite()?;
        g.check_finite()?;
        Ok(Self { f, g })
    }

    /// Builds the sample matrices from per-outcome vectors.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a [f64], &'a [f64])>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let k = pairs.len();
        if k == 0 {
            return Err(Error::EmptySampleSet);
        }
        let (m, n) = (pairs[0].0.len(), pairs[0].1.len());
        let mut f = Matrix::zeros(m, k);
        let mut g = Matrix::zeros(n, k);
        for (j, (fj, gj)) in pairs.iter().enumerate() {
            if fj.len() != m || gj.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "SampleSet::from_pairs",
                    left: (m, n),
                    right: (fj.len(), gj.len()),
                });
            }
            f.set_column(j, fj);
            g.set_column(j, gj);
        }
        Self::new(f, g)
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.f.cols()
    }

    /// Realizations of `self` followed by those of `other`.
    pub fn concat(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.f.rows() != other.f.rows() || self.g.rows() != other.g.rows() {
            return Err(Error::DimensionMismatch {
                op: "SampleSet::concat",
                left: (self.f.rows(), self.g.rows()),
                right: (other.f.rows(), other.g.rows()),
            });
        }
        let join = |a: &Matrix, b: &Matrix| {
            Matrix::from_fn(a.rows(), a.cols() + b.cols(), |i, j| {
                if j < a.cols() {
                    a[(i, j)]
                } else {
                    b[(i, j - a.cols())]
                }
            })
        };
        SampleSet::new(join(&self.f, &other.f), join(&self.g, &other.g))
    }
}

/// Whether sample means are removed before forming second moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// Zero-mean model: raw second moments.
    #[default]
    None,
    /// Subtract the per-coordinate sample mean first (for real data with an offset).
    SubtractMean,
}

/// `(E_ff, E_gf, E_gg)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceTriple {
    e_ff: Matrix,
    e_gf: Matrix,
    e_gg: Matrix,
}

/// Smallest eigenvalue of a symmetric block against its PSD floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    /// `−1e-10 · λ_max`
    pub floor: f64,
}

impl PsdReport {
    pub fn passes(&self) -> bool {
        self.min_eigenvalue >= self.floor
    }

    fn of(a: &Matrix) -> Result<Self> {
        let s = symmetric_eig(a)?;
        Ok(Self {
            min_eigenvalue: s.eigenvalues().last().copied().unwrap_or(0.0),
            floor: -COVARIANCE_PSD * s.lambda_max().max(0.0),
        })
    }
}

impl CovarianceTriple {
    /// Checks shapes, finiteness and symmetry of the two auto-covariances.
    /// Positive semi-definiteness is not enforced; see [`Self::psd_reports`].
    pub fn new(e_ff: Matrix, e_gf: Matrix, e_gg: Matrix) -> Result<Self> {
        e_ff.require_square()?;
        e_gg.require_square()?;
        if e_gf.rows() != e_gg.rows() || e_gf.cols() != e_ff.rows() {
            return Err(Error::DimensionMismatch {
                op: "CovarianceTriple::new",
                left: e_gf.shape(),
                right: (e_gg.rows(), e_ff.rows()),
            });
        }
        for m in [&e_ff, &e_gf, &e_gg] {
            m.check_finite()?;
        }
        for m in [&e_ff, &e_gg] {
            let allowed = SYMMETRY_REL * m.max_abs();
            let asymmetry = m.asymmetry();
            if asymmetry > allowed {
                return Err(Error::NonSymmetric { asymmetry, allowed });
            }
        }
        Ok(Self {
            e_ff: e_ff.symmetrize()?,
            e_gf,
            e_gg: e_gg.symmetrize()?,
        })
    }

    /// `E_ff = F Fᵀ/k`, `E_gf = G Fᵀ/k`, `E_gg = G Gᵀ/k`.
    pub fn from_samples(samples: &SampleSet) -> Result<Self> {
        Self::from_samples_with(samples, Centering::None)
    }

    pub fn from_samples_with(samples: &SampleSet, centering: Centering) -> Result<Self> {
        let k = samples.k();
        if k == 0 {
            return Err(Error::EmptySampleSet);
        }
        let (f, g) = match centering {
            Centering::None => (samples.f.clone(), samples.g.clone()),
            Centering::SubtractMean => (center_rows(&samples.f), center_rows(&samples.g)),
        };
        let kf = k as f64;
        let gram = |a: &Matrix, b: &Matrix, symmetric: bool| {
            let mut out = Matrix::zeros(a.rows(), b.rows());
            for i in 0..a.rows() {
                let start = if symmetric { i } else { 0 };
                for j in start..b.rows() {
                    let s: f64 = a.row(i).iter().zip(b.row(j)).map(|(x, y)| x * y).sum();
                    out[(i, j)] = s / kf;
                    if symmetric {
                        out[(j, i)] = s / kf;
                    }
                }
            }
            out
        };
        Ok(Self {
            e_ff: gram(&f, &f, true),
            e_gf: gram(&g, &f, false),
            e_gg: gram(&g, &g, true),
        })
    }

    pub fn e_ff(&self) -> &Matrix {
        &self.e_ff
    }

    pub fn e_gf(&self) -> &Matrix {
        &self.e_gf
    }

    pub fn e_gg(&self) -> &Matrix {
        &self.e_gg
    }

    /// `E_fg = E_gfᵀ`.
    pub fn e_fg(&self) -> Matrix {
        self.e_gf.transpose()
    }

    /// Dimension of the observable.
    pub fn obs_dim(&self) -> usize {
        self.e_ff.rows()
    }

    /// Dimension of the estimand.
    pub fn est_dim(&self) -> usize {
        self.e_gg.rows()
    }

    /// Joint second moment `[[E_ff, E_fg], [E_gf, E_gg]]`.
    pub fn joint(&self) -> Matrix {
        self.e_ff
            .block2x2(&self.e_fg(), &self.e_gf, &self.e_gg)
            .expect("shapes checked at construction")
    }

    /// PSD reports for `E_ff`, `E_gg` and the joint matrix, in that order.
    pub fn psd_reports(&self) -> Result<[PsdReport; 3]> {
        Ok([
            PsdReport::of(&self.e_ff)?,
            PsdReport::of(&self.e_gg)?,
            PsdReport::of(&self.joint())?,
        ])
    }
}

fn center_rows(a: &Matrix) -> Matrix {
    let k = a.cols() as f64;
    let means: Vec<f64> = (0..a.rows()).map(|i| a.row(i).iter().sum::<f64>() / k).collect();
    Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] - means[i])
}

/// Covariance of `T f` given the covariance of `f`: `T E Tᵀ`.
pub fn transform_covariance(t: &Matrix, e: &Matrix) -> Result<Matrix> {
    e.require_square()?;
    if t.cols() != e.rows() {
        return Err(Error::DimensionMismatch {
            op: "transform_covariance",
            left: t.shape(),
            right: e.shape(),
        });
    }
    t.matmul(e)?.matmul(&t.transpose())?.symmetrize()
}

/// Covariances involving `k = T E_ff^† f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCovariances {
    /// `T E_ff^† Tᵀ`
    pub e_kk: Matrix,
    /// `E_gf E_ff^† Tᵀ`
    pub e_gk: Matrix,
    /// `E_gkᵀ`
    pub e_kg: Matrix,
}

/// Uses `E_ff^† E_ff E_ff^† = E_ff^†` to write the covariances of the
/// filtered observable without `E_ff` itself.
pub fn filtered_covariances(t: &Matrix, triple: &CovarianceTriple, dagger: &Matrix) -> Result<FilteredCovariances> {
    let m = triple.obs_dim();
    if t.cols() != m || dagger.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            op: "filtered_covariances",
            left: t.shape(),
            right: dagger.shape(),
        });
    }
    let tt = t.transpose();
    let e_kk = t.matmul(dagger)?.matmul(&tt)?.symmetrize()?;
    let e_gk = triple.e_gf().matmul(dagger)?.matmul(&tt)?;
    let e_kg = e_gk.transpose();
    Ok(FilteredCovariances { e_kk, e_gk, e_kg })
}

/// How far `E_gf` reaches into the numerical null space of `E_ff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentReport {
    /// Dimension of the numerical null space of `E_ff`.
    pub null_dim: usize,
    /// `max_j ‖E_gf u_j‖` over an orthonormal null basis `u_j`.
    pub leakage: f64,
    /// `1e-9 · max(1, ‖E_gf‖_F)`.
    pub threshold: f64,
    /// Eigenvalue cutoff that defined the null space.
    pub tolerance: f64,
}

impl ContainmentReport {
    pub fn passes(&self) -> bool {
        self.leakage <= self.threshold
    }

    /// Report from an existing decomposition of `E_ff`.
    pub fn from_decomposition(e_gf: &Matrix, e_ff_eig: &SpectralDecomposition, policy: RankPolicy) -> Result<Self> {
        let n = e_ff_eig.source_dim();
        if e_gf.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "null_space_containment",
                left: e_gf.shape(),
                right: (n, n),
            });
        }
        let tolerance = policy.cutoff(n, e_ff_eig.spectral_radius());
        let mut null_dim = 0;
        let mut leakage = 0.0f64;
        for (j, &lambda) in e_ff_eig.eigenvalues().iter().enumerate() {
            if lambda <= tolerance {
                null_dim += 1;
                let image = e_gf.mul_vec(&e_ff_eig.eigenvector(j))?;
                leakage = leakage.max(norm2(&image));
            }
        }
        Ok(Self {
            null_dim,
            leakage,
            threshold: NULL_CONTAINMENT * e_gf.frobenius_norm().max(1.0),
            tolerance,
        })
    }
}

/// Checks `null(E_ff) ⊆ null(E_gf)`, the condition under which the normal
/// equation `X E_ff = E_gf` can be solved.
pub fn null_space_containment(triple: &CovarianceTriple, policy: RankPolicy) -> Result<ContainmentReport> {
    let s = symmetric_eig(triple.e_ff())?;
    ContainmentReport::from_decomposition(triple.e_gf(), &s, policy)
}

/// `‖E_gf − E_gf E_ff^† E_ff‖_F`.
pub fn consistency_identity(triple: &CovarianceTriple, dagger: &Matrix) -> Result<f64> {
    let m = triple.obs_dim();
    if dagger.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            op: "consistency_identity",
            left: dagger.shape(),
            right: (m, m),
        });
    }
    let back = triple.e_gf().matmul(dagger)?.matmul(triple.e_ff())?;
    Ok(triple.e_gf().sub(&back)?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinv::pinv;

    fn toy_samples() -> SampleSet {
        let f = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let g = Matrix::from_rows(&[[1.0, -1.0]]).unwrap();
        SampleSet::new(f, g).unwrap()
    }

    #[test]
    fn two_sample_arithmetic() {
        let t = CovarianceTriple::from_samples(&toy_samples()).unwrap();
        assert_eq!(t.e_ff(), &Matrix::identity(2).scale(0.5));
        assert_eq!(t.e_gf().as_slice(), &[0.5, -0.5]);
        // (1² + (−1)²)/2
        assert_eq!(t.e_gg().as_slice(), &[1.0]);
    }

    #[test]
    fn single_sample() {
        let one = Matrix::from_rows(&[[1.0]]).unwrap();
        let t = CovarianceTriple::from_samples(&SampleSet::new(one.clone(), one.clone()).unwrap()).unwrap();
        assert_eq!((t.e_ff(), t.e_gf(), t.e_gg()), (&one, &one, &one));
    }

    #[test]
    fn empty_and_mismatched_sample_sets() {
        assert_eq!(
            SampleSet::new(Matrix::zeros(2, 0), Matrix::zeros(1, 0)),
            Err(Error::EmptySampleSet)
        );
        assert!(matches!(
            SampleSet::new(Matrix::zeros(2, 3), Matrix::zeros(1, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(SampleSet::from_pairs(core::iter::empty()), Err(Error::EmptySampleSet));
    }

    #[test]
    fn centering_removes_offset() {
        let f = Matrix::from_rows(&[[3.0, 5.0]]).unwrap();
        let g = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let s = SampleSet::new(f, g).unwrap();
        let t = CovarianceTriple::from_samples_with(&s, Centering::SubtractMean).unwrap();
        assert_eq!(t.e_ff().as_slice(), &[1.0]);
        assert_eq!(t.e_gf().as_slice(), &[0.0]);
        assert_eq!(t.e_gg().as_slice(), &[0.0]);
    }

    #[test]
    fn transform_by_identity_and_scaled_identity() {
        let e = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
        assert_eq!(transform_covariance(&Matrix::identity(2), &e).unwrap(), e);
        assert_eq!(
            transform_covariance(&Matrix::identity(2).scale(2.0), &e).unwrap(),
            e.scale(4.0)
        );
        assert!(transform_covariance(&Matrix::identity(3), &e).is_err());
    }

    #[test]
    fn filtered_covariances_with_t_equal_e_ff_and_zero() {
        let t = CovarianceTriple::from_samples(&toy_samples()).unwrap();
        let d = pinv(t.e_ff(), RankPolicy::default()).unwrap().into_dagger();
        let fc = filtered_covariances(t.e_ff(), &t, &d).unwrap();
        assert!(fc.e_kk.sub(t.e_ff()).unwrap().max_abs() < 1e-15);
        let fc = filtered_covariances(&Matrix::zeros(3, 2), &t, &d).unwrap();
        assert_eq!(fc.e_kk.max_abs() + fc.e_gk.max_abs() + fc.e_kg.max_abs(), 0.0);
        assert_eq!(fc.e_gk.shape(), (1, 3));
    }

    #[test]
    fn containment_detects_planted_leak() {
        let e_ff = Matrix::from_diagonal(&[1.0, 0.0]);
        let e_gg = Matrix::from_diagonal(&[1.0]);
        let ok = CovarianceTriple::new(e_ff.clone(), Matrix::from_rows(&[[0.5, 0.0]]).unwrap(), e_gg.clone()).unwrap();
        let r = null_space_containment(&ok, RankPolicy::default()).unwrap();
        assert_eq!((r.null_dim, r.leakage), (1, 0.0));
        assert!(r.passes());

        let leak = CovarianceTriple::new(e_ff, Matrix::from_rows(&[[0.5, 0.25]]).unwrap(), e_gg).unwrap();
        let r = null_space_containment(&leak, RankPolicy::default()).unwrap();
        assert_eq!(r.leakage, 0.25);
        assert!(!r.passes());
        let d = pinv(leak.e_ff(), RankPolicy::default()).unwrap().into_dagger();
        assert_eq!(consistency_identity(&leak, &d).unwrap(), 0.25);
    }

    #[test]
    fn zero_cross_covariance_has_no_leak() {
        let t = CovarianceTriple::new(Matrix::zeros(3, 3), Matrix::zeros(2, 3), Matrix::identity(2)).unwrap();
        let r = null_space_containment(&t, RankPolicy::default()).unwrap();
        assert_eq!((r.null_dim, r.leakage), (3, 0.0));
    }

    #[test]
    fn full_rank_identity_residual_is_zero() {
        let t = CovarianceTriple::new(
            Matrix::identity(2),
            Matrix::from_rows(&[[0.3, -0.2]]).unwrap(),
            Matrix::identity(1),
        )
        .unwrap();
        assert_eq!(consistency_identity(&t, &Matrix::identity(2)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_misshapen_triples() {
        assert!(CovarianceTriple::new(Matrix::identity(2), Matrix::zeros(1, 3), Matrix::identity(1)).is_err());
        let asym = Matrix::from_rows(&[[1.0, 0.2], [0.1, 1.0]]).unwrap();
        assert!(matches!(
            CovarianceTriple::new(asym, Matrix::zeros(1, 2), Matrix::identity(1)),
            Err(Error::NonSymmetric { .. })
        ));
    }
}
