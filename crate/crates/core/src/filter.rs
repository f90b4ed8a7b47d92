//! The optimal linear filter `X = E_gf · E_ff^†` and its relatives.
//!
//! Among all matrices `X`, the minimum of `E[‖X f − g‖²]` is attained
//! exactly when `X E_ff = E_gf`. When `E_ff` is singular that equation has
//! many solutions `E_gf E_ff^† + B (I − E_ff E_ff^†)`; [`solve`] always
//! returns the one with `B = 0`, the minimum-Frobenius-norm filter.

use alloc::vec::Vec;

use crate::covariance::{ContainmentReport, CovarianceTriple, SampleSet};
use crate::eig::symmetric_eig;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::pinv::{pinv, pinv_from_decomposition, PseudoInverse, RankPolicy};
use crate::stats::RunningMean;
use crate::tolerances::{ERROR_BAND, NORMAL_EQUATION, PROJECTION};

/// How well the returned filter satisfies the normal equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    /// `‖X E_ff − E_gf‖` within tolerance.
    Consistent,
    /// The residual exceeds tolerance but `E_gf` stays out of the null space
    /// of `E_ff`; the excess is rounding.
    RoundingOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSolution {
    pub x: Matrix,
    pub retained_rank: usize,
    /// `trace(E_gg − E_gf E_ff^† E_fg)`, clamped at zero inside the rounding band.
    pub expected_error: f64,
    pub tolerance_used: f64,
    /// `‖X E_ff − E_gf‖_F`.
    pub normal_residual: f64,
    /// `1e-9 · max(1, ‖E_gf‖_F)`.
    pub normal_threshold: f64,
    pub consistency: Consistency,
}

fn clamp_error(raw: f64, trace_gg: f64) -> Result<f64> {
    if raw >= 0.0 {
        return Ok(raw);
    }
    let band = ERROR_BAND * trace_gg;
    if raw >= -band {
        Ok(0.0)
    } else {
        Err(Error::NegativeErrorBeyondTolerance { value: raw, band })
    }
}

/// Frobenius inner product `Σ a_ij b_ij`, i.e. `trace(A Bᵀ)`.
fn frobenius_dot(a: &Matrix, b: &Matrix) -> f64 {
    dot(a.as_slice(), b.as_slice())
}

/// Minimum-norm optimal filter for a covariance triple.
pub fn solve(triple: &CovarianceTriple, policy: RankPolicy) -> Result<FilterSolution> {
    let eig = symmetric_eig(triple.e_ff())?;
    let dagger = pinv_from_decomposition(eig, policy)?;
    let x = triple.e_gf().matmul(dagger.dagger())?;

    let normal_residual = x.matmul(triple.e_ff())?.sub(triple.e_gf())?.frobenius_norm();
    let normal_threshold = NORMAL_EQUATION * triple.e_gf().frobenius_norm().max(1.0);
    let consistency = if normal_residual <= normal_threshold {
        Consistency::Consistent
    } else {
        let containment = ContainmentReport::from_decomposition(triple.e_gf(), dagger.source(), policy)?;
        if !containment.passes() {
            return Err(Error::InconsistentTriple {
                normal_residual,
                leakage: containment.leakage,
            });
        }
        Consistency::RoundingOnly
    };

    let trace_gg = triple.e_gg().trace()?;
    let expected_error = clamp_error(trace_gg - frobenius_dot(&x, triple.e_gf()), trace_gg)?;
    Ok(FilterSolution {
        x,
        retained_rank: dagger.retained_rank(),
        expected_error,
        tolerance_used: dagger.tolerance(),
        normal_residual,
        normal_threshold,
        consistency,
    })
}

/// `E[‖X f − g‖²] = trace(X E_ff Xᵀ − E_gf Xᵀ − X E_fg + E_gg)` for any `X`.
pub fn expected_error_of(x: &Matrix, triple: &CovarianceTriple) -> Result<f64> {
    if x.shape() != triple.e_gf().shape() {
        return Err(Error::DimensionMismatch {
            op: "expected_error_of",
            left: x.shape(),
            right: triple.e_gf().shape(),
        });
    }
    let quadratic = frobenius_dot(&x.matmul(triple.e_ff())?, x);
    let cross = frobenius_dot(x, triple.e_gf());
    Ok(quadratic - 2.0 * cross + triple.e_gg().trace()?)
}

/// `ĝ = X f`.
pub fn apply(x: &Matrix, f_obs: &[f64]) -> Result<Vec<f64>> {
    x.mul_vec(f_obs)
}

/// Per-realization squared residuals `‖X f_j − g_j‖²`; their mean is the
/// expected error of `X` under the sample triple.
pub fn residual_moments(x: &Matrix, samples: &SampleSet) -> Result<RunningMean> {
    let fitted = x.matmul(samples.f())?;
    let r = fitted.sub(samples.g())?;
    let mut acc = RunningMean::new();
    for j in 0..r.cols() {
        acc.push(r.column(j).iter().map(|v| v * v).sum());
    }
    Ok(acc)
}

/// `E[‖f_n − f‖²] = Σ_{j>n} λ_j` for the projection onto the leading `n`
/// eigenvectors of `E_ff` (negative rounding residue counts as zero).
pub fn observation_truncation_error(basis: &PseudoInverse, n: usize) -> f64 {
    basis
        .source()
        .eigenvalues()
        .iter()
        .skip(n)
        .rev()
        .map(|l| l.max(0.0))
        .sum()
}

/// Projection of an observation onto the leading `n` eigenvectors of `E_ff`.
///
/// The result lies in the numerical range of `E_ff`, which is where the
/// filter is well defined.
pub fn truncate_observation(f_obs: &[f64], basis: &PseudoInverse, n: usize) -> Result<Vec<f64>> {
    let rank = basis.retained_rank();
    if n > rank {
        return Err(Error::RankExceeded { requested: n, rank });
    }
    let dim = basis.source().source_dim();
    if f_obs.len() != dim {
        return Err(Error::DimensionMismatch {
            op: "truncate_observation",
            left: (f_obs.len(), 1),
            right: (dim, dim),
        });
    }
    let mut out = alloc::vec![0.0; dim];
    for j in 0..n {
        let v = basis.source().eigenvector(j);
        let c = dot(&v, f_obs);
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += c * vi;
        }
    }
    Ok(out)
}

/// Orthogonal projection onto the listed (0-based) coordinates.
pub fn coordinate_projection(dim: usize, coords: &[usize]) -> Matrix {
    let mut p = Matrix::zeros(dim, dim);
    for &c in coords {
        p[(c, c)] = 1.0;
    }
    p
}

/// Restricted estimation from `p = P f`, with `q = (I − P) f` and the
/// innovation `r = q − E_qp E_pp^† p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedSolution {
    /// `(E_gp − E_gr E_rr^† E_qp) E_pp^†`
    pub y: Matrix,
    /// `E_gr E_rr^†`
    pub z: Matrix,
    /// `E_qq − E_qp E_pp^† E_pq`
    pub e_rr: Matrix,
    /// `‖E_pr‖_F`, zero when `p` and `r` are uncorrelated.
    pub e_pr_norm: f64,
    /// `trace(E_gg − E_gp E_pp^† E_pg)`
    pub restricted_error: f64,
    /// Expected error of the unrestricted filter.
    pub full_error: f64,
    /// `trace(E_gr E_rr^† E_rg)`
    pub cross_term: f64,
}

impl PartitionedSolution {
    /// `|restricted − (full + cross)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.restricted_error - self.full_error - self.cross_term).abs()
    }

    /// `Y P + Z (I − P)`, the full filter rebuilt from the two parts.
    pub fn combined_filter(&self, p: &Matrix) -> Result<Matrix> {
        let q = Matrix::identity(p.rows()).sub(p)?;
        self.y.matmul(p)?.add(&self.z.matmul(&q)?)
    }
}

fn check_projection(p: &Matrix) -> Result<()> {
    p.require_square()?;
    p.check_finite()?;
    let idempotence = p.matmul(p)?.sub(p)?.max_abs();
    let residual = idempotence.max(p.asymmetry());
    if residual > PROJECTION * p.max_abs().max(1.0) {
        return Err(Error::NotAProjection { residual });
    }
    Ok(())
}

/// Splits the optimal estimate into the restricted estimate from `P f` and
/// the correction carried by the innovation `r`.
///
/// Pseudo-inverses of the derived blocks use the rank cutoff of `E_ff`
/// (scaled for `E_rr` by the amplification of the Schur complement), so
/// rounding residue in a vanishing block is not mistaken for signal.
pub fn partitioned_solve(triple: &CovarianceTriple, p: &Matrix, policy: RankPolicy) -> Result<PartitionedSolution> {
    let m = triple.obs_dim();
    if p.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            op: "partitioned_solve",
            left: p.shape(),
            right: (m, m),
        });
    }
    check_projection(p)?;
    let p = p.symmetrize()?;
    let q = Matrix::identity(m).sub(&p)?;
    let e = triple.e_ff();

    let full = solve(triple, policy)?;
    let block_policy = RankPolicy::Absolute(full.tolerance_used);

    let e_pp = p.matmul(e)?.matmul(&p)?.symmetrize()?;
    let e_qq = q.matmul(e)?.matmul(&q)?.symmetrize()?;
    let e_qp = q.matmul(e)?.matmul(&p)?;
    let e_pq = e_qp.transpose();
    let e_gp = triple.e_gf().matmul(&p)?;
    let e_gq = triple.e_gf().matmul(&q)?;

    let d_pp = pinv(&e_pp, block_policy)?.into_dagger();
    let d_pp_e_pq = d_pp.matmul(&e_pq)?;
    let w = e_qp.matmul(&d_pp)?;
    let e_rr = e_qq.sub(&w.matmul(&e_pq)?)?.symmetrize()?;
    let e_gr = e_gq.sub(&e_gp.matmul(&d_pp_e_pq)?)?;
    let e_pr = e_pq.sub(&e_pp.matmul(&d_pp_e_pq)?)?;

    // Rounding in the Schur complement grows with ‖E_qp E_pp^†‖², so its
    // cutoff does too.
    let amplification = 1.0 + w.frobenius_norm();
    let rr_policy = RankPolicy::Absolute(full.tolerance_used * amplification * amplification);
    let d_rr = pinv(&e_rr, rr_policy)?.into_dagger();
    let z = e_gr.matmul(&d_rr)?;
    let y = e_gp.sub(&z.matmul(&e_qp)?)?.matmul(&d_pp)?;

    let trace_gg = triple.e_gg().trace()?;
    let restricted_raw = trace_gg - frobenius_dot(&e_gp.matmul(&d_pp)?, &e_gp);
    let restricted_error = clamp_error(restricted_raw, trace_gg)?;
    let cross_term = frobenius_dot(&z, &e_gr);

    Ok(PartitionedSolution {
        y,
        z,
        e_rr,
        e_pr_norm: e_pr.frobenius_norm(),
        restricted_error,
        full_error: full.expected_error,
        cross_term,
    })
}
