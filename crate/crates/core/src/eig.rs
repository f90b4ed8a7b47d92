//! Symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration (the classic `tred2`/`tql2` pair). Rows and columns that are
//! identically zero are split off before the reduction and contribute exact
//! standard basis vectors with eigenvalue zero, so structural null spaces
//! come out exact.
//!
//! Output order is fixed: eigenvalues descending (ties keep the order the
//! QL sweep produced them in) and each eigenvector is signed so that its
//! largest-magnitude component is positive, the lowest index winning ties.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tolerances::SYMMETRY_REL;

const MAX_QL_ITERATIONS: usize = 64;

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `j` is the unit eigenvector for `eigenvalues()[j]`.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j)
    }

    pub fn source_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue magnitude, 0 for an empty decomposition.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m: f64, l| m.max(l.abs()))
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V · diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.source_dim();
        let v = &self.eigenvectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    /// Frobenius norm of `Vᵀ V − I`.
    pub fn orthogonality_residual(&self) -> f64 {
        let v = &self.eigenvectors;
        let vtv = v.transpose().matmul(v).expect("square");
        vtv.sub(&Matrix::identity(self.source_dim()))
            .expect("square")
            .frobenius_norm()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input must be square, finite and symmetric to within
/// [`SYMMETRY_REL`] relative to its largest entry; it is symmetrized before
/// the reduction. Identical input always produces bit-identical output.
pub fn symmetric_eig(a: &Matrix) -> Result<SpectralDecomposition> {
    a.require_square()?;
    a.check_finite()?;
    let allowed = SYMMETRY_REL * a.max_abs();
    let asymmetry = a.asymmetry();
    if asymmetry > allowed {
        return Err(Error::NonSymmetric { asymmetry, allowed });
    }
    let a = a.symmetrize()?;
    let n = a.rows();

    let (active, inactive): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| a.row(i).iter().any(|&x| x != 0.0));

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);
    if !active.is_empty() {
        let sub = a.select(&active, &active);
        let (d, v) = tridiagonal_ql(&sub)?;
        for (k, &lambda) in d.iter().enumerate() {
            let mut vec_full = vec![0.0; n];
            for (r, &i) in active.iter().enumerate() {
                vec_full[i] = v[(r, k)];
            }
            pairs.push((lambda, vec_full));
        }
    }
    for &i in &inactive {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        pairs.push((0.0, e));
    }

    // Stable: equal eigenvalues keep their production order.
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Matrix::zeros(n, n);
    for (j, (lambda, mut v)) in pairs.into_iter().enumerate() {
        fix_sign(&mut v);
        eigenvalues.push(lambda);
        eigenvectors.set_column(j, &v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Returns the (unsorted) eigenvalues and the matrix of eigenvectors.
fn tridiagonal_ql(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;
    Ok((d, v))
}

fn tred2(n: usize, v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(n: usize, v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so m < n here.

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
