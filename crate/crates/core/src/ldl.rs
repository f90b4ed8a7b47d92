//! Outer-product reduction of odd-index pentadiagonal PSD matrices.
//!
//! The matrices handled here couple only odd (1-based) positions, and only
//! neighbouring ones: nonzeros sit at `(2k−1, 2k−1)` and `(2k−1, 2k+1)`.
//! Such a matrix is a sum of rank-one terms `c_k c_kᵀ` with
//! `c_k = c_{kk} e_{2k−1} + c_{k+1,k} e_{2k+1}`, and the coefficients follow
//!
//! ```text
//! c²_{11}     = a_{11}
//! c_{k+1,k}   = a_{2k+1,2k−1} / c_{kk}
//! c²_{k+1,k+1} = a_{2k+1,2k+1} − a²_{2k+1,2k−1} / c²_{kk}
//! ```
//!
//! The squared diagonal `c²_{kk}` is the pivot sequence of an `LDLᵀ`
//! factorization.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tolerances::LDL_MIN_PIVOT;

#[derive(Debug, Clone, PartialEq)]
pub struct LdlReduction {
    diag: Vec<f64>,
    multipliers: Vec<f64>,
    dim: usize,
}

impl LdlReduction {
    /// `c²_{kk}` for each odd position, in order.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `c_{k+1,k}` for each coupled pair of odd positions, in order.
    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ_k c_k c_kᵀ`.
    pub fn reassemble(&self) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (k, &d) in self.diag.iter().enumerate() {
            let i = 2 * k;
            let ckk = libm::sqrt(d);
            out[(i, i)] += d;
            if let Some(&c) = self.multipliers.get(k) {
                out[(i, i + 2)] += ckk * c;
                out[(i + 2, i)] += ckk * c;
                out[(i + 2, i + 2)] += c * c;
            }
        }
        out
    }

    /// Unit lower-triangular `L` with `L · diag(D) · Lᵀ` equal to the input,
    /// where `D` carries the pivots at odd positions and zeros elsewhere.
    pub fn unit_lower_factor(&self) -> Matrix {
        let mut l = Matrix::identity(self.dim);
        for (k, &c) in self.multipliers.iter().enumerate() {
            l[(2 * k + 2, 2 * k)] = c / libm::sqrt(self.diag[k]);
        }
        l
    }

    /// Pivots spread over the full dimension (zeros at even positions).
    pub fn pivot_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.dim, self.dim);
        for (k, &p) in self.diag.iter().enumerate() {
            d[(2 * k, 2 * k)] = p;
        }
        d
    }
}

/// Runs the recursion over the whole (truncated) matrix.
pub fn ldl_reduce(a: &Matrix) -> Result<LdlReduction> {
    a.require_square()?;
    a.check_finite()?;
    let dim = a.rows();
    for i in 0..dim {
        for j in 0..dim {
            let in_band = i % 2 == 0 && j % 2 == 0 && i.abs_diff(j) <= 2;
            if !in_band && a[(i, j)] != 0.0 {
                return Err(Error::SparsityViolation { row: i, col: j });
            }
        }
    }
    for i in (0..dim.saturating_sub(2)).step_by(2) {
        if a[(i, i + 2)] != a[(i + 2, i)] {
            let asymmetry = (a[(i, i + 2)] - a[(i + 2, i)]).abs();
            return Err(Error::NonSymmetric {
                asymmetry,
                allowed: 0.0,
            });
        }
    }

    let positions = dim.div_ceil(2);
    let mut diag = Vec::with_capacity(positions);
    let mut multipliers = Vec::with_capacity(positions.saturating_sub(1));
    for k in 0..positions {
        let i = 2 * k;
        let pivot = if k == 0 {
            a[(0, 0)]
        } else {
            let coupling = a[(i, i - 2)];
            let prev = diag[k - 1];
            multipliers.push(coupling / libm::sqrt(prev));
            a[(i, i)] - coupling * coupling / prev
        };
        if pivot.is_nan() || pivot <= LDL_MIN_PIVOT {
            return Err(Error::DegeneratePivot { index: i, pivot });
        }
        diag.push(pivot);
    }
    Ok(LdlReduction { diag, multipliers, dim })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd_identity(dim: usize) -> Matrix {
        Matrix::from_fn(dim, dim, |i, j| if i == j && i % 2 == 0 { 1.0 } else { 0.0 })
    }

    #[test]
    fn uncoupled_unit_diagonal() {
        let r = ldl_reduce(&odd_identity(7)).unwrap();
        assert_eq!(r.diag(), &[1.0; 4]);
        assert_eq!(r.multipliers(), &[0.0; 3]);
        assert_eq!(r.reassemble(), odd_identity(7));
    }

    #[test]
    fn rejects_even_entries_and_long_couplings() {
        let mut a = odd_identity(6);
        a[(1, 1)] = 1.0;
        assert_eq!(ldl_reduce(&a), Err(Error::SparsityViolation { row: 1, col: 1 }));
        let mut a = odd_identity(6);
        a[(0, 4)] = 0.1;
        assert_eq!(ldl_reduce(&a), Err(Error::SparsityViolation { row: 0, col: 4 }));
    }

    #[test]
    fn degenerate_pivot() {
        // [[1, 1], [1, 1]] on odd positions: second pivot is exactly 0.
        let mut a = Matrix::zeros(3, 3);
        a[(0, 0)] = 1.0;
        a[(0, 2)] = 1.0;
        a[(2, 0)] = 1.0;
        a[(2, 2)] = 1.0;
        assert!(matches!(ldl_reduce(&a), Err(Error::DegeneratePivot { index: 2, .. })));
    }

    #[test]
    fn factor_form_agrees_with_outer_products() {
        let mut a = odd_identity(9);
        for k in 0..4 {
            let i = 2 * k;
            a[(i, i)] = 3.0 + k as f64;
            a[(i, i + 2)] = 0.5;
            a[(i + 2, i)] = 0.5;
        }
        let r = ldl_reduce(&a).unwrap();
        let l = r.unit_lower_factor();
        let ldlt = l.matmul(&r.pivot_matrix()).unwrap().matmul(&l.transpose()).unwrap();
        assert!(ldlt.sub(&a).unwrap().max_abs() < 1e-14);
        assert!(r.reassemble().sub(&a).unwrap().max_abs() < 1e-14);
    }
}
