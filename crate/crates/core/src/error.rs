use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max asymmetry {asymmetry:e} exceeds {allowed:e}")]
    NonSymmetric { asymmetry: f64, allowed: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {op}: {left:?} against {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("eigenvalue {value:e} is below -{limit:e}; matrix is not positive semi-definite")]
    NegativeEigenvalueBeyondTolerance { value: f64, limit: f64 },

    #[error("symmetric QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },

    #[error("entry ({row}, {col}) lies outside the odd-index band pattern")]
    SparsityViolation { row: usize, col: usize },

    #[error("pivot {pivot:e} at index {index} is degenerate")]
    DegeneratePivot { index: usize, pivot: f64 },

    #[error("sequence entry {index} is not positive")]
    NonPositive { index: usize },

    #[error("sequence increases at entry {index}")]
    Increasing { index: usize },

    #[error("sample set has no realizations")]
    EmptySampleSet,

    #[error(
        "covariance triple is not realizable: normal-equation residual {normal_residual:e}, \
         null-space leakage {leakage:e}"
    )]
    InconsistentTriple { normal_residual: f64, leakage: f64 },

    #[error("expected error {value:e} is negative beyond the rounding band {band:e}")]
    NegativeErrorBeyondTolerance { value: f64, band: f64 },

    #[error("requested {requested} eigen-directions but only {rank} are retained")]
    RankExceeded { requested: usize, rank: usize },

    #[error("matrix is not an orthogonal projection (residual {residual:e})")]
    NotAProjection { residual: f64 },

    #[error("outcome has {got} coordinates, {needed} are needed")]
    InsufficientOmega { needed: usize, got: usize },
}
