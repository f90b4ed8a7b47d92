//! Fixed thresholds shared by the checks in this crate and by its callers.
//!
//! Scale-relative thresholds are multiplied by `max(1, scale)` at the call
//! site, where `scale` is named next to each constant.

/// Relative asymmetry accepted by the symmetric eigensolver (scale: max |a_ij|).
pub const SYMMETRY_REL: f64 = 1e-12;

/// Eigen-reconstruction and orthogonality (scale: λ_max).
pub const EIG_RECONSTRUCTION: f64 = 1e-10;

/// Each of the four Moore–Penrose residuals (scale: λ_max).
pub const MOORE_PENROSE: f64 = 1e-9;

/// `pinv(pinv(A)) = A` for full-rank PSD input.
pub const PINV_INVOLUTION: f64 = 1e-8;

/// Negative eigenvalues within this multiple of the rank cutoff are clamped to zero.
pub const NEGATIVE_CLAMP_FACTOR: f64 = 10.0;

/// Reassembly of the outer-product reduction.
pub const LDL_REASSEMBLY: f64 = 1e-10;

/// Smallest admissible pivot in the outer-product reduction.
pub const LDL_MIN_PIVOT: f64 = 1e-14;

/// PSD check on covariance blocks (scale: λ_max, not floored at 1).
pub const COVARIANCE_PSD: f64 = 1e-10;

/// Normal equation `X E_ff = E_gf` (scale: ‖E_gf‖_F).
pub const NORMAL_EQUATION: f64 = 1e-9;

/// Null-space containment `‖E_gf u‖` over null vectors `u` of `E_ff` (scale: ‖E_gf‖_F).
pub const NULL_CONTAINMENT: f64 = 1e-9;

/// Rounding band for a negative expected error (scale: trace(E_gg), not floored).
pub const ERROR_BAND: f64 = 1e-9;

/// `restricted = full + cross` (scale: restricted error).
pub const PARTITION_IDENTITY: f64 = 1e-8;

/// `‖E_pr‖_F` in a partitioned solve.
pub const UNCORRELATED: f64 = 1e-9;

/// Lower bound on the partition cross term.
pub const CROSS_TERM_FLOOR: f64 = -1e-10;

/// `p² = p` and `pᵀ = p` (scale: max |p_ij|).
pub const PROJECTION: f64 = 1e-12;

/// Expected error treated as zero in the worked example.
pub const ZERO_ERROR: f64 = 1e-9;

/// Partial trace of the example `E_ff` against π²/12 at 10⁶ odd coordinates.
pub const TRACE_LAW: f64 = 4e-7;

/// Pivots of the outer-product reduction against their closed forms.
pub const LDL_DIAGONAL: f64 = 1e-12;

/// Optimal filter of the example against its closed form.
pub const FILTER_BLOCK: f64 = 1e-8;

/// Same comparison for a filter fitted from samples.
pub const SAMPLED_FILTER_BLOCK: f64 = 1e-6;

/// `‖ĝ − g‖_∞` on the reference trial outcomes.
pub const REFERENCE_TRIAL: f64 = 1e-10;

/// `‖ĝ − g‖_∞` on seeded outcomes.
pub const SEEDED_TRIAL: f64 = 1e-9;
