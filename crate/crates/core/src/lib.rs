//! Optimal linear least-squares filtering of zero-mean random vectors.
//!
//! Given the second-moment model of an observable `f` and an estimand `g`
//! (the auto-covariance `E_ff`, the cross-covariance `E_gf` and `E_gg`),
//! the filter `X = E_gf · E_ff^†` minimises `E[‖X f − g‖²]`. The crate
//! provides the pieces needed to build and check that filter on finite
//! truncations:
//!
//! - [`matrix`], [`eig`], [`pinv`], [`ldl`], [`series`]: a small dense
//!   linear-algebra kernel (symmetric eigendecomposition, spectral
//!   pseudo-inverse, outer-product reduction, slow-series diagnostic).
//! - [`covariance`]: sample estimators and structural checks on covariance
//!   triples.
//! - [`filter`]: the optimal filter, its expected error, proximate
//!   observations and the partitioned (restricted) solve.
//! - [`checks`]: named pass/fail checks grouped into suites.
//! - [`example`]: the Fourier-coefficient input-retrieval model with
//!   closed-form covariances, a seeded outcome generator and a trial
//!   harness.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod checks;
pub mod covariance;
pub mod eig;
mod error;
pub mod example;
pub mod filter;
pub mod ldl;
pub mod matrix;
pub mod pinv;
pub mod series;
pub mod stats;
pub mod tolerances;

pub use covariance::{CovarianceTriple, SampleSet};
pub use eig::{symmetric_eig, SpectralDecomposition};
pub use error::{Error, Result};
pub use filter::{FilterSolution, PartitionedSolution};
pub use ldl::{ldl_reduce, LdlReduction};
pub use matrix::Matrix;
pub use pinv::{mp_property_check, pinv, MpResiduals, PseudoInverse, RankPolicy};
pub use series::{slow_series, SlowSeries};
