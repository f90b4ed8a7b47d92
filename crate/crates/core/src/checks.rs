//! Named pass/fail checks with their residuals and thresholds, grouped the
//! way a caller runs them: on a user-supplied triple, on a fitted filter, and
//! on the worked example.

use alloc::string::String;
use alloc::vec::Vec;

use crate::covariance::{consistency_identity, null_space_containment, CovarianceTriple, PsdReport, SampleSet};
use crate::error::Result;
use crate::example::{
    build_triple, closed_form_pivot, ff_trace, filter_block_deviation, run_trials, sample_outcome, ExampleModel,
    Outcome, OutcomeRng, TrialReport, Truncation,
};
use crate::filter::{expected_error_of, partitioned_solve, residual_moments, solve, FilterSolution};
use crate::ldl::ldl_reduce;
use crate::matrix::Matrix;
use crate::pinv::{mp_property_check, pinv, RankPolicy};
use crate::tolerances::{
    CROSS_TERM_FLOOR, ERROR_BAND, FILTER_BLOCK, LDL_DIAGONAL, MOORE_PENROSE, NULL_CONTAINMENT, PARTITION_IDENTITY,
    REFERENCE_TRIAL, SAMPLED_FILTER_BLOCK, SEEDED_TRIAL, TRACE_LAW, UNCORRELATED, ZERO_ERROR,
};

/// Odd coordinates summed for the trace check.
pub const TRACE_LAW_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    /// `residual ≤ threshold`; false for NaN.
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }

    /// Passes when `value ≥ floor` (with `floor ≤ 0`); the residual is the
    /// amount by which `value` falls below zero.
    pub fn at_least(name: impl Into<String>, value: f64, floor: f64) -> Self {
        Self::new(name, (-value).max(0.0), -floor)
    }

    fn psd(name: &str, r: PsdReport) -> Self {
        Self::at_least(name, r.min_eigenvalue, r.floor)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Structural checks on a covariance triple and, with `projection`, on the
/// partitioned solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleChecks {
    pub checks: Vec<Check>,
    pub retained_rank: usize,
    pub tolerance_used: f64,
}

pub fn verify_triple(
    triple: &CovarianceTriple,
    policy: RankPolicy,
    projection: Option<&Matrix>,
) -> Result<TripleChecks> {
    let mut checks = Vec::new();
    let [ff, gg, joint] = triple.psd_reports()?;
    checks.push(Check::psd("psd_e_ff", ff));
    checks.push(Check::psd("psd_e_gg", gg));
    checks.push(Check::psd("psd_joint", joint));

    let p = pinv(triple.e_ff(), policy)?;
    let mp_limit = MOORE_PENROSE * p.source().lambda_max().max(1.0);
    // `D A D = D` is an identity in units of `D`; its rounding grows with ‖D‖.
    let dad_limit = mp_limit * p.dagger().frobenius_norm().max(1.0);
    for (name, r) in mp_property_check(triple.e_ff(), p.dagger())?.as_array() {
        let limit = if name == "dad" { dad_limit } else { mp_limit };
        checks.push(Check::new(alloc::format!("mp_{name}"), r, limit));
    }

    let containment = null_space_containment(triple, policy)?;
    checks.push(Check::new(
        "null_containment",
        containment.leakage,
        containment.threshold,
    ));
    let gf_scale = triple.e_gf().frobenius_norm().max(1.0);
    checks.push(Check::new(
        "consistency_identity",
        consistency_identity(triple, p.dagger())?,
        NULL_CONTAINMENT * gf_scale,
    ));

    let x = triple.e_gf().matmul(p.dagger())?;
    let error = expected_error_of(&x, triple)?;
    checks.push(Check::at_least(
        "expected_error_nonnegative",
        error,
        -ERROR_BAND * triple.e_gg().trace()?,
    ));

    if let Some(proj) = projection {
        let s = partitioned_solve(triple, proj, policy)?;
        checks.push(Check::new(
            "partition_identity",
            s.identity_residual(),
            PARTITION_IDENTITY * s.restricted_error.max(1.0),
        ));
        checks.push(Check::new("uncorrelated_e_pr", s.e_pr_norm, UNCORRELATED));
        checks.push(Check::at_least(
            "cross_term_nonnegative",
            s.cross_term,
            CROSS_TERM_FLOOR,
        ));
    }

    Ok(TripleChecks {
        checks,
        retained_rank: p.retained_rank(),
        tolerance_used: p.tolerance(),
    })
}

/// Checks on a fitted filter.
pub fn solution_checks(triple: &CovarianceTriple, solution: &FilterSolution, policy: RankPolicy) -> Result<Vec<Check>> {
    let [ff, gg, joint] = triple.psd_reports()?;
    let containment = null_space_containment(triple, policy)?;
    Ok(alloc::vec![
        Check::psd("psd_e_ff", ff),
        Check::psd("psd_e_gg", gg),
        Check::psd("psd_joint", joint),
        Check::new("normal_equation", solution.normal_residual, solution.normal_threshold),
        Check::new("null_containment", containment.leakage, containment.threshold),
    ])
}

/// For samples drawn from the worked example: the fitted filter should have
/// zero expected error (within three standard errors of the per-sample
/// squared residual) and equal the closed form.
pub fn example_sample_checks(samples: &SampleSet, solution: &FilterSolution) -> Result<Vec<Check>> {
    let moments = residual_moments(&solution.x, samples)?;
    Ok(alloc::vec![
        Check::new(
            "example_zero_error",
            solution.expected_error,
            3.0 * moments.std_err() + ZERO_ERROR,
        ),
        Check::new(
            "example_filter_block",
            filter_block_deviation(&solution.x),
            SAMPLED_FILTER_BLOCK
        ),
    ])
}

/// Reproduction of the worked example.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSuite {
    pub model: ExampleModel,
    pub solution: FilterSolution,
    pub checks: Vec<Check>,
    pub trials: Vec<TrialReport>,
}

/// Runs the structural checks (trace law, pivots, filter block, zero error)
/// and, when `trials > 0`, the reference trials (if the model has at most
/// eight coefficients) followed by `trials` seeded outcomes.
pub fn example_suite(n_est: usize, seed: u64, trials: usize, policy: RankPolicy) -> Result<ExampleSuite> {
    let model = ExampleModel::new(n_est);
    let triple = build_triple(&model);
    let solution = solve(&triple, policy)?;
    let mut checks = Vec::new();

    let target = core::f64::consts::PI * core::f64::consts::PI / 12.0;
    checks.push(Check::new(
        "trace_law",
        (ff_trace(TRACE_LAW_TERMS, Truncation::Leading) - target).abs(),
        TRACE_LAW,
    ));

    let leading = build_triple(&ExampleModel::new(5).with_truncation(Truncation::Leading));
    let pivots = ldl_reduce(leading.e_ff())?;
    let pivot_gap = pivots
        .diag()
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (k, d)| m.max((d - closed_form_pivot(k + 1)).abs()));
    checks.push(Check::new("ldl_diagonal", pivot_gap, LDL_DIAGONAL));

    checks.push(Check::new(
        "filter_block",
        filter_block_deviation(&solution.x),
        FILTER_BLOCK,
    ));
    checks.push(Check::new("zero_error", solution.expected_error, ZERO_ERROR));

    let mut reports = Vec::new();
    if trials > 0 {
        if n_est <= 8 {
            let reference = run_trials(&model, &Outcome::reference_trials())?;
            let worst = reference.iter().fold(0.0f64, |m, r| m.max(r.max_abs_err));
            checks.push(Check::new("reference_trials", worst, REFERENCE_TRIAL));
            reports.extend(reference);
        }
        let mut rng = OutcomeRng::new(seed);
        let outcomes: Vec<_> = (0..trials).map(|_| sample_outcome(&model, &mut rng)).collect();
        let seeded = run_trials(&model, &outcomes)?;
        let worst = seeded.iter().fold(0.0f64, |m, r| m.max(r.max_abs_err));
        checks.push(Check::new("seeded_trials", worst, SEEDED_TRIAL));
        reports.extend(seeded);
    }

    Ok(ExampleSuite {
        model,
        solution,
        checks,
        trials: reports,
    })
}
