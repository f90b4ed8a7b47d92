//! The four commands. Each reads its inputs completely before computing and
//! returns a [`Report`]; matrices are written only after the computation
//! succeeded.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use optfilter_core::checks::{example_sample_checks, example_suite, solution_checks, verify_triple};
use optfilter_core::example::{build_triple, realize, sample_outcome, OutcomeRng};
use optfilter_core::filter::{observation_truncation_error, solve};
use optfilter_core::{pinv, CovarianceTriple, Matrix, RankPolicy, SampleSet};

use crate::csv_io::{read_matrix, write_matrix, write_text};
use crate::error::CliError;
use crate::report::{Dims, Report, Timing, TrialEntry, TruncationEntry};

/// Seed used by `example` when none is given.
pub const DEFAULT_SEED: u64 = 42;
/// Seeded trials run by `example` when `--trials` is not given.
pub const DEFAULT_TRIALS: usize = 10;
/// Estimand coefficients of the worked example when `--n-trunc` is not given.
pub const DEFAULT_N_EST: usize = 8;

fn policy(tol: Option<f64>) -> Result<RankPolicy, CliError> {
    match tol {
        None => Ok(RankPolicy::Relative),
        Some(t) if t.is_finite() && t >= 0.0 => Ok(RankPolicy::Absolute(t)),
        Some(t) => Err(CliError::Usage(format!(
            "--tol must be a finite non-negative number, got {t}"
        ))),
    }
}

fn finish(mut report: Report, start: Instant) -> Report {
    report.timing = Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    report
}

fn write_report(path: Option<&Path>, report: &Report) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, &(report.to_json() + "\n")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Observation samples, m × k (one realization per column).
    #[arg(long)]
    pub f_samples: PathBuf,
    /// Estimand samples, n × k.
    #[arg(long)]
    pub g_samples: PathBuf,
    /// Where to write the fitted filter (n × m CSV).
    #[arg(long)]
    pub out: PathBuf,
    /// Absolute eigenvalue cutoff for the pseudo-inverse (default: relative).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report the observation error of keeping 0..=N leading eigen-directions.
    #[arg(long)]
    pub n_trunc: Option<usize>,
    /// The samples come from the worked example: also check zero error and
    /// the closed-form filter.
    #[arg(long)]
    pub example_check: bool,
}

pub fn estimate(args: &EstimateArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = Report::new("estimate");
    report.arg("f_samples", args.f_samples.display());
    report.arg("g_samples", args.g_samples.display());
    report.arg("out", args.out.display());
    if let Some(t) = args.tol {
        report.arg("tol", t);
    }
    if let Some(n) = args.n_trunc {
        report.arg("n_trunc", n);
    }
    let policy = policy(args.tol)?;

    let f = read_matrix(&args.f_samples)?;
    let g = read_matrix(&args.g_samples)?;
    if f.cols() != g.cols() {
        return Err(CliError::Dimension {
            op: "estimate: f-samples and g-samples must have the same number of columns",
            left: f.shape(),
            right: g.shape(),
        });
    }
    let samples = SampleSet::new(f, g)?;
    let triple = CovarianceTriple::from_samples(&samples)?;
    let solution = solve(&triple, policy)?;

    report.filter = Some(Dims {
        rows: solution.x.rows(),
        cols: solution.x.cols(),
    });
    report.retained_rank = Some(solution.retained_rank);
    report.tolerance_used = Some(solution.tolerance_used);
    report.expected_error = Some(solution.expected_error);
    report.add_checks(&solution_checks(&triple, &solution, policy)?);

    if args.example_check {
        let checks = example_sample_checks(&samples, &solution)?;
        report.example_consistent = Some(checks.iter().all(|c| c.pass));
        report.add_checks(&checks);
    }
    if let Some(n) = args.n_trunc {
        let basis = pinv(triple.e_ff(), policy)?;
        let top = n.min(basis.retained_rank());
        report.truncation = (0..=top)
            .map(|n| TruncationEntry {
                n,
                observation_error: observation_truncation_error(&basis, n),
            })
            .collect();
    }

    write_matrix(&args.out, &solution.x)?;
    Ok(finish(report, start))
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    /// Filter matrix, n × m.
    #[arg(long)]
    pub filter: PathBuf,
    /// Observations, m × t (one per column).
    #[arg(long)]
    pub obs: PathBuf,
    /// Where to write the estimates (n × t CSV).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn apply(args: &ApplyArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = Report::new("apply");
    report.arg("filter", args.filter.display());
    report.arg("obs", args.obs.display());
    report.arg("out", args.out.display());

    let x = read_matrix(&args.filter)?;
    let obs = read_matrix(&args.obs)?;
    if x.cols() != obs.rows() {
        return Err(CliError::Dimension {
            op: "apply: filter columns must match observation rows",
            left: x.shape(),
            right: obs.shape(),
        });
    }
    let estimates = x.matmul(&obs)?;
    report.filter = Some(Dims {
        rows: x.rows(),
        cols: x.cols(),
    });
    write_matrix(&args.out, &estimates)?;
    Ok(finish(report, start))
}

#[derive(Debug, Clone, Args)]
pub struct ExampleArgs {
    /// Estimand coefficients n; the observable keeps 2n.
    #[arg(long, default_value_t = DEFAULT_N_EST)]
    pub n_trunc: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Seeded trials; 0 runs the structural checks only.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Absolute eigenvalue cutoff for the pseudo-inverse (default: relative).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write e_ff.csv, e_gf.csv, e_gg.csv and filter.csv into this directory.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// With --dump: also write this many seeded realizations as
    /// f_samples.csv and g_samples.csv.
    #[arg(long, requires = "dump")]
    pub samples: Option<usize>,
}

pub fn example(args: &ExampleArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = Report::new("example");
    report.arg("n_trunc", args.n_trunc);
    report.arg("seed", args.seed);
    report.arg("trials", args.trials);
    if let Some(t) = args.tol {
        report.arg("tol", t);
    }
    if args.n_trunc == 0 {
        return Err(CliError::Usage("--n-trunc must be at least 1".into()));
    }
    let policy = policy(args.tol)?;

    let suite = example_suite(args.n_trunc, args.seed, args.trials, policy)?;
    report.filter = Some(Dims {
        rows: suite.solution.x.rows(),
        cols: suite.solution.x.cols(),
    });
    report.retained_rank = Some(suite.solution.retained_rank);
    report.tolerance_used = Some(suite.solution.tolerance_used);
    report.expected_error = Some(suite.solution.expected_error);
    report.add_checks(&suite.checks);
    report.trials = suite.trials.iter().map(TrialEntry::from).collect();

    if let Some(dir) = &args.dump {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let triple = build_triple(&suite.model);
        write_matrix(&dir.join("e_ff.csv"), triple.e_ff())?;
        write_matrix(&dir.join("e_gf.csv"), triple.e_gf())?;
        write_matrix(&dir.join("e_gg.csv"), triple.e_gg())?;
        write_matrix(&dir.join("filter.csv"), &suite.solution.x)?;
        if let Some(k) = args.samples {
            // Stream 1 keeps the dump independent of the seeded trials.
            let mut rng = OutcomeRng::with_stream(args.seed, 1);
            let mut f = Matrix::zeros(suite.model.n_obs(), k);
            let mut g = Matrix::zeros(suite.model.n_est(), k);
            for j in 0..k {
                let (fj, gj) = realize(&suite.model, &sample_outcome(&suite.model, &mut rng))?;
                f.set_column(j, &fj);
                g.set_column(j, &gj);
            }
            write_matrix(&dir.join("f_samples.csv"), &f)?;
            write_matrix(&dir.join("g_samples.csv"), &g)?;
        }
    }

    let report = finish(report, start);
    write_report(args.out.as_deref(), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Auto-covariance of the observable, m × m.
    #[arg(long, requires_all = ["e_gf", "e_gg"], conflicts_with_all = ["f_samples", "g_samples"])]
    pub e_ff: Option<PathBuf>,
    /// Cross-covariance, n × m.
    #[arg(long)]
    pub e_gf: Option<PathBuf>,
    /// Auto-covariance of the estimand, n × n.
    #[arg(long)]
    pub e_gg: Option<PathBuf>,
    /// Build the triple from samples instead (m × k).
    #[arg(long, requires = "g_samples")]
    pub f_samples: Option<PathBuf>,
    /// Estimand samples paired with --f-samples (n × k).
    #[arg(long)]
    pub g_samples: Option<PathBuf>,
    /// Orthogonal projection (m × m) for the partitioned-solve checks.
    #[arg(long)]
    pub projection: Option<PathBuf>,
    /// Absolute eigenvalue cutoff for the pseudo-inverse (default: relative).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_triple(args: &VerifyArgs, report: &mut Report) -> Result<CovarianceTriple, CliError> {
    match (&args.e_ff, &args.e_gf, &args.e_gg, &args.f_samples, &args.g_samples) {
        (Some(ff), Some(gf), Some(gg), None, None) => {
            report.arg("e_ff", ff.display());
            report.arg("e_gf", gf.display());
            report.arg("e_gg", gg.display());
            let (ff, gf, gg) = (read_matrix(ff)?, read_matrix(gf)?, read_matrix(gg)?);
            Ok(CovarianceTriple::new(ff, gf, gg)?)
        }
        (None, None, None, Some(fs), Some(gs)) => {
            report.arg("f_samples", fs.display());
            report.arg("g_samples", gs.display());
            let (f, g) = (read_matrix(fs)?, read_matrix(gs)?);
            Ok(CovarianceTriple::from_samples(&SampleSet::new(f, g)?)?)
        }
        _ => Err(CliError::Usage(
            "verify needs either --e-ff, --e-gf and --e-gg, or --f-samples and --g-samples".into(),
        )),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = Report::new("verify");
    let triple = load_triple(args, &mut report)?;
    if let Some(p) = &args.projection {
        report.arg("projection", p.display());
    }
    if let Some(t) = args.tol {
        report.arg("tol", t);
    }
    let policy = policy(args.tol)?;
    let projection = args.projection.as_deref().map(read_matrix).transpose()?;

    let checks = verify_triple(&triple, policy, projection.as_ref())?;
    report.retained_rank = Some(checks.retained_rank);
    report.tolerance_used = Some(checks.tolerance_used);
    report.add_checks(&checks.checks);

    let report = finish(report, start);
    write_report(args.out.as_deref(), &report)?;
    Ok(report)
}
