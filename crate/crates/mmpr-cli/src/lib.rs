//! Command-line plumbing for the mmpr library: argument parsing, CSV
//! ingestion, dispatch to fits, paths, simulations, inclusion studies,
//! diagnostics, and penalty surfaces, and machine-readable output in CSV or
//! JSON.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod ingest;
mod report;

pub use ingest::{ingest_csv, IngestReport};
pub use report::{
    FitReport, FitRow, InclusionReport, MetricRow, PathRow, SimulateReport, SurfaceRow,
};

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmpr::{
    destandardize, diversity_report, fit_path, inclusion_study, lambda_max, lasso_cv_lambda,
    log_spaced_grid, max_pairwise_similarity, penalty_surface, preset_case, preset_case_spec,
    sample, solve, sse_surface, standardize, tune_omega, BlockStructure, CoefficientSet,
    ContourGrid, LambdaRule, PathSpec, PenaltyConfig, Power, SimCase, SolveControls,
    StandardizedDesign,
};

/// Command failures, partitioned by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Inconsistent or out-of-domain arguments (exit 1).
    Usage(String),
    /// Unreadable, unparsable, or unusable input data (exit 2).
    Data(String),
    /// Numerical failure such as an infeasible correlation matrix (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mmpr::Error> for CliError {
    fn from(e: mmpr::Error) -> Self {
        match e {
            mmpr::Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            mmpr::Error::NotPositiveDefinite => CliError::Numerical(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mmpr",
    version,
    about = "Fit sets of deliberately dissimilar penalized linear models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit M models at one (lambda, omega) point.
    Fit(FitArgs),
    /// Trace a full regularization path with omega tuned at each lambda.
    Path(PathArgs),
    /// Draw a block-correlated synthetic dataset.
    Simulate(SimulateArgs),
    /// Tabulate covariate inclusion proportions over simulated replicates.
    InclusionStudy(InclusionArgs),
    /// Report similarity and fit diagnostics for one fitted model set.
    Metrics(MetricsArgs),
    /// Emit the conditional penalty surface (optionally with an SSE overlay).
    PenaltySurface(SurfaceArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Response column name.
    #[arg(long, default_value = "y")]
    response: String,
    /// Treat empty cells as zero instead of failing.
    #[arg(long)]
    fill_missing_zero: bool,
}

impl InputArgs {
    fn load(&self) -> Result<IngestReport, CliError> {
        let report = ingest_csv(&self.input, &self.response, self.fill_missing_zero)?;
        if report.filled > 0 {
            eprintln!("note: filled {} empty cells with 0", report.filled);
        }
        Ok(report)
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Number of models fitted jointly.
    #[arg(long, default_value_t = 3)]
    models: usize,
    /// Sparsity penalty power (1 = absolute, 2 = squared).
    #[arg(long, default_value_t = 1)]
    c: u8,
    /// Similarity penalty power (1 = absolute, 2 = squared).
    #[arg(long, default_value_t = 1)]
    d: u8,
}

impl ModelArgs {
    fn powers(&self) -> Result<(Power, Power), CliError> {
        Ok((Power::from_int(self.c)?, Power::from_int(self.d)?))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Flags shared by every command that produces one fitted model set.
#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Fixed sparsity weight.
    #[arg(long, conflicts_with = "cv_lambda")]
    lambda: Option<f64>,
    /// Choose lambda by cross-validating the single-model absolute-penalty
    /// fit.
    #[arg(long)]
    cv_lambda: bool,
    /// Fold count for --cv-lambda.
    #[arg(long, default_value_t = 10)]
    cv_folds: usize,
    /// Fixed similarity weight; when omitted, omega is tuned until pairwise
    /// model similarity drops to --rho-thresh.
    #[arg(long, conflicts_with = "rho_thresh")]
    omega: Option<f64>,
    /// Ceiling on pairwise model similarity for the omega search.
    #[arg(long, default_value_t = 0.3)]
    rho_thresh: f64,
    /// Seed for cross-validation fold assignment.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Number of lambda grid points.
    #[arg(long, default_value_t = 50)]
    grid_points: usize,
    /// Smallest grid lambda as a fraction of the largest.
    #[arg(long, default_value_t = 1e-3)]
    grid_ratio: f64,
    /// Ceiling on pairwise model similarity for the omega search.
    #[arg(long, default_value_t = 0.3)]
    rho_thresh: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StructureArg {
    /// Compound symmetry: every off-diagonal entry is rho.
    Cs,
    /// First-order autoregressive decay: entry (i, j) is rho^|i-j|.
    Ar1,
    /// Uncorrelated covariates.
    Identity,
}

impl From<StructureArg> for BlockStructure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Cs => BlockStructure::CompoundSymmetric,
            StructureArg::Ar1 => BlockStructure::Ar1,
            StructureArg::Identity => BlockStructure::Identity,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Catalog scenario 1..7 (six covariates, signal on the first three).
    #[arg(
        long,
        conflicts_with_all = ["rho", "blocks", "block_size", "structure", "n", "beta0", "sigma2"]
    )]
    case: Option<u8>,
    /// Custom scenario: block correlation level.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Custom scenario: number of correlated blocks.
    #[arg(long, default_value_t = 1)]
    blocks: usize,
    /// Custom scenario: covariates per block.
    #[arg(long, default_value_t = 6)]
    block_size: usize,
    /// Custom scenario: correlation pattern within each block.
    #[arg(long, value_enum, default_value_t = StructureArg::Cs)]
    structure: StructureArg,
    /// Custom scenario: sample size.
    #[arg(long, default_value_t = 80)]
    n: usize,
    /// Custom scenario: comma-separated signal coefficients, one per
    /// covariate. Defaults to 1,1,1,0,0,0 when the dimension is 6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta0: Option<Vec<f64>>,
    /// Custom scenario: noise variance.
    #[arg(long, default_value_t = 9.0)]
    sigma2: f64,
    /// RNG seed for the draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InclusionArgs {
    /// Catalog scenario 1..7.
    #[arg(long)]
    case: u8,
    /// Number of replicate datasets.
    #[arg(long, default_value_t = 16)]
    replicates: usize,
    #[command(flatten)]
    model: ModelArgs,
    /// One fixed lambda for every replicate instead of cross-validation.
    #[arg(long, conflicts_with = "cv_folds")]
    lambda: Option<f64>,
    /// Use k-fold cross-validation per replicate instead of the default
    /// leave-one-out rule.
    #[arg(long)]
    cv_folds: Option<usize>,
    /// Ceiling on pairwise model similarity for the omega search.
    #[arg(long, default_value_t = 0.3)]
    rho_thresh: f64,
    /// Base seed; replicate r draws its data with seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    }
    let first = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {:?}", parts[0]))?;
    let second = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {:?}", parts[1]))?;
    Ok((first, second))
}

#[derive(Args)]
struct SurfaceArgs {
    /// Fixed first-model coefficients as "b11,b12".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    beta1: (f64, f64),
    /// Sparsity penalty power (1 = absolute, 2 = squared).
    #[arg(long, default_value_t = 1)]
    c: u8,
    /// Similarity penalty power (1 = absolute, 2 = squared).
    #[arg(long, default_value_t = 1)]
    d: u8,
    /// Sparsity weight.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Similarity weight.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Grid covers [-half-width, half-width] on both axes.
    #[arg(long, default_value_t = 2.0)]
    half_width: f64,
    /// Cells per axis.
    #[arg(long, default_value_t = 201)]
    resolution: usize,
    /// Optional two-covariate dataset for a squared-error overlay.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Response column of --input.
    #[arg(long, default_value = "y")]
    response: String,
    /// Treat empty cells of --input as zero.
    #[arg(long)]
    fill_missing_zero: bool,
    #[command(flatten)]
    output: OutputArgs,
}

/// Parse and run a full command line, returning the process exit code.
/// Usage problems print clap's message; run failures print one structured
/// line to stderr.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fit(args) => run_fit(args),
        Command::Path(args) => run_path(args),
        Command::Simulate(args) => run_simulate(args),
        Command::InclusionStudy(args) => run_inclusion(args),
        Command::Metrics(args) => run_metrics(args),
        Command::PenaltySurface(args) => run_surface(args),
    }
}

struct ResolvedFit {
    design: StandardizedDesign,
    names: Vec<String>,
    lambda: f64,
    omega: f64,
    max_similarity: f64,
    converged: bool,
    coef: CoefficientSet,
}

fn resolve_fit(args: &SolveArgs) -> Result<ResolvedFit, CliError> {
    if args.lambda.is_none() && !args.cv_lambda {
        return Err(CliError::Usage(
            "provide --lambda or --cv-lambda to pick the sparsity weight".into(),
        ));
    }
    let (c, d) = args.model.powers()?;
    let loaded = args.input.load()?;
    let names = loaded.dataset.names().to_vec();
    let design = standardize(&loaded.dataset)?;
    let lambda = match args.lambda {
        Some(v) => v,
        None => lasso_cv_lambda(&design, args.cv_folds, args.seed)?,
    };
    match args.omega {
        Some(omega) => {
            let cfg = PenaltyConfig::new(args.model.models, c, d, lambda, omega)?;
            let result = solve(&design, &cfg, &SolveControls::from_config(&cfg))?;
            let max_similarity = max_pairwise_similarity(&result.coef);
            Ok(ResolvedFit {
                design,
                names,
                lambda,
                omega,
                max_similarity,
                converged: result.converged,
                coef: result.coef,
            })
        }
        None => {
            let mut spec = PathSpec::new(args.model.models, c, d, vec![lambda])?;
            spec.similarity_threshold = args.rho_thresh;
            spec.validate()?;
            let outcome = tune_omega(&design, &spec, lambda, None)?;
            if outcome.omega_capped {
                eprintln!(
                    "note: similarity ceiling {} unattainable; reporting the fit at the \
                     omega cap {}",
                    args.rho_thresh, outcome.omega
                );
            }
            Ok(ResolvedFit {
                design,
                names,
                lambda,
                omega: outcome.omega,
                max_similarity: outcome.max_similarity,
                converged: outcome.solve.converged,
                coef: outcome.solve.coef,
            })
        }
    }
}

fn run_fit(args: FitArgs) -> Result<(), CliError> {
    let fit = resolve_fit(&args.solve)?;
    let (raw, intercepts) = destandardize(&fit.coef, &fit.design)?;
    let standardized = fit.coef.coefficients();
    let raw_coefs = raw.coefficients();
    let mut rows = Vec::with_capacity(fit.coef.models() * (fit.names.len() + 1));
    for i in 0..fit.coef.models() {
        for (k, name) in fit.names.iter().enumerate() {
            rows.push(FitRow {
                model: i + 1,
                covariate: name.clone(),
                standardized: Some(standardized[[i, k]]),
                raw: raw_coefs[[i, k]],
            });
        }
        rows.push(FitRow {
            model: i + 1,
            covariate: "(intercept)".into(),
            standardized: None,
            raw: intercepts[i],
        });
    }
    let payload = FitReport {
        lambda: fit.lambda,
        omega: fit.omega,
        max_similarity: fit.max_similarity,
        converged: fit.converged,
        rows,
    };
    eprintln!(
        "fit: lambda={}, omega={}, max_similarity={:.4}, converged={}",
        payload.lambda, payload.omega, payload.max_similarity, payload.converged
    );
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_fit_csv(&mut *sink, &payload),
        Format::Json => report::write_json(&mut *sink, &payload),
    }
}

fn run_path(args: PathArgs) -> Result<(), CliError> {
    let loaded = args.input.load()?;
    let names = loaded.dataset.names().to_vec();
    let design = standardize(&loaded.dataset)?;
    let (c, d) = args.model.powers()?;
    let top = lambda_max(&design, c);
    let grid = log_spaced_grid(top, args.grid_points, args.grid_ratio)?;
    let mut spec = PathSpec::new(args.model.models, c, d, grid)?;
    spec.similarity_threshold = args.rho_thresh;
    spec.validate()?;
    let path = fit_path(&design, &spec)?;
    let mut rows = Vec::with_capacity(path.records.len() * spec.models * names.len());
    let mut capped = 0usize;
    for record in &path.records {
        capped += usize::from(record.omega_capped);
        let beta = record.coef.coefficients();
        for i in 0..spec.models {
            for (k, name) in names.iter().enumerate() {
                rows.push(PathRow {
                    lambda: record.lambda,
                    omega: record.omega,
                    model: i + 1,
                    covariate: name.clone(),
                    coefficient: beta[[i, k]],
                    sse: record.per_model_sse[i],
                    max_similarity: record.max_pairwise_similarity,
                    converged: record.converged,
                    omega_capped: record.omega_capped,
                });
            }
        }
    }
    eprintln!(
        "path: {} lambda points, {} capped",
        path.records.len(),
        capped
    );
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_path_csv(&mut *sink, &rows),
        Format::Json => report::write_json(&mut *sink, &rows),
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let sim = match (args.case, args.rho) {
        (Some(id), _) => preset_case(id, args.seed)?,
        (None, Some(rho)) => {
            let dimension = args.blocks * args.block_size;
            let beta0 = match args.beta0 {
                Some(v) => v,
                None if dimension == 6 => vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
                None => {
                    return Err(CliError::Usage(format!(
                        "--beta0 is required when blocks*block-size is {dimension}, not 6"
                    )))
                }
            };
            let case = SimCase {
                rho,
                blocks: args.blocks,
                block_size: args.block_size,
                structure: args.structure.into(),
                n: args.n,
                beta0,
                sigma2: args.sigma2,
                seed: args.seed,
            };
            case.validate()?;
            sample(&case)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "simulate needs --case or a custom scenario starting with --rho".into(),
            ))
        }
    };
    let data = &sim.dataset;
    let rows: Vec<Vec<f64>> = (0..data.n())
        .map(|l| {
            let mut row: Vec<f64> = data.x().row(l).to_vec();
            row.push(data.y()[l]);
            row
        })
        .collect();
    let payload = SimulateReport {
        covariates: data.names().to_vec(),
        rows,
    };
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_simulate_csv(&mut *sink, &payload),
        Format::Json => report::write_json(&mut *sink, &payload),
    }
}

fn run_inclusion(args: InclusionArgs) -> Result<(), CliError> {
    let case = preset_case_spec(args.case)?;
    let (c, d) = args.model.powers()?;
    let rule = match (args.lambda, args.cv_folds) {
        (Some(v), _) => LambdaRule::Fixed(v),
        (None, Some(folds)) => LambdaRule::CvLasso { folds },
        (None, None) => LambdaRule::LooCvLasso,
    };
    // The study ignores the spec's grid; any valid one-point grid will do.
    let mut spec = PathSpec::new(args.model.models, c, d, vec![1.0])?;
    spec.similarity_threshold = args.rho_thresh;
    spec.validate()?;
    let table = inclusion_study(&case, args.replicates, args.seed, &spec, &rule)?;
    let payload = InclusionReport {
        covariates: (1..=case.dimension()).map(|k| format!("x{k}")).collect(),
        proportions: table
            .proportions
            .rows()
            .into_iter()
            .map(|row| row.to_vec())
            .collect(),
        union_proportions: table.union_proportions.clone(),
        replicates: table.replicates,
        zero_tol: table.zero_tol,
        lambdas: table.lambdas.clone(),
        omegas: table.omegas.clone(),
        capped_replicates: table.capped_replicates,
        nonconverged_replicates: table.nonconverged_replicates,
    };
    eprintln!(
        "inclusion-study: {} replicates, {} capped, {} not converged",
        payload.replicates, payload.capped_replicates, payload.nonconverged_replicates
    );
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_inclusion_csv(&mut *sink, &payload),
        Format::Json => report::write_json(&mut *sink, &payload),
    }
}

fn run_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let fit = resolve_fit(&args.solve)?;
    let diag = diversity_report(&fit.design, &fit.coef)?;
    let m = fit.coef.models();
    let mut rows = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            rows.push(MetricRow {
                metric: "coef_similarity".into(),
                model_i: i + 1,
                model_j: Some(j + 1),
                value: diag.coef_similarity[[i, j]],
            });
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            rows.push(MetricRow {
                metric: "pred_correlation".into(),
                model_i: i + 1,
                model_j: Some(j + 1),
                value: diag.pred_correlation[[i, j]],
            });
        }
    }
    for i in 0..m {
        rows.push(MetricRow {
            metric: "sse".into(),
            model_i: i + 1,
            model_j: None,
            value: diag.per_model_sse[i],
        });
        rows.push(MetricRow {
            metric: "mse".into(),
            model_i: i + 1,
            model_j: None,
            value: diag.per_model_mse[i],
        });
    }
    eprintln!(
        "metrics: lambda={}, omega={}, max_similarity={:.4}",
        fit.lambda, fit.omega, fit.max_similarity
    );
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_metrics_csv(&mut *sink, &rows),
        Format::Json => report::write_json(&mut *sink, &rows),
    }
}

fn run_surface(args: SurfaceArgs) -> Result<(), CliError> {
    let (c, d) = (Power::from_int(args.c)?, Power::from_int(args.d)?);
    let penalty = penalty_surface(
        [args.beta1.0, args.beta1.1],
        c,
        d,
        args.lambda,
        args.omega,
        args.half_width,
        args.resolution,
    )?;
    let grid = match &args.input {
        Some(path) => {
            let loaded = ingest_csv(path, &args.response, args.fill_missing_zero)?;
            if loaded.filled > 0 {
                eprintln!("note: filled {} empty cells with 0", loaded.filled);
            }
            let design = standardize(&loaded.dataset)?;
            let sse = sse_surface(&design, args.half_width, args.resolution)?;
            ContourGrid::merge(penalty, sse)?
        }
        None => penalty,
    };
    let penalty_cells = grid
        .penalty
        .as_ref()
        .expect("penalty surface is always computed");
    let mut rows = Vec::with_capacity(grid.b1.len() * grid.b2.len());
    for (i, &b21) in grid.b1.iter().enumerate() {
        for (j, &b22) in grid.b2.iter().enumerate() {
            rows.push(SurfaceRow {
                beta21: b21,
                beta22: b22,
                penalty: penalty_cells[[i, j]],
                sse: grid.sse.as_ref().map(|s| s[[i, j]]),
            });
        }
    }
    let mut sink = report::open_sink(&args.output.out)?;
    match args.output.format {
        Format::Csv => report::write_surface_csv(&mut *sink, &rows),
        Format::Json => report::write_json(&mut *sink, &rows),
    }
}
