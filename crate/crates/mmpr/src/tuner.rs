//! Regularization-path machinery: lambda grid construction, the
//! similarity-constrained omega search, and warm-started path assembly.

use ndarray::Axis;

use crate::data::{model_sse, CoefficientSet, PenaltyConfig, Power, StandardizedDesign};
use crate::error::{Error, Result};
use crate::metrics::max_pairwise_similarity;
use crate::solver::{solve, SolveControls, SolveResult, StartPolicy};

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.3;
pub const DEFAULT_OMEGA_MAX: f64 = 1e6;
pub const DEFAULT_OMEGA_TOL: f64 = 1e-2;
pub const DEFAULT_GRID_POINTS: usize = 50;
/// Smallest grid lambda as a fraction of the largest.
pub const DEFAULT_GRID_RATIO: f64 = 1e-3;
/// First omega probed after 0; also the scale floor that keeps the
/// bisection's relative stopping rule meaningful when the lower bracket end
/// is 0 itself.
const OMEGA_SEARCH_ORIGIN: f64 = 1e-4;

/// Everything needed to trace one regularization path: penalty powers,
/// model count, the lambda grid, the similarity ceiling the omega search
/// enforces, and search/convergence tolerances.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub models: usize,
    pub sparsity_power: Power,
    pub similarity_power: Power,
    /// Strictly descending, all positive.
    pub lambda_grid: Vec<f64>,
    /// Ceiling on the maximum pairwise cosine similarity of absolute
    /// coefficient vectors, in [0, 1].
    pub similarity_threshold: f64,
    pub omega_max: f64,
    /// Relative bracket width at which the omega bisection stops.
    pub omega_tol: f64,
    pub eps: f64,
    pub max_sweeps: usize,
}

impl PathSpec {
    pub fn new(
        models: usize,
        sparsity_power: Power,
        similarity_power: Power,
        lambda_grid: Vec<f64>,
    ) -> Result<Self> {
        let spec = Self {
            models,
            sparsity_power,
            similarity_power,
            lambda_grid,
            similarity_threshold: DEFAULT_SIMILARITY_THRESHOLD,
            omega_max: DEFAULT_OMEGA_MAX,
            omega_tol: DEFAULT_OMEGA_TOL,
            eps: 1e-6,
            max_sweeps: 10_000,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A spec with the default log-spaced grid anchored at the design's
    /// largest useful lambda.
    pub fn for_design(
        design: &StandardizedDesign,
        models: usize,
        sparsity_power: Power,
        similarity_power: Power,
    ) -> Result<Self> {
        let grid = default_lambda_grid(design, sparsity_power)?;
        Self::new(models, sparsity_power, similarity_power, grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models < 1 {
            return Err(Error::InvalidConfig("model count must be at least 1".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidConfig("lambda grid is empty".into()));
        }
        for pair in self.lambda_grid.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidConfig(
                    "lambda grid must be strictly descending".into(),
                ));
            }
        }
        if !(self.lambda_grid[self.lambda_grid.len() - 1] > 0.0) {
            return Err(Error::InvalidConfig("lambda grid must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return Err(Error::InvalidConfig(format!(
                "similarity threshold must lie in [0, 1], got {}",
                self.similarity_threshold
            )));
        }
        if !(self.omega_max > 0.0) || !(self.omega_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "omega_max and omega_tol must be positive".into(),
            ));
        }
        if !(self.eps > 0.0) || self.max_sweeps == 0 {
            return Err(Error::InvalidConfig(
                "eps must be positive and max_sweeps nonzero".into(),
            ));
        }
        Ok(())
    }

    fn config(&self, lambda: f64, omega: f64) -> PenaltyConfig {
        PenaltyConfig {
            models: self.models,
            sparsity_power: self.sparsity_power,
            similarity_power: self.similarity_power,
            lambda,
            omega,
            eps: self.eps,
            max_sweeps: self.max_sweeps,
        }
    }

    fn controls(&self, warm: Option<&CoefficientSet>) -> SolveControls {
        let starts = match warm {
            Some(coef) => StartPolicy::Warm(coef.clone()),
            None => StartPolicy::Zeros,
        };
        SolveControls {
            starts,
            eps: self.eps,
            max_sweeps: self.max_sweeps,
        }
    }
}

/// The smallest sparsity weight at which the all-zero fit is a fixed point
/// of the absolute-penalty coordinate update: twice the largest absolute
/// column-response correlation. Squared penalties never produce exact
/// zeros, so for that power the same value serves only as a grid anchor.
pub fn lambda_max(design: &StandardizedDesign, sparsity_power: Power) -> f64 {
    let strongest = design
        .xs()
        .axis_iter(Axis(1))
        .map(|col| col.dot(&design.ys()).abs())
        .fold(0.0f64, f64::max);
    match sparsity_power {
        Power::One | Power::Two => 2.0 * strongest,
    }
}

/// Fifty log-spaced lambdas from the design's lambda_max down three decades,
/// in descending order. Fails when the response is uncorrelated with every
/// column (lambda_max would be 0 and no log grid exists).
pub fn default_lambda_grid(
    design: &StandardizedDesign,
    sparsity_power: Power,
) -> Result<Vec<f64>> {
    log_spaced_grid(
        lambda_max(design, sparsity_power),
        DEFAULT_GRID_POINTS,
        DEFAULT_GRID_RATIO,
    )
}

/// `points` log-spaced values from `top` down to `ratio * top`, descending.
pub fn log_spaced_grid(top: f64, points: usize, ratio: f64) -> Result<Vec<f64>> {
    if !(top > 0.0) {
        return Err(Error::InvalidData(format!(
            "grid anchor must be positive, got {top}"
        )));
    }
    if points < 1 || !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need at least one grid point and a ratio in (0, 1), got {points} and {ratio}"
        )));
    }
    if points == 1 {
        return Ok(vec![top]);
    }
    Ok((0..points)
        .map(|t| top * ratio.powf(t as f64 / (points - 1) as f64))
        .collect())
}

/// Result of the omega search at one lambda.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    /// Smallest similarity-feasible omega found (or `omega_max` when
    /// capped).
    pub omega: f64,
    /// The fit at that omega.
    pub solve: SolveResult,
    pub max_similarity: f64,
    /// True when even `omega_max` could not push similarity below the
    /// ceiling; the returned fit is then the capped one.
    pub omega_capped: bool,
    /// Every (omega, max similarity) pair evaluated, in search order.
    pub probes: Vec<(f64, f64)>,
    /// Total descent violations across all probe fits; see
    /// [`SolveResult::descent_violations`].
    pub descent_violations: usize,
}

fn fit_at(
    design: &StandardizedDesign,
    spec: &PathSpec,
    lambda: f64,
    omega: f64,
    warm: Option<&CoefficientSet>,
) -> Result<(SolveResult, f64)> {
    let cfg = spec.config(lambda, omega);
    let result = solve(design, &cfg, &spec.controls(warm))?;
    let similarity = max_pairwise_similarity(&result.coef);
    Ok((result, similarity))
}

/// Find the smallest omega at which the fitted models' maximum pairwise
/// similarity drops to the spec's ceiling: probe omega = 0, then double
/// geometrically until the ceiling holds (or `omega_max` is reached), then
/// bisect the bracket to relative width `omega_tol`. Every probe is an
/// independent fit warm-started from `warm` (typically the previous grid
/// point's solution). Similarity is not provably monotone in omega, so the
/// returned omega is the smallest *observed* feasible point of the bracket.
pub fn tune_omega(
    design: &StandardizedDesign,
    spec: &PathSpec,
    lambda: f64,
    warm: Option<&CoefficientSet>,
) -> Result<TuneOutcome> {
    spec.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let ceiling = spec.similarity_threshold;
    let mut probes = Vec::new();
    let mut violations = 0;

    let (fit0, sim0) = fit_at(design, spec, lambda, 0.0, warm)?;
    violations += fit0.descent_violations;
    probes.push((0.0, sim0));
    if sim0 <= ceiling {
        return Ok(TuneOutcome {
            omega: 0.0,
            solve: fit0,
            max_similarity: sim0,
            omega_capped: false,
            probes,
            descent_violations: violations,
        });
    }

    let mut lo = 0.0f64;
    let mut omega = OMEGA_SEARCH_ORIGIN.min(spec.omega_max);
    let (mut best_fit, mut best_sim) = loop {
        let (fit, sim) = fit_at(design, spec, lambda, omega, warm)?;
        violations += fit.descent_violations;
        probes.push((omega, sim));
        if sim <= ceiling {
            break (fit, sim);
        }
        if omega >= spec.omega_max {
            return Ok(TuneOutcome {
                omega,
                solve: fit,
                max_similarity: sim,
                omega_capped: true,
                probes,
                descent_violations: violations,
            });
        }
        lo = omega;
        omega = (2.0 * omega).min(spec.omega_max);
    };

    let mut hi = omega;
    while hi - lo > spec.omega_tol * hi.max(OMEGA_SEARCH_ORIGIN) {
        let mid = 0.5 * (lo + hi);
        let (fit, sim) = fit_at(design, spec, lambda, mid, warm)?;
        violations += fit.descent_violations;
        probes.push((mid, sim));
        if sim <= ceiling {
            hi = mid;
            best_fit = fit;
            best_sim = sim;
        } else {
            lo = mid;
        }
    }
    Ok(TuneOutcome {
        omega: hi,
        solve: best_fit,
        max_similarity: best_sim,
        omega_capped: false,
        probes,
        descent_violations: violations,
    })
}

/// Each model's largest-magnitude covariate index (None for an all-zero
/// model), sorted so two profiles compare equal whenever they agree up to
/// model relabeling.
fn dominant_profile(coef: &CoefficientSet, zero_tol: f64) -> Vec<Option<usize>> {
    let beta = coef.coefficients();
    let mut profile: Vec<Option<usize>> = (0..beta.nrows())
        .map(|i| {
            let mut best = None;
            let mut magnitude = zero_tol;
            for (k, v) in beta.row(i).iter().enumerate() {
                if v.abs() > magnitude {
                    magnitude = v.abs();
                    best = Some(k);
                }
            }
            best
        })
        .collect();
    profile.sort_unstable();
    profile
}

/// Find an omega at which the fit is not merely similarity-feasible but
/// structurally settled: starting from zeros at every probe, double omega
/// from the search origin and accept the first feasible rung whose models
/// have the same dominant covariates (as an unordered multiset, counting
/// all-zero models) as the previous feasible rung.
///
/// [`tune_omega`] hugs the similarity boundary, so the support pattern it
/// returns can be an accident of the exact constraint-activation point;
/// when tabulating which covariates land in which model over many replicate
/// datasets, that sensitivity shows up as noise. Confirming the dominance
/// structure across a doubling makes the reported pattern insensitive to
/// where exactly the ceiling was crossed, while stopping before the penalty
/// grows so large that genuinely useful secondary models get crushed to
/// zero. Returns `omega_capped` when `omega_max` is reached before two
/// consecutive feasible rungs agree; the capped fit is the last one probed.
pub fn tune_omega_stable(
    design: &StandardizedDesign,
    spec: &PathSpec,
    lambda: f64,
) -> Result<TuneOutcome> {
    spec.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let ceiling = spec.similarity_threshold;
    let zero_tol = crate::metrics::DEFAULT_ZERO_TOL;
    let mut probes = Vec::new();
    let mut violations = 0;

    let (fit0, sim0) = fit_at(design, spec, lambda, 0.0, None)?;
    violations += fit0.descent_violations;
    probes.push((0.0, sim0));
    if sim0 <= ceiling {
        return Ok(TuneOutcome {
            omega: 0.0,
            solve: fit0,
            max_similarity: sim0,
            omega_capped: false,
            probes,
            descent_violations: violations,
        });
    }

    let mut omega = OMEGA_SEARCH_ORIGIN.min(spec.omega_max);
    let mut confirmed: Option<Vec<Option<usize>>> = None;
    loop {
        let (fit, sim) = fit_at(design, spec, lambda, omega, None)?;
        violations += fit.descent_violations;
        probes.push((omega, sim));
        if sim <= ceiling {
            let profile = dominant_profile(&fit.coef, zero_tol);
            if confirmed.as_ref() == Some(&profile) {
                return Ok(TuneOutcome {
                    omega,
                    solve: fit,
                    max_similarity: sim,
                    omega_capped: false,
                    probes,
                    descent_violations: violations,
                });
            }
            confirmed = Some(profile);
        } else {
            // An infeasible rung between two feasible ones breaks the
            // confirmation chain; agreement must be between neighbors.
            confirmed = None;
        }
        if omega >= spec.omega_max {
            return Ok(TuneOutcome {
                omega,
                solve: fit,
                max_similarity: sim,
                omega_capped: true,
                probes,
                descent_violations: violations,
            });
        }
        omega = (2.0 * omega).min(spec.omega_max);
    }
}

/// One point of a regularization path.
#[derive(Debug, Clone)]
pub struct PathRecord {
    pub lambda: f64,
    pub omega: f64,
    pub coef: CoefficientSet,
    pub max_pairwise_similarity: f64,
    pub per_model_sse: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub omega_capped: bool,
    pub descent_violations: usize,
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub records: Vec<PathRecord>,
}

/// Trace the full path: lambdas largest to smallest, each fit warm-started
/// from the previous record's coefficients, omega re-tuned at every grid
/// point. Fully deterministic for a given spec.
pub fn fit_path(design: &StandardizedDesign, spec: &PathSpec) -> Result<PathResult> {
    spec.validate()?;
    let mut warm: Option<CoefficientSet> = None;
    let mut records = Vec::with_capacity(spec.lambda_grid.len());
    for &lambda in &spec.lambda_grid {
        let outcome = tune_omega(design, spec, lambda, warm.as_ref())?;
        let per_model_sse = model_sse(design, &outcome.solve.coef)?;
        warm = Some(outcome.solve.coef.clone());
        records.push(PathRecord {
            lambda,
            omega: outcome.omega,
            coef: outcome.solve.coef,
            max_pairwise_similarity: outcome.max_similarity,
            per_model_sse,
            objective: outcome.solve.objective,
            converged: outcome.solve.converged,
            omega_capped: outcome.omega_capped,
            descent_violations: outcome.descent_violations,
        });
    }
    Ok(PathResult { records })
}
