//! Diagnostics for fitted model sets: coefficient similarity, prediction
//! correlation, per-model fit quality, cross-validated lambda selection for
//! the single-model baseline, and inclusion-proportion studies over
//! simulated replicates.

use ndarray::{Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{
    model_sse, standardize, CoefficientSet, PenaltyConfig, Power, Scale, StandardizedDesign,
};
use crate::error::{Error, Result};
use crate::simgen::{sample, SimCase};
use crate::solver::{solve_views, SolveControls, StartPolicy};
use crate::tuner::{default_lambda_grid, tune_omega_stable, PathSpec};

/// Coefficients with magnitude at or below this count as excluded when
/// tabulating inclusion proportions. Thresholded updates produce exact
/// zeros; the tolerance guards the all-squared penalty combination, which
/// only shrinks toward zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Cosine similarity of two vectors, with the convention that any all-zero
/// vector is similar to nothing: the result is 0 when either norm vanishes.
pub fn cosine_similarity(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(a.dot(&b) / (na * nb))
}

/// Largest pairwise cosine similarity between the absolute coefficient
/// vectors of the models; 0 when there are no pairs. This is the quantity
/// the omega search constrains.
pub fn max_pairwise_similarity(coef: &CoefficientSet) -> f64 {
    let m = coef.models();
    let abs: Vec<Array1<f64>> = (0..m).map(|i| coef.model(i).mapv(f64::abs)).collect();
    let mut best = 0.0f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let s = cosine_similarity(abs[i].view(), abs[j].view())
                .expect("rows of one coefficient set have equal length");
            best = best.max(s);
        }
    }
    best
}

/// Pearson correlation, defined as 0 when either input has zero variance
/// (matching the zero-vector convention of [`cosine_similarity`]).
pub fn pearson(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.sum() / n;
    let mb = b.sum() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Pairwise diversity and per-model fit diagnostics for one fitted set.
#[derive(Debug, Clone)]
pub struct DiversityReport {
    /// Cosine similarities of absolute coefficient vectors; diagonal is 1
    /// for nonzero models and 0 for empty ones.
    pub coef_similarity: Array2<f64>,
    /// Pearson correlations between fitted-value vectors; 0 wherever a fit
    /// is constant.
    pub pred_correlation: Array2<f64>,
    pub per_model_mse: Vec<f64>,
    pub per_model_sse: Vec<f64>,
}

pub fn diversity_report(
    design: &StandardizedDesign,
    coef: &CoefficientSet,
) -> Result<DiversityReport> {
    if coef.scale() != Scale::Standardized {
        return Err(Error::ScaleMismatch {
            expected: Scale::Standardized,
            found: coef.scale(),
        });
    }
    let m = coef.models();
    let n = design.n();
    let sse = model_sse(design, coef)?;
    let fitted: Vec<Array1<f64>> = (0..m).map(|i| design.xs().dot(&coef.model(i))).collect();
    let abs: Vec<Array1<f64>> = (0..m).map(|i| coef.model(i).mapv(f64::abs)).collect();
    let mut coef_similarity = Array2::zeros((m, m));
    let mut pred_correlation = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            coef_similarity[[i, j]] = cosine_similarity(abs[i].view(), abs[j].view())?;
            pred_correlation[[i, j]] = pearson(fitted[i].view(), fitted[j].view())?;
        }
    }
    let per_model_mse = sse.iter().map(|&s| s / n as f64).collect();
    Ok(DiversityReport {
        coef_similarity,
        pred_correlation,
        per_model_mse,
        per_model_sse: sse,
    })
}

/// Canonical model order for cross-replicate comparison: descending
/// coefficient L2 norm, ties broken by descending explained sum of squares,
/// then by original index. Returns original row indices in aligned order.
/// Fitting is label-exchangeable, so any per-model tabulation needs a
/// declared order to be well defined.
pub fn alignment_order(
    design: &StandardizedDesign,
    coef: &CoefficientSet,
) -> Result<Vec<usize>> {
    let m = coef.models();
    let sse = model_sse(design, coef)?;
    let ys_sq = design.ys().dot(&design.ys());
    let mut keyed: Vec<(usize, f64, f64)> = (0..m)
        .map(|i| {
            let row = coef.model(i);
            (i, row.dot(&row).sqrt(), ys_sq - sse[i])
        })
        .collect();
    keyed.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(b.2.partial_cmp(&a.2).unwrap())
            .then(a.0.cmp(&b.0))
    });
    Ok(keyed.into_iter().map(|(i, _, _)| i).collect())
}

/// How the sparsity weight is chosen for each replicate of an inclusion
/// study.
#[derive(Debug, Clone)]
pub enum LambdaRule {
    /// Leave-one-out cross-validated single-model lasso lambda, recomputed
    /// per replicate. With singleton validation folds the pooled error does
    /// not depend on how rows are shuffled into folds, so this rule adds no
    /// randomness of its own.
    LooCvLasso,
    /// K-fold cross-validated single-model lasso lambda, recomputed per
    /// replicate with a fold seed derived from (but distinct from) the
    /// replicate's data seed.
    CvLasso { folds: usize },
    /// One fixed value for every replicate.
    Fixed(f64),
}

impl Default for LambdaRule {
    fn default() -> Self {
        LambdaRule::LooCvLasso
    }
}

/// Nonzero-coefficient frequencies over replicate datasets, tabulated after
/// canonical alignment.
#[derive(Debug, Clone)]
pub struct InclusionTable {
    /// Aligned models by covariates; entry (m, k) is the fraction of
    /// replicates in which aligned model m used covariate k.
    pub proportions: Array2<f64>,
    /// Alignment-free view: fraction of replicates in which any model used
    /// covariate k.
    pub union_proportions: Vec<f64>,
    pub replicates: usize,
    pub zero_tol: f64,
    /// Lambda chosen in each replicate, in replicate order.
    pub lambdas: Vec<f64>,
    /// Omega selected in each replicate.
    pub omegas: Vec<f64>,
    /// Replicates where the similarity ceiling was unattainable.
    pub capped_replicates: usize,
    /// Replicates whose winning fit hit the sweep cap.
    pub nonconverged_replicates: usize,
}

/// Fold label per row: a seeded shuffle of the row indices cut into
/// contiguous blocks whose sizes differ by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 || folds > n {
        return Err(Error::InvalidConfig(format!(
            "fold count must be between 2 and the number of rows ({n}), got {folds}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = n / folds;
    let extra = n % folds;
    let mut assignment = vec![0usize; n];
    let mut cursor = 0;
    for fold in 0..folds {
        let size = base + usize::from(fold < extra);
        for &row in &order[cursor..cursor + size] {
            assignment[row] = fold;
        }
        cursor += size;
    }
    Ok(assignment)
}

/// Cross-validated sparsity weight for the single-model, absolute-penalty
/// fit: pooled validation squared error over the default lambda grid, with
/// ties resolved toward the larger (more penalized) value.
pub fn lasso_cv_lambda(design: &StandardizedDesign, folds: usize, seed: u64) -> Result<f64> {
    let n = design.n();
    let assignment = fold_assignment(n, folds, seed)?;
    let grid = default_lambda_grid(design, Power::One)?;
    let mut pooled = vec![0.0f64; grid.len()];
    for fold in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&l| assignment[l] != fold).collect();
        let valid: Vec<usize> = (0..n).filter(|&l| assignment[l] == fold).collect();
        let xt = design.xs().select(ndarray::Axis(0), &train);
        let yt = design.ys().select(ndarray::Axis(0), &train);
        let mut warm: Option<CoefficientSet> = None;
        for (gi, &lambda) in grid.iter().enumerate() {
            let mut cfg = PenaltyConfig::new(1, Power::One, Power::One, lambda, 0.0)?;
            cfg.eps = 1e-8;
            let controls = match &warm {
                Some(coef) => SolveControls::from_config(&cfg)
                    .with_starts(StartPolicy::Warm(coef.clone())),
                None => SolveControls::from_config(&cfg),
            };
            let fit = solve_views(xt.view(), yt.view(), &cfg, &controls)?;
            for &l in &valid {
                let pred = design.xs().row(l).dot(&fit.coef.model(0));
                let err = design.ys()[l] - pred;
                pooled[gi] += err * err;
            }
            warm = Some(fit.coef);
        }
    }
    // The grid descends, so scanning in order and keeping strict
    // improvements resolves ties toward the larger lambda.
    let mut best = 0;
    for gi in 1..grid.len() {
        if pooled[gi] < pooled[best] {
            best = gi;
        }
    }
    Ok(grid[best])
}

/// Repeatedly simulate, tune, fit, align, and tabulate which covariates end
/// up active in which model. Replicate r draws its data with seed
/// `seed + r`; the k-fold rule assigns folds from a decorrelated stream
/// (`(seed + r) ^ 0x9E37_79B9_7F4A_7C15`) so fold luck never tracks the
/// data draw. The spec's `lambda_grid` is not used here: the
/// cross-validation rules rebuild the default grid from each replicate's
/// own design, and the fixed rule needs none. Omega comes from
/// [`tune_omega_stable`], since a tabulation over replicates wants support
/// patterns that do not flicker with the constraint-activation point.
pub fn inclusion_study(
    case: &SimCase,
    replicates: usize,
    seed: u64,
    spec: &PathSpec,
    rule: &LambdaRule,
) -> Result<InclusionTable> {
    if replicates < 1 {
        return Err(Error::InvalidConfig("replicates must be at least 1".into()));
    }
    spec.validate()?;
    if let LambdaRule::Fixed(v) = rule {
        if !(*v > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "fixed lambda must be positive, got {v}"
            )));
        }
    }
    let p = case.dimension();
    let m = spec.models;
    let mut counts = Array2::<f64>::zeros((m, p));
    let mut union_counts = vec![0.0f64; p];
    let mut lambdas = Vec::with_capacity(replicates);
    let mut omegas = Vec::with_capacity(replicates);
    let mut capped = 0;
    let mut nonconverged = 0;
    for r in 0..replicates {
        let mut case_r = case.clone();
        case_r.seed = seed + r as u64;
        let sim = sample(&case_r)?;
        let design = standardize(&sim.dataset)?;
        let lambda = match rule {
            LambdaRule::Fixed(v) => *v,
            LambdaRule::LooCvLasso => lasso_cv_lambda(&design, design.n(), 0)?,
            LambdaRule::CvLasso { folds } => {
                lasso_cv_lambda(&design, *folds, (seed + r as u64) ^ 0x9E37_79B9_7F4A_7C15)?
            }
        };
        let outcome = tune_omega_stable(&design, spec, lambda)?;
        capped += usize::from(outcome.omega_capped);
        nonconverged += usize::from(!outcome.solve.converged);
        lambdas.push(lambda);
        omegas.push(outcome.omega);
        let order = alignment_order(&design, &outcome.solve.coef)?;
        let beta = outcome.solve.coef.coefficients();
        for k in 0..p {
            let mut any = false;
            for (slot, &orig) in order.iter().enumerate() {
                if beta[[orig, k]].abs() > DEFAULT_ZERO_TOL {
                    counts[[slot, k]] += 1.0;
                    any = true;
                }
            }
            if any {
                union_counts[k] += 1.0;
            }
        }
    }
    let denom = replicates as f64;
    Ok(InclusionTable {
        proportions: counts / denom,
        union_proportions: union_counts.into_iter().map(|c| c / denom).collect(),
        replicates,
        zero_tol: DEFAULT_ZERO_TOL,
        lambdas,
        omegas,
        capped_replicates: capped,
        nonconverged_replicates: nonconverged,
    })
}
