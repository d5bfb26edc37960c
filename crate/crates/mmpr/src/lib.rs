//! Multi-model penalized regression: fit a set of M linear models to one
//! dataset so that each model is sparse and no two models lean on the same
//! covariates.
//!
//! The joint objective is
//!
//! ```text
//! sum_i ||ys - Xs b_i||^2
//!   + omega * sum_{i<j} sum_k |b_ik|^d |b_jk|^d
//!   + lambda * sum_i sum_k |b_ik|^c
//! ```
//!
//! with powers c, d in {1, 2}. The cross-model term penalizes covariates
//! for appearing in several models at once, which pushes the set toward
//! genuinely different explanations of the same response. Minimization is
//! by cyclic coordinate descent ([`solver`]) on a centered, unit-norm
//! design ([`data`]); the similarity weight omega is tuned per lambda so
//! the models' pairwise cosine similarity stays below a ceiling
//! ([`tuner`]); [`metrics`] and [`simgen`] cover diagnostics and synthetic
//! benchmark data; [`surface`] emits plot-ready penalty and SSE grids for
//! the two-covariate geometry.
//!
//! # Example
//!
//! ```
//! use mmpr::{
//!     fit_path, preset_case, standardize, PathSpec, Power,
//! };
//!
//! let sim = preset_case(4, 7).unwrap();
//! let design = standardize(&sim.dataset).unwrap();
//! let mut spec = PathSpec::for_design(&design, 3, Power::One, Power::One).unwrap();
//! spec.lambda_grid.truncate(5);
//! let path = fit_path(&design, &spec).unwrap();
//! assert_eq!(path.records.len(), 5);
//! for record in &path.records {
//!     assert!(record.omega_capped || record.max_pairwise_similarity <= 0.3 + 1e-6);
//! }
//! ```

pub mod data;
pub mod error;
mod linalg;
pub mod metrics;
pub mod simgen;
pub mod solver;
pub mod surface;
pub mod tuner;

pub use data::{
    destandardize, model_sse, objective, similarity_penalty, sparsity_penalty, standardize,
    CoefficientSet, Dataset, PenaltyConfig, Power, Scale, StandardizedDesign,
};
pub use error::{Error, Result};
pub use metrics::{
    alignment_order, cosine_similarity, diversity_report, fold_assignment, inclusion_study,
    lasso_cv_lambda, max_pairwise_similarity, pearson, DiversityReport, InclusionTable,
    LambdaRule,
};
pub use simgen::{
    block_correlation, preset_case, preset_case_spec, sample, BlockStructure, SimCase,
    SimDataset,
};
pub use solver::{
    conditional_solve, coordinate_update, soft_threshold, solve, SolveControls, SolveResult,
    StartPolicy,
};
pub use surface::{penalty_surface, sse_surface, ContourGrid, SurfaceParams};
pub use tuner::{
    default_lambda_grid, fit_path, lambda_max, log_spaced_grid, tune_omega, tune_omega_stable,
    PathRecord, PathResult, PathSpec, TuneOutcome,
};
