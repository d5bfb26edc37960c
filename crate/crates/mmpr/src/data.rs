//! Core data types: raw datasets, the standardized design, penalty
//! configuration, coefficient sets, and exact evaluation of the joint
//! objective and its penalty terms.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Exponent applied inside a penalty term, restricted to 1 (absolute value,
/// lasso-like) or 2 (square, ridge-like).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    One,
    Two,
}

impl Power {
    /// |v|^power.
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Power::One => v.abs(),
            Power::Two => v * v,
        }
    }

    pub fn from_int(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Power::One),
            2 => Ok(Power::Two),
            other => Err(Error::InvalidConfig(format!(
                "penalty power must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn as_int(self) -> u8 {
        match self {
            Power::One => 1,
            Power::Two => 2,
        }
    }
}

/// Which scale a coefficient set lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Coefficients for the centered, unit-L2-norm design.
    Standardized,
    /// Coefficients for the original data units.
    Raw,
}

/// A raw regression dataset: covariate matrix, response, and column labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, finiteness, and label uniqueness.
    pub fn new(x: Array2<f64>, y: Array1<f64>, names: Vec<String>) -> Result<Self> {
        let (n, p) = x.dim();
        if n == 0 || p == 0 {
            return Err(Error::InvalidData(format!(
                "dataset must have at least one row and one column, got {n}x{p}"
            )));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "response has {} entries but the design has {} rows",
                y.len(),
                n
            )));
        }
        if names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate names for {} columns",
                names.len(),
                p
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::InvalidData(format!("duplicate covariate name {a:?}")));
            }
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry in dataset".into()));
        }
        Ok(Self { x, y, names })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// The design after centering and scaling: every covariate column has mean
/// zero and unit L2 norm, and the response is centered. Keeps the centering
/// and scaling constants needed to map coefficients back to raw units.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    pub(crate) xs: Array2<f64>,
    pub(crate) ys: Array1<f64>,
    pub(crate) col_norms: Array1<f64>,
    pub(crate) col_means: Array1<f64>,
    pub(crate) y_mean: f64,
}

impl StandardizedDesign {
    pub fn xs(&self) -> ArrayView2<'_, f64> {
        self.xs.view()
    }

    pub fn ys(&self) -> ArrayView1<'_, f64> {
        self.ys.view()
    }

    /// L2 norms of the centered covariate columns.
    pub fn col_norms(&self) -> ArrayView1<'_, f64> {
        self.col_norms.view()
    }

    pub fn col_means(&self) -> ArrayView1<'_, f64> {
        self.col_means.view()
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn n(&self) -> usize {
        self.xs.nrows()
    }

    pub fn p(&self) -> usize {
        self.xs.ncols()
    }
}

/// Center each covariate column and scale it to unit L2 norm; center the
/// response. Fails with [`Error::ConstantColumn`] when a column carries no
/// variation.
pub fn standardize(data: &Dataset) -> Result<StandardizedDesign> {
    let n = data.n();
    let p = data.p();
    let mut xs = data.x.clone();
    let mut col_means = Array1::zeros(p);
    let mut col_norms = Array1::zeros(p);
    for k in 0..p {
        let mut col = xs.column_mut(k);
        let mean = col.sum() / n as f64;
        col.mapv_inplace(|v| v - mean);
        let norm = col.dot(&col).sqrt();
        // Numerically constant columns center to rounding noise rather than
        // exact zeros; treat anything at that level as constant.
        if norm <= 1e-12 * (n as f64).sqrt() * (1.0 + mean.abs()) {
            return Err(Error::ConstantColumn {
                index: k,
                name: data.names[k].clone(),
            });
        }
        col.mapv_inplace(|v| v / norm);
        col_means[k] = mean;
        col_norms[k] = norm;
    }
    let y_mean = data.y.sum() / n as f64;
    let ys = data.y.mapv(|v| v - y_mean);
    Ok(StandardizedDesign {
        xs,
        ys,
        col_norms,
        col_means,
        y_mean,
    })
}

/// Penalty weights and solver tolerances for a joint fit of `models` linear
/// models: `lambda` weights the per-model sparsity penalty (power
/// `sparsity_power`), `omega` weights the pairwise similarity penalty (power
/// `similarity_power`).
#[derive(Debug, Clone)]
pub struct PenaltyConfig {
    pub models: usize,
    pub sparsity_power: Power,
    pub similarity_power: Power,
    pub lambda: f64,
    pub omega: f64,
    pub eps: f64,
    pub max_sweeps: usize,
}

impl PenaltyConfig {
    pub fn new(
        models: usize,
        sparsity_power: Power,
        similarity_power: Power,
        lambda: f64,
        omega: f64,
    ) -> Result<Self> {
        let cfg = Self {
            models,
            sparsity_power,
            similarity_power,
            lambda,
            omega,
            eps: 1e-6,
            max_sweeps: 10_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models < 1 {
            return Err(Error::InvalidConfig("model count must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "omega must be nonnegative, got {}",
                self.omega
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be positive".into()));
        }
        Ok(())
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }
}

/// The coefficients of all fitted models: one row per model.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    coefficients: Array2<f64>,
    scale: Scale,
}

impl CoefficientSet {
    pub fn new(coefficients: Array2<f64>, scale: Scale) -> Result<Self> {
        if coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite coefficient".into()));
        }
        Ok(Self { coefficients, scale })
    }

    pub fn zeros(models: usize, covariates: usize) -> Self {
        Self {
            coefficients: Array2::zeros((models, covariates)),
            scale: Scale::Standardized,
        }
    }

    pub fn coefficients(&self) -> ArrayView2<'_, f64> {
        self.coefficients.view()
    }

    /// Coefficient vector of one model.
    pub fn model(&self, i: usize) -> ArrayView1<'_, f64> {
        self.coefficients.row(i)
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn models(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn covariates(&self) -> usize {
        self.coefficients.ncols()
    }
}

/// Pairwise similarity penalty between two coefficient vectors:
/// the sum over covariates of |b_i|^d * |b_j|^d. Zero exactly when the two
/// supports are disjoint.
pub fn similarity_penalty(bi: ArrayView1<f64>, bj: ArrayView1<f64>, d: Power) -> Result<f64> {
    if bi.len() != bj.len() {
        return Err(Error::LengthMismatch {
            left: bi.len(),
            right: bj.len(),
        });
    }
    Ok(bi
        .iter()
        .zip(bj.iter())
        .map(|(&a, &b)| d.apply(a) * d.apply(b))
        .sum())
}

/// Per-model sparsity penalty: the sum over covariates of |b|^c.
pub fn sparsity_penalty(bi: ArrayView1<f64>, c: Power) -> f64 {
    bi.iter().map(|&v| c.apply(v)).sum()
}

/// Residual sum of squares of each model on the standardized design.
pub fn model_sse(design: &StandardizedDesign, coef: &CoefficientSet) -> Result<Vec<f64>> {
    check_dims(design, coef)?;
    Ok((0..coef.models())
        .map(|i| {
            let fitted = design.xs.dot(&coef.model(i));
            design
                .ys
                .iter()
                .zip(fitted.iter())
                .map(|(&y, &f)| (y - f) * (y - f))
                .sum()
        })
        .collect())
}

fn check_dims(design: &StandardizedDesign, coef: &CoefficientSet) -> Result<()> {
    if coef.covariates() != design.p() {
        return Err(Error::DimensionMismatch(format!(
            "coefficients cover {} covariates but the design has {}",
            coef.covariates(),
            design.p()
        )));
    }
    Ok(())
}

/// The joint objective: total residual sum of squares over all models, plus
/// `omega` times the sum of pairwise similarity penalties, plus `lambda`
/// times the sum of per-model sparsity penalties. Invariant under any
/// permutation of the model rows.
pub fn objective(
    design: &StandardizedDesign,
    coef: &CoefficientSet,
    cfg: &PenaltyConfig,
) -> Result<f64> {
    if coef.scale() != Scale::Standardized {
        return Err(Error::ScaleMismatch {
            expected: Scale::Standardized,
            found: coef.scale(),
        });
    }
    check_dims(design, coef)?;
    if coef.models() != cfg.models {
        return Err(Error::DimensionMismatch(format!(
            "coefficient set has {} models, config expects {}",
            coef.models(),
            cfg.models
        )));
    }
    Ok(objective_raw(
        design.xs.view(),
        design.ys.view(),
        coef.coefficients(),
        cfg,
    ))
}

/// Objective evaluation on bare arrays; shared with the solver's final
/// reporting path.
pub(crate) fn objective_raw(
    xs: ArrayView2<f64>,
    ys: ArrayView1<f64>,
    beta: ArrayView2<f64>,
    cfg: &PenaltyConfig,
) -> f64 {
    let m = beta.nrows();
    let mut total = 0.0;
    for i in 0..m {
        let fitted = xs.dot(&beta.row(i));
        total += ys
            .iter()
            .zip(fitted.iter())
            .map(|(&y, &f)| (y - f) * (y - f))
            .sum::<f64>();
        total += cfg.lambda * sparsity_penalty(beta.row(i), cfg.sparsity_power);
        for j in (i + 1)..m {
            let p1: f64 = beta
                .row(i)
                .iter()
                .zip(beta.row(j).iter())
                .map(|(&a, &b)| cfg.similarity_power.apply(a) * cfg.similarity_power.apply(b))
                .sum();
            total += cfg.omega * p1;
        }
    }
    total
}

/// Convert standardized-scale coefficients back to raw data units. Returns
/// the raw-scale coefficient set together with one intercept per model, such
/// that `intercept + X_raw . b_raw` reproduces `y_mean + Xs . b_std`.
pub fn destandardize(
    coef: &CoefficientSet,
    design: &StandardizedDesign,
) -> Result<(CoefficientSet, Vec<f64>)> {
    if coef.scale() != Scale::Standardized {
        return Err(Error::ScaleMismatch {
            expected: Scale::Standardized,
            found: coef.scale(),
        });
    }
    check_dims(design, coef)?;
    let mut raw = coef.coefficients.clone();
    for mut row in raw.rows_mut() {
        for (k, v) in row.iter_mut().enumerate() {
            *v /= design.col_norms[k];
        }
    }
    let intercepts = raw
        .axis_iter(Axis(0))
        .map(|row| design.y_mean - row.dot(&design.col_means))
        .collect();
    Ok((CoefficientSet::new(raw, Scale::Raw)?, intercepts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn toy_dataset() -> Dataset {
        Dataset::new(
            array![[1.0], [2.0], [3.0]],
            array![1.0, 1.0, 1.0],
            vec!["a".into()],
        )
        .unwrap()
    }

    #[test]
    fn standardize_centers_and_scales() {
        let design = standardize(&toy_dataset()).unwrap();
        let s = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(design.xs[[0, 0]], -1.0 / s, epsilon = 1e-15);
        assert_abs_diff_eq!(design.xs[[1, 0]], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(design.xs[[2, 0]], 1.0 / s, epsilon = 1e-15);
        assert!(design.ys.iter().all(|&v| v == 0.0));
        assert_abs_diff_eq!(design.col_norms[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(design.col_means[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(design.y_mean, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn standardize_rejects_constant_column() {
        let data = Dataset::new(
            array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]],
            array![0.0, 1.0, 2.0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        match standardize(&data) {
            Err(Error::ConstantColumn { index: 1, .. }) => {}
            other => panic!("expected ConstantColumn(1), got {other:?}"),
        }
    }

    #[test]
    fn standardize_is_idempotent() {
        let data = Dataset::new(
            array![[0.3, -1.2], [1.9, 0.4], [-0.6, 2.2], [2.4, -0.9]],
            array![1.0, -2.0, 0.5, 3.0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let once = standardize(&data).unwrap();
        let again = standardize(
            &Dataset::new(
                once.xs.clone(),
                once.ys.clone(),
                data.names().to_vec(),
            )
            .unwrap(),
        )
        .unwrap();
        for (a, b) in once.xs.iter().zip(again.xs.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn similarity_penalty_examples() {
        let zero = similarity_penalty(
            array![1.0, 0.0].view(),
            array![0.0, 2.0].view(),
            Power::One,
        )
        .unwrap();
        assert_eq!(zero, 0.0);

        let two = similarity_penalty(
            array![1.0, 1.0].view(),
            array![1.0, 1.0].view(),
            Power::Two,
        )
        .unwrap();
        assert_eq!(two, 2.0);

        let eight = similarity_penalty(
            array![2.0, -3.0].view(),
            array![-1.0, 2.0].view(),
            Power::One,
        )
        .unwrap();
        assert_eq!(eight, 8.0);
    }

    #[test]
    fn similarity_penalty_length_mismatch() {
        let err = similarity_penalty(array![1.0].view(), array![1.0, 2.0].view(), Power::One);
        assert!(matches!(err, Err(Error::LengthMismatch { left: 1, right: 2 })));
    }

    #[test]
    fn sparsity_penalty_examples() {
        assert_eq!(sparsity_penalty(array![0.0, 0.0, 0.0].view(), Power::One), 0.0);
        assert_eq!(sparsity_penalty(array![1.0, -2.0, 0.0].view(), Power::One), 3.0);
        assert_eq!(sparsity_penalty(array![1.0, -2.0, 0.0].view(), Power::Two), 5.0);
    }

    #[test]
    fn objective_zero_coefficients_is_m_times_sse() {
        let data = Dataset::new(
            array![[0.1, 1.0], [0.9, -0.4], [-1.3, 0.2], [0.3, -0.8]],
            array![2.0, -1.0, 0.0, 1.5],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let design = standardize(&data).unwrap();
        let cfg = PenaltyConfig::new(3, Power::One, Power::One, 0.7, 0.9).unwrap();
        let coef = CoefficientSet::zeros(3, 2);
        let ys_sq = design.ys().dot(&design.ys());
        let obj = objective(&design, &coef, &cfg).unwrap();
        assert_abs_diff_eq!(obj, 3.0 * ys_sq, epsilon = 1e-12);
    }

    #[test]
    fn destandardize_identity_when_already_standardized() {
        let data = Dataset::new(
            array![[0.5, -0.1], [-0.5, 0.3], [0.0, -0.2]],
            array![1.0, 3.0, 2.0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let design = standardize(&data).unwrap();
        // Rebuild a dataset whose columns are already centered and unit-norm.
        let pre = Dataset::new(
            design.xs.clone(),
            data.y().to_owned(),
            data.names().to_vec(),
        )
        .unwrap();
        let pre_design = standardize(&pre).unwrap();
        let coef = CoefficientSet::new(array![[0.4, -1.1]], Scale::Standardized).unwrap();
        let (raw, intercepts) = destandardize(&coef, &pre_design).unwrap();
        assert_abs_diff_eq!(raw.coefficients()[[0, 0]], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(raw.coefficients()[[0, 1]], -1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(intercepts[0], pre_design.y_mean(), epsilon = 1e-12);
    }

    #[test]
    fn destandardize_divides_by_column_norm() {
        // One covariate whose centered column has L2 norm exactly 2.
        let data = Dataset::new(
            array![[-2.0f64.sqrt()], [2.0f64.sqrt()]],
            array![1.0, 2.0],
            vec!["a".into()],
        )
        .unwrap();
        let design = standardize(&data).unwrap();
        assert_abs_diff_eq!(design.col_norms[0], 2.0, epsilon = 1e-12);
        let coef = CoefficientSet::new(array![[1.0]], Scale::Standardized).unwrap();
        let (raw, _) = destandardize(&coef, &design).unwrap();
        assert_abs_diff_eq!(raw.coefficients()[[0, 0]], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn destandardize_rejects_raw_input() {
        let design = standardize(&toy_dataset()).unwrap();
        let coef = CoefficientSet::new(array![[1.0]], Scale::Raw).unwrap();
        assert!(matches!(
            destandardize(&coef, &design),
            Err(Error::ScaleMismatch { .. })
        ));
    }

    #[test]
    fn penalty_config_rejects_bad_values() {
        assert!(PenaltyConfig::new(0, Power::One, Power::One, 1.0, 1.0).is_err());
        assert!(PenaltyConfig::new(2, Power::One, Power::One, -1.0, 1.0).is_err());
        assert!(PenaltyConfig::new(2, Power::One, Power::One, 1.0, f64::NAN).is_err());
    }
}
