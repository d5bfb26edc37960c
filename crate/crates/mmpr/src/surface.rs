//! Plot-ready grid data for the two-covariate conditional geometry: the
//! penalty seen by a second model given a fixed first model, and the
//! residual-sum-of-squares surface of the design. Output is raw cell
//! values; contouring and rendering belong to external tools.

use ndarray::Array2;

use crate::data::{Power, StandardizedDesign};
use crate::error::{Error, Result};
use crate::linalg::solve_spd;

pub const DEFAULT_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_RESOLUTION: usize = 201;

/// Penalty parameters a surface was evaluated under.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceParams {
    pub sparsity_power: Power,
    pub similarity_power: Power,
    pub lambda: f64,
    pub omega: f64,
    /// The fixed first-model coefficients being conditioned on.
    pub beta1: [f64; 2],
}

/// Rectangular grid over the second model's coefficient plane (b1 = first
/// coordinate, b2 = second), carrying a penalty surface, an SSE surface, or
/// both on shared axes.
#[derive(Debug, Clone)]
pub struct ContourGrid {
    /// First-axis cell coordinates, ascending.
    pub b1: Vec<f64>,
    /// Second-axis cell coordinates, ascending.
    pub b2: Vec<f64>,
    /// Penalty value per cell, indexed [first, second].
    pub penalty: Option<Array2<f64>>,
    pub params: Option<SurfaceParams>,
    /// Squared-error value per cell, indexed [first, second].
    pub sse: Option<Array2<f64>>,
    /// Exact unconstrained least-squares solution of the design, when an
    /// SSE surface is present.
    pub least_squares: Option<[f64; 2]>,
}

fn axis(half_width: f64, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "grid half-width must be positive, got {half_width}"
        )));
    }
    let step = 2.0 * half_width / (resolution - 1) as f64;
    Ok((0..resolution).map(|i| -half_width + step * i as f64).collect())
}

impl ContourGrid {
    /// The cell minimizing penalty + SSE (whichever surfaces are present),
    /// as ((b1, b2), value). Ties go to the first cell in row-major order.
    pub fn grid_minimum(&self) -> ((f64, f64), f64) {
        let mut best = ((self.b1[0], self.b2[0]), f64::INFINITY);
        for (i, &v1) in self.b1.iter().enumerate() {
            for (j, &v2) in self.b2.iter().enumerate() {
                let mut total = 0.0;
                if let Some(p) = &self.penalty {
                    total += p[[i, j]];
                }
                if let Some(s) = &self.sse {
                    total += s[[i, j]];
                }
                if total < best.1 {
                    best = ((v1, v2), total);
                }
            }
        }
        best
    }

    /// Overlay two surfaces computed on identical axes into one grid.
    pub fn merge(penalty: ContourGrid, sse: ContourGrid) -> Result<ContourGrid> {
        if penalty.b1 != sse.b1 || penalty.b2 != sse.b2 {
            return Err(Error::DimensionMismatch(
                "cannot merge surfaces computed on different grids".into(),
            ));
        }
        Ok(ContourGrid {
            b1: penalty.b1,
            b2: penalty.b2,
            penalty: penalty.penalty.or(sse.penalty),
            params: penalty.params.or(sse.params),
            sse: sse.sse,
            least_squares: sse.least_squares,
        })
    }
}

/// The conditional penalty landscape for a second model's coefficients
/// (b1, b2) given a fixed first model: similarity coupling
/// omega * sum_k |beta1_k|^d |b_k|^d plus sparsity lambda * sum_k |b_k|^c,
/// evaluated over [-half_width, half_width]^2.
pub fn penalty_surface(
    beta1: [f64; 2],
    sparsity_power: Power,
    similarity_power: Power,
    lambda: f64,
    omega: f64,
    half_width: f64,
    resolution: usize,
) -> Result<ContourGrid> {
    if !(lambda >= 0.0) || !(omega >= 0.0) {
        return Err(Error::InvalidConfig(
            "penalty weights must be nonnegative".into(),
        ));
    }
    let b1 = axis(half_width, resolution)?;
    let b2 = b1.clone();
    let w = [
        omega * similarity_power.apply(beta1[0]),
        omega * similarity_power.apply(beta1[1]),
    ];
    let mut penalty = Array2::zeros((resolution, resolution));
    for (i, &v1) in b1.iter().enumerate() {
        for (j, &v2) in b2.iter().enumerate() {
            penalty[[i, j]] = w[0] * similarity_power.apply(v1)
                + w[1] * similarity_power.apply(v2)
                + lambda * (sparsity_power.apply(v1) + sparsity_power.apply(v2));
        }
    }
    Ok(ContourGrid {
        b1,
        b2,
        penalty: Some(penalty),
        params: Some(SurfaceParams {
            sparsity_power,
            similarity_power,
            lambda,
            omega,
            beta1,
        }),
        sse: None,
        least_squares: None,
    })
}

/// The squared-error landscape ||ys - Xs b||^2 of a two-covariate design
/// over the same kind of grid, along with the exact least-squares point.
pub fn sse_surface(
    design: &StandardizedDesign,
    half_width: f64,
    resolution: usize,
) -> Result<ContourGrid> {
    if design.p() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "squared-error surfaces need exactly 2 covariates, got {}",
            design.p()
        )));
    }
    let b1 = axis(half_width, resolution)?;
    let b2 = b1.clone();
    let x1 = design.xs().column(0).to_owned();
    let x2 = design.xs().column(1).to_owned();
    let ys = design.ys();
    // Expand ||ys - b1 x1 - b2 x2||^2 so each cell costs a few flops.
    let yy = ys.dot(&ys);
    let x1y = x1.dot(&ys);
    let x2y = x2.dot(&ys);
    let x11 = x1.dot(&x1);
    let x22 = x2.dot(&x2);
    let x12 = x1.dot(&x2);
    let mut sse = Array2::zeros((resolution, resolution));
    for (i, &v1) in b1.iter().enumerate() {
        for (j, &v2) in b2.iter().enumerate() {
            sse[[i, j]] = yy - 2.0 * (v1 * x1y + v2 * x2y)
                + v1 * v1 * x11
                + v2 * v2 * x22
                + 2.0 * v1 * v2 * x12;
        }
    }
    let gram = ndarray::array![[x11, x12], [x12, x22]];
    let rhs = ndarray::array![x1y, x2y];
    let ls = solve_spd(gram.view(), rhs.view())?;
    Ok(ContourGrid {
        b1,
        b2,
        penalty: None,
        params: None,
        sse: Some(sse),
        least_squares: Some([ls[0], ls[1]]),
    })
}
