//! Minimal dense linear algebra used internally: Cholesky factorization of
//! symmetric positive definite matrices and a solver built on it. Kept
//! in-crate because these are the only two dense routines the library needs
//! and they must behave identically across platforms.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor L with A = L L^T. Fails when `a` is not
/// positive definite (within floating-point tolerance at the pivot).
pub(crate) fn cholesky_lower(a: ArrayView2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::NotPositiveDefinite);
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Solve A x = b for symmetric positive definite A via Cholesky.
pub(crate) fn solve_spd(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but right-hand side has {} entries",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let l = cholesky_lower(a)?;
    // Forward substitution: L z = b.
    let mut z = b.to_owned();
    for i in 0..n {
        for k in 0..i {
            let lz = l[[i, k]] * z[k];
            z[i] -= lz;
        }
        z[i] /= l[[i, i]];
    }
    // Back substitution: L^T x = z.
    let mut x = z;
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lx = l[[k, i]] * x[k];
            x[i] -= lx;
        }
        x[i] /= l[[i, i]];
    }
    Ok(x)
}
