//! Positive-semidefinite Cholesky with a bounded jitter fallback.
//!
//! Covariance matrices built from kernels are often singular (bridge
//! endpoints, duplicated times), so a plain Cholesky with strictly positive
//! pivots can fail on valid input. The policy here: try the plain
//! factorization; on failure inspect the spectrum, reject matrices that are
//! genuinely indefinite, and otherwise retry once with a scale-aware jitter
//! on the diagonal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Asymmetry tolerance for inputs.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// A matrix is indefinite when some eigenvalue falls below `-INDEFINITE_TOL * trace`.
pub const INDEFINITE_TOL: f64 = 1e-8;
/// Jitter applied on retry is `JITTER_SCALE * trace / n`.
pub const JITTER_SCALE: f64 = 1e-10;

/// Result of [`chol_psd`]: lower factor and the jitter that was applied
/// (zero when the plain factorization succeeded).
#[derive(Debug, Clone)]
pub struct CholPsd {
    pub l: DMatrix<f64>,
    pub jitter: f64,
}

fn plain_cholesky(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / root;
        }
    }
    Some(l)
}

/// Factor a symmetric positive-semidefinite matrix as `L Lᵀ = A + jitter I`.
///
/// Fails with `NotPositiveSemidefinite` when the spectrum dips below
/// `-INDEFINITE_TOL * trace`, and with `InvalidArgument` when the input is
/// not symmetric within [`SYMMETRY_TOL`].
pub fn chol_psd(a: &DMatrix<f64>) -> Result<CholPsd> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("matrix", format!("expected square, got {}x{}", n, a.ncols())));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::invalid(
                    "matrix",
                    format!("asymmetric at ({i},{j}): {} vs {}", a[(i, j)], a[(j, i)]),
                ));
            }
        }
    }
    if n == 0 {
        return Ok(CholPsd { l: DMatrix::zeros(0, 0), jitter: 0.0 });
    }
    if a.iter().all(|&x| x == 0.0) {
        return Ok(CholPsd { l: DMatrix::zeros(n, n), jitter: 0.0 });
    }

    if let Some(l) = plain_cholesky(a) {
        return Ok(CholPsd { l, jitter: 0.0 });
    }

    let trace = a.trace();
    let eigenvalues = a.clone().symmetric_eigenvalues();
    let min_eig = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -INDEFINITE_TOL * trace {
        return Err(Error::NotPositiveSemidefinite(format!(
            "eigenvalue {min_eig:.3e} below -{INDEFINITE_TOL:e} * trace ({trace:.3e})"
        )));
    }

    let jitter = JITTER_SCALE * trace / n as f64;
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] += jitter;
    }
    match plain_cholesky(&shifted) {
        Some(l) => Ok(CholPsd { l, jitter }),
        None => Err(Error::NotPositiveSemidefinite(format!(
            "factorization failed even with jitter {jitter:.3e}"
        ))),
    }
}
