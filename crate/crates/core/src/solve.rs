//! Shared least-squares solver.
//!
//! All regressions in the crate go through [`lstsq`]: a rank-revealing
//! SVD solve returning the minimum-norm solution. Rank-deficient systems
//! (constant or duplicated columns) are handled without ever raising a
//! singularity error, which is what the encoder and trend fits rely on.

use nalgebra::{DMatrix, DVector};

/// Minimum-norm least-squares solution of `A x = b` with optional ridge.
///
/// `rows` holds the design matrix row by row, each row of length `cols`.
/// With `ridge > 0` the system is augmented with `sqrt(ridge) * I`, giving
/// the classical Tikhonov solution.
pub fn lstsq(rows: &[Vec<f64>], b: &[f64], cols: usize, ridge: f64) -> Vec<f64> {
    debug_assert_eq!(rows.len(), b.len());
    let extra = if ridge > 0.0 { cols } else { 0 };
    let n = rows.len() + extra;
    let mut a = DMatrix::zeros(n, cols);
    let mut rhs = DVector::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), cols);
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
        rhs[i] = b[i];
    }
    if ridge > 0.0 {
        let s = ridge.sqrt();
        for j in 0..cols {
            a[(rows.len() + j, j)] = s;
        }
    }
    let svd = a.svd(true, true);
    // Cutoff mirrors the conventional machine-epsilon * max-dimension rule.
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = smax * f64::EPSILON * (n.max(cols) as f64);
    let sol = svd
        .solve(&rhs, eps)
        .expect("SVD solve cannot fail when both factors are requested");
    sol.iter().cloned().collect()
}

/// OLS line fit `y = slope * x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, 1.0]).collect();
    let c = lstsq(&rows, ys, 2, 0.0);
    (c[0], c[1])
}
