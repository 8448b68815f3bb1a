//! Quadrature rules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{param_err, Result};
use crate::scalar::{neumaier_sum, Scalar};

/// Gauss–Hermite rule for the standard normal law: `E f(ξ) ≈ Σ w_k f(x_k)`.
///
/// Nodes and weights come from the eigen-decomposition of the Jacobi matrix
/// of the probabilists' Hermite polynomials; the weights sum to one.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 200 {
        return Err(param_err!("Gauss–Hermite order {n} outside 1..=200"));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize to remove eigen-solver noise
    for k in 0..n / 2 {
        let (a, b) = (pairs[k], pairs[n - 1 - k]);
        let x = 0.5 * (b.0 - a.0);
        let w = 0.5 * (a.1 + b.1);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok((pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1 / total).collect()))
}

/// Composite Simpson weights for `intervals` (even) equal panels of width `h`.
pub fn simpson_weights<T: Scalar>(intervals: usize, h: T) -> Result<Vec<T>> {
    if intervals == 0 || !intervals.is_multiple_of(2) {
        return Err(param_err!("Simpson needs an even positive number of intervals, got {intervals}"));
    }
    let third = h / T::lit(3.0);
    Ok((0..=intervals)
        .map(|k| {
            let c = if k == 0 || k == intervals {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            third * T::lit(c)
        })
        .collect())
}

/// Composite Simpson rule for `∫_a^b f` with `intervals` (even) panels.
pub fn simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, intervals: usize) -> Result<T> {
    let h = (b - a) / T::from_usize_lossy(intervals);
    let w = simpson_weights(intervals, h)?;
    Ok(neumaier_sum(w.iter().enumerate().map(|(k, &wk)| {
        let x = if k == intervals { b } else { a + h * T::from_usize_lossy(k) };
        wk * f(x)
    })))
}
