use crate::error::{domain_err, structural_err, Result};
use crate::scalar::Scalar;

/// Default clearance from the upper edge of the unit cube.
pub const DEFAULT_DELTA: f64 = 1e-3;

/// Region a grid discretizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridDomain<T> {
    /// `[0, 1 - delta]` on every axis.
    UnitCube { delta: T },
    /// `[0, upper]` on every axis.
    Orthant { upper: T },
}

/// Per-axis evaluation points for a survival function.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<T> {
    axes: Vec<Vec<T>>,
    domain: GridDomain<T>,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(axes: Vec<Vec<T>>, domain: GridDomain<T>) -> Result<Self> {
        if axes.is_empty() {
            return Err(structural_err!("grid needs at least one axis"));
        }
        let (lo, hi) = match domain {
            GridDomain::UnitCube { delta } => {
                if !(delta > T::zero() && delta < T::one()) {
                    return Err(domain_err!("unit-cube clearance delta={delta} outside (0,1)"));
                }
                (T::zero(), T::one() - delta)
            }
            GridDomain::Orthant { upper } => {
                if !(upper > T::zero()) || !upper.is_finite() {
                    return Err(domain_err!("orthant bound {upper} must be positive and finite"));
                }
                (T::zero(), upper)
            }
        };
        for (k, axis) in axes.iter().enumerate() {
            if axis.len() < 2 {
                return Err(structural_err!("axis {} has {} points, need at least 2", k + 1, axis.len()));
            }
            if axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(structural_err!("axis {} is not strictly increasing", k + 1));
            }
            if let Some(p) = axis.iter().find(|&&p| p < lo || p > hi) {
                return Err(domain_err!("axis {} point {p} outside [{lo}, {hi}]", k + 1));
            }
        }
        Ok(Self { axes, domain })
    }

    /// `n` equally spaced points on `[lo, hi]` along each of `dim` axes.
    pub fn uniform(dim: usize, lo: T, hi: T, n: usize, domain: GridDomain<T>) -> Result<Self> {
        Self::new(vec![linspace(lo, hi, n); dim], domain)
    }

    /// `[0, 1 - delta]` with `n` points per axis.
    pub fn unit_cube(dim: usize, n: usize, delta: T) -> Result<Self> {
        Self::uniform(dim, T::zero(), T::one() - delta, n, GridDomain::UnitCube { delta })
    }

    /// `[0, upper]` with `n` points per axis.
    pub fn orthant(dim: usize, n: usize, upper: T) -> Result<Self> {
        Self::uniform(dim, T::zero(), upper, n, GridDomain::Orthant { upper })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &[T] {
        &self.axes[k]
    }

    pub fn axes(&self) -> &[Vec<T>] {
        &self.axes
    }

    pub fn domain(&self) -> GridDomain<T> {
        self.domain
    }

    /// Grid with the same `domain` and the selected axes only.
    pub fn restrict(&self, axes: &[usize]) -> Self {
        Self { axes: axes.iter().map(|&a| self.axes[a].clone()).collect(), domain: self.domain }
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive. `n == 1` gives `[lo]`.
pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = T::from_usize_lossy(n - 1);
            (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * T::from_usize_lossy(k) / last }).collect()
        }
    }
}

/// Row-major shape over a subset of grid axes; the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn unflat(&self, mut flat: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
    }
}
