use crate::error::{domain_err, structural_err, Result};
use crate::lattice::{linspace, Shape};
use crate::quad::simpson_weights;
use crate::scalar::{neumaier_sum, Scalar};

/// Tolerance on the total mass and on each axis integral of `f - 1`.
pub const MASS_TOL: f64 = 1e-6;

/// Tolerance on `min f ≥ 0`.
pub const NEG_TOL: f64 = 1e-9;

/// Density values at the uniform `n^d` tensor grid over `[0,1]^d`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid<T> {
    pub dim: usize,
    pub nodes: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> DensityGrid<T> {
    pub fn tabulate(dim: usize, nodes: usize, f: impl Fn(&[T]) -> T) -> Self {
        let xs = linspace(T::zero(), T::one(), nodes);
        let shape = Shape::new(vec![nodes; dim]);
        let mut idx = vec![0; dim];
        let mut x = vec![T::zero(); dim];
        let values = (0..shape.len())
            .map(|flat| {
                shape.unflat(flat, &mut idx);
                for (xk, &i) in x.iter_mut().zip(&idx) {
                    *xk = xs[i];
                }
                f(&x)
            })
            .collect();
        Self { dim, nodes, values }
    }
}

/// Outcome of the zero-marginal and lower-bound checks on `g = f - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionVerdict<T> {
    pub mass: T,
    /// Largest `|∫_0^1 (f-1) dx_i|` over axes and fibres.
    pub max_axis_integral: T,
    pub min_density: T,
    pub zero_marginal: bool,
    pub bounded_below: bool,
}

impl<T: Scalar> ConditionVerdict<T> {
    /// `g ≥ -1` and `g` has vanishing axis integrals.
    pub fn holds(&self) -> bool {
        self.zero_marginal && self.bounded_below
    }

    /// Equivalent statement: `f` is a copula density whose proper
    /// marginals are independence copulas.
    pub fn proper_marginals_independent(&self) -> bool {
        self.holds()
    }
}

/// Checks a tabulated density on `[0,1]^d` for vanishing axis integrals of
/// `f - 1` and for `f ≥ 0`, by Simpson quadrature along each axis.
pub fn check_conditions<T: Scalar>(grid: &DensityGrid<T>) -> Result<ConditionVerdict<T>> {
    let (d, n) = (grid.dim, grid.nodes);
    if d == 0 || n < 3 || n % 2 == 0 {
        return Err(structural_err!("density grid needs d ≥ 1 and an odd node count ≥ 3, got d={d}, n={n}"));
    }
    let shape = Shape::new(vec![n; d]);
    if grid.values.len() != shape.len() {
        return Err(structural_err!("density grid has {} values, expected {}", grid.values.len(), shape.len()));
    }
    if let Some(v) = grid.values.iter().find(|v| !v.is_finite()) {
        return Err(domain_err!("density value {v} is not finite"));
    }
    let w = simpson_weights(n - 1, T::one() / T::from_usize_lossy(n - 1))?;
    let mut idx = vec![0; d];
    let mass = neumaier_sum((0..shape.len()).map(|flat| {
        shape.unflat(flat, &mut idx);
        idx.iter().fold(grid.values[flat], |acc, &i| acc * w[i])
    }));
    if (mass - T::one()).abs() > T::lit(MASS_TOL) {
        return Err(domain_err!("input is not a density: total mass {mass}"));
    }
    let mut worst = T::zero();
    for axis in 0..d {
        let stride: usize = shape.dims()[axis + 1..].iter().product();
        for flat in 0..shape.len() {
            shape.unflat(flat, &mut idx);
            if idx[axis] != 0 {
                continue;
            }
            let integral = neumaier_sum((0..n).map(|i| w[i] * (grid.values[flat + i * stride] - T::one())));
            worst = worst.max(integral.abs());
        }
    }
    let min_density = grid.values.iter().copied().fold(T::infinity(), T::min);
    Ok(ConditionVerdict {
        mass,
        max_axis_integral: worst,
        min_density,
        zero_marginal: worst <= T::lit(MASS_TOL),
        bounded_below: min_density >= -T::lit(NEG_TOL),
    })
}
