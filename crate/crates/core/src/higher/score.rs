use std::fmt;
use std::sync::Arc;

use crate::error::{domain_err, param_err, structural_err, Result};
use crate::lattice::{linspace, Shape, MAX_DIM};
use crate::quad::simpson;
use crate::scalar::{neumaier_sum, Scalar};

/// Largest accepted deviation of a component mean from zero.
pub const MEAN_TOL: f64 = 1e-10;

/// Resolution of the tensor grid used to bound `inf g` for multi-term scores.
pub const INF_GRID: usize = 201;

/// Relative margin applied to grid-estimated infima.
pub const INF_MARGIN: f64 = 0.05;

const SIMPSON_INTERVALS: usize = 2000;

type ComponentFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Zero-mean univariate function on `(0,1)`.
#[derive(Clone)]
pub enum Component<T> {
    /// Shifted Legendre polynomial `P_k(2x-1)` of odd degree `k`.
    LegendreOdd { degree: usize },
    /// Piecewise linear interpolant of values at uniform nodes of `[0,1]`.
    Grid { values: Vec<T> },
    /// Analytic function; tail integrals by composite Simpson quadrature.
    Analytic { name: String, f: ComponentFn<T> },
}

impl<T> fmt::Debug for Component<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::LegendreOdd { degree } => write!(f, "LegendreOdd({degree})"),
            Component::Grid { values } => write!(f, "Grid({} nodes)", values.len()),
            Component::Analytic { name, .. } => write!(f, "Analytic({name})"),
        }
    }
}

/// `P_k(z)` by the three-term recurrence, together with `P_{k-1}(z)`.
fn legendre_pair<T: Scalar>(k: usize, z: T) -> (T, T) {
    let (mut prev, mut cur) = (T::one(), z);
    if k == 0 {
        return (T::one(), T::zero());
    }
    for n in 1..k {
        let nf = T::from_usize_lossy(n);
        let next = ((nf + nf + T::one()) * z * cur - nf * prev) / (nf + T::one());
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

impl<T: Scalar> Component<T> {
    pub fn legendre_odd(degree: usize) -> Result<Self> {
        if degree.is_multiple_of(2) {
            return Err(param_err!("legendre-odd needs an odd degree, got {degree}"));
        }
        Ok(Component::LegendreOdd { degree })
    }

    /// Values at `n ≥ 2` uniform nodes of `[0,1]` whose interpolant has mean zero.
    pub fn grid(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(param_err!("grid component needs at least 2 nodes"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(param_err!("grid component has non-finite values"));
        }
        let c = Component::Grid { values };
        c.check_mean()?;
        Ok(c)
    }

    pub fn analytic(name: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        let c = Component::Analytic { name: name.into(), f: Arc::new(f) };
        c.check_mean()?;
        Ok(c)
    }

    fn check_mean(&self) -> Result<()> {
        let m = self.tail_integral(T::zero());
        if m.abs() > T::lit(MEAN_TOL) || !m.is_finite() {
            return Err(domain_err!("component {self:?} has mean {m}, expected 0 within {MEAN_TOL}"));
        }
        Ok(())
    }

    /// `g(x)` for `x ∈ [0,1]`.
    pub fn eval(&self, x: T) -> T {
        match self {
            Component::LegendreOdd { degree } => legendre_pair(*degree, x + x - T::one()).0,
            Component::Grid { values } => {
                let n = values.len() - 1;
                let pos = x.max(T::zero()).min(T::one()) * T::from_usize_lossy(n);
                let k = pos.floor().to_usize().unwrap_or(0).min(n - 1);
                let w = pos - T::from_usize_lossy(k);
                values[k] + w * (values[k + 1] - values[k])
            }
            Component::Analytic { f, .. } => f(x),
        }
    }

    /// `∫_x^1 g(u) du`.
    pub fn tail_integral(&self, x: T) -> T {
        match self {
            Component::LegendreOdd { degree } => {
                let k = *degree;
                let z = x + x - T::one();
                let pk1 = legendre_pair(k + 1, z).0;
                let pkm1 = legendre_pair(k, z).1;
                -(pk1 - pkm1) / (T::lit(2.0) * T::from_usize_lossy(2 * k + 1))
            }
            Component::Grid { values } => {
                let n = values.len() - 1;
                let h = T::one() / T::from_usize_lossy(n);
                let pos = x.max(T::zero()).min(T::one()) * T::from_usize_lossy(n);
                let k = pos.floor().to_usize().unwrap_or(0).min(n - 1);
                let gx = self.eval(x);
                let x_next = T::from_usize_lossy(k + 1) * h;
                let first = (x_next - x) * (gx + values[k + 1]) / T::lit(2.0);
                let rest = neumaier_sum((k + 1..n).map(|j| h * (values[j] + values[j + 1]) / T::lit(2.0)));
                first + rest
            }
            Component::Analytic { f, .. } => {
                if x >= T::one() {
                    T::zero()
                } else {
                    simpson(|u| f(u), x, T::one(), SIMPSON_INTERVALS).expect("even interval count")
                }
            }
        }
    }

    /// `(min g, max g)` over `[0,1]`, exact for Legendre and grid components.
    pub fn range(&self) -> (T, T) {
        match self {
            Component::LegendreOdd { .. } => (-T::one(), T::one()),
            Component::Grid { values } => {
                values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            }
            Component::Analytic { f, .. } => linspace(T::zero(), T::one(), 2001)
                .into_iter()
                .map(|x| f(x))
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v))),
        }
    }

    fn range_is_exact(&self) -> bool {
        !matches!(self, Component::Analytic { .. })
    }
}

/// One tensor-product term `coef · ∏_k g_k(x_k)`.
#[derive(Clone, Debug)]
pub struct ScoreTerm<T> {
    pub coef: T,
    pub factors: Vec<Component<T>>,
}

/// Finite sum of tensor-product terms, each factor of zero mean.
#[derive(Clone, Debug)]
pub struct ScoreFunction<T> {
    dim: usize,
    terms: Vec<ScoreTerm<T>>,
    inf: T,
}

impl<T: Scalar> ScoreFunction<T> {
    pub fn new(terms: Vec<ScoreTerm<T>>) -> Result<Self> {
        let dim = terms.first().map(|t| t.factors.len()).ok_or_else(|| param_err!("score needs at least one term"))?;
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(structural_err!("score dimension {dim} outside 1..={MAX_DIM}"));
        }
        if terms.iter().any(|t| t.factors.len() != dim) {
            return Err(structural_err!("all score terms need {dim} factors"));
        }
        if terms.iter().any(|t| !t.coef.is_finite()) {
            return Err(param_err!("score coefficients must be finite"));
        }
        let mut s = Self { dim, terms, inf: T::zero() };
        s.inf = s.compute_inf();
        Ok(s)
    }

    /// Single term `∏_k (2x_k - 1)` scaled by `coef`.
    pub fn product_linear(dim: usize, coef: T) -> Result<Self> {
        let factors = (0..dim).map(|_| Component::legendre_odd(1)).collect::<Result<Vec<_>>>()?;
        Self::new(vec![ScoreTerm { coef, factors }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[ScoreTerm<T>] {
        &self.terms
    }

    /// Lower bound on `inf g` over `[0,1]^d`.
    ///
    /// Exact from the factor ranges for a single term with exact ranges;
    /// otherwise the minimum over an `INF_GRID^d` tensor grid, enlarged by
    /// `INF_MARGIN`.
    pub fn inf(&self) -> T {
        self.inf
    }

    fn compute_inf(&self) -> T {
        if let [term] = self.terms.as_slice() {
            if term.factors.iter().all(Component::range_is_exact) {
                let mut lo = term.coef;
                let mut hi = term.coef;
                for f in &term.factors {
                    let (a, b) = f.range();
                    let c = [lo * a, lo * b, hi * a, hi * b];
                    lo = c.iter().copied().fold(T::infinity(), T::min);
                    hi = c.iter().copied().fold(T::neg_infinity(), T::max);
                }
                return lo;
            }
        }
        let nodes = linspace(T::zero(), T::one(), INF_GRID);
        let shape = Shape::new(vec![INF_GRID; self.dim]);
        let mut idx = vec![0; self.dim];
        let mut x = vec![T::zero(); self.dim];
        let mut lo = T::infinity();
        for flat in 0..shape.len() {
            shape.unflat(flat, &mut idx);
            for (xk, &i) in x.iter_mut().zip(&idx) {
                *xk = nodes[i];
            }
            lo = lo.min(self.eval(&x));
        }
        if lo < T::zero() {
            lo * (T::one() + T::lit(INF_MARGIN))
        } else {
            lo
        }
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(structural_err!("point has {} coordinates, score has {}", x.len(), self.dim));
        }
        Ok(())
    }

    /// `g(x)`.
    pub fn eval(&self, x: &[T]) -> T {
        neumaier_sum(
            self.terms.iter().map(|t| t.coef * t.factors.iter().zip(x).map(|(f, &xk)| f.eval(xk)).fold(T::one(), |a, b| a * b)),
        )
    }

    pub fn try_eval(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        Ok(self.eval(x))
    }

    /// `∫_{[x,1]} g dP_0^d`.
    pub fn tail_integral(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        Ok(neumaier_sum(
            self.terms
                .iter()
                .map(|t| t.coef * t.factors.iter().zip(x).map(|(f, &xk)| f.tail_integral(xk)).fold(T::one(), |a, b| a * b)),
        ))
    }

    /// `∫_0^1 g(x) dx_axis` at the other coordinates of `x`.
    pub fn axis_integral(&self, axis: usize, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        if axis >= self.dim {
            return Err(structural_err!("axis {} outside the score", axis + 1));
        }
        Ok(neumaier_sum(self.terms.iter().map(|t| {
            t.factors
                .iter()
                .enumerate()
                .fold(t.coef, |acc, (k, f)| acc * if k == axis { f.tail_integral(T::zero()) } else { f.eval(x[k]) })
        })))
    }
}
