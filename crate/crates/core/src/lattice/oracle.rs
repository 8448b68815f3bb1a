use super::index_set::IndexSet;
use crate::scalar::Scalar;

/// Where a survival function lives. The lower boundary is `0` on every axis in both cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// `[0, 1)^d`, survival functions of copula-scale vectors.
    UnitCube,
    /// `[0, ∞)^d`, lifetimes.
    Orthant,
}

impl Support {
    /// Whether `x` is an admissible coordinate.
    pub fn admits<T: Scalar>(self, x: T) -> bool {
        match self {
            Support::UnitCube => x >= T::zero() && x < T::one(),
            Support::Orthant => x >= T::zero() && x.is_finite(),
        }
    }
}

/// A `d`-dimensional survival function `S(x) = P(X > x)`.
///
/// Marginals `S^J` are obtained by putting the coordinates outside `J` at the
/// lower boundary `0`.
pub trait SurvivalOracle<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn support(&self) -> Support;

    fn survival(&self, x: &[T]) -> T;

    fn log_survival(&self, x: &[T]) -> T {
        self.survival(x).ln()
    }

    /// `log S^J(x_J)` where `x_J` lists the coordinates of `J` in increasing axis order.
    fn marginal_log_survival(&self, j: IndexSet, x_j: &[T]) -> T {
        let full = embed(self.dim(), j, x_j);
        self.log_survival(&full)
    }

    fn marginal_survival(&self, j: IndexSet, x_j: &[T]) -> T {
        self.marginal_log_survival(j, x_j).exp()
    }
}

/// Places `x_j` at the axes of `j`, zeros elsewhere.
pub fn embed<T: Scalar>(dim: usize, j: IndexSet, x_j: &[T]) -> Vec<T> {
    let mut full = vec![T::zero(); dim];
    for (k, axis) in j.axes().enumerate() {
        full[axis] = x_j[k];
    }
    full
}

impl<T: Scalar, O: SurvivalOracle<T> + ?Sized> SurvivalOracle<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn survival(&self, x: &[T]) -> T {
        (**self).survival(x)
    }
    fn log_survival(&self, x: &[T]) -> T {
        (**self).log_survival(x)
    }
    fn marginal_log_survival(&self, j: IndexSet, x_j: &[T]) -> T {
        (**self).marginal_log_survival(j, x_j)
    }
}

/// Survival function given by a closure over the full coordinate vector.
pub struct FnOracle<F> {
    dim: usize,
    support: Support,
    f: F,
}

impl<F> FnOracle<F> {
    pub fn new(dim: usize, support: Support, f: F) -> Self {
        Self { dim, support, f }
    }
}

impl<T: Scalar, F: Fn(&[T]) -> T + Sync> SurvivalOracle<T> for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self) -> Support {
        self.support
    }
    fn survival(&self, x: &[T]) -> T {
        (self.f)(x)
    }
}

/// Closure given on the log scale; avoids underflow for small survival values.
pub struct LogFnOracle<F> {
    dim: usize,
    support: Support,
    log_f: F,
}

impl<F> LogFnOracle<F> {
    pub fn new(dim: usize, support: Support, log_f: F) -> Self {
        Self { dim, support, log_f }
    }
}

impl<T: Scalar, F: Fn(&[T]) -> T + Sync> SurvivalOracle<T> for LogFnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self) -> Support {
        self.support
    }
    fn survival(&self, x: &[T]) -> T {
        (self.log_f)(x).exp()
    }
    fn log_survival(&self, x: &[T]) -> T {
        (self.log_f)(x)
    }
}
