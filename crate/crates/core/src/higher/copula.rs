use super::isometry::{r_d_apply, s_dep_from_gamma};
use super::score::ScoreFunction;
use crate::error::{domain_err, Result};
use crate::lattice::{IndexSet, Support, SurvivalOracle};
use crate::scalar::Scalar;

/// Copula with density `f_θ = 1 + θ g` on `[0,1]^d`.
///
/// Every proper marginal is an independence copula, so the whole dependence
/// sits in the top-order part `S_{I_0}`.
#[derive(Clone, Debug)]
pub struct ScoreCopula<T> {
    score: ScoreFunction<T>,
    theta: T,
}

/// `f_θ = 1 + θ g` for `0 ≤ θ ≤ 1` with `θ |inf g| ≤ 1`.
pub fn copula_family<T: Scalar>(score: ScoreFunction<T>, theta: T) -> Result<ScoreCopula<T>> {
    if !(theta >= T::zero() && theta <= T::one()) {
        return Err(domain_err!("θ = {theta} outside [0,1]"));
    }
    let inf = score.inf();
    if theta * (-inf).max(T::zero()) > T::one() {
        return Err(domain_err!("θ = {theta} makes 1 + θg negative: θ·|inf g| = {} > 1 with inf g = {inf}", theta * inf.abs()));
    }
    Ok(ScoreCopula { score, theta })
}

impl<T: Scalar> ScoreCopula<T> {
    pub fn score(&self) -> &ScoreFunction<T> {
        &self.score
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.score.dim()
    }

    pub fn top(&self) -> IndexSet {
        IndexSet::full(self.dim()).expect("score dimension validated")
    }

    pub fn density(&self, x: &[T]) -> Result<T> {
        Ok(T::one() + self.theta * self.score.try_eval(x)?)
    }

    /// `S_θ(x) = ∏(1-x_i) + θ ∫_{[x,1]} g dP_0^d`.
    pub fn survival_at(&self, x: &[T]) -> Result<T> {
        let ind = x.iter().fold(T::one(), |a, &xk| a * (T::one() - xk));
        Ok(ind + self.theta * self.score.tail_integral(x)?)
    }

    /// `S_{I_0,θ}(x) = 1 + θ ∫_{[x,1]} g dP_0^d / ∏(1-x_i)`.
    pub fn dependence_part(&self, x: &[T]) -> Result<T> {
        let ind = x.iter().fold(T::one(), |a, &xk| a * (T::one() - xk));
        Ok(T::one() + self.theta * self.score.tail_integral(x)? / ind)
    }

    /// `∫_0^1 f_θ dx_axis` at the other coordinates of `x`; identically 1.
    pub fn axis_integral(&self, axis: usize, x: &[T]) -> Result<T> {
        Ok(T::one() + self.theta * self.score.axis_integral(axis, x)?)
    }

    /// `γ = θ R_d(g)`.
    pub fn gamma(&self, x: &[T]) -> Result<T> {
        Ok(self.theta * r_d_apply(&self.score, x)?)
    }

    /// `[log S_{I_0,θ}(x) - (-1)^d θ ∫_{[0,x]} R_d(g) dΛ_0^d] / θ`.
    pub fn first_order_remainder(&self, x: &[T]) -> Result<T> {
        if self.theta == T::zero() {
            return Err(domain_err!("remainder needs θ > 0"));
        }
        let lin = s_dep_from_gamma(&self.score, x)? - T::one();
        Ok((self.dependence_part(x)?.ln() - self.theta * lin) / self.theta)
    }
}

impl<T: Scalar> SurvivalOracle<T> for ScoreCopula<T> {
    fn dim(&self) -> usize {
        self.score.dim()
    }

    fn support(&self) -> Support {
        Support::UnitCube
    }

    fn survival(&self, x: &[T]) -> T {
        self.survival_at(x).unwrap_or(T::nan())
    }
}
