use super::index_set::IndexSet;
use super::oracle::{Support, SurvivalOracle};
use crate::error::{domain_err, structural_err, Result};
use crate::scalar::{neumaier_sum, sign_pow, Scalar};

/// Largest number of axes a tensor-product stencil is built over.
pub const MAX_STENCIL_AXES: usize = 4;

/// Cumulative hazard `Λ_i(t) = -log S_i(t)` of a univariate survival function.
pub fn univariate_hazard<T: Scalar>(s_i: impl Fn(T) -> T, t: T) -> Result<T> {
    let s = s_i(t);
    if s > T::zero() && s.is_finite() {
        Ok(-s.ln())
    } else {
        Err(domain_err!("survival value {s} is not positive at t={t}"))
    }
}

/// Default relative step for a mixed partial over `axes` coordinates.
///
/// `1e-3` for one or two axes in double precision. Higher orders amplify
/// rounding by `h^{-axes}`, so the step grows towards the balance point
/// `eps^{1/(axes+4)}` of the Richardson-corrected truncation error.
pub fn default_step<T: Scalar>(axes: usize) -> T {
    let balance = T::epsilon().powf(T::one() / T::from_usize_lossy(axes + 4));
    if axes <= 2 {
        T::lit(1e-3).max(balance * T::lit(0.25))
    } else {
        balance
    }
}

/// Local dependence hazard `λ_I(t_I) = (-1)^{|I|} ∂_I log S(t_I, 0)`.
///
/// `t_i` lists the coordinates of `I` in increasing axis order. Central
/// differences with step `h·max(1,|t_i|)` are used per axis, one-sided ones
/// where the central stencil would cross the support boundary, followed by
/// one Richardson level combining `h` and `h/2`.
pub fn mixed_partial_log<T: Scalar, O: SurvivalOracle<T> + ?Sized>(
    oracle: &O,
    i: IndexSet,
    t_i: &[T],
    h: Option<T>,
) -> Result<T> {
    i.ensure_nonempty()?;
    if t_i.len() != i.len() {
        return Err(structural_err!("point has {} coordinates, subset {i} needs {}", t_i.len(), i.len()));
    }
    let f = |x: &[T]| oracle.marginal_log_survival(i, x);
    let d = tensor_derivative(&f, oracle.support(), t_i, h.unwrap_or_else(|| default_step(i.len())))?;
    Ok(sign_pow::<T>(i.len()) * d)
}

/// Mixed partial `∂_1…∂_n f(t)` over every coordinate of `t`, no sign applied.
///
/// `f` is evaluated only at points admitted by `support`; a non-finite
/// value inside the stencil is a domain error.
pub fn mixed_partial<T: Scalar>(f: &dyn Fn(&[T]) -> T, support: Support, t: &[T], h: Option<T>) -> Result<T> {
    tensor_derivative(f, support, t, h.unwrap_or_else(|| default_step(t.len())))
}

#[derive(Clone, Copy)]
enum Stencil {
    Central,
    Forward,
    Backward,
}

impl Stencil {
    /// Offsets in units of the step, with weights in units of `1/step`.
    fn taps<T: Scalar>(self) -> Vec<(T, T)> {
        let (half, one, two) = (T::lit(0.5), T::one(), T::lit(2.0));
        match self {
            Stencil::Central => vec![(-one, -half), (one, half)],
            Stencil::Forward => vec![(T::zero(), -T::lit(1.5)), (one, two), (two, -half)],
            Stencil::Backward => vec![(T::zero(), T::lit(1.5)), (-one, -two), (-two, half)],
        }
    }
}

fn choose_stencil<T: Scalar>(support: Support, t: T, step: T) -> Result<Stencil> {
    if !support.admits(t) {
        return Err(domain_err!("stencil centre {t} lies outside the support"));
    }
    let two = T::lit(2.0);
    if support.admits(t - step) && support.admits(t + step) {
        Ok(Stencil::Central)
    } else if support.admits(t + two * step) {
        Ok(Stencil::Forward)
    } else if support.admits(t - two * step) {
        Ok(Stencil::Backward)
    } else {
        Err(domain_err!("finite-difference stencil of step {step} at {t} leaves the support"))
    }
}

fn tensor_derivative<T: Scalar>(f: &dyn Fn(&[T]) -> T, support: Support, t: &[T], h: T) -> Result<T> {
    let n = t.len();
    if n == 0 || n > MAX_STENCIL_AXES {
        return Err(structural_err!("mixed partials are supported over 1..={MAX_STENCIL_AXES} axes, got {n}"));
    }
    let steps: Vec<T> = t.iter().map(|&ti| h * T::one().max(ti.abs())).collect();
    let stencils = t.iter().zip(&steps).map(|(&ti, &s)| choose_stencil(support, ti, s)).collect::<Result<Vec<_>>>()?;
    let coarse = stencil_sum(f, t, &steps, &stencils)?;
    let half: Vec<T> = steps.iter().map(|&s| s * T::lit(0.5)).collect();
    let fine = stencil_sum(f, t, &half, &stencils)?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

fn stencil_sum<T: Scalar>(f: &dyn Fn(&[T]) -> T, t: &[T], steps: &[T], stencils: &[Stencil]) -> Result<T> {
    let taps: Vec<Vec<(T, T)>> = stencils.iter().map(|s| s.taps()).collect();
    let total: usize = taps.iter().map(Vec::len).product();
    let mut x = t.to_vec();
    let mut terms = Vec::with_capacity(total);
    for mut flat in 0..total {
        let mut w = T::one();
        for (k, axis_taps) in taps.iter().enumerate() {
            let (off, wk) = axis_taps[flat % axis_taps.len()];
            flat /= axis_taps.len();
            x[k] = t[k] + off * steps[k];
            w = w * wk / steps[k];
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(domain_err!("function is not finite at stencil node {x:?} (survival must be positive)"));
        }
        terms.push(w * v);
    }
    Ok(neumaier_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::oracle::FnOracle;

    #[test]
    fn hazard_examples() {
        assert!((univariate_hazard(|t: f64| (-t).exp(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        let v = univariate_hazard(|t: f64| 1.0 / (1.0 + t), 1.0).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(univariate_hazard(|t: f64| 1.0 / (1.0 + t), 0.0).unwrap(), 0.0);
        assert!(univariate_hazard(|_t: f64| 0.0, 2.0).unwrap_err().to_string().contains("t=2"));
    }

    #[test]
    fn clayton_pair_hazard_near_origin() {
        let o = FnOracle::new(2, Support::Orthant, |x: &[f64]| 1.0 / (1.0 + x[0] + x[1]));
        let i = IndexSet::full(2).unwrap();
        let v = mixed_partial_log(&o, i, &[1e-6, 1e-6], None).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
        let v = mixed_partial_log(&o, i, &[0.7, 2.0], None).unwrap();
        assert!((v - 1.0 / 3.7f64.powi(2)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn separable_log_gives_zero() {
        let o = FnOracle::new(3, Support::Orthant, |x: &[f64]| {
            (1.0 + x[0]).recip() * (-x[1] * x[1]).exp() * (1.0 + 2.0 * x[2]).powf(-0.5)
        });
        let i = IndexSet::full(3).unwrap();
        assert!(mixed_partial_log(&o, i, &[0.3, 0.8, 1.5], None).unwrap().abs() < 1e-8);
    }

    #[test]
    fn unit_cube_upper_edge_uses_backward_stencil() {
        let o = FnOracle::new(1, Support::UnitCube, |x: &[f64]| (-x[0] * x[0]).exp());
        let i = IndexSet::full(1).unwrap();
        let v = mixed_partial_log(&o, i, &[0.9995], None).unwrap();
        assert!((v - 1.999).abs() < 1e-9, "{v}");
        assert!(mixed_partial_log(&o, i, &[1.0], None).is_err());
    }

    #[test]
    fn nonpositive_in_stencil_is_domain_error() {
        let o = FnOracle::new(1, Support::Orthant, |x: &[f64]| if x[0] > 1.0 { 0.0 } else { 1.0 });
        let i = IndexSet::full(1).unwrap();
        assert!(matches!(mixed_partial_log(&o, i, &[1.0], None), Err(crate::error::Error::Domain(_))));
    }

    #[test]
    fn density_of_clayton() {
        let f = |x: &[f64]| 1.0 / (1.0 + x[0] + x[1]);
        let v = mixed_partial(&f, Support::Orthant, &[1.0, 1.0], None).unwrap();
        assert!((v - 2.0 / 27.0).abs() < 1e-9);
    }
}
