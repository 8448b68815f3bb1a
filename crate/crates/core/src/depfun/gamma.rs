use std::fmt;

use rayon::prelude::*;

use super::closed::Gamma0Family;
use super::marginal::Marginal;
use crate::error::{capability_err, domain_err, param_err, structural_err, Error, Result};
use crate::lattice::{linspace, mixed_partial_log, IndexSet, Support, SurvivalOracle};

/// A survival function together with its marginal laws.
pub trait HazardModel: SurvivalOracle<f64> {
    fn label(&self) -> String;

    /// Law of the `axis`-th coordinate.
    fn marginal(&self, axis: usize) -> Marginal;

    /// Closed-form `γ_{0,I}` when known.
    fn closed_form_gamma0(&self, _i: IndexSet) -> Option<Gamma0Family<f64>> {
        None
    }

    /// Closed-form `λ_I(t_I)` when known.
    fn analytic_lambda(&self, _i: IndexSet, _t_i: &[f64]) -> Option<f64> {
        None
    }
}

/// `λ_I(t_I)`: closed form if the model has one, finite differences otherwise.
pub fn local_hazard<M: HazardModel + ?Sized>(model: &M, i: IndexSet, t_i: &[f64]) -> Result<f64> {
    i.ensure_nonempty()?;
    if let Some(v) = model.analytic_lambda(i, t_i) {
        return Ok(v);
    }
    mixed_partial_log(model, i, t_i, None)
}

/// How `γ_{0,I}` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GammaRoute {
    /// Closed-form catalog expression.
    ClosedForm,
    /// `λ_I / ∏ λ_i` at the marginal quantiles, with the model's own `λ_I`.
    Quotient,
    /// Remarginalize to unit exponential margins and take finite differences of `log S`.
    FdPipeline,
}

impl GammaRoute {
    pub fn tag(self) -> &'static str {
        match self {
            GammaRoute::ClosedForm => "closed-form",
            GammaRoute::Quotient => "quotient",
            GammaRoute::FdPipeline => "fd-pipeline",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "closed-form" => Ok(GammaRoute::ClosedForm),
            "quotient" => Ok(GammaRoute::Quotient),
            "fd-pipeline" => Ok(GammaRoute::FdPipeline),
            other => Err(param_err!("unknown route `{other}`")),
        }
    }

    /// Closed form when the model has one for `i`, the FD pipeline otherwise.
    pub fn preferred<M: HazardModel + ?Sized>(model: &M, i: IndexSet) -> Self {
        if model.closed_form_gamma0(i).is_some() {
            GammaRoute::ClosedForm
        } else {
            GammaRoute::FdPipeline
        }
    }
}

impl fmt::Display for GammaRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `γ_I(s_I) = λ_I(s_I) / ∏_{i∈I} λ_i(s_i)`.
pub fn gamma_i<M: HazardModel + ?Sized>(model: &M, i: IndexSet, s_i: &[f64]) -> Result<f64> {
    i.ensure_nonempty()?;
    if s_i.len() != i.len() {
        return Err(structural_err!("point has {} coordinates, subset {i} needs {}", s_i.len(), i.len()));
    }
    let mut denom = 1.0;
    for (axis, &s) in i.axes().zip(s_i) {
        let h = model.marginal(axis).hazard(s)?;
        if !(h > 0.0) || !h.is_finite() {
            return Err(domain_err!("marginal hazard λ_{}({s}) = {h} must be positive", axis + 1));
        }
        denom *= h;
    }
    Ok(local_hazard(model, i, s_i)? / denom)
}

fn check_levels(u: &[f64], delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(param_err!("δ = {delta} must lie in [0,1)"));
    }
    for &v in u {
        if !(v >= 0.0) {
            return Err(domain_err!("copula-scale level {v} is negative"));
        }
        if v >= 1.0 || (delta > 0.0 && v > 1.0 - delta) {
            return Err(domain_err!("copula-scale level {v} exceeds 1 - δ with δ = {delta}"));
        }
    }
    Ok(())
}

/// Unit exponential margins: `S^Y(y) = S(Λ_1^{-1}(y_1), …)`.
pub fn exponential_scale<M: HazardModel + ?Sized>(model: &M) -> Remarginalized<'_, M> {
    Remarginalized::new(model, vec![Marginal::Exponential { rate: 1.0 }; model.dim()])
}

/// `γ_{0,I}(u_I) = γ_I(F^{-1}(u_I))` by the given route.
pub fn gamma_0i<M: HazardModel + ?Sized>(model: &M, i: IndexSet, u_i: &[f64], delta: f64, route: GammaRoute) -> Result<f64> {
    i.ensure_nonempty()?;
    if u_i.len() != i.len() {
        return Err(structural_err!("point has {} coordinates, subset {i} needs {}", u_i.len(), i.len()));
    }
    check_levels(u_i, delta)?;
    match route {
        GammaRoute::ClosedForm => {
            let fam = model
                .closed_form_gamma0(i)
                .ok_or_else(|| capability_err!("model `{}` has no closed-form γ_0 for {i}", model.label()))?;
            fam.eval(u_i[0], u_i[1])
        }
        GammaRoute::Quotient => {
            let s: Result<Vec<f64>> = i.axes().zip(u_i).map(|(a, &u)| model.marginal(a).quantile(u)).collect();
            gamma_i(model, i, &s?)
        }
        GammaRoute::FdPipeline => {
            if u_i.iter().all(|&u| u == 0.0) {
                return Err(domain_err!("the FD pipeline does not evaluate γ_0 at the corner"));
            }
            let y: Vec<f64> = u_i.iter().map(|&u| -(-u).ln_1p()).collect();
            mixed_partial_log(&exponential_scale(model), i, &y, None)
        }
    }
}

/// `γ^{(Y)}_I(s) = γ_{0,I}(1 - e^{-s})`, the dependence function under unit exponential margins.
pub fn exp_margin_gamma<M: HazardModel + ?Sized>(model: &M, i: IndexSet, s_i: &[f64], route: Option<GammaRoute>) -> Result<f64> {
    if let Some(s) = s_i.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(domain_err!("exponential-scale argument {s} must be positive and finite"));
    }
    let u: Vec<f64> = s_i.iter().map(|&s| -(-s).exp_m1()).collect();
    gamma_0i(model, i, &u, 0.0, route.unwrap_or_else(|| GammaRoute::preferred(model, i)))
}

/// Survival copula `C_s(v) = S(S_1^{-1}(v_1), …, S_d^{-1}(v_d))` on `(0,1]^d`.
pub fn copula_scale_survival<O: SurvivalOracle<f64> + ?Sized>(oracle: &O, marginals: &[Marginal], v: &[f64]) -> Result<f64> {
    if marginals.len() != oracle.dim() || v.len() != oracle.dim() {
        return Err(structural_err!("need {} marginals and coordinates", oracle.dim()));
    }
    let t: Result<Vec<f64>> = marginals
        .iter()
        .zip(v)
        .map(|(m, &x)| {
            if x > 0.0 && x <= 1.0 {
                m.inverse_cumulative_hazard(-x.ln())
            } else {
                Err(domain_err!("survival copula argument {x} outside (0,1]"))
            }
        })
        .collect();
    Ok(oracle.survival(&t?))
}

/// `P(F(X) > u) = C_s(1 - u)` on `[0,1)^d`; its margins are `1 - u_i`.
pub fn uniform_scale_survival<O: SurvivalOracle<f64> + ?Sized>(oracle: &O, marginals: &[Marginal], u: &[f64]) -> Result<f64> {
    if marginals.len() != oracle.dim() || u.len() != oracle.dim() {
        return Err(structural_err!("need {} marginals and coordinates", oracle.dim()));
    }
    let t: Result<Vec<f64>> = marginals.iter().zip(u).map(|(m, &x)| m.quantile(x)).collect();
    Ok(oracle.survival(&t?))
}

/// The model after a strictly increasing change of every margin to `targets`.
pub struct Remarginalized<'a, M: ?Sized> {
    base: &'a M,
    targets: Vec<Marginal>,
}

impl<'a, M: HazardModel + ?Sized> Remarginalized<'a, M> {
    pub fn new(base: &'a M, targets: Vec<Marginal>) -> Self {
        assert_eq!(targets.len(), base.dim(), "one target marginal per axis");
        Self { base, targets }
    }

    fn base_point(&self, x: &[f64]) -> Option<Vec<f64>> {
        x.iter()
            .enumerate()
            .map(|(k, &t)| self.base.marginal(k).inverse_cumulative_hazard(self.targets[k].cumulative_hazard(t)).ok())
            .collect()
    }
}

impl<M: HazardModel + ?Sized> SurvivalOracle<f64> for Remarginalized<'_, M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn support(&self) -> Support {
        self.targets[0].support()
    }

    fn survival(&self, x: &[f64]) -> f64 {
        self.log_survival(x).exp()
    }

    fn log_survival(&self, x: &[f64]) -> f64 {
        match self.base_point(x) {
            Some(t) => self.base.log_survival(&t),
            None => f64::NAN,
        }
    }
}

impl<M: HazardModel + ?Sized> HazardModel for Remarginalized<'_, M> {
    fn label(&self) -> String {
        format!("{} (remarginalized)", self.base.label())
    }

    fn marginal(&self, axis: usize) -> Marginal {
        self.targets[axis].clone()
    }

    fn closed_form_gamma0(&self, i: IndexSet) -> Option<Gamma0Family<f64>> {
        self.base.closed_form_gamma0(i)
    }
}

/// `γ_{0,{i,j}}` on a uniform square grid over `[0, 1-δ]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaGrid {
    pub model: String,
    pub pair: IndexSet,
    pub delta: f64,
    pub axis: Vec<f64>,
    /// Row-major, first coordinate slowest; `NaN` marks a masked node.
    pub values: Vec<f64>,
    pub route: GammaRoute,
}

impl GammaGrid {
    pub fn resolution(&self) -> usize {
        self.axis.len()
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.axis.len() + b]
    }

    /// Flat indices of masked nodes.
    pub fn masked(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, v)| v.is_nan()).map(|(k, _)| k).collect()
    }

    /// Largest absolute difference over nodes unmasked in both grids.
    pub fn max_abs_diff(&self, other: &GammaGrid) -> Result<f64> {
        if self.axis != other.axis || self.pair != other.pair {
            return Err(structural_err!("grids are not on the same nodes"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| !a.is_nan() && !b.is_nan())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Evaluates `γ_{0,pair}` on `n × n` nodes of `[0, 1-δ]²`.
///
/// The inverse Gaussian origin pole is masked. The FD routes do not
/// evaluate the exact corner: the closed-form limit is used when available,
/// otherwise the node is masked.
pub fn gamma_grid<M: HazardModel + ?Sized>(
    model: &M,
    pair: IndexSet,
    n: usize,
    delta: f64,
    route: Option<GammaRoute>,
) -> Result<GammaGrid> {
    if n < 2 {
        return Err(param_err!("grid resolution {n} must be at least 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param_err!("δ = {delta} must lie in (0,1)"));
    }
    let axis = linspace(0.0, 1.0 - delta, n);
    gamma_grid_on(model, pair, &axis, delta, route)
}

/// Evaluates `γ_{0,pair}` on the square grid `axis × axis`.
pub fn gamma_grid_on<M: HazardModel + ?Sized>(
    model: &M,
    pair: IndexSet,
    axis: &[f64],
    delta: f64,
    route: Option<GammaRoute>,
) -> Result<GammaGrid> {
    if pair.len() != 2 || pair.dim() != model.dim() {
        return Err(structural_err!("{pair} is not a pair of the {}-dimensional model", model.dim()));
    }
    let route = route.unwrap_or_else(|| GammaRoute::preferred(model, pair));
    if route == GammaRoute::ClosedForm && model.closed_form_gamma0(pair).is_none() {
        return Err(capability_err!("model `{}` has no closed-form γ_0 for {pair}", model.label()));
    }
    check_levels(axis, 0.0)?;
    let n = axis.len();
    let values: Result<Vec<f64>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let u = [axis[k / n], axis[k % n]];
            let corner = u == [0.0, 0.0];
            let r = if corner && route != GammaRoute::ClosedForm {
                match model.closed_form_gamma0(pair) {
                    Some(f) => f.eval(0.0, 0.0),
                    None => return Ok(f64::NAN),
                }
            } else {
                gamma_0i(model, pair, &u, delta, route)
            };
            match r {
                Ok(v) => Ok(v),
                Err(Error::Domain(_)) if corner => Ok(f64::NAN),
                Err(e) => Err(e),
            }
        })
        .collect();
    Ok(GammaGrid { model: model.label(), pair, delta, axis: axis.to_vec(), values: values?, route })
}
