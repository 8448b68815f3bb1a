//! One type for every model family, as ingested by the command line.

use crate::depfun::{FrankModel, Gamma0Family, HazardModel, Marginal, PropModel};
use crate::error::{capability_err, Result};
use crate::frailty::{DrawMatrix, LaplaceModel};
use crate::higher::ScoreCopula;
use crate::lattice::{IndexSet, Support, SurvivalOracle};
use crate::minid::DiscreteExponentMeasure;

#[derive(Clone, Debug)]
pub enum Model {
    /// Correlated frailty model `S = ψ`.
    Frailty(LaplaceModel),
    Frank(FrankModel),
    /// Proportional hazard dependence, bivariate or pairwise multivariate.
    Prop(PropModel),
    /// Min-infinitely divisible law on the unit cube.
    MinId(DiscreteExponentMeasure<f64>),
    /// Copula with density `1 + θg`.
    ScoreCopula(ScoreCopula<f64>),
}

impl Model {
    pub fn has_sampler(&self) -> bool {
        matches!(self, Model::Frailty(m) if m.has_sampler())
    }

    /// `n` lifetimes drawn deterministically from `seed`.
    pub fn sample_lifetimes(&self, n: usize, seed: u64) -> Result<DrawMatrix> {
        match self {
            Model::Frailty(m) => m.sample_lifetimes(n, seed),
            _ => Err(capability_err!("model `{}` has no sampler", self.label())),
        }
    }

    fn inner(&self) -> &dyn HazardModel {
        match self {
            Model::Frailty(m) => m,
            Model::Frank(m) => m,
            Model::Prop(m) => m,
            Model::MinId(m) => m,
            Model::ScoreCopula(m) => m,
        }
    }
}

impl SurvivalOracle<f64> for Model {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn support(&self) -> Support {
        self.inner().support()
    }

    fn survival(&self, x: &[f64]) -> f64 {
        self.inner().survival(x)
    }

    fn log_survival(&self, x: &[f64]) -> f64 {
        self.inner().log_survival(x)
    }

    fn marginal_log_survival(&self, j: IndexSet, x_j: &[f64]) -> f64 {
        self.inner().marginal_log_survival(j, x_j)
    }
}

impl HazardModel for Model {
    fn label(&self) -> String {
        self.inner().label()
    }

    fn marginal(&self, axis: usize) -> Marginal {
        self.inner().marginal(axis)
    }

    fn closed_form_gamma0(&self, i: IndexSet) -> Option<Gamma0Family<f64>> {
        self.inner().closed_form_gamma0(i)
    }

    fn analytic_lambda(&self, i: IndexSet, t_i: &[f64]) -> Option<f64> {
        self.inner().analytic_lambda(i, t_i)
    }
}

impl HazardModel for DiscreteExponentMeasure<f64> {
    fn label(&self) -> String {
        format!("minid({} atoms)", self.atoms().len())
    }

    fn marginal(&self, axis: usize) -> Marginal {
        if self.is_copula() {
            return Marginal::Uniform;
        }
        let m = self.clone();
        let j = IndexSet::singleton(self.dim(), axis).expect("axis inside the measure");
        Marginal::numeric(format!("minid[{}]", axis + 1), Support::UnitCube, move |x| m.marginal_survival(j, &[x]))
    }
}

impl HazardModel for ScoreCopula<f64> {
    fn label(&self) -> String {
        format!("score_copula(theta={})", self.theta())
    }

    fn marginal(&self, _axis: usize) -> Marginal {
        Marginal::Uniform
    }
}

impl From<LaplaceModel> for Model {
    fn from(m: LaplaceModel) -> Self {
        Model::Frailty(m)
    }
}

impl From<FrankModel> for Model {
    fn from(m: FrankModel) -> Self {
        Model::Frank(m)
    }
}

impl From<PropModel> for Model {
    fn from(m: PropModel) -> Self {
        Model::Prop(m)
    }
}

impl From<DiscreteExponentMeasure<f64>> for Model {
    fn from(m: DiscreteExponentMeasure<f64>) -> Self {
        Model::MinId(m)
    }
}

impl From<ScoreCopula<f64>> for Model {
    fn from(m: ScoreCopula<f64>) -> Self {
        Model::ScoreCopula(m)
    }
}
