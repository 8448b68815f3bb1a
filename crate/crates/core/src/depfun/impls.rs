use super::closed::Gamma0Family;
use super::gamma::HazardModel;
use super::marginal::Marginal;
use super::models::{FrankModel, PropModel};
use crate::frailty::{FrailtyLaw, Generator, LaplaceModel};
use crate::lattice::{IndexSet, Support, SurvivalOracle};

fn generator_marginal(g: &Generator) -> Option<Marginal> {
    match g {
        Generator::Gamma { shape } => Some(Marginal::Lomax { shape: *shape }),
        Generator::InverseGaussian { theta } => Some(Marginal::HalfStable { theta: *theta }),
        Generator::Degenerate => Some(Marginal::Exponential { rate: 1.0 }),
        Generator::Custom { .. } => None,
    }
}

fn generator_family(g: &Generator) -> Option<Gamma0Family<f64>> {
    match g {
        Generator::Gamma { shape } if *shape == 1.0 => Some(Gamma0Family::Clayton),
        Generator::Gamma { shape } => Some(Gamma0Family::SharedGamma { shape: *shape }),
        Generator::InverseGaussian { theta } => Some(Gamma0Family::InverseGaussian { theta: *theta }),
        Generator::Degenerate => Some(Gamma0Family::Prop { beta: 0.0 }),
        Generator::Custom { .. } => None,
    }
}

impl HazardModel for LaplaceModel {
    fn label(&self) -> String {
        self.name().to_string()
    }

    fn marginal(&self, axis: usize) -> Marginal {
        let closed = match self.law() {
            FrailtyLaw::Shared { generator, .. } => generator_marginal(generator),
            FrailtyLaw::Independent(gs) => generator_marginal(&gs[axis]),
            FrailtyLaw::ChiSquare(c) => Some(Marginal::ChiSquareScale { sigma2: c.covariance().get(axis, axis) }),
            _ => None,
        };
        closed.unwrap_or_else(|| {
            let model = self.clone();
            let j = IndexSet::singleton(self.dim(), axis).expect("axis inside the model");
            Marginal::numeric(format!("{}[{}]", self.name(), axis + 1), Support::Orthant, move |t| {
                model.marginal_survival(j, &[t])
            })
        })
    }

    fn closed_form_gamma0(&self, i: IndexSet) -> Option<Gamma0Family<f64>> {
        if i.len() != 2 {
            return None;
        }
        match self.law() {
            FrailtyLaw::Shared { generator, .. } => generator_family(generator),
            FrailtyLaw::Independent(_) => Some(Gamma0Family::Prop { beta: 0.0 }),
            FrailtyLaw::ChiSquare(c) => {
                let ax = i.to_axes();
                let rho = c.covariance().correlation(ax[0], ax[1]);
                Some(Gamma0Family::ChiSquare { rho2: rho * rho })
            }
            _ => None,
        }
    }

    fn analytic_lambda(&self, i: IndexSet, t_i: &[f64]) -> Option<f64> {
        LaplaceModel::analytic_lambda(self, i, t_i)
    }
}

impl HazardModel for FrankModel {
    fn label(&self) -> String {
        format!("frank(theta={})", self.theta())
    }

    fn marginal(&self, _axis: usize) -> Marginal {
        Marginal::Exponential { rate: 1.0 }
    }

    fn closed_form_gamma0(&self, i: IndexSet) -> Option<Gamma0Family<f64>> {
        (i.len() == 2).then_some(Gamma0Family::Frank { theta: self.theta() })
    }
}

impl HazardModel for PropModel {
    fn label(&self) -> String {
        if self.dim() == 2 {
            format!("prop(beta={})", self.beta(0, 1))
        } else {
            "multi_prop".into()
        }
    }

    fn marginal(&self, axis: usize) -> Marginal {
        self.marginals()[axis].clone()
    }

    fn closed_form_gamma0(&self, i: IndexSet) -> Option<Gamma0Family<f64>> {
        let ax = i.to_axes();
        (ax.len() == 2).then(|| Gamma0Family::Prop { beta: self.beta(ax[0], ax[1]) })
    }

    fn analytic_lambda(&self, i: IndexSet, t_i: &[f64]) -> Option<f64> {
        let ax = i.to_axes();
        let h: Option<Vec<f64>> = ax.iter().zip(t_i).map(|(&a, &t)| self.marginals()[a].hazard(t).ok()).collect();
        let h = h?;
        match ax.len() {
            1 => Some(h[0]),
            2 => Some(-self.beta(ax[0], ax[1]) * h[0] * h[1]),
            _ => Some(0.0),
        }
    }
}
