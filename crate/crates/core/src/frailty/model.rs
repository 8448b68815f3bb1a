use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use super::chisq::{ChiSquareFrailty, Covariance, TrivariateChiSqParams};
use super::generator::Generator;
use super::lognormal::LogNormalFrailty;
use super::rng::{draw_rng, DrawMatrix};
use crate::error::{capability_err, domain_err, structural_err, Result};
use crate::lattice::{mixed_partial, mixed_partial_log, IndexSet, Support, SurvivalOracle};
use crate::levy::{LevyTriplet, ValidatedTriplet};

/// Law of the frailty vector `W`.
#[derive(Clone, Debug)]
pub enum FrailtyLaw {
    /// `W_1 = … = W_d`, `ψ(t) = φ(Σ t_i)`.
    Shared { generator: Generator, dim: usize },
    /// Independent `W_i` with Laplace transforms `φ_i`.
    Independent(Vec<Generator>),
    /// `W_i = Z_i²`.
    ChiSquare(ChiSquareFrailty),
    /// `W_i = exp(Z_i)`.
    LogNormal(LogNormalFrailty),
    /// Compound Poisson with drift.
    CompoundPoisson(ValidatedTriplet<f64>),
    /// Componentwise minimum of two independent models, `ψ = ψ_1 ψ_2`.
    MinCombined(Box<LaplaceModel>, Box<LaplaceModel>),
}

/// Correlated frailty model `X_i = Y_i / W_i` with `Y_i` i.i.d. standard
/// exponential and independent of `W`; `S(t) = ψ(t) = E e^{-⟨t,W⟩}`.
#[derive(Clone, Debug)]
pub struct LaplaceModel {
    name: String,
    law: FrailtyLaw,
}

impl LaplaceModel {
    pub fn new(name: impl Into<String>, law: FrailtyLaw) -> Result<Self> {
        let model = Self { name: name.into(), law };
        let d = model.dim();
        if d == 0 || d > crate::lattice::MAX_DIM {
            return Err(structural_err!("dimension {d} unsupported"));
        }
        Ok(model)
    }

    /// Shared frailty model `ψ(t) = φ(t_1 + … + t_d)`.
    pub fn shared_from_generator(generator: Generator, dim: usize) -> Result<Self> {
        let at0 = generator.phi(0.0);
        if (at0 - 1.0).abs() > 1e-12 {
            return Err(domain_err!("generator has φ(0) = {at0}, expected 1"));
        }
        let name = generator.name();
        Self::new(name, FrailtyLaw::Shared { generator, dim })
    }

    pub fn clayton(dim: usize) -> Result<Self> {
        Self::shared_from_generator(Generator::clayton(), dim)
    }

    pub fn independent(generators: Vec<Generator>) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(Generator::name).collect();
        Self::new(format!("independent({})", names.join(",")), FrailtyLaw::Independent(generators))
    }

    pub fn chi_square(cov: Covariance) -> Result<Self> {
        Self::new("chisq", FrailtyLaw::ChiSquare(ChiSquareFrailty::new(cov)))
    }

    pub fn chisq3(params: &TrivariateChiSqParams) -> Result<Self> {
        Self::new("chisq3", FrailtyLaw::ChiSquare(ChiSquareFrailty::new(params.covariance().clone())))
    }

    pub fn lognormal(cov: Covariance) -> Result<Self> {
        Self::new("lognormal", FrailtyLaw::LogNormal(LogNormalFrailty::new(cov)?))
    }

    /// Compound Poisson frailty; the triplet must pass the positivity check.
    pub fn compound_poisson(triplet: LevyTriplet<f64>) -> Result<Self> {
        Self::new("compound_poisson", FrailtyLaw::CompoundPoisson(triplet.validate()?))
    }

    /// Minimum of independent lifetimes from `m1` and `m2`: `ψ = ψ_1 ψ_2`.
    pub fn min_combine(m1: &LaplaceModel, m2: &LaplaceModel) -> Result<Self> {
        if m1.dim() != m2.dim() {
            return Err(structural_err!("cannot combine dimensions {} and {}", m1.dim(), m2.dim()));
        }
        Self::new(format!("min({},{})", m1.name, m2.name), FrailtyLaw::MinCombined(Box::new(m1.clone()), Box::new(m2.clone())))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn law(&self) -> &FrailtyLaw {
        &self.law
    }

    pub fn dim(&self) -> usize {
        match &self.law {
            FrailtyLaw::Shared { dim, .. } => *dim,
            FrailtyLaw::Independent(g) => g.len(),
            FrailtyLaw::ChiSquare(c) => c.dim(),
            FrailtyLaw::LogNormal(l) => l.dim(),
            FrailtyLaw::CompoundPoisson(tr) => tr.dim(),
            FrailtyLaw::MinCombined(a, _) => a.dim(),
        }
    }

    fn check_point(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.dim() {
            return Err(structural_err!("point has {} coordinates, model has {}", t.len(), self.dim()));
        }
        if let Some(v) = t.iter().find(|v| !(**v >= 0.0)) {
            return Err(domain_err!("coordinate {v} is negative"));
        }
        Ok(())
    }

    /// `log ψ(t)` without argument checks.
    pub fn log_psi_unchecked(&self, t: &[f64]) -> f64 {
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => generator.log_phi(t.iter().sum()),
            FrailtyLaw::Independent(gs) => gs.iter().zip(t).map(|(g, &ti)| g.log_phi(ti)).sum(),
            FrailtyLaw::ChiSquare(c) => c.log_psi(t),
            FrailtyLaw::LogNormal(l) => l.psi(t).ln(),
            FrailtyLaw::CompoundPoisson(tr) => tr.log_psi(t).unwrap_or(f64::NAN),
            FrailtyLaw::MinCombined(a, b) => a.log_psi_unchecked(t) + b.log_psi_unchecked(t),
        }
    }

    pub fn log_psi(&self, t: &[f64]) -> Result<f64> {
        self.check_point(t)?;
        Ok(self.log_psi_unchecked(t))
    }

    /// `S(t) = ψ(t)`.
    pub fn survival(&self, t: &[f64]) -> Result<f64> {
        Ok(self.log_psi(t)?.exp())
    }

    /// Closed-form `λ_I(t_I)` when the law provides one.
    pub fn analytic_lambda(&self, i: IndexSet, t_i: &[f64]) -> Option<f64> {
        let axes = i.to_axes();
        if axes.is_empty() || t_i.len() != axes.len() {
            return None;
        }
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => generator.lambda(axes.len(), t_i.iter().sum()),
            FrailtyLaw::Independent(gs) => match axes.as_slice() {
                [a] => gs[*a].lambda(1, t_i[0]),
                _ => Some(0.0),
            },
            FrailtyLaw::ChiSquare(c) => c.lambda(&axes, t_i),
            FrailtyLaw::LogNormal(_) => None,
            FrailtyLaw::CompoundPoisson(tr) => tr.hazard_density(i, t_i).ok(),
            FrailtyLaw::MinCombined(a, b) => Some(a.analytic_lambda(i, t_i)? + b.analytic_lambda(i, t_i)?),
        }
    }

    /// `λ_I(t_I)`: closed form if available, finite differences of `log ψ` otherwise.
    pub fn lambda(&self, i: IndexSet, t_i: &[f64]) -> Result<f64> {
        i.ensure_nonempty()?;
        if let Some(v) = self.analytic_lambda(i, t_i) {
            return Ok(v);
        }
        mixed_partial_log(self, i, t_i, None)
    }

    /// `λ_i(t) = -∂_i log ψ(t e_i)`.
    pub fn marginal_hazard_rate(&self, i: usize, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain_err!("hazard rate needs t ≥ 0, got {t}"));
        }
        self.lambda(IndexSet::singleton(self.dim(), i)?, &[t])
    }

    /// Density `f = (-1)^d ∂_1…∂_d ψ`.
    pub fn density(&self, t: &[f64]) -> Result<f64> {
        self.check_point(t)?;
        let d = self.dim();
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => {
                if let Some(v) = generator.signed_derivative(d, t.iter().sum()) {
                    return Ok(v);
                }
            }
            FrailtyLaw::Independent(gs) => {
                let parts: Option<Vec<f64>> = gs.iter().zip(t).map(|(g, &ti)| g.signed_derivative(1, ti)).collect();
                if let Some(p) = parts {
                    return Ok(p.iter().product());
                }
            }
            _ => {}
        }
        let f = |x: &[f64]| self.log_psi_unchecked(x).exp();
        let v = mixed_partial(&f, Support::Orthant, t, None)?;
        Ok(if d.is_multiple_of(2) { v } else { -v })
    }

    /// Lévy triplet of compound Poisson laws (also after min-combination).
    pub fn levy(&self) -> Option<LevyTriplet<f64>> {
        match &self.law {
            FrailtyLaw::CompoundPoisson(tr) => Some(tr.triplet().clone()),
            FrailtyLaw::MinCombined(a, b) => a.levy()?.min_combine(&b.levy()?).ok(),
            _ => None,
        }
    }

    pub fn has_sampler(&self) -> bool {
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => generator.has_sampler(),
            FrailtyLaw::Independent(gs) => gs.iter().all(Generator::has_sampler),
            FrailtyLaw::MinCombined(a, b) => a.has_sampler() && b.has_sampler(),
            _ => true,
        }
    }

    fn require_sampler(&self) -> Result<()> {
        if self.has_sampler() {
            Ok(())
        } else {
            Err(capability_err!("model `{}` has no frailty sampler", self.name))
        }
    }

    fn draw_frailty_with<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => {
                let w = generator.sample(rng).expect("sampler checked");
                out.fill(w);
            }
            FrailtyLaw::Independent(gs) => {
                for (o, g) in out.iter_mut().zip(gs) {
                    *o = g.sample(rng).expect("sampler checked");
                }
            }
            FrailtyLaw::ChiSquare(c) => c.sample(rng, out),
            FrailtyLaw::LogNormal(l) => l.sample(rng, out),
            FrailtyLaw::CompoundPoisson(tr) => {
                out.copy_from_slice(tr.drift());
                for atom in tr.atoms() {
                    let k: f64 = Poisson::new(atom.c).expect("positive intensity").sample(rng);
                    if k > 0.0 {
                        for (o, x) in out.iter_mut().zip(&atom.x) {
                            *o += k * x;
                        }
                    }
                }
            }
            FrailtyLaw::MinCombined(a, b) => {
                let mut other = vec![0.0; out.len()];
                a.draw_frailty_with(rng, out);
                b.draw_frailty_with(rng, &mut other);
                for (o, v) in out.iter_mut().zip(other) {
                    *o += v;
                }
            }
        }
    }

    fn draw_lifetime(&self, seed: u64, salt: u64, index: u64, out: &mut [f64]) {
        if let FrailtyLaw::MinCombined(a, b) = &self.law {
            let mut other = vec![0.0; out.len()];
            a.draw_lifetime(seed, 2 * salt + 1, index, out);
            b.draw_lifetime(seed, 2 * salt + 2, index, &mut other);
            for (o, v) in out.iter_mut().zip(other) {
                *o = o.min(v);
            }
            return;
        }
        let mut rng = draw_rng(seed, salt, index);
        self.draw_frailty_with(&mut rng, out);
        for o in out.iter_mut() {
            let y: f64 = Exp1.sample(&mut rng);
            *o = y / *o;
        }
    }

    /// `n` draws of `W ~ Q_0`; draw `k` uses its own stream of `seed`.
    pub fn sample_frailty(&self, n: usize, seed: u64) -> Result<DrawMatrix> {
        self.require_sampler()?;
        let d = self.dim();
        let mut data = vec![0.0; n * d];
        data.par_chunks_mut(d).enumerate().for_each(|(k, row)| {
            let mut rng = draw_rng(seed, u64::MAX, k as u64);
            self.draw_frailty_with(&mut rng, row);
        });
        Ok(DrawMatrix::new(d, data))
    }

    /// `n` lifetimes `X = Y/W`; min-combined models return componentwise
    /// minima of independent draws of their components.
    pub fn sample_lifetimes(&self, n: usize, seed: u64) -> Result<DrawMatrix> {
        self.require_sampler()?;
        let d = self.dim();
        let mut data = vec![0.0; n * d];
        data.par_chunks_mut(d).enumerate().for_each(|(k, row)| self.draw_lifetime(seed, 0, k as u64, row));
        Ok(DrawMatrix::new(d, data))
    }

    /// Closed-form inverse of the marginal survival `S_i`, when known.
    pub fn marginal_inverse(&self, i: usize, v: f64) -> Option<f64> {
        match &self.law {
            FrailtyLaw::Shared { generator, .. } => generator.phi_inverse(v),
            FrailtyLaw::Independent(gs) => gs[i].phi_inverse(v),
            FrailtyLaw::ChiSquare(c) => {
                let s2 = c.covariance().get(i, i);
                Some((v.powi(-2) - 1.0) / (2.0 * s2))
            }
            _ => None,
        }
    }
}

impl SurvivalOracle<f64> for LaplaceModel {
    fn dim(&self) -> usize {
        LaplaceModel::dim(self)
    }

    fn support(&self) -> Support {
        Support::Orthant
    }

    fn survival(&self, x: &[f64]) -> f64 {
        self.log_psi_unchecked(x).exp()
    }

    fn log_survival(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| !(*v >= 0.0)) {
            return f64::NAN;
        }
        self.log_psi_unchecked(x)
    }
}
