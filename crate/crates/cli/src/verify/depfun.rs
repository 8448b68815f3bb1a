use hazdep::depfun::{
    gamma_0i, gamma_grid, gamma_grid_on, FrankModel, GammaRoute, HazardModel, Marginal, PropModel, Remarginalized,
};
use hazdep::frailty::{Covariance, Generator, LaplaceModel};
use hazdep::lattice::{factorize, linspace, GridSpec};
use hazdep::{IndexSet, Model};
use rand::Rng;

use super::{rng, Recorder};

pub(crate) const FRANK_THETAS: [f64; 7] = [-5.0, -2.0, -0.5, 0.5, 2.0, 5.0, 10.0];
pub(crate) const CHISQ_RHO2: [f64; 3] = [0.1, 0.5, 0.9];

fn pair() -> IndexSet {
    IndexSet::full(2).expect("pair")
}

pub(crate) fn chisq_pair(rho2: f64) -> LaplaceModel {
    let r = rho2.sqrt();
    LaplaceModel::chi_square(Covariance::from_rows(&[vec![1.0, r], vec![r, 1.0]]).expect("covariance")).expect("chisq")
}

pub(crate) fn invgauss(theta: f64) -> LaplaceModel {
    LaplaceModel::shared_from_generator(Generator::inverse_gaussian(theta).expect("theta"), 2).expect("invgauss")
}

fn labelled(model: impl Into<Model>) -> (String, Model) {
    let model = model.into();
    (model.label(), model)
}

/// The γ₀ catalog with closed forms.
pub(crate) fn gamma_catalog() -> Vec<(String, Model)> {
    let mut out = vec![labelled(LaplaceModel::clayton(2).expect("clayton"))];
    out.extend(FRANK_THETAS.iter().map(|&t| labelled(FrankModel::new(t).expect("frank"))));
    out.extend([1.0, 5.0].iter().map(|&t| labelled(invgauss(t))));
    out.extend(CHISQ_RHO2.iter().map(|&r| (format!("chisq(rho2={r})"), chisq_pair(r).into())));
    out.push(labelled(PropModel::exponential(2, &[((0, 1), 1.0)]).expect("prop")));
    out.push(labelled(PropModel::exponential(2, &[((0, 1), 0.35)]).expect("prop")));
    out
}

fn interior() -> Vec<f64> {
    linspace(0.02, 0.96, 21)
}

pub(crate) fn run(rec: &mut Recorder) {
    let clayton = LaplaceModel::clayton(2).expect("clayton");
    rec.within("clayton γ₀(0.5,0.5) = 4/9", 1e-10, || {
        Ok((gamma_0i(&clayton, pair(), &[0.5, 0.5], 0.0, GammaRoute::ClosedForm)? - 4.0 / 9.0).abs())
    });
    rec.within("clayton γ₀ corner = 1", 1e-10, || Ok((gamma_grid(&clayton, pair(), 101, 0.01, None)?.value(0, 0) - 1.0).abs()));

    for (label, model) in gamma_catalog() {
        rec.within(format!("closed form vs fd pipeline {label}"), 1e-4, || {
            let axis = interior();
            let cf = gamma_grid_on(&model, pair(), &axis, 0.01, Some(GammaRoute::ClosedForm))?;
            let fd = gamma_grid_on(&model, pair(), &axis, 0.01, Some(GammaRoute::FdPipeline))?;
            if !cf.masked().is_empty() || !fd.masked().is_empty() {
                return Err(hazdep::Error::Numeric("interior grid has masked nodes".into()));
            }
            cf.max_abs_diff(&fd)
        });
    }

    rec.within("inverse gaussian θ-invariance closed form", 1e-10, || {
        gamma_grid(&invgauss(1.0), pair(), 101, 0.01, None)?.max_abs_diff(&gamma_grid(&invgauss(5.0), pair(), 101, 0.01, None)?)
    });
    rec.within("inverse gaussian θ-invariance fd route", 1e-4, || {
        let axis = interior();
        let a = gamma_grid_on(&invgauss(1.0), pair(), &axis, 0.01, Some(GammaRoute::FdPipeline))?;
        a.max_abs_diff(&gamma_grid_on(&invgauss(5.0), pair(), &axis, 0.01, Some(GammaRoute::FdPipeline))?)
    });
    rec.holds("inverse gaussian origin is masked", || {
        let g = gamma_grid(&invgauss(1.0), pair(), 101, 0.01, None)?;
        Ok((g.masked() != vec![0]).then(|| format!("masked nodes {:?}", g.masked())))
    });
    for rho2 in CHISQ_RHO2 {
        rec.within(format!("chisq corner = 2ρ² for ρ² = {rho2}"), 1e-10, || {
            Ok((gamma_grid(&chisq_pair(rho2), pair(), 101, 0.01, None)?.value(0, 0) - 2.0 * rho2).abs())
        });
    }
    for beta in [1.0, 0.35] {
        rec.holds(format!("prop grid ≡ -β for β = {beta}"), || {
            let g = gamma_grid(&PropModel::exponential(2, &[((0, 1), beta)])?, pair(), 101, 0.01, None)?;
            Ok(g.values.iter().find(|&&v| v != -beta).map(|v| format!("value {v}")))
        });
    }
    rec.holds("frank corner sign follows θ", || {
        let corner =
            |t: f64| -> hazdep::Result<f64> { Ok(gamma_grid(&FrankModel::new(t)?, pair(), 11, 0.01, None)?.value(0, 0)) };
        for t in FRANK_THETAS {
            let c = corner(t)?;
            if c.signum() != t.signum() {
                return Ok(Some(format!("θ = {t}: corner {c}")));
            }
        }
        Ok(None)
    });

    let targets = [
        vec![Marginal::Weibull { shape: 1.7, scale: 0.8 }, Marginal::Lomax { shape: 2.5 }],
        vec![Marginal::Exponential { rate: 3.0 }, Marginal::Weibull { shape: 2.2, scale: 1.5 }],
    ];
    let mut r = rng(701);
    let points: Vec<[f64; 2]> = (0..20).map(|_| [r.random_range(0.03..0.95), r.random_range(0.03..0.95)]).collect();
    let invariance_models = vec![
        labelled(LaplaceModel::clayton(2).expect("clayton")),
        labelled(LaplaceModel::shared_from_generator(Generator::gamma(2.5).expect("shape"), 2).expect("gamma")),
        labelled(FrankModel::new(-2.0).expect("frank")),
        ("chisq(rho2=0.5)".to_string(), chisq_pair(0.5).into()),
        labelled(PropModel::exponential(2, &[((0, 1), 0.7)]).expect("prop")),
    ];
    for (label, model) in &invariance_models {
        rec.within(format!("marginal invariance {label}"), 1e-6, || {
            let a = Remarginalized::new(model, targets[0].clone());
            let b = Remarginalized::new(model, targets[1].clone());
            let mut worst = 0.0f64;
            for u in &points {
                let ga = gamma_0i(&a, pair(), u, 0.0, GammaRoute::Quotient)?;
                let gb = gamma_0i(&b, pair(), u, 0.0, GammaRoute::Quotient)?;
                worst = worst.max((ga - gb).abs() / ga.abs().max(1.0));
            }
            Ok(worst)
        });
    }

    rec.within("min-combination adds exponents", 1e-8, || {
        let a = LaplaceModel::clayton(3)?;
        let b =
            LaplaceModel::chi_square(Covariance::from_rows(&[vec![1.0, 0.6, 0.2], vec![0.6, 2.0, 0.3], vec![0.2, 0.3, 1.5]])?)?;
        let c = LaplaceModel::min_combine(&a, &b)?;
        let grid = GridSpec::orthant(3, 6, 3.0)?;
        let full = IndexSet::full(3)?;
        let (pa, pb, pc) = (factorize(&a, full, &grid)?, factorize(&b, full, &grid)?, factorize(&c, full, &grid)?);
        let mut worst = 0.0f64;
        for i in full.nonempty_subsets() {
            let (ea, eb, ec) = (pa.exponent(i).expect("a"), pb.exponent(i).expect("b"), pc.exponent(i).expect("c"));
            for k in 0..ec.len() {
                worst = worst.max((ec[k] - ea[k] - eb[k]).abs());
            }
        }
        Ok(worst)
    });
}
