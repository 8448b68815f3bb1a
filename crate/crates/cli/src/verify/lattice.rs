use hazdep::depfun::{FrankModel, HazardModel, PropModel};
use hazdep::frailty::{Covariance, Generator, LaplaceModel, TrivariateChiSqParams};
use hazdep::higher::{copula_family, ScoreFunction};
use hazdep::lattice::{factorize, mixed_partial_log, recompose, GridDomain, GridSpec, Support};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::minid::{DiscreteExponentMeasure, MassPoint};
use hazdep::quad::simpson;
use hazdep::{IndexSet, Model, SurvivalOracle};
use rand::Rng;

use super::{rng, Recorder};

/// Catalog models of dimension at most 3.
pub(crate) fn catalog() -> Vec<Model> {
    let cp = LevyTriplet::new(
        vec![0.3, 0.2, 0.5],
        vec![Atom { c: 0.7, x: vec![1.0, 0.5, 0.0] }, Atom { c: 0.4, x: vec![0.2, 1.5, 1.0] }],
    )
    .expect("valid triplet");
    let lognormal = Covariance::from_rows(&[vec![0.3, 0.1], vec![0.1, 0.2]]).expect("valid covariance");
    let minid = DiscreteExponentMeasure::new(
        2,
        vec![MassPoint { w: 0.5, p: vec![0.4, 0.6] }, MassPoint { w: 0.3, p: vec![0.2, 1.0] }],
        true,
    )
    .expect("valid measure");
    vec![
        LaplaceModel::clayton(2).expect("clayton").into(),
        LaplaceModel::clayton(3).expect("clayton").into(),
        LaplaceModel::shared_from_generator(Generator::gamma(2.5).expect("shape"), 3).expect("gamma").into(),
        LaplaceModel::shared_from_generator(Generator::inverse_gaussian(1.5).expect("theta"), 3).expect("invgauss").into(),
        FrankModel::new(-3.0).expect("frank").into(),
        FrankModel::new(4.0).expect("frank").into(),
        LaplaceModel::chisq3(&TrivariateChiSqParams::from_correlations([0.5, 0.3, -0.2]).expect("rho")).expect("chisq3").into(),
        LaplaceModel::lognormal(lognormal).expect("lognormal").into(),
        LaplaceModel::compound_poisson(cp).expect("compound poisson").into(),
        PropModel::exponential(2, &[((0, 1), 0.6)]).expect("prop").into(),
        PropModel::exponential(3, &[((0, 1), 0.2), ((0, 2), 0.1), ((1, 2), 0.25)]).expect("multi prop").into(),
        minid.into(),
        copula_family(ScoreFunction::product_linear(3, 1.0).expect("score"), 1.0).expect("score copula").into(),
    ]
}

fn grid_for(model: &Model, n: usize) -> GridSpec<f64> {
    let d = model.dim();
    match model.support() {
        Support::Orthant => GridSpec::orthant(d, n, 3.0),
        Support::UnitCube => GridSpec::unit_cube(d, n, 0.1),
    }
    .expect("valid grid")
}

pub(crate) fn run(rec: &mut Recorder) {
    for model in catalog() {
        let label = format!("{} d={}", model.label(), model.dim());
        rec.within(format!("roundtrip {label}"), 1e-12, || {
            let grid = grid_for(&model, 11);
            let mut worst = 0.0f64;
            for j in IndexSet::full(model.dim())?.nonempty_subsets() {
                let parts = factorize(&model, j, &grid)?;
                let back = recompose(&parts, j)?;
                for (flat, s) in back.iter().enumerate() {
                    let direct = model.marginal_survival(j, &parts.point(j, flat));
                    worst = worst.max((s - direct).abs() / direct);
                }
            }
            Ok(worst)
        });
        rec.within(format!("nested grids {label}"), 1e-12, || {
            let coarse = grid_for(&model, 6);
            let fine = grid_for(&model, 11);
            let full = IndexSet::full(model.dim())?;
            let pc = factorize(&model, full, &coarse)?;
            let pf = factorize(&model, full, &fine)?;
            let mut worst = 0.0f64;
            for i in full.nonempty_subsets() {
                let (vc, vf) = (pc.part(i).expect("part"), pf.part(i).expect("part"));
                let shape = pc.shape(i);
                let mut idx = vec![0; i.len()];
                for (flat, c) in vc.iter().enumerate() {
                    shape.unflat(flat, &mut idx);
                    let fine_idx: Vec<usize> = idx.iter().map(|k| 2 * k).collect();
                    worst = worst.max((c - vf[pf.shape(i).flat(&fine_idx)]).abs());
                }
            }
            Ok(worst)
        });
        rec.holds(format!("lower boundary and monotone margins {label}"), || {
            let grid = grid_for(&model, 11);
            let full = IndexSet::full(model.dim())?;
            let parts = factorize(&model, full, &grid)?;
            for i in full.nonempty_subsets() {
                let exps = parts.exponent(i).expect("exponent");
                let shape = parts.shape(i);
                let mut idx = vec![0; i.len()];
                for (flat, v) in exps.iter().enumerate() {
                    shape.unflat(flat, &mut idx);
                    if idx.contains(&0) && v.abs() > 1e-15 {
                        return Ok(Some(format!("Λ_{i} = {v} on the lower boundary")));
                    }
                }
                if i.len() == 1 && exps.windows(2).any(|w| w[1] < w[0]) {
                    return Ok(Some(format!("Λ_{i} decreases along its axis")));
                }
            }
            Ok(None)
        });
    }

    let analytic: Vec<Model> = vec![
        LaplaceModel::clayton(2).expect("clayton").into(),
        PropModel::exponential(2, &[((0, 1), 0.6)]).expect("prop").into(),
        LaplaceModel::chi_square(Covariance::from_rows(&[vec![1.0, 0.6], vec![0.6, 2.0]]).expect("cov")).expect("chisq").into(),
        LaplaceModel::compound_poisson(
            LevyTriplet::new(vec![0.2, 0.1], vec![Atom { c: 1.0, x: vec![1.0, 0.5] }, Atom { c: 0.5, x: vec![0.3, 2.0] }])
                .expect("triplet"),
        )
        .expect("compound poisson")
        .into(),
    ];
    let pair = IndexSet::full(2).expect("pair");
    for model in &analytic {
        let label = model.label();
        rec.within(format!("cell increments vs quadrature {label}"), 1e-4, || {
            let grid = GridSpec::orthant(2, 101, 2.0)?;
            let exp = factorize(model, pair, &grid)?.exponent(pair).expect("exponent");
            let axis = grid.axis(0);
            let shape = hazdep::lattice::Shape::new(vec![101, 101]);
            let mut worst = 0.0f64;
            for a in (0..100).step_by(9) {
                for b in (0..100).step_by(11) {
                    let at = |p: usize, q: usize| exp[shape.flat(&[p, q])];
                    let inc = at(a + 1, b + 1) - at(a + 1, b) - at(a, b + 1) + at(a, b);
                    let lam = |s: f64| {
                        simpson(|t: f64| model.analytic_lambda(pair, &[s, t]).unwrap_or(f64::NAN), axis[b], axis[b + 1], 8)
                            .unwrap_or(f64::NAN)
                    };
                    let quad = simpson(lam, axis[a], axis[a + 1], 8)?;
                    worst = worst.max((inc - quad).abs());
                }
            }
            Ok(worst)
        });
        rec.within(format!("fd vs analytic hazards {label}"), 1e-5, || {
            let mut r = rng(101);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let t = [r.random_range(0.05..2.0), r.random_range(0.05..2.0)];
                for i in pair.nonempty_subsets() {
                    let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
                    let exact = model.analytic_lambda(i, &ti).expect("analytic hazard");
                    let fd = mixed_partial_log(model, i, &ti, None)?;
                    worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
                }
            }
            Ok(worst)
        });
    }

    let clayton = LaplaceModel::clayton(2).expect("clayton");
    let target = (4.0f64 / 3.0).ln();
    rec.within("clayton Λ_{1,2}(1,1) closed form", 1e-10, || {
        let grid = GridSpec::new(vec![vec![0.0, 1.0]; 2], GridDomain::Orthant { upper: 1.0 })?;
        Ok((factorize(&clayton, pair, &grid)?.exponent(pair).expect("exponent")[3] - target).abs())
    });
    rec.within("clayton Λ_{1,2}(1,1) fd route", 1e-4, || {
        let inner = |s: f64| simpson(|t: f64| mixed_partial_log(&clayton, pair, &[s, t], None).unwrap_or(f64::NAN), 0.0, 1.0, 40);
        let v = simpson(|s: f64| inner(s).unwrap_or(f64::NAN), 0.0, 1.0, 40)?;
        Ok((v - target).abs())
    });
}
