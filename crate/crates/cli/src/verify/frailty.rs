use hazdep::frailty::{clt_bound, cov_lambda_ij, Covariance, Generator, LaplaceModel, TrivariateChiSqParams};
use hazdep::lattice::{mixed_partial, Support};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::quad::simpson;

use super::{Recorder, VERIFY_SEED};

pub(crate) const MC_DRAWS: usize = 1_000_000;
const COV_DRAWS: usize = 200_000;

pub(crate) const MC_POINTS: [[f64; 3]; 5] =
    [[0.1, 0.1, 0.1], [0.5, 0.2, 1.0], [1.0, 1.0, 1.0], [2.0, 0.5, 0.3], [0.05, 3.0, 0.7]];

pub(crate) fn chisq_params() -> TrivariateChiSqParams {
    TrivariateChiSqParams::from_scaled_correlations([1.2, 0.8, 1.0], [0.5, 0.3, -0.4]).expect("valid parameters")
}

fn compound_poisson(d: usize) -> LaplaceModel {
    let atoms = if d == 2 {
        vec![Atom { c: 1.0, x: vec![1.0, 0.5] }, Atom { c: 0.5, x: vec![0.3, 2.0] }]
    } else {
        vec![Atom { c: 1.0, x: vec![1.0, 0.5, 0.2] }, Atom { c: 0.5, x: vec![0.3, 2.0, 1.0] }]
    };
    let drift = if d == 2 { vec![0.2, 0.1] } else { vec![0.2, 0.1, 0.4] };
    LaplaceModel::compound_poisson(LevyTriplet::new(drift, atoms).expect("triplet")).expect("compound poisson")
}

/// Largest `|empirical - exact| / bound` over the points; at most 1 passes.
fn mc_ratio(model: &LaplaceModel, exact: impl Fn(&[f64]) -> hazdep::Result<f64>, seed: u64) -> hazdep::Result<f64> {
    let draws = model.sample_lifetimes(MC_DRAWS, seed)?;
    let d = model.dim();
    let mut worst = 0.0f64;
    for t in &MC_POINTS {
        let s = exact(&t[..d])?;
        worst = worst.max((draws.empirical_survival(&t[..d]) - s).abs() / clt_bound(s, MC_DRAWS));
    }
    Ok(worst)
}

pub(crate) fn run(rec: &mut Recorder) {
    let p = chisq_params();
    let chi = LaplaceModel::chisq3(&p).expect("chisq3");
    rec.within("chisq3 closed form vs monte carlo", 1.0, || mc_ratio(&chi, |t| p.survival(&[t[0], t[1], t[2]]), VERIFY_SEED));

    let samplers = [
        LaplaceModel::clayton(3).expect("clayton"),
        LaplaceModel::shared_from_generator(Generator::gamma(2.5).expect("shape"), 3).expect("gamma"),
        LaplaceModel::shared_from_generator(Generator::inverse_gaussian(1.5).expect("theta"), 2).expect("invgauss"),
        LaplaceModel::lognormal(
            Covariance::from_rows(&[vec![0.3, 0.1, 0.0], vec![0.1, 0.2, 0.05], vec![0.0, 0.05, 0.4]]).expect("cov"),
        )
        .expect("lognormal"),
        compound_poisson(3),
    ];
    for (k, m) in samplers.iter().enumerate() {
        rec.within(format!("monte carlo survival {}", m.name()), 1.0, || {
            mc_ratio(m, |t| m.survival(t), VERIFY_SEED + 1 + k as u64)
        });
    }

    rec.within("chisq3 parts recompose", 1e-12, || {
        let axis = [0.0, 0.1, 0.7, 1.5, 4.0];
        let mut worst = 0.0f64;
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    let t = [a, b, c];
                    let parts = p.parts(&t)?;
                    let prod = parts.s_i.iter().product::<f64>() * parts.s_pair_part.iter().product::<f64>() * parts.s_123;
                    let s = p.survival(&t)?;
                    worst = worst.max((prod - s).abs() / s);
                }
            }
        }
        Ok(worst)
    });
    rec.within("chisq3 zero outer correlations kill the triple part", 1e-12, || {
        let q = TrivariateChiSqParams::from_scaled_correlations([0.7, 1.3, 2.0], [0.0, 0.0, 0.6])?;
        let axis = [0.0, 0.1, 0.7, 1.5, 9.0];
        let mut worst = 0.0f64;
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    worst = worst.max((q.parts(&[a, b, c])?.s_123 - 1.0).abs());
                }
            }
        }
        Ok(worst)
    });
    rec.within("chisq3 λ_ij(0,0) = 2σ_ij² by covariance estimator", 1.0, || {
        let mut worst = 0.0f64;
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let est = cov_lambda_ij(&chi, i, j, &[0.0; 3], COV_DRAWS, VERIFY_SEED + 20 + k as u64)?;
            let want = 2.0 * p.cov_pairs[k].powi(2);
            worst = worst.max((est.estimate - want).abs() / (3.0 * est.stderr));
        }
        Ok(worst)
    });
    rec.within("chisq3 survival copula depends on correlations only", 1e-10, || {
        let unit = TrivariateChiSqParams::from_correlations(p.rho)?;
        let levels = [0.1, 0.3, 0.5, 0.7, 0.9];
        let mut worst = 0.0f64;
        for &a in &levels {
            for &b in &levels {
                for &c in &levels {
                    let v = [a, b, c];
                    let copula = |q: &TrivariateChiSqParams| {
                        let t = [q.marginal_inverse(0, v[0]), q.marginal_inverse(1, v[1]), q.marginal_inverse(2, v[2])];
                        q.survival(&t)
                    };
                    worst = worst.max((copula(&p)? - copula(&unit)?).abs());
                }
            }
        }
        Ok(worst)
    });

    let tilt_points: [[f64; 3]; 5] = [[0.0, 0.0, 0.0], [0.3, 0.1, 0.2], [1.0, 0.5, 0.0], [0.2, 1.2, 0.4], [0.7, 0.7, 0.7]];
    let cov_models = [LaplaceModel::clayton(2).expect("clayton"), chi.clone(), compound_poisson(2)];
    for (k, m) in cov_models.iter().enumerate() {
        let d = m.dim();
        rec.within(format!("covariance form of λ_12 vs fd {}", m.name()), 1.0, || {
            let mut worst = 0.0f64;
            for (q, t) in tilt_points.iter().enumerate() {
                let t = &t[..d];
                let est = cov_lambda_ij(m, 0, 1, t, COV_DRAWS, VERIFY_SEED + 40 + (10 * k + q) as u64)?;
                let fd = pair_fd(m, t)?;
                let tol = (3.0 * est.stderr).max(1e-5);
                worst = worst.max((est.estimate - fd).abs() / tol);
            }
            Ok(worst)
        });
    }

    let clayton = LaplaceModel::clayton(2).expect("clayton");
    rec.holds("clayton density is nonnegative", || {
        for a in 0..=20 {
            for b in 0..=20 {
                let t = [0.25 * a as f64, 0.25 * b as f64];
                let f = clayton.density(&t)?;
                if f < -1e-8 {
                    return Ok(Some(format!("density {f} at {t:?}")));
                }
            }
        }
        Ok(None)
    });
    rec.within("clayton density integrates to the box mass", 1e-3, || {
        let l = 20.0;
        let inner = |s: f64| simpson(|t: f64| clayton.density(&[s, t]).unwrap_or(f64::NAN), 0.0, l, 400).unwrap_or(f64::NAN);
        let mass = simpson(inner, 0.0, l, 400)?;
        let box_mass = 1.0 - clayton.survival(&[l, 0.0])? - clayton.survival(&[0.0, l])? + clayton.survival(&[l, l])?;
        Ok((mass - box_mass).abs())
    });
}

/// `∂_1∂_2 log ψ` at `t`, other coordinates held fixed.
fn pair_fd(m: &LaplaceModel, t: &[f64]) -> hazdep::Result<f64> {
    let rest = t.to_vec();
    let f = move |x: &[f64]| {
        let mut y = rest.clone();
        y[0] = x[0];
        y[1] = x[1];
        m.log_psi_unchecked(&y)
    };
    mixed_partial(&f, Support::Orthant, &t[..2], None)
}
