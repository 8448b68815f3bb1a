use hazdep::frailty::{clt_bound, cov_lambda_ij, Covariance, Generator, LaplaceModel, TrivariateChiSqParams};
use hazdep::lattice::{factorize, mixed_partial_log, GridDomain, GridSpec};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::IndexSet;

fn chisq_params() -> TrivariateChiSqParams {
    TrivariateChiSqParams::from_scaled_correlations([1.2, 0.8, 1.0], [0.5, 0.3, -0.4]).unwrap()
}

#[test]
fn chi_square_survival_matches_monte_carlo() {
    let p = chisq_params();
    let m = LaplaceModel::chisq3(&p).unwrap();
    let n = 400_000;
    let draws = m.sample_lifetimes(n, 11).unwrap();
    for t in [[0.1, 0.1, 0.1], [0.5, 0.2, 1.0], [1.0, 1.0, 1.0], [2.0, 0.5, 0.3], [0.05, 3.0, 0.7]] {
        let s = p.survival(&t).unwrap();
        assert!((m.survival(&t).unwrap() - s).abs() < 1e-14);
        let emp = draws.empirical_survival(&t);
        assert!((emp - s).abs() <= clt_bound(s, n), "t={t:?}: {emp} vs {s}");
    }
}

#[test]
fn chi_square_parts_recompose() {
    let p = chisq_params();
    for t in [[0.1, 0.7, 0.2], [1.0, 1.0, 1.0], [3.0, 0.01, 2.0]] {
        let parts = p.parts(&t).unwrap();
        let prod = parts.s_i.iter().product::<f64>() * parts.s_pair_part.iter().product::<f64>() * parts.s_123;
        let s = p.survival(&t).unwrap();
        assert!((prod - s).abs() <= 1e-12 * s);
    }
    let q = TrivariateChiSqParams::from_correlations([0.0, 0.0, 0.6]).unwrap();
    for t in [[0.1, 0.7, 0.2], [5.0, 1.0, 9.0]] {
        assert!((q.parts(&t).unwrap().s_123 - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn factorized_chi_square_top_part_matches_closed_form() {
    let p = chisq_params();
    let m = LaplaceModel::chisq3(&p).unwrap();
    let grid =
        GridSpec::new(vec![vec![0.0, 0.4, 1.0], vec![0.0, 0.3], vec![0.0, 2.0]], GridDomain::Orthant { upper: 10.0 }).unwrap();
    let full = IndexSet::full(3).unwrap();
    let parts = factorize(&m, full, &grid).unwrap();
    let top = parts.part(full).unwrap();
    let want = p.parts(&[1.0, 0.3, 2.0]).unwrap().s_123;
    let got = top[parts.shape(full).flat(&[2, 1, 1])];
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn covariance_estimator_matches_pair_hazards() {
    let p = chisq_params();
    let chi = LaplaceModel::chisq3(&p).unwrap();
    let pair = IndexSet::from_axes(3, &[0, 1]).unwrap();
    let est = cov_lambda_ij(&chi, 0, 1, &[0.0, 0.0, 0.0], 200_000, 3).unwrap();
    let want = 2.0 * p.cov_pairs[0].powi(2);
    assert!((est.estimate - want).abs() <= 3.0 * est.stderr, "{est:?} vs {want}");
    let analytic = chi.lambda(pair, &[0.0, 0.0]).unwrap();
    assert!((analytic - want).abs() < 1e-14);

    let clayton = LaplaceModel::clayton(2).unwrap();
    let cp = LaplaceModel::compound_poisson(
        LevyTriplet::new(vec![0.2, 0.1], vec![Atom { c: 1.0, x: vec![1.0, 0.5] }, Atom { c: 0.5, x: vec![0.3, 2.0] }]).unwrap(),
    )
    .unwrap();
    for model in [clayton, cp] {
        for t in [[0.0, 0.0], [0.3, 0.1], [1.0, 0.5]] {
            let est = cov_lambda_ij(&model, 0, 1, &t, 200_000, 5).unwrap();
            let fd = mixed_partial_log(&model, IndexSet::full(2).unwrap(), &t, None).unwrap();
            let tol = (3.0 * est.stderr).max(1e-5);
            assert!((est.estimate - fd).abs() <= tol, "{}: t={t:?} {est:?} vs {fd}", model.name());
        }
    }
}

#[test]
fn sampling_is_deterministic_and_calibrated() {
    let unit = LaplaceModel::shared_from_generator(Generator::Degenerate, 2).unwrap();
    let n = 200_000;
    let d = unit.sample_lifetimes(n, 1).unwrap();
    for i in 0..2 {
        assert!((d.column_mean(i) - 1.0).abs() <= 3.0 / (n as f64).sqrt());
    }
    let c = LaplaceModel::clayton(2).unwrap();
    let a = c.sample_lifetimes(n, 9).unwrap();
    let b = c.sample_lifetimes(n, 9).unwrap();
    assert_eq!(a, b);
    let emp = a.empirical_survival(&[1.0, 1.0]);
    assert!((emp - 1.0 / 3.0).abs() <= clt_bound(1.0 / 3.0, n));
    assert_ne!(a, c.sample_lifetimes(n, 10).unwrap());
}

#[test]
fn lognormal_laplace_transform_matches_monte_carlo() {
    let cov = Covariance::from_rows(&[vec![0.3, 0.1, 0.0], vec![0.1, 0.2, 0.05], vec![0.0, 0.05, 0.4]]).unwrap();
    let m = LaplaceModel::lognormal(cov).unwrap();
    let n = 200_000;
    let draws = m.sample_lifetimes(n, 4).unwrap();
    for t in [[0.5, 0.5, 0.5], [1.0, 0.2, 2.0], [0.0, 1.0, 0.0]] {
        let s = m.survival(&t).unwrap();
        assert!((draws.empirical_survival(&t) - s).abs() <= clt_bound(s, n));
    }
}

#[test]
fn min_combination_multiplies_survival() {
    let a = LaplaceModel::clayton(2).unwrap();
    let b = LaplaceModel::chi_square(Covariance::from_rows(&[vec![1.0, 0.6], vec![0.6, 2.0]]).unwrap()).unwrap();
    let c = LaplaceModel::min_combine(&a, &b).unwrap();
    let grid = GridSpec::orthant(2, 6, 3.0).unwrap();
    let full = IndexSet::full(2).unwrap();
    let (pa, pb, pc) =
        (factorize(&a, full, &grid).unwrap(), factorize(&b, full, &grid).unwrap(), factorize(&c, full, &grid).unwrap());
    for i in full.nonempty_subsets() {
        let (ea, eb, ec) = (pa.exponent(i).unwrap(), pb.exponent(i).unwrap(), pc.exponent(i).unwrap());
        for k in 0..ec.len() {
            assert!((ec[k] - ea[k] - eb[k]).abs() <= 1e-8);
        }
    }
    let n = 200_000;
    let draws = c.sample_lifetimes(n, 2).unwrap();
    for t in [[0.2, 0.3], [1.0, 1.0]] {
        let s = c.survival(&t).unwrap();
        assert!((draws.empirical_survival(&t) - s).abs() <= clt_bound(s, n));
    }
}
