use hazdep::lattice::{factorize, mixed_partial_log, GridDomain, GridSpec};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::{IndexSet, SurvivalOracle};
use proptest::prelude::*;

fn triplet_strategy() -> impl Strategy<Value = LevyTriplet<f64>> {
    (1usize..=3).prop_flat_map(|d| {
        let atom = (0.05f64..2.0, prop::collection::vec(0.0f64..2.0, d))
            .prop_filter("atom off the origin", |(_, x)| x.iter().any(|&v| v > 0.05))
            .prop_map(|(c, x)| Atom { c, x });
        (prop::collection::vec(0.0f64..1.0, d), prop::collection::vec(atom, 1..=10))
            .prop_map(|(b, atoms)| LevyTriplet::new(b, atoms).unwrap())
    })
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..2.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hazard_density_matches_finite_differences(
        (tr, t) in triplet_strategy().prop_flat_map(|tr| { let d = tr.dim(); (Just(tr), point(d)) })
    ) {
        let d = tr.dim();
        let v = tr.clone().validate().unwrap();
        for i in IndexSet::full(d).unwrap().nonempty_subsets() {
            let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
            let closed = tr.hazard_density(i, &ti).unwrap();
            let fd = mixed_partial_log(&v, i, &ti, None).unwrap();
            prop_assert!((closed - fd).abs() <= 1e-6 * closed.abs().max(1.0), "{i}: {closed} vs {fd}");
        }
    }

    #[test]
    fn exponent_matches_factorization(
        (tr, t) in triplet_strategy().prop_flat_map(|tr| { let d = tr.dim(); (Just(tr), point(d)) })
    ) {
        let d = tr.dim();
        let v = tr.clone().validate().unwrap();
        let grid = GridSpec::new(t.iter().map(|&x| vec![0.0, x]).collect(), GridDomain::Orthant { upper: 10.0 }).unwrap();
        let full = IndexSet::full(d).unwrap();
        let parts = factorize(&v, full, &grid).unwrap();
        for i in full.nonempty_subsets() {
            let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
            let closed = tr.exponent(i, &ti).unwrap();
            let alt = tr.exponent_alternating(i, &ti).unwrap();
            let fact = *parts.exponent(i).unwrap().last().unwrap();
            prop_assert!((closed - fact).abs() <= 1e-8, "{i}: {closed} vs {fact}");
            prop_assert!((closed - alt).abs() <= 1e-12 * tr.total_mass().max(1.0));
        }
    }

    #[test]
    fn scaled_triplet_is_the_nth_root(tr in triplet_strategy(), n in 1usize..50, seed in prop::collection::vec(0.0f64..3.0, 3)) {
        let d = tr.dim();
        let t = &seed[..d];
        let root = tr.scaled(n).unwrap();
        let lhs = root.log_psi(t).unwrap();
        let rhs = tr.log_psi(t).unwrap() / n as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1e-300) + 1e-300);
        let psi_root = lhs.exp();
        let psi = tr.log_psi(t).unwrap().exp();
        prop_assert!((psi_root - psi.powf(1.0 / n as f64)).abs() <= 1e-14);
    }

    #[test]
    fn min_combination_adds_exponents(a in triplet_strategy(), b in triplet_strategy(), t in point(3)) {
        prop_assume!(a.dim() == b.dim());
        let c = a.min_combine(&b).unwrap();
        for i in IndexSet::full(a.dim()).unwrap().nonempty_subsets() {
            let ti: Vec<f64> = i.axes().map(|ax| t[ax]).collect();
            let sum = a.exponent(i, &ti).unwrap() + b.exponent(i, &ti).unwrap();
            prop_assert!((c.exponent(i, &ti).unwrap() - sum).abs() <= 1e-12 * sum.abs().max(1.0));
        }
        let va = a.clone().validate().unwrap();
        let vb = b.clone().validate().unwrap();
        let vc = c.validate().unwrap();
        let x = &t[..a.dim()];
        prop_assert!((vc.survival(x) - va.survival(x) * vb.survival(x)).abs() <= 1e-15);
    }
}

#[test]
fn rejected_triplet_names_coordinates() {
    let tr = LevyTriplet::new(vec![0.0, 1.0], vec![Atom { c: 1.0, x: vec![0.0, 2.0] }]).unwrap();
    let err = tr.validate().unwrap_err();
    assert!(matches!(err, hazdep::Error::Capability(_)));
    assert!(err.to_string().contains('1'));
}
