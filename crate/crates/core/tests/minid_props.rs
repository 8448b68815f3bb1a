use hazdep::frailty::{clt_bound, draw_rng};
use hazdep::lattice::{exponent_of_parts, factorize, GridDomain, GridSpec};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::minid::{DiscreteExponentMeasure, MassPoint};
use hazdep::{IndexSet, SurvivalOracle};
use proptest::prelude::*;
use rand_distr::{Distribution, Exp1};

/// Atom coordinates on a 0.1 lattice so that ties with grid nodes occur.
fn measure_strategy() -> impl Strategy<Value = DiscreteExponentMeasure<f64>> {
    (1usize..=4).prop_flat_map(|d| {
        let coord = prop_oneof![3 => (1u32..10).prop_map(|k| f64::from(k) / 10.0), 2 => Just(1.0)];
        let atom = (0.01f64..1.0, prop::collection::vec(coord, d))
            .prop_filter("not at the upper corner", |(_, p)| p.iter().any(|&v| v < 1.0))
            .prop_map(|(w, p)| MassPoint { w, p });
        (prop::collection::vec(atom, 0..8), any::<bool>())
            .prop_map(move |(atoms, boundary)| DiscreteExponentMeasure::new(d, atoms, boundary).unwrap())
    })
}

/// Measures in which every atom has at most one coordinate below 1.
fn pairwise_free_strategy() -> impl Strategy<Value = DiscreteExponentMeasure<f64>> {
    (2usize..=4).prop_flat_map(|d| {
        let atom = (0.01f64..1.0, 0..d, 0.001f64..0.99).prop_map(move |(w, axis, v)| {
            let mut p = vec![1.0; d];
            p[axis] = v;
            MassPoint { w, p }
        });
        (prop::collection::vec(atom, 0..8), any::<bool>())
            .prop_map(move |(atoms, boundary)| DiscreteExponentMeasure::new(d, atoms, boundary).unwrap())
    })
}

fn grid(d: usize) -> GridSpec<f64> {
    let axis = vec![0.0, 0.1, 0.25, 0.5, 0.7, 0.9];
    GridSpec::new(vec![axis; d], GridDomain::UnitCube { delta: 0.01 }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponents_identify_projected_measures(mu in measure_strategy()) {
        let g = grid(mu.dim());
        for i in IndexSet::full(mu.dim()).unwrap().nonempty_subsets() {
            let sup = mu.identify_lambda(i, &g.restrict(&i.to_axes())).unwrap();
            prop_assert!(sup <= 1e-10, "{i}: {sup}");
        }
    }

    #[test]
    fn survival_routes_agree(mu in measure_strategy(), x in prop::collection::vec(0.0f64..0.999, 4)) {
        let x = &x[..mu.dim()];
        let a = mu.survival_from_mu(x).unwrap();
        let b = mu.survival_incl_excl(x).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn report_matches_factorization(mu in measure_strategy()) {
        let d = mu.dim();
        let full = IndexSet::full(d).unwrap();
        let exps = exponent_of_parts(&factorize(&mu, full, &grid(d)).unwrap()).unwrap();
        let report = mu.independence_report();
        prop_assert!(report.pairwise_implies_all());
        for i in full.nonempty_subsets() {
            if report.vanishes(i) == Some(true) {
                prop_assert!(exps.raw(i).unwrap().iter().all(|v| v.abs() <= 1e-12));
            }
        }
    }

    #[test]
    fn pairwise_zero_forces_all_higher_zero(mu in pairwise_free_strategy()) {
        let report = mu.independence_report();
        prop_assert!(report.pairwise_zero());
        prop_assert!(report.higher_zero());
        let full = IndexSet::full(mu.dim()).unwrap();
        let exps = exponent_of_parts(&factorize(&mu, full, &grid(mu.dim())).unwrap()).unwrap();
        for i in full.nonempty_subsets().into_iter().filter(|i| i.len() >= 2) {
            prop_assert!(exps.raw(i).unwrap().iter().all(|v| v.abs() <= 1e-12));
        }
    }

    #[test]
    fn roots_stay_survival_functions(mu in measure_strategy(), n in 1usize..6) {
        prop_assert!(mu.root_min_increment(n, &grid(mu.dim())).unwrap() >= -1e-14);
    }
}

#[test]
fn drift_only_triplet_is_the_independence_boundary() {
    let tr = LevyTriplet::new(vec![1.0; 3], vec![]).unwrap().validate().unwrap();
    let mu = DiscreteExponentMeasure::new(3, vec![], true).unwrap();
    for t in [[0.1, 0.5, 2.0], [0.0, 1.0, 0.3]] {
        let u: Vec<f64> = t.iter().map(|&v: &f64| -(-v).exp_m1()).collect();
        assert!((tr.survival(&t) - mu.survival(&u)).abs() < 1e-15);
    }
}

/// Each Lévy atom `(c, x)` is a min-ID exponent measure in copula scale:
/// `1 - e^{-⟨t,x⟩} = P(∃i: 1 - e^{-E_i/x_i} ≤ u_i)` with `E_i` i.i.d. unit
/// exponential and `u_i = 1 - e^{-t_i}`. Discretizing by `N` draws per atom
/// reproduces the triplet's survival function up to Monte Carlo error.
#[test]
fn compound_poisson_matches_discretized_min_id() {
    let levy = vec![Atom { c: 0.8, x: vec![1.0, 0.5] }, Atom { c: 0.4, x: vec![0.0, 2.0] }, Atom { c: 1.1, x: vec![1.5, 1.5] }];
    let b = vec![1.0, 1.0];
    let tr = LevyTriplet::new(b, levy.clone()).unwrap().validate().unwrap();
    let n = 200_000;
    let mut rng = draw_rng(7, 0, 0);
    let mut atoms = Vec::with_capacity(n * levy.len());
    for a in &levy {
        for _ in 0..n {
            let p =
                a.x.iter()
                    .map(|&xi| {
                        let e: f64 = Exp1.sample(&mut rng);
                        if xi == 0.0 {
                            1.0
                        } else {
                            -(-e / xi).exp_m1()
                        }
                    })
                    .collect();
            atoms.push(MassPoint { w: a.c / n as f64, p });
        }
    }
    let mu = DiscreteExponentMeasure::new(2, atoms, true).unwrap();
    for t in [[0.2, 0.2], [0.5, 1.0], [1.5, 0.3], [2.0, 2.0], [0.05, 3.0]] {
        let u: Vec<f64> = t.iter().map(|&v: &f64| -(-v).exp_m1()).collect();
        let exact = tr.exponent_mass(&t).unwrap();
        let approx = mu.complement_mass(&u).unwrap();
        let tol: f64 = levy
            .iter()
            .map(|a| {
                let q = -(-(a.x[0] * t[0] + a.x[1] * t[1])).exp_m1();
                3.0 * a.c * clt_bound(q, n) / 3.0
            })
            .sum::<f64>()
            * 3.0;
        assert!((exact - approx).abs() <= tol, "t={t:?}: {exact} vs {approx} (tol {tol})");
    }
}
