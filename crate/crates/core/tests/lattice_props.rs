use hazdep::depfun::{FrankModel, PropModel};
use hazdep::frailty::{Generator, LaplaceModel};
use hazdep::lattice::{factorize, recompose, GridDomain, GridSpec};
use hazdep::{IndexSet, Model, SurvivalOracle};
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = Model> {
    prop_oneof![
        (1usize..=3).prop_map(|d| LaplaceModel::clayton(d).unwrap().into()),
        (0.3f64..4.0, 1usize..=3)
            .prop_map(|(k, d)| LaplaceModel::shared_from_generator(Generator::gamma(k).unwrap(), d).unwrap().into()),
        (0.2f64..3.0, 2usize..=3).prop_map(|(th, d)| LaplaceModel::shared_from_generator(
            Generator::inverse_gaussian(th).unwrap(),
            d
        )
        .unwrap()
        .into()),
        (-8.0f64..8.0).prop_filter("θ ≠ 0", |t| t.abs() > 1e-3).prop_map(|th| FrankModel::new(th).unwrap().into()),
        (0.0f64..0.25, 0.0f64..0.25, 0.0f64..0.25)
            .prop_map(|(a, b, c)| { PropModel::exponential(3, &[((0, 1), a), ((0, 2), b), ((1, 2), c)]).unwrap().into() }),
    ]
}

fn axes_strategy(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::btree_set(1u32..3000, 1..5), d).prop_map(|sets| {
        sets.into_iter().map(|s| std::iter::once(0.0).chain(s.into_iter().map(|k| f64::from(k) / 1000.0)).collect()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorize_then_recompose_reproduces_marginals(
        (model, axes) in model_strategy().prop_flat_map(|m| { let d = m.dim(); (Just(m), axes_strategy(d)) })
    ) {
        let d = model.dim();
        let grid = GridSpec::new(axes, GridDomain::Orthant { upper: 10.0 }).unwrap();
        let full = IndexSet::full(d).unwrap();
        for j in full.nonempty_subsets() {
            let parts = factorize(&model, j, &grid).unwrap();
            let back = recompose(&parts, j).unwrap();
            for (flat, s) in back.iter().enumerate() {
                let x = parts.point(j, flat);
                let direct = model.marginal_survival(j, &x);
                prop_assert!((s - direct).abs() <= 1e-12 * direct, "{j}: {s} vs {direct}");
            }
        }
    }

    #[test]
    fn parts_do_not_depend_on_the_grid(k in 0.5f64..3.0, a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let m = LaplaceModel::shared_from_generator(Generator::gamma(k).unwrap(), 2).unwrap();
        let coarse = GridSpec::new(vec![vec![0.0, a], vec![0.0, b]], GridDomain::Orthant { upper: 10.0 }).unwrap();
        let fine = GridSpec::new(
            vec![vec![0.0, a / 3.0, a, a + 1.0], vec![0.0, b / 2.0, b]],
            GridDomain::Orthant { upper: 10.0 },
        ).unwrap();
        let full = IndexSet::full(2).unwrap();
        let pc = factorize(&m, full, &coarse).unwrap();
        let pf = factorize(&m, full, &fine).unwrap();
        for i in full.nonempty_subsets() {
            let vc = pc.exponent(i).unwrap();
            let vf = pf.exponent(i).unwrap();
            let top_c = *vc.last().unwrap();
            let idx: Vec<usize> = vec![2; i.len()];
            let top_f = vf[pf.shape(i).flat(&idx)];
            prop_assert!((top_c - top_f).abs() <= 1e-15 * top_c.abs().max(1.0));
        }
    }
}

#[test]
fn univariate_part_is_the_cumulative_hazard() {
    let m = LaplaceModel::clayton(1).unwrap();
    let grid = GridSpec::orthant(1, 11, 5.0).unwrap();
    let one = IndexSet::full(1).unwrap();
    let parts = factorize(&m, one, &grid).unwrap();
    for (flat, v) in parts.exponent(one).unwrap().iter().enumerate() {
        let t = parts.point(one, flat)[0];
        assert!((v - t.ln_1p()).abs() < 1e-15);
    }
}

#[test]
fn clayton_pair_exponent() {
    let m = LaplaceModel::clayton(2).unwrap();
    let grid = GridSpec::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]], GridDomain::Orthant { upper: 10.0 }).unwrap();
    let full = IndexSet::full(2).unwrap();
    let parts = factorize(&m, full, &grid).unwrap();
    let exp = parts.exponent(full).unwrap()[3];
    assert!((exp - (4.0f64 / 3.0).ln()).abs() < 1e-15);
}
