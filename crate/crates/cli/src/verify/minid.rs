use hazdep::lattice::{exponent_of_parts, factorize, GridDomain, GridSpec};
use hazdep::minid::{DiscreteExponentMeasure, MassPoint};
use hazdep::IndexSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng, Recorder};

const INSTANCES: usize = 40;

/// Atom coordinates on a 0.1 lattice or at the upper edge, so that ties with grid nodes occur.
fn random_measure(r: &mut ChaCha8Rng) -> DiscreteExponentMeasure<f64> {
    let d = r.random_range(1..=4);
    let k = r.random_range(0..=20);
    let atoms = (0..k)
        .map(|_| {
            let mut p: Vec<f64> =
                (0..d).map(|_| if r.random_bool(0.4) { 1.0 } else { f64::from(r.random_range(1u32..10)) / 10.0 }).collect();
            if p.iter().all(|&v| v == 1.0) {
                p[0] = 0.5;
            }
            MassPoint { w: r.random_range(0.01..1.0), p }
        })
        .collect();
    DiscreteExponentMeasure::new(d, atoms, r.random_bool(0.5)).expect("random measure is well formed")
}

/// Every atom has at most one coordinate below the upper edge.
fn pairwise_free_measure(r: &mut ChaCha8Rng) -> DiscreteExponentMeasure<f64> {
    let d = r.random_range(2..=4);
    let k = r.random_range(0..=20);
    let atoms = (0..k)
        .map(|_| {
            let mut p = vec![1.0; d];
            p[r.random_range(0..d)] = r.random_range(0.001..0.99);
            MassPoint { w: r.random_range(0.01..1.0), p }
        })
        .collect();
    DiscreteExponentMeasure::new(d, atoms, r.random_bool(0.5)).expect("random measure is well formed")
}

fn grid(d: usize) -> GridSpec<f64> {
    let axis = vec![0.0, 0.1, 0.25, 0.5, 0.7, 0.9];
    GridSpec::new(vec![axis; d], GridDomain::UnitCube { delta: 0.01 }).expect("valid grid")
}

fn root_grid(d: usize) -> GridSpec<f64> {
    GridSpec::unit_cube(d, 11, 0.01).expect("valid grid")
}

pub(crate) fn run(rec: &mut Recorder) {
    let mut r = rng(601);
    let measures: Vec<_> = (0..INSTANCES).map(|_| random_measure(&mut r)).collect();
    let free: Vec<_> = (0..INSTANCES / 2).map(|_| pairwise_free_measure(&mut r)).collect();

    rec.within("Λ_I identifies the projected measure", 1e-10, || {
        let mut worst = 0.0f64;
        for mu in &measures {
            let g = grid(mu.dim());
            for i in IndexSet::full(mu.dim())?.nonempty_subsets() {
                worst = worst.max(mu.identify_lambda(i, &g.restrict(&i.to_axes()))?);
            }
        }
        Ok(worst)
    });
    rec.within("survival from μ vs inclusion-exclusion", 1e-14, || {
        let mut worst = 0.0f64;
        let mut pr = rng(602);
        for mu in &measures {
            for _ in 0..10 {
                let x: Vec<f64> = (0..mu.dim()).map(|_| pr.random_range(0.0..0.999)).collect();
                let (a, b) = (mu.survival_from_mu(&x)?, mu.survival_incl_excl(&x)?);
                worst = worst.max((a - b).abs() / a.max(f64::MIN_POSITIVE));
            }
        }
        Ok(worst)
    });
    rec.holds("pairwise-zero implies all-zero", || {
        for mu in measures.iter().chain(&free) {
            let report = mu.independence_report();
            if !report.pairwise_implies_all() {
                return Ok(Some(format!("report {report:?} violates the implication")));
            }
        }
        for mu in &free {
            let report = mu.independence_report();
            if !(report.pairwise_zero() && report.higher_zero()) {
                return Ok(Some(format!("pairwise-free measure reports {report:?}")));
            }
            let full = IndexSet::full(mu.dim())?;
            let exps = exponent_of_parts(&factorize(mu, full, &grid(mu.dim()))?)?;
            for i in full.nonempty_subsets().into_iter().filter(|i| i.len() >= 2) {
                if let Some(v) = exps.raw(i).expect("exponent").iter().find(|v| v.abs() > 1e-12) {
                    return Ok(Some(format!("Λ_{i} = {v} on a pairwise-free measure")));
                }
            }
        }
        Ok(None)
    });
    rec.within("n-th roots are survival functions", 1e-12, || {
        let mut worst = 0.0f64;
        for (k, mu) in measures.iter().enumerate() {
            let n = 1 + k % 5;
            worst = worst.max(-mu.root_min_increment(n, &root_grid(mu.dim()))?);
        }
        Ok(worst)
    });
    rec.within("three-atom example Λ_{1,2} on [0,0.6]²", 1e-12, || {
        let mu = DiscreteExponentMeasure::new(
            2,
            vec![
                MassPoint { w: 0.4, p: vec![0.3, 1.0] },
                MassPoint { w: 0.5, p: vec![1.0, 0.6] },
                MassPoint { w: 0.2, p: vec![0.5, 0.5] },
            ],
            false,
        )?;
        let full = IndexSet::full(2)?;
        let g = GridSpec::new(vec![vec![0.0, 0.6]; 2], GridDomain::UnitCube { delta: 0.4 })?;
        let v: f64 = *factorize(&mu, full, &g)?.exponent(full).expect("exponent").last().expect("nonempty");
        Ok((v - 0.2).abs().max((mu.survival_from_mu(&[0.4, 0.4])? - (-0.4f64).exp()).abs()))
    });
}
