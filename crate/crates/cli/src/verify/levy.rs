use hazdep::frailty::LaplaceModel;
use hazdep::lattice::{factorize, mixed_partial_log, GridDomain, GridSpec};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::{IndexSet, SurvivalOracle};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng, Recorder, VERIFY_SEED};

const INSTANCES: usize = 40;
const MEAN_DRAWS: usize = 1_000_000;

pub(crate) fn random_triplet(r: &mut ChaCha8Rng) -> LevyTriplet<f64> {
    let d = r.random_range(1..=3);
    let k = r.random_range(1..=10);
    let atoms = (0..k)
        .map(|_| {
            let mut x: Vec<f64> = (0..d).map(|_| r.random_range(0.0..2.0)).collect();
            if x.iter().all(|&v| v <= 0.05) {
                x[0] = 1.0;
            }
            Atom { c: r.random_range(0.05..2.0), x }
        })
        .collect();
    let b = (0..d).map(|_| r.random_range(0.0..1.0)).collect();
    LevyTriplet::new(b, atoms).expect("random triplet is well formed")
}

fn point(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| r.random_range(0.05..2.0)).collect()
}

pub(crate) fn run(rec: &mut Recorder) {
    let mut r = rng(501);
    let cases: Vec<(LevyTriplet<f64>, Vec<f64>)> = (0..INSTANCES)
        .map(|_| {
            let tr = random_triplet(&mut r);
            let t = point(&mut r, tr.dim());
            (tr, t)
        })
        .collect();

    rec.within("closed-form λ_I vs fd", 1e-6, || {
        let mut worst = 0.0f64;
        for (tr, t) in &cases {
            let v = tr.clone().validate()?;
            for i in IndexSet::full(tr.dim())?.nonempty_subsets() {
                let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
                let closed = tr.hazard_density(i, &ti)?;
                let fd = mixed_partial_log(&v, i, &ti, None)?;
                worst = worst.max((closed - fd).abs() / closed.abs().max(1.0));
            }
        }
        Ok(worst)
    });
    rec.within("closed-form Λ_I vs factorization", 1e-8, || {
        let mut worst = 0.0f64;
        for (tr, t) in &cases {
            let v = tr.clone().validate()?;
            let grid = GridSpec::new(t.iter().map(|&x| vec![0.0, x]).collect(), GridDomain::Orthant { upper: 10.0 })?;
            let full = IndexSet::full(tr.dim())?;
            let parts = factorize(&v, full, &grid)?;
            for i in full.nonempty_subsets() {
                let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
                let fact = *parts.exponent(i).expect("exponent").last().expect("nonempty");
                worst = worst.max((tr.exponent(i, &ti)? - fact).abs());
            }
        }
        Ok(worst)
    });
    rec.within("product vs alternating form of Λ_I", 1e-12, || {
        let mut worst = 0.0f64;
        for (tr, t) in &cases {
            for i in IndexSet::full(tr.dim())?.nonempty_subsets() {
                let ti: Vec<f64> = i.axes().map(|a| t[a]).collect();
                let scale = tr.total_mass().max(1.0);
                worst = worst.max((tr.exponent_product(i, &ti)? - tr.exponent_alternating(i, &ti)?).abs() / scale);
            }
        }
        Ok(worst)
    });
    rec.within("scaled triplet is the n-th root", 1e-14, || {
        let mut worst = 0.0f64;
        for (k, (tr, t)) in cases.iter().enumerate() {
            let n = 1 + (k * 7) % 49;
            let root = tr.scaled(n)?.log_psi(t)?.exp();
            let psi = tr.log_psi(t)?.exp();
            worst = worst.max((root - psi.powf(1.0 / n as f64)).abs());
        }
        Ok(worst)
    });
    rec.within("min-combination adds exponents", 1e-12, || {
        let mut worst = 0.0f64;
        for pair in cases.chunks(2) {
            let (a, t) = &pair[0];
            let b = pair.get(1).map(|p| &p.0).filter(|b| b.dim() == a.dim()).unwrap_or(a);
            let c = a.min_combine(b)?;
            for i in IndexSet::full(a.dim())?.nonempty_subsets() {
                let ti: Vec<f64> = i.axes().map(|ax| t[ax]).collect();
                let sum = a.exponent(i, &ti)? + b.exponent(i, &ti)?;
                worst = worst.max((c.exponent(i, &ti)? - sum).abs() / sum.abs().max(1.0));
            }
            let (va, vb, vc) = (a.clone().validate()?, b.clone().validate()?, c.validate()?);
            worst = worst.max((vc.survival(t) - va.survival(t) * vb.survival(t)).abs());
        }
        Ok(worst)
    });
    rec.holds("triplets with a dead coordinate are rejected", || {
        let tr = LevyTriplet::new(vec![0.0, 1.0], vec![Atom { c: 1.0, x: vec![0.0, 2.0] }])?;
        Ok(match tr.validate() {
            Err(hazdep::Error::Capability(_)) => None,
            other => Some(format!("expected a capability error, got {other:?}")),
        })
    });
    rec.within("compound poisson sampler mean", 1.0, || {
        let tr = LevyTriplet::new(
            vec![0.2, 0.1, 0.4],
            vec![Atom { c: 1.0, x: vec![1.0, 0.5, 0.2] }, Atom { c: 0.5, x: vec![0.3, 2.0, 1.0] }],
        )?;
        let mean = tr.mean();
        let model = LaplaceModel::compound_poisson(tr)?;
        let draws = model.sample_frailty(MEAN_DRAWS, VERIFY_SEED + 5)?;
        let n = MEAN_DRAWS as f64;
        let mut worst = 0.0f64;
        for (i, &m) in mean.iter().enumerate() {
            let emp = draws.column_mean(i);
            let var = draws.rows().map(|row| (row[i] - emp).powi(2)).sum::<f64>() / (n - 1.0);
            worst = worst.max((emp - m).abs() / (3.0 * (var / n).sqrt()));
        }
        Ok(worst)
    });
}
