use hazdep::higher::{
    copula_family, r_norm_sq, r_univ, s_dep_from_gamma, s_dep_from_score, score_norm_sq, Component, ScoreFunction, ScoreTerm,
};
use hazdep::lattice::{factorize, linspace, GridSpec};
use hazdep::IndexSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng, Recorder};

/// A single product of odd shifted Legendre components with a random coefficient.
fn random_product_score(r: &mut ChaCha8Rng, d: usize) -> ScoreFunction<f64> {
    let factors = (0..d).map(|_| Component::legendre_odd(2 * r.random_range(0..4) + 1).expect("odd degree")).collect();
    ScoreFunction::new(vec![ScoreTerm { coef: r.random_range(-1.0..1.0), factors }]).expect("valid score")
}

fn random_score(r: &mut ChaCha8Rng, d: usize) -> ScoreFunction<f64> {
    let terms = r.random_range(1..4);
    let terms = (0..terms).flat_map(|_| random_product_score(r, d).terms().to_vec()).collect();
    ScoreFunction::new(terms).expect("valid score")
}

fn isometry_gap(g: &ScoreFunction<f64>, nodes: usize) -> hazdep::Result<f64> {
    Ok((score_norm_sq(g, nodes)?.sqrt() - r_norm_sq(g, nodes)?.sqrt()).abs())
}

pub(crate) fn run(rec: &mut Recorder) {
    rec.within("R(2x-1) = x-1", 1e-12, || {
        let lin = Component::<f64>::legendre_odd(1)?;
        let mut worst = 0.0f64;
        for x in linspace(0.0, 0.999, 101) {
            worst = worst.max((r_univ(&lin, x)? - (x - 1.0)).abs());
        }
        Ok(worst)
    });

    let mut r = rng(801);
    let scores2: Vec<_> = (0..20).map(|_| random_product_score(&mut r, 2)).collect();
    let scores3: Vec<_> = (0..20).map(|_| random_product_score(&mut r, 3)).collect();
    rec.within("isometry d=2", 1e-6, || scores2.iter().try_fold(0.0f64, |w, g| Ok(w.max(isometry_gap(g, 2001)?))));
    rec.within("isometry d=3", 1e-4, || scores3.iter().try_fold(0.0f64, |w, g| Ok(w.max(isometry_gap(g, 301)?))));

    rec.within("dependence part from γ vs from the score", 1e-8, || {
        let mut r = rng(802);
        let mut worst = 0.0f64;
        for k in 0..50 {
            let d = 2 + k % 2;
            let g = random_score(&mut r, d);
            let x: Vec<f64> = (0..d).map(|_| r.random_range(0.001..0.99)).collect();
            worst = worst.max((s_dep_from_score(&g, &x)? - s_dep_from_gamma(&g, &x)?).abs());
        }
        Ok(worst)
    });

    // Exact up to the rounding of x(1-x)/(1-x).
    rec.within("FGM score at θ=1 gives S_{I₀} = 1 + x₁x₂", 8.0 * f64::EPSILON, || {
        let c = copula_family(ScoreFunction::product_linear(2, 1.0f64)?, 1.0)?;
        let mut worst = 0.0f64;
        for a in linspace(0.0, 0.95, 20) {
            for b in linspace(0.0, 0.95, 20) {
                worst = worst.max((c.dependence_part(&[a, b])? - (1.0 + a * b)).abs());
            }
        }
        Ok(worst)
    });

    rec.within("copula marginals are uniform", 1e-10, || {
        let mut r = rng(803);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let g = random_score(&mut r, 3);
            let theta = (1.0 / g.inf().abs().max(1.0)).min(1.0);
            let c = copula_family(g, theta)?;
            let x: Vec<f64> = (0..3).map(|_| r.random_range(0.0..1.0)).collect();
            for axis in 0..3 {
                worst = worst.max((c.axis_integral(axis, &x)? - 1.0).abs());
            }
        }
        Ok(worst)
    });

    rec.holds("d=3 product scores have vanishing pair exponents", || {
        let grid = GridSpec::unit_cube(3, 11, 0.01)?;
        let full = IndexSet::full(3)?;
        let mut r = rng(804);
        let mut scores = vec![ScoreFunction::product_linear(3, 1.0f64)?];
        scores.extend((0..4).map(|_| random_product_score(&mut r, 3)));
        for g in scores {
            let coef = g.terms()[0].coef;
            let theta = (1.0 / g.inf().abs().max(1.0)).min(1.0);
            let c = copula_family(g, theta)?;
            let parts = factorize(&c, full, &grid)?;
            for i in full.nonempty_subsets().into_iter().filter(|i| i.len() == 2) {
                if let Some(v) = parts.exponent(i).expect("exponent").iter().find(|v| v.abs() > 1e-8) {
                    return Ok(Some(format!("Λ_{i} = {v}")));
                }
            }
            let top = parts.exponent(full).expect("exponent").iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if coef.abs() > 0.1 && top < 1e-6 {
                return Ok(Some(format!("Λ_123 is trivial (max {top}) for coefficient {coef}")));
            }
        }
        Ok(None)
    });

    rec.within("first-order remainder shrinks like θ", 0.2, || {
        let g = ScoreFunction::product_linear(2, 1.0f64)?;
        let probe = linspace(0.0, 0.9, 10);
        let thetas = [0.1, 0.05, 0.025];
        let mut sups = [0.0f64; 3];
        let mut worst = 0.0f64;
        for (k, &t) in thetas.iter().enumerate() {
            let c = copula_family(g.clone(), t)?;
            for &a in &probe {
                for &b in &probe {
                    sups[k] = sups[k].max(c.first_order_remainder(&[a, b])?.abs());
                }
            }
        }
        for w in sups.windows(2) {
            if !(w[1] < w[0]) {
                return Ok(f64::INFINITY);
            }
            worst = worst.max((w[0] / w[1] / 2.0 - 1.0).abs());
        }
        Ok(worst)
    });
}
