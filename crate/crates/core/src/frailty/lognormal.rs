use std::sync::OnceLock;

use rand::Rng;

use super::chisq::Covariance;
use crate::error::{param_err, Result};
use crate::quad::gauss_hermite;

/// Gauss–Hermite nodes per axis.
pub const GH_NODES: usize = 64;

/// Largest dimension with a quadrature Laplace transform.
pub const MAX_LOGNORMAL_DIM: usize = 3;

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(GH_NODES).expect("fixed order"))
}

/// Log-normal frailty `W = exp(Z)`, `Z ~ N(0, Σ)`.
///
/// `ψ(t) = E exp(-Σ t_i e^{Z_i})` is integrated by tensor Gauss–Hermite
/// over the coordinates with `t_i > 0` only, using the Cholesky factor of
/// their sub-covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct LogNormalFrailty {
    cov: Covariance,
}

impl LogNormalFrailty {
    pub fn new(cov: Covariance) -> Result<Self> {
        if cov.dim() > MAX_LOGNORMAL_DIM {
            return Err(param_err!("log-normal frailty supports at most {MAX_LOGNORMAL_DIM} dimensions"));
        }
        Ok(Self { cov })
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    pub fn psi(&self, t: &[f64]) -> f64 {
        let active: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).collect();
        if active.is_empty() {
            return 1.0;
        }
        let sub = self.cov.sub(&active).expect("principal minors of a PD matrix are PD");
        let l = sub.cholesky();
        let ts: Vec<f64> = active.iter().map(|&i| t[i]).collect();
        let (x, w) = rule();
        let k = active.len();
        let n = x.len();
        let total = n.pow(k as u32);
        let mut acc = 0.0;
        let mut comp = 0.0;
        let mut idx = vec![0usize; k];
        for flat in 0..total {
            let mut f = flat;
            let mut weight = 1.0;
            for slot in idx.iter_mut() {
                *slot = f % n;
                f /= n;
                weight *= w[*slot];
            }
            let mut expo = 0.0;
            for a in 0..k {
                let mut z = 0.0;
                for b in 0..=a {
                    z += l[(a, b)] * x[idx[b]];
                }
                expo += ts[a] * z.exp();
            }
            let term = weight * (-expo).exp();
            let y = term - comp;
            let s = acc + y;
            comp = (s - acc) - y;
            acc = s;
        }
        acc
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let z = self.cov.sample_normal(rng);
        for (o, v) in out.iter_mut().zip(z.iter()) {
            *o = v.exp();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_variance_gives_exponential() {
        let ln = LogNormalFrailty::new(Covariance::from_rows(&[vec![1e-10]]).unwrap()).unwrap();
        assert!((ln.psi(&[0.7]) - (-0.7f64).exp()).abs() < 1e-9);
        assert_eq!(ln.psi(&[0.0]), 1.0);
    }

    #[test]
    fn matches_monte_carlo() {
        let cov = Covariance::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.3]]).unwrap();
        let ln = LogNormalFrailty::new(cov).unwrap();
        let t = [0.6, 1.1];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 400_000;
        let mut w = [0.0; 2];
        let mut sum = 0.0;
        for _ in 0..n {
            ln.sample(&mut rng, &mut w);
            sum += (-(t[0] * w[0] + t[1] * w[1])).exp();
        }
        let est = sum / n as f64;
        let want = ln.psi(&t);
        assert!((est - want).abs() < 4.0 * (0.25 / n as f64).sqrt(), "{est} vs {want}");
    }

    #[test]
    fn one_dimensional_converges() {
        // 1-D integral by a fine trapezoid rule on the normal density
        let s2: f64 = 0.8;
        let t = 1.3;
        let h = 1e-3;
        let mut want = 0.0;
        let mut z: f64 = -12.0;
        while z <= 12.0 {
            let dens = (-z * z / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).sqrt();
            want += h * dens * (-t * z.exp()).exp();
            z += h;
        }
        let ln = LogNormalFrailty::new(Covariance::from_rows(&[vec![s2]]).unwrap()).unwrap();
        assert!((ln.psi(&[t]) - want).abs() < 1e-8);
    }
}
