use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain_err, param_err, Result};

type GeneratorFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Laplace transform `φ` of a univariate frailty law, used as an Archimedean generator.
#[derive(Clone)]
pub enum Generator {
    /// `φ(s) = (1+s)^{-k}`, frailty `Gamma(k, 1)`; `k = 1` is the Clayton case.
    Gamma { shape: f64 },
    /// `φ(s) = exp(-θ√s)`, the positive 1/2-stable frailty.
    InverseGaussian { theta: f64 },
    /// `φ(s) = e^{-s}`, frailty `W ≡ 1`.
    Degenerate,
    /// Any completely monotone `φ` with `φ(0) = 1`; no closed forms or sampler.
    Custom { name: String, phi: GeneratorFn },
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Gamma { shape } => write!(f, "Gamma {{ shape: {shape} }}"),
            Generator::InverseGaussian { theta } => write!(f, "InverseGaussian {{ theta: {theta} }}"),
            Generator::Degenerate => write!(f, "Degenerate"),
            Generator::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Generator {
    pub fn clayton() -> Self {
        Generator::Gamma { shape: 1.0 }
    }

    pub fn gamma(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(param_err!("gamma shape {shape} must be positive"));
        }
        Ok(Generator::Gamma { shape })
    }

    pub fn inverse_gaussian(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(param_err!("inverse Gaussian θ = {theta} must be positive"));
        }
        Ok(Generator::InverseGaussian { theta })
    }

    /// Wraps a user generator after checking `φ(0) = 1`, monotonicity on a
    /// probe set and decay towards zero.
    pub fn custom(name: impl Into<String>, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let at0 = phi(0.0);
        if (at0 - 1.0).abs() > 1e-12 {
            return Err(domain_err!("generator has φ(0) = {at0}, expected 1"));
        }
        let probes: Vec<f64> = (0..=40).map(|k| 10f64.powf(-3.0 + 0.2 * k as f64) - 1e-3).collect();
        let values: Vec<f64> = probes.iter().map(|&s| phi(s)).collect();
        if values.windows(2).any(|w| w[1] > w[0] + 1e-15) || values.iter().any(|v| !(*v > 0.0)) {
            return Err(domain_err!("generator must be positive and nonincreasing"));
        }
        if phi(1e12) > 1e-3 {
            return Err(domain_err!("generator does not decay to 0"));
        }
        Ok(Generator::Custom { name: name.into(), phi: Arc::new(phi) })
    }

    pub fn name(&self) -> String {
        match self {
            Generator::Gamma { shape } if *shape == 1.0 => "clayton".into(),
            Generator::Gamma { shape } => format!("shared_gamma(shape={shape})"),
            Generator::InverseGaussian { theta } => format!("invgauss(theta={theta})"),
            Generator::Degenerate => "degenerate".into(),
            Generator::Custom { name, .. } => name.clone(),
        }
    }

    pub fn log_phi(&self, s: f64) -> f64 {
        match self {
            Generator::Gamma { shape } => -shape * s.ln_1p(),
            Generator::InverseGaussian { theta } => -theta * s.sqrt(),
            Generator::Degenerate => -s,
            Generator::Custom { phi, .. } => phi(s).ln(),
        }
    }

    pub fn phi(&self, s: f64) -> f64 {
        match self {
            Generator::Custom { phi, .. } => phi(s),
            _ => self.log_phi(s).exp(),
        }
    }

    /// `(-1)^n (d/ds)^n log φ(s)`: the local dependence hazard of order `n`
    /// of the shared model at `s = Σ t_i`.
    pub fn lambda(&self, n: usize, s: f64) -> Option<f64> {
        assert!(n >= 1);
        match self {
            Generator::Gamma { shape } => {
                let fact: f64 = (1..n).map(|k| k as f64).product();
                Some(shape * fact * (1.0 + s).powi(-(n as i32)))
            }
            Generator::InverseGaussian { theta } => {
                // d^n/ds^n s^{1/2} = (1/2)(-1/2)...(1/2-n+1) s^{1/2-n}
                let coef: f64 = (0..n).map(|k| 0.5 - k as f64).product();
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                Some(sign * -theta * coef * s.powf(0.5 - n as f64))
            }
            Generator::Degenerate => Some(if n == 1 { 1.0 } else { 0.0 }),
            Generator::Custom { .. } => None,
        }
    }

    /// `(-1)^n φ^{(n)}(s)`, the density value of a shared model at `s = Σ t_i`.
    pub fn signed_derivative(&self, n: usize, s: f64) -> Option<f64> {
        match self {
            Generator::Gamma { shape } => {
                let rising: f64 = (0..n).map(|k| shape + k as f64).product();
                Some(rising * (1.0 + s).powf(-shape - n as f64))
            }
            Generator::Degenerate => Some((-s).exp()),
            _ => None,
        }
    }

    /// Inverse of `φ` on `(0, 1]`.
    pub fn phi_inverse(&self, v: f64) -> Option<f64> {
        match self {
            Generator::Gamma { shape } => Some(v.powf(-1.0 / shape) - 1.0),
            Generator::InverseGaussian { theta } => Some((v.ln() / theta).powi(2)),
            Generator::Degenerate => Some(-v.ln()),
            Generator::Custom { .. } => None,
        }
    }

    pub fn has_sampler(&self) -> bool {
        !matches!(self, Generator::Custom { .. })
    }

    /// One frailty draw; `None` for custom generators.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        match self {
            Generator::Gamma { shape } => Some(Gamma::new(*shape, 1.0).expect("validated shape").sample(rng)),
            Generator::InverseGaussian { theta } => {
                let z: f64 = StandardNormal.sample(rng);
                Some(theta * theta / (2.0 * z * z))
            }
            Generator::Degenerate => Some(1.0),
            Generator::Custom { .. } => None,
        }
    }
}
