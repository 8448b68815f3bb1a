use std::fmt;
use std::sync::Arc;

use crate::error::{domain_err, param_err, Result};
use crate::lattice::{mixed_partial, Support};

type SurvivalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Continuous univariate lifetime law given through its survival function.
///
/// All quantities are consistent: `Λ = -log S`, `λ = Λ'`, `F = 1 - S`.
#[derive(Clone)]
pub enum Marginal {
    /// `Λ(t) = rate·t`.
    Exponential { rate: f64 },
    /// `Λ(t) = (t/scale)^shape`.
    Weibull { shape: f64, scale: f64 },
    /// Uniform on `[0,1)`, `Λ(t) = -log(1-t)`.
    Uniform,
    /// `S(t) = (1+t)^{-shape}`, the margin of a shared gamma frailty.
    Lomax { shape: f64 },
    /// `S(t) = exp(-θ√t)`, the margin of the shared positive 1/2-stable frailty.
    HalfStable { theta: f64 },
    /// `S(t) = (1+2σ²t)^{-1/2}`, the margin of a χ² frailty.
    ChiSquareScale { sigma2: f64 },
    /// Survival function known only pointwise; quantiles by bisection and
    /// hazard rates by finite differences.
    Numeric { name: String, survival: SurvivalFn, support: Support },
}

impl fmt::Debug for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marginal::Exponential { rate } => write!(f, "Exponential({rate})"),
            Marginal::Weibull { shape, scale } => write!(f, "Weibull({shape}, {scale})"),
            Marginal::Uniform => write!(f, "Uniform"),
            Marginal::Lomax { shape } => write!(f, "Lomax({shape})"),
            Marginal::HalfStable { theta } => write!(f, "HalfStable({theta})"),
            Marginal::ChiSquareScale { sigma2 } => write!(f, "ChiSquareScale({sigma2})"),
            Marginal::Numeric { name, .. } => write!(f, "Numeric({name})"),
        }
    }
}

impl Marginal {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Marginal::Exponential { rate })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Ok(Marginal::Weibull { shape, scale })
    }

    pub fn lomax(shape: f64) -> Result<Self> {
        positive("shape", shape)?;
        Ok(Marginal::Lomax { shape })
    }

    pub fn half_stable(theta: f64) -> Result<Self> {
        positive("theta", theta)?;
        Ok(Marginal::HalfStable { theta })
    }

    pub fn chi_square_scale(sigma2: f64) -> Result<Self> {
        positive("sigma2", sigma2)?;
        Ok(Marginal::ChiSquareScale { sigma2 })
    }

    pub fn numeric(name: impl Into<String>, support: Support, survival: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Marginal::Numeric { name: name.into(), survival: Arc::new(survival), support }
    }

    pub fn support(&self) -> Support {
        match self {
            Marginal::Uniform => Support::UnitCube,
            Marginal::Numeric { support, .. } => *support,
            _ => Support::Orthant,
        }
    }

    /// `Λ(t) = -log S(t)`.
    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        match self {
            Marginal::Exponential { rate } => rate * t,
            Marginal::Weibull { shape, scale } => (t / scale).powf(*shape),
            Marginal::Uniform => -(-t).ln_1p(),
            Marginal::Lomax { shape } => shape * t.ln_1p(),
            Marginal::HalfStable { theta } => theta * t.sqrt(),
            Marginal::ChiSquareScale { sigma2 } => 0.5 * (2.0 * sigma2 * t).ln_1p(),
            Marginal::Numeric { survival, .. } => -survival(t).ln(),
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        match self {
            Marginal::Numeric { survival, .. } => survival(t),
            _ => (-self.cumulative_hazard(t)).exp(),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            Marginal::Numeric { survival, .. } => 1.0 - survival(t),
            _ => -(-self.cumulative_hazard(t)).exp_m1(),
        }
    }

    /// Hazard rate `λ(t)`.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Marginal::Exponential { rate } => *rate,
            Marginal::Weibull { shape, scale } => shape / scale * (t / scale).powf(shape - 1.0),
            Marginal::Uniform => 1.0 / (1.0 - t),
            Marginal::Lomax { shape } => shape / (1.0 + t),
            Marginal::HalfStable { theta } => theta / (2.0 * t.sqrt()),
            Marginal::ChiSquareScale { sigma2 } => sigma2 / (1.0 + 2.0 * sigma2 * t),
            Marginal::Numeric { survival, support, .. } => {
                let f = |x: &[f64]| survival(x[0]).ln();
                -mixed_partial(&f, *support, &[t], None)?
            }
        })
    }

    /// `Λ^{-1}(s)`: the time at which the cumulative hazard reaches `s`.
    pub fn inverse_cumulative_hazard(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(domain_err!("cumulative hazard level {s} must be nonnegative"));
        }
        Ok(match self {
            Marginal::Exponential { rate } => s / rate,
            Marginal::Weibull { shape, scale } => scale * s.powf(1.0 / shape),
            Marginal::Uniform => -(-s).exp_m1(),
            Marginal::Lomax { shape } => (s / shape).exp_m1(),
            Marginal::HalfStable { theta } => (s / theta).powi(2),
            Marginal::ChiSquareScale { sigma2 } => (2.0 * s).exp_m1() / (2.0 * sigma2),
            Marginal::Numeric { survival, support, .. } => bisect_hazard(&**survival, *support, s)?,
        })
    }

    /// `F^{-1}(u)` for `u ∈ [0,1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(domain_err!("quantile level {u} outside [0,1)"));
        }
        self.inverse_cumulative_hazard(-(-u).ln_1p())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param_err!("marginal parameter {name} = {v} must be positive"))
    }
}

fn bisect_hazard(survival: &(dyn Fn(f64) -> f64 + Send + Sync), support: Support, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let hazard = |t: f64| -survival(t).ln();
    let (mut lo, mut hi) = (0.0, 1.0);
    match support {
        Support::UnitCube => {
            hi = 1.0 - f64::EPSILON;
            if hazard(hi) < s {
                return Err(domain_err!("cumulative hazard never reaches {s} on [0,1)"));
            }
        }
        Support::Orthant => {
            let mut grow = 0;
            while hazard(hi) < s {
                lo = hi;
                hi *= 2.0;
                grow += 1;
                if grow > 1100 {
                    return Err(domain_err!("cumulative hazard never reaches {s}"));
                }
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hazard(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<Marginal> {
        vec![
            Marginal::exponential(1.7).unwrap(),
            Marginal::weibull(1.5, 2.0).unwrap(),
            Marginal::Uniform,
            Marginal::lomax(2.5).unwrap(),
            Marginal::half_stable(0.8).unwrap(),
            Marginal::chi_square_scale(1.3).unwrap(),
            Marginal::numeric("loglogistic", Support::Orthant, |t: f64| 1.0 / (1.0 + t * t)),
        ]
    }

    #[test]
    fn quantiles_invert_cdf() {
        for m in all() {
            for &u in &[0.0, 1e-6, 0.1, 0.5, 0.9, 0.999] {
                let t = m.quantile(u).unwrap();
                assert!((m.cdf(t) - u).abs() < 1e-10, "{m:?} at {u}");
            }
            assert!(m.quantile(1.0).is_err());
        }
    }

    #[test]
    fn hazard_is_derivative_of_cumulative() {
        for m in all() {
            for &t in &[0.2, 0.5, 0.8] {
                let h = 1e-5;
                let fd = (m.cumulative_hazard(t + h) - m.cumulative_hazard(t - h)) / (2.0 * h);
                assert!((m.hazard(t).unwrap() - fd).abs() < 1e-6 * fd.abs().max(1.0), "{m:?} at {t}");
            }
        }
    }
}
