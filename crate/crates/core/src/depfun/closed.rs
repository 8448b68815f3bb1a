use crate::error::{domain_err, param_err, Result};
use crate::scalar::{log1p_minus, Scalar};

/// Bivariate models with a closed-form copula-scale dependence function `γ_0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gamma0Family<T> {
    /// Shared standard exponential frailty.
    Clayton,
    /// Shared `Gamma(k)` frailty; `k = 1` is Clayton.
    SharedGamma { shape: T },
    /// Frank survival copula, `θ ≠ 0`.
    Frank { theta: T },
    /// Shared positive 1/2-stable frailty, `θ > 0`; `γ_0` does not depend on `θ`.
    InverseGaussian { theta: T },
    /// χ² frailty pair with squared correlation `ρ² ∈ [0,1)`.
    ChiSquare { rho2: T },
    /// Proportional hazard dependence, `γ_0 ≡ -β`, `β ∈ [0,1]`.
    Prop { beta: T },
}

impl<T: Scalar> Gamma0Family<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Gamma0Family::Clayton => true,
            Gamma0Family::SharedGamma { shape } => shape > T::zero() && shape.is_finite(),
            Gamma0Family::Frank { theta } => theta != T::zero() && theta.is_finite(),
            Gamma0Family::InverseGaussian { theta } => theta > T::zero() && theta.is_finite(),
            Gamma0Family::ChiSquare { rho2 } => rho2 >= T::zero() && rho2 < T::one(),
            Gamma0Family::Prop { beta } => beta >= T::zero() && beta <= T::one(),
        };
        if ok {
            Ok(())
        } else {
            Err(domain_err!("parameters of {self:?} outside their documented range"))
        }
    }

    pub fn name(&self) -> String {
        match self {
            Gamma0Family::Clayton => "clayton".into(),
            Gamma0Family::SharedGamma { shape } => format!("shared_gamma(shape={shape})"),
            Gamma0Family::Frank { theta } => format!("frank(theta={theta})"),
            Gamma0Family::InverseGaussian { theta } => format!("invgauss(theta={theta})"),
            Gamma0Family::ChiSquare { rho2 } => format!("chisq(rho2={rho2})"),
            Gamma0Family::Prop { beta } => format!("prop(beta={beta})"),
        }
    }

    /// `γ_0(u_1, u_2)` on `[0,1)²`. The inverse Gaussian pole at the origin is a domain error.
    pub fn eval(&self, u1: T, u2: T) -> Result<T> {
        self.validate()?;
        let unit = |u: T| u >= T::zero() && u < T::one();
        if !unit(u1) || !unit(u2) {
            return Err(domain_err!("γ_0 argument ({u1}, {u2}) outside [0,1)²"));
        }
        let one = T::one();
        let (v1, v2) = (one - u1, one - u2);
        Ok(match *self {
            Gamma0Family::Clayton => v1 * v2 / (one - u1 * u2).powi(2),
            Gamma0Family::SharedGamma { shape } => {
                let e = -one / shape;
                let (a1, a2) = (v1.powf(e), v2.powf(e));
                a1 * a2 / (shape * (a1 + a2 - one).powi(2))
            }
            Gamma0Family::Frank { theta } => frank_pair_hazard(theta, u1, u2) * v1 * v2,
            Gamma0Family::InverseGaussian { .. } => {
                let (l1, l2) = ((-u1).ln_1p(), (-u2).ln_1p());
                let norm = l1 * l1 + l2 * l2;
                if norm == T::zero() {
                    return Err(domain_err!("inverse Gaussian γ_0 has a pole at the origin"));
                }
                l1 * l2 / norm.powf(T::lit(1.5))
            }
            Gamma0Family::ChiSquare { rho2 } => {
                let two = T::lit(2.0);
                let r = v1 * v2 / (one - rho2 * (two - u1) * (two - u2) * u1 * u2);
                two * rho2 * r * r
            }
            Gamma0Family::Prop { beta } => -beta,
        })
    }
}

/// `λ_{1,2}(F^{-1}(u))` of the Frank survival copula with exponential margins.
fn frank_pair_hazard<T: Scalar>(theta: T, u1: T, u2: T) -> T {
    let one = T::one();
    let den = (-theta).exp_m1();
    let (a1, a2) = (theta * (u1 - one), theta * (u2 - one));
    let g = a1.exp_m1() * a2.exp_m1() / den;
    let ratio = if g == T::zero() {
        -T::lit(0.5)
    } else if g > -T::lit(0.5) {
        let l = g.ln_1p();
        log1p_minus(g) / ((one + g) * l).powi(2)
    } else {
        // 1 + g close to 0: expand the numerator to avoid cancellation
        let onepg = ((-theta).exp() - a1.exp() - a2.exp() + (a1 + a2).exp()) / den;
        let l = onepg.ln();
        (l - g) / (onepg * l).powi(2)
    };
    theta * theta * (a1 + a2).exp() / den * ratio
}

/// Closed-form `γ_0` by family, after checking the parameter range.
pub fn catalog_gamma0<T: Scalar>(family: Gamma0Family<T>, u1: T, u2: T) -> Result<T> {
    family.eval(u1, u2)
}

/// Parses a family from a name and a parameter value.
pub fn family_from_name<T: Scalar>(name: &str, param: Option<T>) -> Result<Gamma0Family<T>> {
    let need = || param.ok_or_else(|| param_err!("family `{name}` needs a parameter"));
    let fam = match name {
        "clayton" => Gamma0Family::Clayton,
        "shared_gamma" => Gamma0Family::SharedGamma { shape: need()? },
        "frank" => Gamma0Family::Frank { theta: need()? },
        "invgauss" => Gamma0Family::InverseGaussian { theta: need()? },
        "chisq" => Gamma0Family::ChiSquare { rho2: need()? },
        "prop" => Gamma0Family::Prop { beta: need()? },
        other => return Err(param_err!("unknown γ_0 family `{other}`")),
    };
    fam.validate()?;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clayton_values() {
        let c = Gamma0Family::<f64>::Clayton;
        assert!((c.eval(0.5, 0.5).unwrap() - 4.0 / 9.0).abs() < 1e-16);
        assert_eq!(c.eval(0.0, 0.0).unwrap(), 1.0);
        let g1 = Gamma0Family::SharedGamma { shape: 1.0 };
        assert!((g1.eval(0.3, 0.8).unwrap() - c.eval(0.3, 0.8).unwrap()).abs() < 1e-15);
        assert!(c.eval(1.0, 0.2).is_err());
    }

    #[test]
    fn frank_values() {
        // high-precision references
        let mid = [
            (-5.0f64, -1.14246405302788f64),
            (-2.0, -0.308263125145989),
            (-0.5, -0.0653533572781895),
            (0.5, 0.0601342051862039),
            (2.0, 0.22227669714497),
            (5.0, 0.537384379374469),
            (10.0, 1.13267694343456),
        ];
        let corner = [
            (-5.0f64, -0.966081725468479f64),
            (-2.0, -0.686964714500669),
            (-0.5, -0.229252958731601),
            (0.5, 0.270747041268399),
            (2.0, 1.31303528549933),
            (5.0, 4.03391827453152),
            (10.0, 9.0004540199101),
        ];
        for (theta, want) in mid {
            let v = Gamma0Family::Frank { theta }.eval(0.5, 0.5).unwrap();
            assert!((v - want).abs() < 1e-13 * want.abs().max(1.0), "θ={theta}: {v}");
        }
        for (theta, want) in corner {
            let v = Gamma0Family::Frank { theta }.eval(0.0, 0.0).unwrap();
            assert!((v - want).abs() < 1e-13 * want.abs().max(1.0), "θ={theta}: {v}");
        }
        assert!(Gamma0Family::Frank { theta: 0.0 }.eval(0.5, 0.5).is_err());
        let near_one = Gamma0Family::Frank { theta: 2.0f64 }.eval(0.999_999, 0.999_999).unwrap();
        assert!(near_one.is_finite());
    }

    #[test]
    fn inverse_gaussian_values() {
        let ig = Gamma0Family::InverseGaussian { theta: 1.0 };
        let u = 1.0 - (-1.0f64).exp();
        assert!((ig.eval(u, u).unwrap() - 2f64.powf(-1.5)).abs() < 1e-15);
        assert!((ig.eval(0.3, 0.6).unwrap() - 0.343_793_038_197_532_94).abs() < 1e-15);
        assert!(ig.eval(0.0, 0.0).is_err());
        assert_eq!(ig.eval(0.0, 0.4).unwrap(), 0.0);
        let other = Gamma0Family::InverseGaussian { theta: 5.0 };
        assert_eq!(other.eval(0.3, 0.6).unwrap(), ig.eval(0.3, 0.6).unwrap());
    }

    #[test]
    fn chi_square_and_prop_values() {
        let c = Gamma0Family::ChiSquare { rho2: 0.5f64 };
        assert!((c.eval(0.3, 0.6).unwrap() - 0.126_967_337_846_676_72).abs() < 1e-15);
        for rho2 in [0.1, 0.5, 0.9] {
            assert_eq!(Gamma0Family::ChiSquare { rho2 }.eval(0.0, 0.0).unwrap(), 2.0 * rho2);
        }
        assert_eq!(Gamma0Family::Prop { beta: 1.0 }.eval(0.7, 0.1).unwrap(), -1.0);
        assert!(Gamma0Family::Prop { beta: 1.5 }.eval(0.7, 0.1).is_err());
        assert!(Gamma0Family::ChiSquare { rho2: 1.0 }.eval(0.7, 0.1).is_err());
    }

    #[test]
    fn single_precision_evaluates() {
        let v = Gamma0Family::<f32>::Clayton.eval(0.5, 0.5).unwrap();
        assert!((v - 4.0 / 9.0).abs() < 1e-6);
    }
}
