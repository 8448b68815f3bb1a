//! Finite Lévy (compound Poisson) frailties.
//!
//! A triplet `(b, η)` with drift `b ∈ [0,∞)^d` and a finite jump measure
//! `η = Σ_k c_k ε_{x_k}` defines the Laplace transform
//! `ψ(t) = exp(-⟨t,b⟩ + Σ_k c_k (e^{-⟨t,x_k⟩} - 1))`.
//! The local dependence hazards and exponents have closed forms in the atoms.

use crate::error::{capability_err, domain_err, param_err, structural_err, Result};
use crate::lattice::{IndexSet, Support, SurvivalOracle};
use crate::scalar::{neumaier_sum, sign_pow, Scalar};

/// One jump of the Lévy measure: intensity `c` at location `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub c: T,
    pub x: Vec<T>,
}

/// Drift plus finitely many weighted jumps.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyTriplet<T> {
    b: Vec<T>,
    atoms: Vec<Atom<T>>,
}

/// Outcome of [`LevyTriplet::validate_positivity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    Accepted,
    /// Zero-based coordinates with `b_i = 0`.
    Rejected {
        coordinates: Vec<usize>,
    },
}

impl<T: Scalar> LevyTriplet<T> {
    pub fn new(b: Vec<T>, atoms: Vec<Atom<T>>) -> Result<Self> {
        let d = b.len();
        if d == 0 || d > crate::lattice::MAX_DIM {
            return Err(structural_err!("drift has {d} coordinates"));
        }
        if let Some(i) = b.iter().position(|&v| !(v >= T::zero()) || !v.is_finite()) {
            return Err(param_err!("drift b_{} = {} must be finite and nonnegative", i + 1, b[i]));
        }
        for (k, a) in atoms.iter().enumerate() {
            if a.x.len() != d {
                return Err(structural_err!("atom {k} has {} coordinates, drift has {d}", a.x.len()));
            }
            if !(a.c > T::zero()) || !a.c.is_finite() {
                return Err(param_err!("atom {k} intensity c = {} must be positive", a.c));
            }
            if a.x.iter().any(|&v| !(v >= T::zero()) || !v.is_finite()) {
                return Err(param_err!("atom {k} location must lie in [0,∞)^{d}"));
            }
            if a.x.iter().all(|&v| v == T::zero()) {
                return Err(param_err!("atom {k} sits at the origin"));
            }
        }
        Ok(Self { b, atoms })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn drift(&self) -> &[T] {
        &self.b
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    /// Total mass `η([0,∞)^d)`.
    pub fn total_mass(&self) -> T {
        neumaier_sum(self.atoms.iter().map(|a| a.c))
    }

    /// Finite jump measures cannot put `Q_0` on `(0,∞)^d` unless every drift
    /// coordinate is positive.
    pub fn validate_positivity(&self) -> Positivity {
        let coordinates: Vec<usize> = (0..self.dim()).filter(|&i| !(self.b[i] > T::zero())).collect();
        if coordinates.is_empty() {
            Positivity::Accepted
        } else {
            Positivity::Rejected { coordinates }
        }
    }

    /// Checks positivity and returns a triplet whose `ψ` may be evaluated.
    pub fn validate(self) -> Result<ValidatedTriplet<T>> {
        match self.validate_positivity() {
            Positivity::Accepted => Ok(ValidatedTriplet(self)),
            Positivity::Rejected { coordinates } => {
                let one_based: Vec<String> = coordinates.iter().map(|i| (i + 1).to_string()).collect();
                Err(capability_err!(
                    "triplet has zero drift in coordinate(s) {}; a finite jump measure cannot put the frailty on (0,∞)^d",
                    one_based.join(",")
                ))
            }
        }
    }

    /// `log ψ(t) = -⟨t,b⟩ + Σ_k c_k (e^{-⟨t,x_k⟩} - 1)`.
    pub fn log_psi(&self, t: &[T]) -> Result<T> {
        Ok(-self.exponent_mass(t)?)
    }

    /// `μ((t,∞]^C) = ⟨t,b⟩ + Σ_k c_k (1 - e^{-⟨t,x_k⟩})`, the exponent of `ψ`.
    pub fn exponent_mass(&self, t: &[T]) -> Result<T> {
        self.check_point(t)?;
        let drift = neumaier_sum(t.iter().zip(&self.b).map(|(&ti, &bi)| ti * bi));
        let jumps = neumaier_sum(self.atoms.iter().map(|a| -a.c * (-dot(t, &a.x)).exp_m1()));
        Ok(drift + jumps)
    }

    /// `λ_I(t_I)`: `b_i + Σ c_k x_{k,i} e^{-t_i x_{k,i}}` for a singleton,
    /// `Σ c_k ∏_{i∈I} x_{k,i} e^{-⟨t_I, x_{k,I}⟩}` otherwise.
    pub fn hazard_density(&self, i: IndexSet, t_i: &[T]) -> Result<T> {
        let axes = self.check_subset(i, t_i)?;
        let jumps = neumaier_sum(self.atoms.iter().map(|a| {
            let prod = axes.iter().fold(T::one(), |p, &ax| p * a.x[ax]);
            let inner = neumaier_sum(axes.iter().zip(t_i).map(|(&ax, &ti)| ti * a.x[ax]));
            a.c * prod * (-inner).exp()
        }));
        if axes.len() == 1 {
            Ok(self.b[axes[0]] + jumps)
        } else {
            Ok(jumps)
        }
    }

    /// `Λ_I(t_I)` in product form `Σ_k c_k ∏_{i∈I}(1 - e^{-x_{k,i} t_i})`,
    /// plus `b_i t_i` for a singleton.
    pub fn exponent_product(&self, i: IndexSet, t_i: &[T]) -> Result<T> {
        let axes = self.check_subset(i, t_i)?;
        let jumps = neumaier_sum(
            self.atoms.iter().map(|a| axes.iter().zip(t_i).fold(a.c, |p, (&ax, &ti)| p * -(-a.x[ax] * ti).exp_m1())),
        );
        if axes.len() == 1 {
            Ok(self.b[axes[0]] * t_i[0] + jumps)
        } else {
            Ok(jumps)
        }
    }

    /// `Λ_I(t_I) = Σ_{J⊆I} (-1)^{|J|} η_{(t_J,0)}([0,∞)^d)` where
    /// `η_t(dx) = e^{-⟨t,x⟩} η(dx)`, plus `b_i t_i` for a singleton.
    pub fn exponent_alternating(&self, i: IndexSet, t_i: &[T]) -> Result<T> {
        let axes = self.check_subset(i, t_i)?;
        let n = axes.len();
        let mut terms = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let sign = sign_pow::<T>(mask.count_ones() as usize);
            let mass = neumaier_sum(self.atoms.iter().map(|a| {
                let inner = neumaier_sum((0..n).filter(|r| mask & (1 << r) != 0).map(|r| t_i[r] * a.x[axes[r]]));
                a.c * (-inner).exp()
            }));
            terms.push(sign * mass);
        }
        let jumps = neumaier_sum(terms);
        if n == 1 {
            Ok(self.b[axes[0]] * t_i[0] + jumps)
        } else {
            Ok(jumps)
        }
    }

    /// `Λ_I(t_I)`, computed in product form after checking that the
    /// alternating-sum form agrees to `1e-12` relative to the jump mass.
    pub fn exponent(&self, i: IndexSet, t_i: &[T]) -> Result<T> {
        let prod = self.exponent_product(i, t_i)?;
        let alt = self.exponent_alternating(i, t_i)?;
        let scale = T::one().max(self.total_mass()).max(prod.abs());
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * scale;
        if (prod - alt).abs() > tol {
            return Err(crate::error::numeric_err!(
                "product ({prod}) and alternating ({alt}) forms of the exponent for {i} disagree"
            ));
        }
        Ok(prod)
    }

    /// Triplet `(b/n, c/n)`, whose `ψ` is the `n`-th root of this one.
    pub fn scaled(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(param_err!("root order must be positive"));
        }
        let nn = T::from_usize_lossy(n);
        Ok(Self {
            b: self.b.iter().map(|&v| v / nn).collect(),
            atoms: self.atoms.iter().map(|a| Atom { c: a.c / nn, x: a.x.clone() }).collect(),
        })
    }

    /// Triplet of the componentwise minimum of two independent models:
    /// drifts add and atom lists concatenate.
    pub fn min_combine(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(structural_err!("dimensions {} and {} differ", self.dim(), other.dim()));
        }
        let b = self.b.iter().zip(&other.b).map(|(&x, &y)| x + y).collect();
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(Self { b, atoms })
    }

    /// Mean frailty `E W_i = b_i + Σ_k c_k x_{k,i}`.
    pub fn mean(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.b[i] + neumaier_sum(self.atoms.iter().map(|a| a.c * a.x[i]))).collect()
    }

    fn check_point(&self, t: &[T]) -> Result<()> {
        if t.len() != self.dim() {
            return Err(structural_err!("point has {} coordinates, triplet has {}", t.len(), self.dim()));
        }
        if let Some(v) = t.iter().find(|&&v| !(v >= T::zero())) {
            return Err(domain_err!("coordinate {v} is negative"));
        }
        Ok(())
    }

    fn check_subset(&self, i: IndexSet, t_i: &[T]) -> Result<Vec<usize>> {
        i.ensure_nonempty()?;
        if i.dim() != self.dim() || t_i.len() != i.len() {
            return Err(structural_err!("subset {i} and point of length {} do not fit dimension {}", t_i.len(), self.dim()));
        }
        if let Some(v) = t_i.iter().find(|&&v| !(v >= T::zero())) {
            return Err(domain_err!("coordinate {v} is negative"));
        }
        Ok(i.to_axes())
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    neumaier_sum(a.iter().zip(b).map(|(&x, &y)| x * y))
}

/// `ψ(t)` of a triplet, refusing triplets that fail the positivity check.
pub fn psi_levy<T: Scalar>(tr: &LevyTriplet<T>, t: &[T]) -> Result<T> {
    tr.clone().validate()?.psi(t)
}

/// A triplet with `b_i > 0` for every `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedTriplet<T>(LevyTriplet<T>);

impl<T: Scalar> ValidatedTriplet<T> {
    pub fn triplet(&self) -> &LevyTriplet<T> {
        &self.0
    }

    pub fn into_inner(self) -> LevyTriplet<T> {
        self.0
    }

    pub fn psi(&self, t: &[T]) -> Result<T> {
        Ok(self.0.log_psi(t)?.exp())
    }

    pub fn scaled(&self, n: usize) -> Result<Self> {
        Ok(Self(self.0.scaled(n)?))
    }

    pub fn min_combine(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.min_combine(&other.0)?))
    }
}

impl<T: Scalar> std::ops::Deref for ValidatedTriplet<T> {
    type Target = LevyTriplet<T>;
    fn deref(&self) -> &LevyTriplet<T> {
        &self.0
    }
}

impl<T: Scalar> SurvivalOracle<T> for ValidatedTriplet<T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn support(&self) -> Support {
        Support::Orthant
    }

    fn survival(&self, x: &[T]) -> T {
        self.log_survival(x).exp()
    }

    fn log_survival(&self, x: &[T]) -> T {
        self.0.log_psi(x).unwrap_or(T::nan())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> LevyTriplet<f64> {
        LevyTriplet::new(vec![0.5, 0.5], vec![Atom { c: 0.3, x: vec![1.0, 2.0] }]).unwrap()
    }

    fn set(d: usize, axes: &[usize]) -> IndexSet {
        IndexSet::from_axes(d, axes).unwrap()
    }

    #[test]
    fn positivity_verdicts() {
        assert_eq!(example().validate_positivity(), Positivity::Accepted);
        let tr = LevyTriplet::new(vec![0.0, 1.0], example().atoms().to_vec()).unwrap();
        assert_eq!(tr.validate_positivity(), Positivity::Rejected { coordinates: vec![0] });
        let err = psi_levy(&tr, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, crate::Error::Capability(ref m) if m.contains("coordinate(s) 1")));
        let tiny = LevyTriplet::new(vec![1e-9, 1.0], vec![]).unwrap();
        assert_eq!(tiny.validate_positivity(), Positivity::Accepted);
    }

    #[test]
    fn psi_examples() {
        let v = example().validate().unwrap();
        assert!((v.psi(&[1.0, 1.0]).unwrap() - 0.276_632_911_898_318_8).abs() < 1e-15);
        assert!((v.exponent_mass(&[1.0, 1.0]).unwrap() - 1.285_063_879_489_640_8).abs() < 1e-15);
        assert_eq!(v.psi(&[0.0, 0.0]).unwrap(), 1.0);
        let det = LevyTriplet::new(vec![1.0; 3], vec![]).unwrap().validate().unwrap();
        assert!((det.psi(&[0.2, 0.3, 0.5]).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn hazard_examples() {
        let tr = example();
        assert!((tr.hazard_density(set(2, &[0]), &[0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert!((tr.hazard_density(set(2, &[0, 1]), &[0.0, 0.0]).unwrap() - 0.6).abs() < 1e-15);
        let v = tr.hazard_density(set(2, &[0, 1]), &[0.1, 0.1]).unwrap();
        assert!((v - 0.444_490_932_409_030_7).abs() < 1e-15);
        let flat = LevyTriplet::new(vec![1.0, 1.0], vec![Atom { c: 2.0, x: vec![1.0, 0.0] }]).unwrap();
        assert_eq!(flat.hazard_density(set(2, &[0, 1]), &[0.3, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn exponent_examples() {
        let ln2 = std::f64::consts::LN_2;
        let tr = LevyTriplet::new(vec![0.5, 0.5], vec![Atom { c: 0.3, x: vec![1.0, 2.0] }]).unwrap();
        let v = tr.exponent(set(2, &[0, 1]), &[ln2, ln2]).unwrap();
        assert!((v - 0.1125).abs() < 1e-15);
        assert_eq!(tr.exponent(set(2, &[0, 1]), &[0.0, 1.0]).unwrap(), 0.0);
        let single = tr.exponent(set(2, &[1]), &[0.7]).unwrap();
        assert!((single - (0.35 + 0.3 * (1.0 - (-1.4f64).exp()))).abs() < 1e-15);
    }

    #[test]
    fn scaled_is_nth_root() {
        let v = example().validate().unwrap();
        for n in 1..6 {
            let s = v.scaled(n).unwrap();
            let t = [0.4, 1.3];
            let root = v.psi(&t).unwrap().powf(1.0 / n as f64);
            assert!((s.psi(&t).unwrap() - root).abs() < 1e-14);
        }
    }

    #[test]
    fn combine_adds_exponents() {
        let a = example();
        let b = LevyTriplet::new(vec![0.1, 0.2], vec![Atom { c: 1.0, x: vec![0.5, 0.0] }]).unwrap();
        let c = a.min_combine(&b).unwrap();
        let t = [0.6, 0.9];
        let sum = a.exponent_mass(&t).unwrap() + b.exponent_mass(&t).unwrap();
        assert!((c.exponent_mass(&t).unwrap() - sum).abs() < 1e-15);
        let mean = c.mean();
        assert!((mean[0] - 1.4).abs() < 1e-15 && (mean[1] - 1.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_atoms() {
        assert!(LevyTriplet::new(vec![1.0], vec![Atom { c: 1.0, x: vec![0.0] }]).is_err());
        assert!(LevyTriplet::new(vec![1.0], vec![Atom { c: 0.0, x: vec![1.0] }]).is_err());
        assert!(LevyTriplet::new(vec![1.0, 1.0], vec![Atom { c: 1.0, x: vec![1.0] }]).is_err());
        assert!(LevyTriplet::new(vec![-1.0], vec![]).is_err());
    }
}
