//! Min-infinitely divisible survival functions on the unit cube.
//!
//! `S(x) = exp(-μ((x,1]^C))` for an exponent measure `μ` on `[0,1]^d \ {1}`
//! made of finitely many atoms, optionally plus the boundary measure
//! `Σ_i Λ_0 ⊗ ε_1` with `Λ_0(t) = -log(1-t)` which on its own gives the
//! independence copula.

use rayon::prelude::*;

use crate::error::{domain_err, param_err, structural_err, Result};
use crate::lattice::{exponent_of_parts, factorize, GridSpec, IndexSet, Support, SurvivalOracle};
use crate::scalar::{neumaier_sum, sign_pow, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct MassPoint<T> {
    pub w: T,
    pub p: Vec<T>,
}

/// Finite exponent measure with an optional uniform-margin boundary part.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteExponentMeasure<T> {
    dim: usize,
    atoms: Vec<MassPoint<T>>,
    uniform_margin_boundary: bool,
}

impl<T: Scalar> DiscreteExponentMeasure<T> {
    pub fn new(dim: usize, atoms: Vec<MassPoint<T>>, uniform_margin_boundary: bool) -> Result<Self> {
        if dim == 0 || dim > crate::lattice::MAX_DIM {
            return Err(structural_err!("dimension {dim} unsupported"));
        }
        for (k, a) in atoms.iter().enumerate() {
            if a.p.len() != dim {
                return Err(structural_err!("atom {k} has {} coordinates, expected {dim}", a.p.len()));
            }
            if !(a.w > T::zero()) || !a.w.is_finite() {
                return Err(param_err!("atom {k} mass {} must be positive", a.w));
            }
            if a.p.iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
                return Err(param_err!("atom {k} lies outside [0,1]^{dim}"));
            }
            if a.p.iter().all(|&v| v == T::one()) {
                return Err(param_err!("atom {k} sits at the upper corner (1,…,1)"));
            }
        }
        Ok(Self { dim, atoms, uniform_margin_boundary })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[MassPoint<T>] {
        &self.atoms
    }

    pub fn has_boundary(&self) -> bool {
        self.uniform_margin_boundary
    }

    /// Whether all margins are uniform, i.e. `S` is itself a copula survival function.
    pub fn is_copula(&self) -> bool {
        self.uniform_margin_boundary && self.atoms.is_empty()
    }

    /// `μ((x,1]^C)` by testing each atom for membership in `(x,1]`.
    ///
    /// An atom with `p_i = x_i` is outside `(x,1]`.
    pub fn complement_mass(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        let atoms = neumaier_sum(self.atoms.iter().filter(|a| a.p.iter().zip(x).any(|(&pi, &xi)| pi <= xi)).map(|a| a.w));
        Ok(self.boundary_mass(x) + atoms)
    }

    /// `μ((x,1]^C) = Σ_{∅≠J} (-1)^{|J|+1} μ_J(∏_{j∈J}[0,x_j])`.
    pub fn complement_mass_incl_excl(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        let full = IndexSet::full(self.dim)?;
        let terms = full.nonempty_subsets().into_iter().map(|j| {
            let xj: Vec<T> = j.axes().map(|a| x[a]).collect();
            sign_pow::<T>(j.len() + 1) * self.projected_box_mass(j, &xj)
        });
        Ok(neumaier_sum(terms))
    }

    /// `μ_I(∏_{i∈I}[0,x_i])` for the projection onto the axes of `I`.
    ///
    /// Only singletons see the boundary part; for `|I| ≥ 2` its projection
    /// lies on the upper faces.
    pub fn projected_box_mass(&self, i: IndexSet, x_i: &[T]) -> T {
        let axes = i.to_axes();
        let atoms = neumaier_sum(self.atoms.iter().filter(|a| axes.iter().zip(x_i).all(|(&ax, &xv)| a.p[ax] <= xv)).map(|a| a.w));
        if self.uniform_margin_boundary && axes.len() == 1 {
            atoms - (-x_i[0]).ln_1p()
        } else {
            atoms
        }
    }

    /// Survival by direct atom membership.
    pub fn survival_from_mu(&self, x: &[T]) -> Result<T> {
        Ok((-self.complement_mass(x)?).exp())
    }

    /// Survival by inclusion–exclusion over the projected measures.
    pub fn survival_incl_excl(&self, x: &[T]) -> Result<T> {
        Ok((-self.complement_mass_incl_excl(x)?).exp())
    }

    /// Image of `μ` under the projection onto `I`, dropping mass that lands on `(1,…,1)`.
    pub fn project(&self, i: IndexSet) -> Result<Self> {
        i.ensure_nonempty()?;
        if i.dim() != self.dim {
            return Err(structural_err!("subset {i} is not over dimension {}", self.dim));
        }
        let axes = i.to_axes();
        let atoms = self
            .atoms
            .iter()
            .map(|a| MassPoint { w: a.w, p: axes.iter().map(|&ax| a.p[ax]).collect() })
            .filter(|a| a.p.iter().any(|&v| v < T::one()))
            .collect();
        Ok(Self { dim: axes.len(), atoms, uniform_margin_boundary: self.uniform_margin_boundary })
    }

    /// Sup over the grid of `|Λ_I - μ_I(∏[0,x_i])|`, with `Λ_I` obtained by
    /// factorizing the survival function built from `μ`.
    ///
    /// Needs `S(0) = 1`: an atom with a zero coordinate is a domain error.
    pub fn identify_lambda(&self, i: IndexSet, grid: &GridSpec<T>) -> Result<T> {
        i.ensure_nonempty()?;
        if let Some(a) = self.atoms.iter().find(|a| a.p.iter().any(|&v| v == T::zero())) {
            return Err(domain_err!("atom at {:?} lies on the lower boundary, so S(0) < 1", a.p));
        }
        let parts = factorize(self, i, grid)?;
        let exps = exponent_of_parts(&parts)?;
        let lam = exps.raw(i).expect("factorize covers I");
        let worst = (0..lam.len())
            .into_par_iter()
            .map(|flat| {
                let x = exps.point(i, flat);
                (lam[flat] - self.projected_box_mass(i, &x)).abs()
            })
            .reduce(T::zero, T::max);
        Ok(worst)
    }

    /// Which exponents vanish identically.
    pub fn independence_report(&self) -> IndependenceReport {
        let full = IndexSet::full(self.dim).expect("validated dimension");
        let entries: Vec<(IndexSet, bool)> = full
            .nonempty_subsets()
            .into_iter()
            .map(|i| {
                let interior = self.atoms.iter().any(|a| i.axes().all(|ax| a.p[ax] < T::one()));
                let boundary = self.uniform_margin_boundary && i.len() == 1;
                (i, !(interior || boundary))
            })
            .collect();
        IndependenceReport { entries, copula: self.is_copula() }
    }

    /// Least `d`-dimensional rectangle increment of `S^{1/n}` over the cells of `grid`.
    pub fn root_min_increment(&self, n: usize, grid: &GridSpec<T>) -> Result<T> {
        if n == 0 {
            return Err(param_err!("root order must be positive"));
        }
        if grid.dim() != self.dim {
            return Err(structural_err!("grid has {} axes, measure has {}", grid.dim(), self.dim));
        }
        let cells: Vec<usize> = grid.axes().iter().map(|a| a.len() - 1).collect();
        let total: usize = cells.iter().product();
        let inv_n = T::one() / T::from_usize_lossy(n);
        let d = self.dim;
        (0..total)
            .into_par_iter()
            .map(|mut flat| {
                let mut lo = vec![0usize; d];
                for k in (0..d).rev() {
                    lo[k] = flat % cells[k];
                    flat /= cells[k];
                }
                let mut terms = Vec::with_capacity(1 << d);
                let mut x = vec![T::zero(); d];
                for corner in 0u32..(1 << d) {
                    for k in 0..d {
                        let up = corner & (1 << k) != 0;
                        x[k] = grid.axis(k)[lo[k] + usize::from(up)];
                    }
                    let g = (-self.complement_mass(&x)? * inv_n).exp();
                    terms.push(sign_pow::<T>(corner.count_ones() as usize) * g);
                }
                Ok(neumaier_sum(terms))
            })
            .try_reduce(T::infinity, |a, b| Ok(a.min(b)))
    }

    fn boundary_mass(&self, x: &[T]) -> T {
        if self.uniform_margin_boundary {
            neumaier_sum(x.iter().map(|&v| -(-v).ln_1p()))
        } else {
            T::zero()
        }
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(structural_err!("point has {} coordinates, measure has {}", x.len(), self.dim));
        }
        if let Some(v) = x.iter().find(|&&v| !(v >= T::zero() && v < T::one())) {
            return Err(domain_err!("coordinate {v} outside [0,1)"));
        }
        Ok(())
    }
}

impl<T: Scalar> SurvivalOracle<T> for DiscreteExponentMeasure<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self) -> Support {
        Support::UnitCube
    }

    fn survival(&self, x: &[T]) -> T {
        self.log_survival(x).exp()
    }

    fn log_survival(&self, x: &[T]) -> T {
        self.complement_mass(x).map(|m| -m).unwrap_or(T::nan())
    }
}

/// Per-subset verdicts on whether `Λ_I ≡ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub entries: Vec<(IndexSet, bool)>,
    /// The measure has uniform margins.
    pub copula: bool,
}

impl IndependenceReport {
    pub fn vanishes(&self, i: IndexSet) -> Option<bool> {
        self.entries.iter().find(|(j, _)| *j == i).map(|&(_, v)| v)
    }

    pub fn pairwise_zero(&self) -> bool {
        self.entries.iter().filter(|(i, _)| i.len() == 2).all(|&(_, v)| v)
    }

    pub fn higher_zero(&self) -> bool {
        self.entries.iter().filter(|(i, _)| i.len() >= 2).all(|&(_, v)| v)
    }

    /// Pairwise-zero implies every exponent of order at least two vanishes.
    pub fn pairwise_implies_all(&self) -> bool {
        !self.pairwise_zero() || self.higher_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_atoms() -> DiscreteExponentMeasure<f64> {
        DiscreteExponentMeasure::new(
            2,
            vec![
                MassPoint { w: 0.4, p: vec![0.3, 1.0] },
                MassPoint { w: 0.5, p: vec![1.0, 0.6] },
                MassPoint { w: 0.2, p: vec![0.5, 0.5] },
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn three_atom_survival() {
        let mu = three_atoms();
        let want = (-0.4f64).exp();
        assert!((mu.survival_from_mu(&[0.4, 0.4]).unwrap() - want).abs() < 1e-16);
        assert!((mu.survival_incl_excl(&[0.4, 0.4]).unwrap() - want).abs() < 1e-16);
        assert_eq!(mu.survival_from_mu(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(mu.survival_from_mu(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn boundary_only_is_independence() {
        let mu = DiscreteExponentMeasure::<f64>::new(3, vec![], true).unwrap();
        let x = [0.2, 0.5, 0.7];
        let want = 0.8 * 0.5 * 0.3;
        assert!((mu.survival_from_mu(&x).unwrap() - want).abs() < 1e-15);
        assert!((mu.survival_incl_excl(&x).unwrap() - want).abs() < 1e-15);
        assert!(mu.independence_report().higher_zero());
        assert!(mu.is_copula());
    }

    #[test]
    fn projections() {
        let mu = three_atoms();
        let p1 = mu.project(IndexSet::singleton(2, 0).unwrap()).unwrap();
        let got: Vec<(f64, Vec<f64>)> = p1.atoms().iter().map(|a| (a.w, a.p.clone())).collect();
        assert_eq!(got, vec![(0.4, vec![0.3]), (0.2, vec![0.5])]);
        assert_eq!(mu.project(IndexSet::full(2).unwrap()).unwrap(), mu);
        let face = DiscreteExponentMeasure::new(2, vec![MassPoint { w: 1.0, p: vec![0.7, 1.0] }], false).unwrap();
        assert!(face.project(IndexSet::singleton(2, 1).unwrap()).unwrap().atoms().is_empty());
    }

    #[test]
    fn identification_on_box() {
        let mu = three_atoms();
        let pair = IndexSet::full(2).unwrap();
        assert!((mu.projected_box_mass(pair, &[0.6, 0.6]) - 0.2).abs() < 1e-16);
        let grid = GridSpec::unit_cube(2, 11, 1e-3).unwrap();
        assert!(mu.identify_lambda(pair, &grid).unwrap() < 1e-12);
        let grid =
            GridSpec::new(vec![vec![0.0, 0.6], vec![0.0, 0.6]], crate::lattice::GridDomain::UnitCube { delta: 1e-3 }).unwrap();
        let exps = exponent_of_parts(&factorize(&mu, pair, &grid).unwrap()).unwrap();
        assert!((exps.raw(pair).unwrap()[3] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn report_examples() {
        let inner = DiscreteExponentMeasure::new(3, vec![MassPoint { w: 1.0, p: vec![0.5; 3] }], false).unwrap();
        let r = inner.independence_report();
        assert!(r.entries.iter().filter(|(i, _)| i.len() == 2).all(|&(_, v)| !v));
        let faces = DiscreteExponentMeasure::new(
            3,
            vec![MassPoint { w: 1.0, p: vec![0.5, 1.0, 1.0] }, MassPoint { w: 0.5, p: vec![1.0, 0.2, 1.0] }],
            true,
        )
        .unwrap();
        let r = faces.independence_report();
        assert!(r.pairwise_zero() && r.higher_zero() && r.pairwise_implies_all());
        assert!(!r.copula);
    }

    #[test]
    fn roots_are_survival_functions() {
        let mu = three_atoms();
        let grid = GridSpec::unit_cube(2, 11, 1e-3).unwrap();
        for n in 1..=5 {
            assert!(mu.root_min_increment(n, &grid).unwrap() >= -1e-12);
        }
    }
}
