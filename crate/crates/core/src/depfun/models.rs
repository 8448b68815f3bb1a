use super::marginal::Marginal;
use crate::error::{domain_err, structural_err, Result};
use crate::lattice::{IndexSet, Shape, Support, SurvivalOracle, MAX_DIM};

/// Bivariate model whose survival copula is the Frank copula, with standard exponential margins.
#[derive(Clone, Debug, PartialEq)]
pub struct FrankModel {
    theta: f64,
}

impl FrankModel {
    pub fn new(theta: f64) -> Result<Self> {
        if theta == 0.0 || !theta.is_finite() {
            return Err(domain_err!("Frank parameter θ = {theta} must be finite and nonzero"));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Frank copula `C(v_1, v_2) = -(1/θ) log(1 + g)`.
    pub fn copula(&self, v1: f64, v2: f64) -> f64 {
        let th = self.theta;
        let g = (-th * v1).exp_m1() * (-th * v2).exp_m1() / (-th).exp_m1();
        -g.ln_1p() / th
    }

    fn log_copula(&self, v1: f64, v2: f64) -> f64 {
        self.copula(v1, v2).ln()
    }
}

impl SurvivalOracle<f64> for FrankModel {
    fn dim(&self) -> usize {
        2
    }

    fn support(&self) -> Support {
        Support::Orthant
    }

    fn survival(&self, x: &[f64]) -> f64 {
        self.log_survival(x).exp()
    }

    fn log_survival(&self, x: &[f64]) -> f64 {
        if x[0] == 0.0 {
            return -x[1];
        }
        if x[1] == 0.0 {
            return -x[0];
        }
        self.log_copula((-x[0]).exp(), (-x[1]).exp())
    }
}

/// `S(t) = exp(-Σ Λ_i(t_i) - Σ_{i<j} β_ij Λ_i(t_i) Λ_j(t_j))`.
///
/// With two axes this is the proportional hazard dependence model, `γ ≡ -β`.
#[derive(Clone, Debug)]
pub struct PropModel {
    marginals: Vec<Marginal>,
    beta: Vec<f64>,
}

impl PropModel {
    /// Bivariate model, `0 ≤ β ≤ 1`.
    pub fn bivariate(marginals: [Marginal; 2], beta: f64) -> Result<Self> {
        Self::multivariate(marginals.to_vec(), &[((0, 1), beta)])
    }

    /// Pairwise coefficients `β_ij`, each in `[0, 1/(d-1)²]`; missing pairs are zero.
    pub fn multivariate(marginals: Vec<Marginal>, pairs: &[((usize, usize), f64)]) -> Result<Self> {
        let d = marginals.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(structural_err!("proportional model needs 2..={MAX_DIM} axes, got {d}"));
        }
        let support = marginals[0].support();
        if marginals.iter().any(|m| m.support() != support) {
            return Err(structural_err!("marginals of a proportional model must share one support"));
        }
        let bound = 1.0 / ((d - 1) * (d - 1)) as f64;
        let mut beta = vec![0.0; d * d];
        for &((i, j), b) in pairs {
            if i >= d || j >= d || i == j {
                return Err(structural_err!("pair ({}, {}) is not a pair of distinct axes of {d}", i + 1, j + 1));
            }
            if !(0.0..=bound).contains(&b) {
                return Err(domain_err!(
                    "β_{{{},{}}} = {b} violates 0 ≤ β_I ≤ 1/(d-1)² = {bound} for d = {d}",
                    i.min(j) + 1,
                    i.max(j) + 1
                ));
            }
            beta[i * d + j] = b;
            beta[j * d + i] = b;
        }
        Ok(Self { marginals, beta })
    }

    pub fn exponential(d: usize, pairs: &[((usize, usize), f64)]) -> Result<Self> {
        Self::multivariate(vec![Marginal::Exponential { rate: 1.0 }; d], pairs)
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta[i * self.marginals.len() + j]
    }
}

impl SurvivalOracle<f64> for PropModel {
    fn dim(&self) -> usize {
        self.marginals.len()
    }

    fn support(&self) -> Support {
        self.marginals[0].support()
    }

    fn survival(&self, x: &[f64]) -> f64 {
        self.log_survival(x).exp()
    }

    fn log_survival(&self, x: &[f64]) -> f64 {
        let d = self.marginals.len();
        let h: Vec<f64> = self.marginals.iter().zip(x).map(|(m, &t)| m.cumulative_hazard(t)).collect();
        let mut acc = -h.iter().sum::<f64>();
        for i in 0..d {
            for j in i + 1..d {
                let b = self.beta[i * d + j];
                if b != 0.0 {
                    acc -= b * h[i] * h[j];
                }
            }
        }
        acc
    }
}

/// Proportional hazard dependence model, `S = exp(-Λ_1 - Λ_2 - βΛ_1Λ_2)`.
pub fn prop_survival(marginals: &[Marginal; 2], beta: f64, t: &[f64; 2]) -> Result<f64> {
    Ok(PropModel::bivariate(marginals.clone(), beta)?.survival(t))
}

/// Multivariate proportional model evaluated at `t`.
pub fn multi_prop_survival(marginals: &[Marginal], pairs: &[((usize, usize), f64)], t: &[f64]) -> Result<f64> {
    let m = PropModel::multivariate(marginals.to_vec(), pairs)?;
    if t.len() != m.dim() {
        return Err(structural_err!("point has {} coordinates, model has {}", t.len(), m.dim()));
    }
    Ok(m.survival(t))
}

/// Smallest probability a survival function assigns to a cell of the probe
/// axes, over every nonempty marginal. Negative values mean `S` is not a
/// survival function.
pub fn min_rectangle_mass<O: SurvivalOracle<f64> + ?Sized>(oracle: &O, probe: &[Vec<f64>]) -> Result<f64> {
    let d = oracle.dim();
    if probe.len() != d {
        return Err(structural_err!("probe has {} axes, oracle has {d}", probe.len()));
    }
    let mut worst = f64::INFINITY;
    for j in IndexSet::full(d)?.nonempty_subsets() {
        let axes = j.to_axes();
        let k = axes.len();
        let cells = Shape::new(axes.iter().map(|&a| probe[a].len() - 1).collect());
        let mut idx = vec![0; k];
        let mut corner = vec![0.0; k];
        for flat in 0..cells.len() {
            cells.unflat(flat, &mut idx);
            let mut mass = 0.0;
            for eps in 0..(1usize << k) {
                for (r, &a) in axes.iter().enumerate() {
                    corner[r] = probe[a][idx[r] + ((eps >> r) & 1)];
                }
                let sign = if eps.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                mass += sign * oracle.marginal_survival(j, &corner);
            }
            worst = worst.min(mass);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{factorize, GridSpec};

    #[test]
    fn prop_values() {
        let m = [Marginal::Exponential { rate: 1.0 }, Marginal::Exponential { rate: 1.0 }];
        assert!((prop_survival(&m, 0.5, &[1.0, 1.0]).unwrap() - (-2.5f64).exp()).abs() < 1e-16);
        assert_eq!(prop_survival(&m, 0.0, &[0.3, 0.7]).unwrap(), (-1.0f64).exp());
        let err = prop_survival(&m, 1.2, &[1.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("1/(d-1)²"));
    }

    #[test]
    fn multi_prop_bound_and_monotonicity() {
        let pairs = [((0, 1), 0.25), ((0, 2), 0.25), ((1, 2), 0.25)];
        let m = PropModel::exponential(3, &pairs).unwrap();
        let probe: Vec<Vec<f64>> = (0..3).map(|_| vec![0.0, 0.2, 0.5, 1.0, 2.0, 4.0]).collect();
        assert!(min_rectangle_mass(&m, &probe).unwrap() >= -1e-15);
        assert!(PropModel::exponential(3, &[((0, 1), 0.3)]).is_err());
        assert!(PropModel::exponential(3, &[((0, 0), 0.1)]).is_err());
    }

    #[test]
    fn multi_prop_has_no_higher_order_exponent() {
        let pairs = [((0, 1), 0.25), ((0, 2), 0.25), ((1, 2), 0.25)];
        let m = PropModel::exponential(3, &pairs).unwrap();
        let grid = GridSpec::orthant(3, 11, 2.0).unwrap();
        let full = IndexSet::full(3).unwrap();
        let parts = factorize(&m, full, &grid).unwrap();
        let l123 = parts.exponent(full).unwrap();
        assert!(l123.iter().all(|v| v.abs() <= 1e-8));
        let l12 = parts.exponent(IndexSet::from_axes(3, &[0, 1]).unwrap()).unwrap();
        assert!(l12.iter().any(|v| v.abs() > 0.1));
    }

    #[test]
    fn frank_margins_and_validity() {
        for theta in [-5.0, 2.0, 10.0] {
            let f = FrankModel::new(theta).unwrap();
            assert!((f.copula(0.4, 1.0) - 0.4).abs() < 1e-14);
            assert!((f.survival(&[0.0, 0.7]) - (-0.7f64).exp()).abs() < 1e-16);
            let direct = f.copula((-0.3f64).exp(), (-0.9f64).exp()).ln();
            assert!((f.log_survival(&[0.3, 0.9]) - direct).abs() < 1e-14);
            let probe = vec![vec![0.0, 0.1, 0.5, 1.0, 3.0], vec![0.0, 0.2, 0.6, 1.5, 4.0]];
            assert!(min_rectangle_mass(&f, &probe).unwrap() > 0.0);
        }
        assert!(FrankModel::new(0.0).is_err());
    }
}
