use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain_err, param_err, structural_err, Result};

/// Largest accepted condition number of a covariance matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Symmetric positive definite covariance with its lower Cholesky factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Covariance {
    sigma: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl Covariance {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        let d = sigma.nrows();
        if d == 0 || d != sigma.ncols() || d > crate::lattice::MAX_DIM {
            return Err(structural_err!("covariance must be square with 1..={} rows", crate::lattice::MAX_DIM));
        }
        if sigma.iter().any(|v| !v.is_finite()) {
            return Err(param_err!("covariance has non-finite entries"));
        }
        let scale = sigma.amax().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..i {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > 1e-12 * scale {
                    return Err(param_err!("covariance is not symmetric at ({}, {})", i + 1, j + 1));
                }
            }
        }
        let eig = SymmetricEigen::new(sigma.clone());
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if !(lo > 0.0) {
            return Err(param_err!("covariance is not positive definite (smallest eigenvalue {lo})"));
        }
        if hi / lo > MAX_CONDITION {
            return Err(param_err!("covariance condition number {:.3e} exceeds {MAX_CONDITION:e}", hi / lo));
        }
        let chol = Cholesky::new(sigma.clone()).ok_or_else(|| param_err!("covariance is not positive definite"))?.l();
        Ok(Self { sigma, chol })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(structural_err!("covariance rows must all have length {d}"));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sigma[(i, j)]
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.sigma[(i, j)] / (self.sigma[(i, i)] * self.sigma[(j, j)]).sqrt()
    }

    /// Covariance of the coordinates listed in `axes`.
    pub fn sub(&self, axes: &[usize]) -> Result<Self> {
        let k = axes.len();
        Self::new(DMatrix::from_fn(k, k, |a, b| self.sigma[(axes[a], axes[b])]))
    }

    /// `Z = L ξ` with `ξ` standard normal.
    pub fn sample_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let d = self.dim();
        let xi = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        &self.chol * xi
    }

    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }
}

/// χ² frailty `W_i = Z_i²`, `Z ~ N(0, Σ)`, with `ψ(t) = det(I + 2TΣ)^{-1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareFrailty {
    cov: Covariance,
}

impl ChiSquareFrailty {
    pub fn new(cov: Covariance) -> Self {
        Self { cov }
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    pub fn log_psi(&self, t: &[f64]) -> f64 {
        let d = self.dim();
        let root: Vec<f64> = t.iter().map(|v| v.sqrt()).collect();
        let m = DMatrix::from_fn(d, d, |i, j| {
            let base = 2.0 * root[i] * self.cov.get(i, j) * root[j];
            if i == j {
                1.0 + base
            } else {
                base
            }
        });
        match Cholesky::new(m) {
            Some(c) => -(0..d).map(|i| c.l_dirty()[(i, i)].ln()).sum::<f64>(),
            None => f64::NAN,
        }
    }

    /// Singleton and pair hazards in closed form.
    pub fn lambda(&self, axes: &[usize], t: &[f64]) -> Option<f64> {
        match axes {
            [i] => {
                let s2 = self.cov.get(*i, *i);
                Some(s2 / (1.0 + 2.0 * s2 * t[0]))
            }
            [i, j] => {
                let s = pair_survival(&self.cov, *i, *j, t[0], t[1]);
                let c = self.cov.get(*i, *j);
                Some(2.0 * c * c * s.powi(4))
            }
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let z = self.cov.sample_normal(rng);
        for (o, v) in out.iter_mut().zip(z.iter()) {
            *o = v * v;
        }
    }
}

/// `S^{ij}(t_i,t_j) = (1 + 2σ_i²t_i + 2σ_j²t_j + 4Δ_ij t_i t_j)^{-1/2}`.
fn pair_survival(cov: &Covariance, i: usize, j: usize, ti: f64, tj: f64) -> f64 {
    let (si, sj, c) = (cov.get(i, i), cov.get(j, j), cov.get(i, j));
    let delta = si * sj - c * c;
    (1.0 + 2.0 * si * ti + 2.0 * sj * tj + 4.0 * delta * ti * tj).powf(-0.5)
}

/// Trivariate χ² parameters with the determinants used by the closed forms.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivariateChiSqParams {
    cov: Covariance,
    /// `det Σ`.
    pub delta: f64,
    /// `Δ_12, Δ_13, Δ_23`.
    pub delta_pairs: [f64; 3],
    /// `ρ_12, ρ_13, ρ_23`.
    pub rho: [f64; 3],
    /// `σ_1², σ_2², σ_3²`.
    pub var: [f64; 3],
    /// `σ_12, σ_13, σ_23`.
    pub cov_pairs: [f64; 3],
}

/// Pair order used by every `[_; 3]` field: `(1,2), (1,3), (2,3)`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Closed-form pieces of the trivariate χ² survival function at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSq3Parts {
    pub s_i: [f64; 3],
    /// Bivariate marginals `S^{ij}` in [`PAIRS`] order.
    pub s_pair_marginal: [f64; 3],
    /// Dependence parts `S_ij` in [`PAIRS`] order.
    pub s_pair_part: [f64; 3],
    pub s_123: f64,
    /// Pair hazards `λ_ij` in [`PAIRS`] order.
    pub lambda_pair: [f64; 3],
}

impl TrivariateChiSqParams {
    pub fn new(cov: Covariance) -> Result<Self> {
        if cov.dim() != 3 {
            return Err(structural_err!("trivariate χ² needs a 3×3 covariance, got {}×{}", cov.dim(), cov.dim()));
        }
        let s = cov.matrix();
        let var = [s[(0, 0)], s[(1, 1)], s[(2, 2)]];
        let cov_pairs = PAIRS.map(|(i, j)| s[(i, j)]);
        let delta_pairs = PAIRS.map(|(i, j)| s[(i, i)] * s[(j, j)] - s[(i, j)] * s[(i, j)]);
        let rho = PAIRS.map(|(i, j)| cov.correlation(i, j));
        let delta = s.determinant();
        if !(delta > 0.0) || delta_pairs.iter().any(|d| !(*d > 0.0)) {
            return Err(param_err!("covariance determinants must be positive"));
        }
        Ok(Self { cov, delta, delta_pairs, rho, var, cov_pairs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Covariance::from_rows(rows)?)
    }

    /// Unit variances with the given correlations `ρ_12, ρ_13, ρ_23`.
    pub fn from_correlations(rho: [f64; 3]) -> Result<Self> {
        Self::from_scaled_correlations([1.0; 3], rho)
    }

    /// Standard deviations `σ_i` and correlations `ρ_12, ρ_13, ρ_23`.
    pub fn from_scaled_correlations(sd: [f64; 3], rho: [f64; 3]) -> Result<Self> {
        let mut m = DMatrix::from_diagonal(&DVector::from_iterator(3, sd.iter().map(|v| v * v)));
        for (k, (i, j)) in PAIRS.iter().copied().enumerate() {
            m[(i, j)] = rho[k] * sd[i] * sd[j];
            m[(j, i)] = m[(i, j)];
        }
        Self::new(Covariance::new(m)?)
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    fn check(t: &[f64; 3]) -> Result<()> {
        if t.iter().any(|v| !(*v >= 0.0)) {
            return Err(domain_err!("χ² survival needs t ∈ [0,∞)³, got {t:?}"));
        }
        Ok(())
    }

    /// `(8Δt₁t₂t₃ + 4Σ Δ_ij t_i t_j + Σ 2σ_j² t_j + 1)^{-1/2}`.
    pub fn survival(&self, t: &[f64; 3]) -> Result<f64> {
        Self::check(t)?;
        let cubic = 8.0 * self.delta * t[0] * t[1] * t[2];
        let quad: f64 = PAIRS.iter().enumerate().map(|(k, &(i, j))| 4.0 * self.delta_pairs[k] * t[i] * t[j]).sum();
        let lin: f64 = (0..3).map(|i| 2.0 * self.var[i] * t[i]).sum();
        Ok((cubic + quad + lin + 1.0).powf(-0.5))
    }

    pub fn marginal(&self, i: usize, t: f64) -> f64 {
        (1.0 + 2.0 * self.var[i] * t).powf(-0.5)
    }

    /// Inverse of the marginal survival `S_i`.
    pub fn marginal_inverse(&self, i: usize, v: f64) -> f64 {
        (v.powi(-2) - 1.0) / (2.0 * self.var[i])
    }

    pub fn parts(&self, t: &[f64; 3]) -> Result<ChiSq3Parts> {
        Self::check(t)?;
        let s_i = [self.marginal(0, t[0]), self.marginal(1, t[1]), self.marginal(2, t[2])];
        // 1 - S_i² written without cancellation
        let a = [0, 1, 2].map(|i| {
            let u = 2.0 * self.var[i] * t[i];
            u / (1.0 + u)
        });
        let s_pair_marginal = PAIRS.map(|(i, j)| pair_survival(&self.cov, i, j, t[i], t[j]));
        let mut s_pair_part = [0.0; 3];
        let mut lambda_pair = [0.0; 3];
        let mut terms = [0.0; 3];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            terms[k] = self.rho[k] * self.rho[k] * a[i] * a[j];
            s_pair_part[k] = (1.0 - terms[k]).powf(-0.5);
            lambda_pair[k] = 2.0 * self.cov_pairs[k].powi(2) * s_pair_marginal[k].powi(4);
        }
        let num: f64 = terms.iter().map(|x| -1.0 + x).product();
        let cross = 2.0 * self.rho.iter().product::<f64>() * a.iter().product::<f64>();
        let den = -1.0 + terms.iter().sum::<f64>() - cross;
        Ok(ChiSq3Parts { s_i, s_pair_marginal, s_pair_part, s_123: (num / den).sqrt(), lambda_pair })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_covariance() {
        let p = TrivariateChiSqParams::from_correlations([0.0; 3]).unwrap();
        let v = p.survival(&[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 27f64.powf(-0.5)).abs() < 1e-16);
        assert_eq!(p.survival(&[0.0; 3]).unwrap(), 1.0);
        let parts = p.parts(&[0.3, 1.0, 2.0]).unwrap();
        assert!(parts.s_pair_part.iter().all(|&s| s == 1.0));
        assert!(parts.lambda_pair.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn marginal_example() {
        let p = TrivariateChiSqParams::from_correlations([0.5; 3]).unwrap();
        assert!((p.survival(&[1.0, 0.0, 0.0]).unwrap() - 3f64.powf(-0.5)).abs() < 1e-16);
        let parts = p.parts(&[0.0; 3]).unwrap();
        assert!(parts.lambda_pair.iter().all(|&l| (l - 0.5).abs() < 1e-15));
    }

    #[test]
    fn factorization_identity() {
        let p = TrivariateChiSqParams::from_scaled_correlations([1.0, 1.5, 0.7], [0.5, 0.3, -0.4]).unwrap();
        for t in [[0.4, 1.2, 0.3], [0.0, 2.0, 5.0], [3.0, 3.0, 3.0]] {
            let parts = p.parts(&t).unwrap();
            let prod = parts.s_i.iter().product::<f64>() * parts.s_pair_part.iter().product::<f64>() * parts.s_123;
            assert!((prod - p.survival(&t).unwrap()).abs() < 1e-15);
            let general = ChiSquareFrailty::new(p.covariance().clone()).log_psi(&t).exp();
            assert!((general - p.survival(&t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_outer_correlations_kill_triple_part() {
        let p = TrivariateChiSqParams::from_correlations([0.0, 0.0, 0.8]).unwrap();
        let t = [0.7, 1.1, 0.4];
        let parts = p.parts(&t).unwrap();
        assert!((parts.s_123 - 1.0).abs() < 1e-15);
        let rhs = parts.s_i[0] * parts.s_pair_marginal[2];
        assert!((p.survival(&t).unwrap() - rhs).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_covariances() {
        assert!(Covariance::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(Covariance::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(Covariance::from_rows(&[vec![1.0, 1.0 - 1e-14], vec![1.0 - 1e-14, 1.0]]).is_err());
        assert!(TrivariateChiSqParams::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
    }
}
