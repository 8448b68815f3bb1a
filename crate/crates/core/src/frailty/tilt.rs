use rayon::prelude::*;

use super::model::LaplaceModel;
use super::rng::DrawMatrix;
use crate::error::{param_err, structural_err, Result};
use crate::scalar::pairwise_sum;

/// Effective sample size below which estimates are flagged as degenerate.
pub const MIN_ESS: f64 = 100.0;

/// Jackknife batches.
const BATCHES: usize = 100;

/// Draws from `Q_0` reweighted to the tilted law `Q_t`, `dQ_t/dQ_0 ∝ e^{-⟨t,w⟩}`.
#[derive(Clone, Debug)]
pub struct ExpFamilySample {
    draws: DrawMatrix,
    weights: Vec<f64>,
    t: Vec<f64>,
    seed: u64,
    ess: f64,
}

/// Estimate with a delete-one-batch jackknife standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct CovEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub ess: f64,
    /// Set when the effective sample size is below [`MIN_ESS`].
    pub warning: Option<String>,
}

impl ExpFamilySample {
    /// Samples `n` frailties from `model` and tilts them to `t`.
    pub fn draw(model: &LaplaceModel, t: &[f64], n: usize, seed: u64) -> Result<Self> {
        let draws = model.sample_frailty(n, seed)?;
        Self::tilt(draws, t, seed)
    }

    /// Tilts existing `Q_0` draws to `t`.
    pub fn tilt(draws: DrawMatrix, t: &[f64], seed: u64) -> Result<Self> {
        if t.len() != draws.dim() {
            return Err(structural_err!("tilt point has {} coordinates, draws have {}", t.len(), draws.dim()));
        }
        if t.iter().any(|v| !(*v >= 0.0)) {
            return Err(param_err!("tilt point must be nonnegative"));
        }
        if draws.is_empty() {
            return Err(param_err!("no draws to tilt"));
        }
        let log_w: Vec<f64> = draws.rows().map(|r| -r.iter().zip(t).map(|(w, ti)| w * ti).sum::<f64>()).collect();
        let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_w.par_iter().map(|lw| (lw - top).exp()).collect();
        let total = pairwise_sum(&raw);
        let weights: Vec<f64> = raw.par_iter().map(|w| w / total).collect();
        let sq: Vec<f64> = weights.par_iter().map(|w| w * w).collect();
        let ess = 1.0 / pairwise_sum(&sq);
        Ok(Self { draws, weights, t: t.to_vec(), seed, ess })
    }

    pub fn draws(&self) -> &DrawMatrix {
        &self.draws
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tilt_point(&self) -> &[f64] {
        &self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn effective_sample_size(&self) -> f64 {
        self.ess
    }

    /// `E_{Q_t} W_i`, the marginal hazard rate at a tilt supported on axis `i`.
    pub fn mean(&self, i: usize) -> CovEstimate {
        self.jackknife(|s| s[1] / s[0], |w, r| [w, w * r[i]])
    }

    /// `Cov_{Q_t}(W_i, W_j)`.
    pub fn covariance(&self, i: usize, j: usize) -> CovEstimate {
        // centring by the full-sample means keeps the moment formula stable
        let mi = pairwise_sum(&self.draws.rows().zip(&self.weights).map(|(r, w)| w * r[i]).collect::<Vec<_>>());
        let mj = pairwise_sum(&self.draws.rows().zip(&self.weights).map(|(r, w)| w * r[j]).collect::<Vec<_>>());
        self.jackknife(
            |s| s[3] / s[0] - (s[1] / s[0]) * (s[2] / s[0]),
            |w, r| {
                let (a, b) = (r[i] - mi, r[j] - mj);
                [w, w * a, w * b, w * a * b]
            },
        )
    }

    fn jackknife<const K: usize>(
        &self,
        stat: impl Fn(&[f64; K]) -> f64,
        moments: impl Fn(f64, &[f64]) -> [f64; K] + Sync,
    ) -> CovEstimate {
        let n = self.draws.len();
        let batches = BATCHES.min(n);
        let batch_sums: Vec<[f64; K]> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let lo = b * n / batches;
                let hi = (b + 1) * n / batches;
                let mut cols = vec![Vec::with_capacity(hi - lo); K];
                for k in lo..hi {
                    let m = moments(self.weights[k], self.draws.row(k));
                    for (c, v) in cols.iter_mut().zip(m) {
                        c.push(v);
                    }
                }
                let mut out = [0.0; K];
                for (o, c) in out.iter_mut().zip(&cols) {
                    *o = pairwise_sum(c);
                }
                out
            })
            .collect();
        let mut total = [0.0; K];
        for (slot, t) in total.iter_mut().enumerate() {
            *t = pairwise_sum(&batch_sums.iter().map(|s| s[slot]).collect::<Vec<_>>());
        }
        let estimate = stat(&total);
        let reps: Vec<f64> = batch_sums
            .iter()
            .map(|s| {
                let mut rest = total;
                for (r, v) in rest.iter_mut().zip(s) {
                    *r -= v;
                }
                stat(&rest)
            })
            .collect();
        let bf = batches as f64;
        let mean_rep = reps.iter().sum::<f64>() / bf;
        let var = (bf - 1.0) / bf * reps.iter().map(|r| (r - mean_rep).powi(2)).sum::<f64>();
        let warning = (self.ess < MIN_ESS)
            .then(|| format!("effective sample size {:.1} is below {MIN_ESS}; estimate is degenerate", self.ess));
        CovEstimate { estimate, stderr: var.sqrt(), ess: self.ess, warning }
    }
}

/// `λ_ij(t) = Cov_{Q_t}(W_i, W_j)` by self-normalized importance sampling from
/// `n` draws of `Q_0`. `t` is a full-dimension tilt point.
pub fn cov_lambda_ij(model: &LaplaceModel, i: usize, j: usize, t: &[f64], n: usize, seed: u64) -> Result<CovEstimate> {
    if i == j || i >= model.dim() || j >= model.dim() {
        return Err(structural_err!("need two distinct axes below {}, got {} and {}", model.dim(), i + 1, j + 1));
    }
    if n < 10_000 {
        return Err(param_err!("covariance estimator needs at least 10^4 draws, got {n}"));
    }
    Ok(ExpFamilySample::draw(model, t, n, seed)?.covariance(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frailty::{Covariance, Generator};

    #[test]
    fn clayton_variance_at_origin() {
        let m = LaplaceModel::clayton(2).unwrap();
        let est = cov_lambda_ij(&m, 0, 1, &[0.0, 0.0], 200_000, 5).unwrap();
        assert!((est.estimate - 1.0).abs() < 3.0 * est.stderr, "{est:?}");
        assert!(est.warning.is_none());
    }

    #[test]
    fn independent_frailties_have_zero_covariance() {
        let m = LaplaceModel::independent(vec![Generator::gamma(2.0).unwrap(), Generator::clayton()]).unwrap();
        let est = cov_lambda_ij(&m, 0, 1, &[0.5, 0.3], 200_000, 1).unwrap();
        assert!(est.estimate.abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn chi_square_covariance() {
        let cov = Covariance::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let m = LaplaceModel::chi_square(cov).unwrap();
        let est = cov_lambda_ij(&m, 0, 1, &[0.0, 0.0], 400_000, 2).unwrap();
        assert!((est.estimate - 0.5).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn degeneracy_warning_and_preconditions() {
        let m = LaplaceModel::clayton(2).unwrap();
        let est = cov_lambda_ij(&m, 0, 1, &[400.0, 400.0], 10_000, 3).unwrap();
        assert!(est.warning.is_some());
        assert!(cov_lambda_ij(&m, 0, 0, &[0.0, 0.0], 10_000, 3).is_err());
        assert!(cov_lambda_ij(&m, 0, 1, &[0.0, 0.0], 100, 3).is_err());
        let g = Generator::custom("c", |s: f64| (1.0 + s).recip()).unwrap();
        let custom = LaplaceModel::shared_from_generator(g, 2).unwrap();
        assert!(matches!(cov_lambda_ij(&custom, 0, 1, &[0.0, 0.0], 10_000, 3), Err(crate::Error::Capability(_))));
    }

    #[test]
    fn tilted_mean_is_hazard_rate() {
        let m = LaplaceModel::clayton(2).unwrap();
        let s = ExpFamilySample::draw(&m, &[1.0, 0.0], 200_000, 8).unwrap();
        let est = s.mean(0);
        assert!((est.estimate - 0.5).abs() < 3.0 * est.stderr, "{est:?}");
    }
}
