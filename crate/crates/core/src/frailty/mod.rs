//! Correlated frailty models `X_i = Y_i / W_i` and their Laplace transforms.

mod chisq;
mod generator;
mod lognormal;
mod model;
mod rng;
mod tilt;

pub use chisq::{ChiSq3Parts, ChiSquareFrailty, Covariance, TrivariateChiSqParams, MAX_CONDITION, PAIRS};
pub use generator::Generator;
pub use lognormal::{LogNormalFrailty, GH_NODES, MAX_LOGNORMAL_DIM};
pub use model::{FrailtyLaw, LaplaceModel};
pub use rng::{clt_bound, draw_rng, DrawMatrix};
pub use tilt::{cov_lambda_ij, CovEstimate, ExpFamilySample, MIN_ESS};
