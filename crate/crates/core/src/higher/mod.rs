//! Copulas whose only dependence is of highest order, built from zero-marginal scores.

mod conditions;
mod copula;
mod isometry;
mod score;

pub use conditions::{check_conditions, ConditionVerdict, DensityGrid, MASS_TOL, NEG_TOL};
pub use copula::{copula_family, ScoreCopula};
pub use isometry::{
    r_d_apply, r_norm_sq, r_univ, s_dep_from_gamma, s_dep_from_gamma_fn, s_dep_from_score, score_norm_sq, DEP_INTERVALS,
};
pub use score::{Component, ScoreFunction, ScoreTerm, INF_GRID, INF_MARGIN, MEAN_TOL};
