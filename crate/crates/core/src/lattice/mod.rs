//! Subset-lattice machinery: index sets, grids, survival oracles,
//! factorization into dependence parts and finite-difference derivatives.

mod diff;
mod grid;
mod index_set;
mod oracle;
mod parts;

pub use diff::{default_step, mixed_partial, mixed_partial_log, univariate_hazard};
pub use grid::{linspace, GridDomain, GridSpec, Shape, DEFAULT_DELTA};
pub use index_set::{IndexSet, MAX_DIM};
pub use oracle::{embed, FnOracle, LogFnOracle, Support, SurvivalOracle};
pub use parts::{exponent_of_parts, factorize, marginal_log_on_grid, recompose, recompose_log, PartKind, PartTable};
