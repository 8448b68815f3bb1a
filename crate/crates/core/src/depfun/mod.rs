//! Dependence functions `γ_I = λ_I / ∏ λ_i` and their copula-scale versions `γ_{0,I}`.

mod closed;
mod gamma;
mod impls;
mod marginal;
mod models;

pub use closed::{catalog_gamma0, family_from_name, Gamma0Family};
pub use gamma::{
    copula_scale_survival, exp_margin_gamma, exponential_scale, gamma_0i, gamma_grid, gamma_grid_on, gamma_i, local_hazard,
    uniform_scale_survival, GammaGrid, GammaRoute, HazardModel, Remarginalized,
};
pub use marginal::Marginal;
pub use models::{min_rectangle_mass, multi_prop_survival, prop_survival, FrankModel, PropModel};
