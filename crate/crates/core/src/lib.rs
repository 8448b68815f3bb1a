//! Hazard dependence structure of multivariate survival functions.
//!
//! A survival function `S` on `d` axes factorizes over the subset lattice
//! into dependence parts `S_I`, with exponents `Λ_I = (-1)^{|I|} log S_I`
//! and local dependence hazards `λ_I` as their densities. The crate
//! evaluates these for correlated frailty models, finite Lévy (compound
//! Poisson) frailties, min-infinitely divisible measures on the unit cube
//! and copulas built from score functions, and provides independent
//! numerical routes (finite differences, Monte Carlo, quadrature) to check
//! each closed form.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod depfun;
pub mod error;
pub mod frailty;
pub mod higher;
pub mod lattice;
pub mod levy;
pub mod minid;
pub mod quad;
pub mod scalar;

pub use catalog::Model;
pub use error::{Error, Result};
pub use lattice::{GridSpec, IndexSet, SurvivalOracle};
pub use scalar::Scalar;

pub type PartTable = lattice::PartTable<f64>;
pub type PartTable32 = lattice::PartTable<f32>;
pub type Grid = lattice::GridSpec<f64>;
pub type Grid32 = lattice::GridSpec<f32>;
