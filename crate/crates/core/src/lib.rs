//! Maximum likelihood estimation and asymptotic inference for inner-product
//! latent space models of undirected networks.
//!
//! Each node `i` carries a latent position `z_i` in `R^r` and a degree
//! parameter `alpha_i`; edges are drawn through a link function applied to
//! the linear predictor `z_i' z_j + alpha_i + alpha_j (+ rho)`, where `rho`
//! is a global sparsity offset. The crate provides:
//!
//! - [`model`]: the model family (Bernoulli-logistic, Gaussian-identity),
//!   edge log-likelihoods, derivatives, and score blocks;
//! - [`estimation`]: spectral initialization, projected gradient ascent under
//!   per-node norm constraints, and canonicalization to the identifiability
//!   constraints (centered `Z`, diagonal `Z'Z/n`);
//! - [`inference`]: plug-in covariance blocks, sandwich variances,
//!   per-coordinate confidence intervals, 2-d confidence ellipses, and link
//!   probability intervals;
//! - [`simulation`]: seeded generators for the supported synthetic settings,
//!   including a correlated Bernoulli chain with prescribed marginals;
//! - [`experiments`]: replicated fit-and-infer harnesses producing
//!   consistency, coverage, distribution, and score-norm diagnostics.
//!
//! All numeric code is generic over [`Scalar`] (`f64` or `f32`); the `*64`
//! aliases below are the concrete types most callers want.

pub mod error;
pub mod estimation;
pub mod experiments;
pub mod inference;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Network64 = model::Network<f64>;
pub type LatentState64 = model::LatentState<f64>;
pub type ModelSpec64 = model::ModelSpec<f64>;
pub type FitConfig64 = estimation::FitConfig<f64>;
pub type FitResult64 = estimation::FitResult<f64>;
pub type CovarianceBundle64 = inference::CovarianceBundle<f64>;
pub type SimSetting64 = simulation::SimSetting<f64>;
pub type GroundTruth64 = simulation::GroundTruth<f64>;

pub type Network32 = model::Network<f32>;
pub type LatentState32 = model::LatentState<f32>;
pub type ModelSpec32 = model::ModelSpec<f32>;
