//! Bivariate inverse Topp-Leone (BITL) lifetime model.
//!
//! Two inverse Topp-Leone marginals are coupled through a Farlie-Gumbel-Morgenstern
//! copula. The crate evaluates the joint distribution, survival, hazard, reversed
//! hazard and conditional densities, simulates exactly, and fits the model by
//! maximum likelihood or random-walk Metropolis.
//!
//! ```
//! use bitl_core::{BitlParams, SurvivalMode};
//!
//! let p = BitlParams::new(1.0, 1.0, 1.0).unwrap();
//! assert!((p.cdf(1.0, 1.0).unwrap() - 0.09765625).abs() < 1e-15);
//! assert!((p.sf(1.0, 1.0, SurvivalMode::Consistent).unwrap() - 0.59765625).abs() < 1e-15);
//! ```

pub mod bayes;
pub mod bitl;
pub mod data;
pub mod error;
pub mod estimate;
pub mod fgm;
pub mod itl;
pub mod json;
pub mod modelsel;
pub mod optim;
pub mod stats;

pub use bayes::{run_chain, summarize, Chain, McmcControl, PosteriorSummary, PriorSpec};
pub use bitl::{BitlParams, ObsPair, SurvivalMode};
pub use data::Dataset;
pub use error::{Error, Result};
pub use estimate::{fit_mle, loglik, std_errors, FitOptions, FitResult};
pub use fgm::{Dependence, UnitPair};
pub use itl::ItlParams;
pub use modelsel::{compare_models, information_criteria, ComparisonReport};
