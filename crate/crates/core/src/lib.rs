//! Mutual information estimation as negative copula entropy.
//!
//! The pipeline has two steps: rank-transform every column of a sample
//! matrix into pseudo-observations of the empirical copula, then estimate the
//! differential entropy of those pseudo-observations with a k-nearest-neighbor
//! estimator. Mutual information is the negated result.
//!
//! ```
//! use copent::{estimators, synth, EstimatorConfig};
//!
//! let m = synth::gaussian_sample(&synth::GaussianSpec::new(0.5, 1000, 7).unwrap()).unwrap();
//! let mi = estimators::mi_copula(&m, &EstimatorConfig::default()).unwrap();
//! assert!((mi.nats - synth::gaussian_mi_analytic(0.5).unwrap()).abs() < 0.15);
//! ```

pub mod cli;
pub mod copula;
pub mod data;
mod error;
pub mod estimators;
pub mod knn;
pub mod special;
pub mod synth;

pub use copula::{PseudoObservations, RankScaling, TiePolicy};
pub use data::{ColumnSpec, Finding, SampleMatrix};
pub use error::{Error, Result};
pub use estimators::{EntropyEstimate, EstimatorConfig, MIEstimate, Method};
pub use knn::{Backend, NeighborResult, NormKind, Points};
