//! Sparse linear and logistic regression.
//!
//! Both models are fit by cyclic coordinate descent with soft-thresholding:
//! the LASSO directly, the L1-penalized logistic regression through an
//! iteratively reweighted least-squares outer loop. Around the solvers sit
//! a CSV encoder, k-fold cross-validation, class rebalancing by over- and
//! under-sampling, ranking metrics and a small command-line front end.
//!
//! ```
//! use sparsefit::{lasso, synth::{generate_synthetic, SynthSpec}};
//!
//! let data = generate_synthetic(&SynthSpec::linear(200, 10, 3, 0.1), 7).unwrap();
//! let model = lasso::fit(&data.dataset, &lasso::LassoConfig::new(0.05)).unwrap();
//! assert!(model.n_nonzero() <= 10);
//! ```

pub mod cli;
pub mod data;
pub mod encode;
pub mod error;
pub mod lasso;
pub mod logistic;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod resample;
pub mod seed;
pub mod select;
pub mod synth;

pub use data::{EncodedDataset, Matrix};
pub use error::{Error, Result};
pub use lasso::LassoConfig;
pub use logistic::LogRegConfig;
pub use model::{FittedModel, LinearModel, LogisticModel};
pub use resample::SamplingScheme;
pub use select::CvOptions;
