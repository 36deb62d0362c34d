//! Condition prediction for sewer pipe segments.
//!
//! The crate covers the full modelling workflow: loading and cleaning tabular
//! inspection data, fitting a multiple linear regression with complete
//! inferential output, training a small feed-forward neural network
//! regressor, evaluating either model with a six-metric suite, and generating
//! synthetic datasets with known ground truth for end-to-end checks. A thin
//! CLI binary wires the pieces into reproducible pipeline runs.

pub mod ann;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod mlr;
pub mod model;
pub mod numeric;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};
