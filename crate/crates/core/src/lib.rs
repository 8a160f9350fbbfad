//! Graph neural networks and bag-of-words baselines for classifying news
//! propagation trees as fake or real.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix it to `f64`,
//! which is what training and gradient checks use.

pub mod baselines;
pub mod error;
pub mod graph;
pub mod layers;
pub mod model;
pub mod numeric;
pub mod report;
pub mod seed;
pub mod synth;
pub mod wl;

pub use error::{Error, Result};
pub use numeric::Scalar;

pub type Matrix = numeric::DenseMatrix<f64>;
pub type Batch = graph::GraphBatch<f64>;
pub type GnnModel = model::Model<f64>;
