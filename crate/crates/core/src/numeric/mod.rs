//! Dense linear algebra, activations, losses, Adam and gradient checking.

mod adam;
mod gradcheck;
mod matrix;
mod ops;
mod scalar;

pub use adam::{adam_step, AdamState};
pub use gradcheck::{grad_check, FD_STEP};
pub use matrix::DenseMatrix;
pub(crate) use ops::softmax_in_place;
pub use ops::{cross_entropy, elu, leaky_relu, relu, relu_backward, softmax_rows, Activation};
pub use scalar::Scalar;
