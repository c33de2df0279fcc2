//! Base learners for the multi-label transformation methods: a CART-style
//! multiclass decision tree and an L2-regularized binary logistic
//! regression, both with class-probability outputs.

mod logistic;
mod tree;

pub use logistic::{gradient as logistic_gradient, loss as logistic_loss, LogisticModel, LogisticParams};
pub use tree::{TreeModel, TreeParams};
