//! Graph-by-graph comparison of path-integral and stochastic quantization for
//! scalar theories on finite state spaces.

pub mod feynman;
pub mod langevin;
pub mod maps;
pub mod operator;
pub mod quad;
pub mod stochastic;
pub mod trees;

/// Exact rational used for combinatorial constants.
pub type Rational = num_rational::Ratio<i64>;
