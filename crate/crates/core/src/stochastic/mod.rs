//! Stochastic side: spanning forests of a map, their amplitudes, and the
//! forest-sum verifier.

mod amplitude;
mod forest;
mod verify;

pub use amplitude::{free_two_point_quadrature, stochastic_amplitude, stochastic_amplitude_at, taylor_term_values, Method};
pub use forest::{
    choice_sequences, enumerate_forests_by_parents, enumerate_spanning_forests,
    enumerate_spanning_forests_monolithic, taylor_terms, SpanningForest, TaylorTerm,
};
pub use verify::{verify_forest_sum, verify_order, AmplitudeReport, OrderReport};

use crate::feynman::FeynmanError;
use crate::operator::OperatorError;
use thiserror::Error;

/// Largest number of internal vertices accepted by amplitude evaluation.
pub const MAX_INTERNAL_VERTICES: usize = 8;
/// Relative tolerance of the closed-form forest sum.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Relative tolerance of the quadrature forest sum.
pub const QUADRATURE_TOL: f64 = 1e-5;
/// Guard in `|Σ − 𝒜| / max(|𝒜|, ε)`.
pub const REL_EPSILON: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StochasticError {
    #[error("not a spanning forest of the map: {0}")]
    NotSpanning(String),
    #[error("{count} internal vertices exceed the cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error(transparent)]
    Feynman(#[from] FeynmanError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}
