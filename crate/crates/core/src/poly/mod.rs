//! Complexity polynomial interpretations and the reduction pair processor.

mod bound;
mod interpretation;
mod polynomial;
mod search;

pub use bound::{prove_upper_bound, BoundConfig, BoundKind, ComplexityBound, ProofStep};
pub use interpretation::{
    check_cpi, interpret_in, interpret_term, interpretation_for, orient, reduction_pair_step,
    resolve_symbol, sharp_degree, InterpError, Interpretation, OrientationResult,
};
pub use polynomial::{poly_ge, poly_gt, Monomial, Polynomial, Semiring};
pub use search::{search_interpretation, DEFAULT_BUDGET};
