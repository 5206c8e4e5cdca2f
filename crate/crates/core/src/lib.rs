//! The functional `φ(K) = (1/(|K||K°|)) ∫_K ∫_{K°} ⟨x,y⟩² dy dx` on convex
//! bodies: closed forms for p-balls and their p-products, quadrature for
//! bodies of revolution, and a Monte Carlo estimator for anything with a
//! membership oracle.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod config;
pub mod error;
pub mod exact;
pub mod exponent;
pub mod harness;
pub mod quadrature;
pub mod revolution;
pub mod sampler;
pub mod specfun;
pub mod strategy;

pub use bodies::{BodySpec, Side};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use exponent::Exponent;
