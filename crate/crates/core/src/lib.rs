//! Certification of odd integers represented by positive-definite integral quadratic forms.
//!
//! Modules follow the pipeline: exact lattice arithmetic ([`forms`]), p-adic data and
//! Eisenstein coefficients ([`local`]), escalator trees ([`escalation`]), the analytic
//! cusp-form bound ([`analytic`]) and the finite checks that turn bounds into
//! certificates ([`verify`]).

pub mod arith;
pub mod error;
pub mod forms;
pub mod local;
pub mod escalation;
pub mod analytic;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{validate_gram, QuadraticForm};
