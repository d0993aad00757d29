//! Weighted exponential family with power generator `T(x) = x^(-s)`:
//! densities, exact sampling, closed-form moments, closed-form moment-type
//! estimators with delta-method inference, bootstrap bias reduction, and a
//! Monte Carlo harness.

pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod family;
pub mod model;
pub mod moments;
pub mod sampling;
pub mod simulation;
pub mod special;

pub use error::{Error, EstimationFailure, Result};
pub use family::{FamilySpec, ModelName, Params};
pub use sampling::SeededStream;
