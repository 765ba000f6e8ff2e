//! Hyperasymptotic expansions for linear difference equations with
//! polynomial coefficients.
//!
//! The crate is organised bottom-up: [`mpfield`] supplies multiprecision
//! special functions, [`eqmodel`] the equation and its formal solutions,
//! [`geometry`] the singulant geometry and truncation plans, [`hyperterm`]
//! the hyperterminant functions, [`connection`] the numerically extracted
//! Stokes multipliers, [`evaluator`] the level-ℓ approximations, [`bounds`]
//! rigorous error bounds and [`oracle`] independent reference values.

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the subscripts of the recurrences they implement.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod connection;
pub mod eqmodel;
pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod hyperterm;
pub mod mpfield;
pub mod oracle;
pub mod quad;

pub use error::{Error, ErrorClass, Result};
