//! Data set models with canonical duality: Massieu functions, dual
//! coordinates, the Fisher metric, Bregman divergences and Pythagorean
//! relations, together with discrete, qubit, coherent-state, sphere and
//! regression instances.

// `!(x <= y)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod cli;
pub mod coherent;
pub mod discrete;
pub mod error;
pub mod model;
pub mod numerics;
pub mod qubit;
pub mod regression;
pub mod sphere;

pub use error::{Error, Result};
pub use model::{Answers, EnergyPoint, ModelDescriptor, ParamPoint};
