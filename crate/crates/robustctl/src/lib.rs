//! Controller synthesis and analysis for uncertain plants.
//!
//! The crate is layered: [`numerics`] holds the dense linear algebra every
//! other module leans on, [`models`] the nonlinear plants and the Euler
//! integrator, [`stability`] the interval and eigenvalue-perturbation tests,
//! [`synthesis`] the gain design routines and [`control`] the runtime laws
//! that run inside a simulation loop.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod models;
pub mod numerics;
pub mod stability;
pub mod synthesis;

mod error;

pub use error::{Error, Result};
pub use numerics::{Complex, Mat, Poly, Vector};
