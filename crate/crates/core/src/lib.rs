//! Coded computing with smoothing-spline encoders and decoders.
//!
//! A master encodes `K` inputs with a spline `u_e`, sends `u_e(β_n)` to `N` workers,
//! some of which are adversarial, and recovers `f(x_k)` by evaluating a smoothing
//! spline `u_d` fitted to the returned values at `α_k`.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`. The simulation and experiment layers are `f64` only.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod codec;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod scalar;
pub mod simulation;
pub mod sobolev;
pub mod spline;
pub mod tolerance;

pub use error::{Error, Result};

pub type SplineModel = spline::SplineModel<f64>;
pub type SmoothingOperator = spline::SmoothingOperator<f64>;
pub type HatMatrix = spline::HatMatrix<f64>;
pub type RegressionData = spline::RegressionData<f64>;
pub type DenseSpline = spline::dense::DenseSpline<f64>;
pub type FunctionHandle = sobolev::FunctionHandle<f64>;
pub type CodedTask = codec::CodedTask<f64>;
pub type VectorSpline = codec::VectorSpline<f64>;
pub type AttackPlan = adversary::AttackPlan<f64>;
pub type AttackPolynomial = adversary::AttackPolynomial<f64>;
pub type Matrix = linalg::Matrix<f64>;
