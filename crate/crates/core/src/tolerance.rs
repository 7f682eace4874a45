//! Numerical tolerances and fixed discretisation constants.

/// Relative tolerance for solver-level comparisons (banded vs dense, symmetry, linearity).
pub const SOLVER_RTOL: f64 = 1e-8;

/// Tolerance for exact null-space reproduction (lines in, lines out).
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Residual tolerance on the attack polynomial's interpolation constraints.
pub const CONSTRAINT_TOL: f64 = 1e-7;

/// Number of nodes for composite Simpson quadrature on [0, 1] (4096 panels).
pub const QUADRATURE_NODES: usize = 4097;

/// Central finite-difference step used when analytic derivatives are absent.
pub const FD_STEP: f64 = 1e-5;

/// Slack allowed on the Sobolev norm-equivalence bounds [1/5, 7].
pub const NORM_EQUIVALENCE_SLACK: f64 = 1e-3;

/// Slack allowed on the sup-norm interpolation inequality.
pub const INTERPOLATION_SLACK: f64 = 1e-6;

/// Constant C0 in the bandwidth precondition N * lambda^(1/4) > C0.
pub const BANDWIDTH_C0: f64 = 1.0;

/// Relative margin keeping lambda_d strictly above C_lambda * N^-4.
pub const LAMBDA_FLOOR_MARGIN: f64 = 1e-9;

/// Distances closer than this are treated as ties when ranking worker points.
pub const TIE_EPS: f64 = 1e-12;
