//! Discrete anisotropic p(k)-Laplacian Dirichlet boundary-value problems,
//! treated by the direct variational method:
//!
//!   -Δ(h(k-1)|Δx(k-1)|^{p(k-1)-2}Δx(k-1)) = λ f(k, x(k), u(k)),
//!   x(0) = x(T+1) = 0.
//!
//! The crate assembles the associated energy functional and its gradient
//! (which doubles as the strong-form residual), minimizes it to the unique
//! critical point, computes constructive values for the embedding and
//! coercivity constants, and runs well-posedness experiments: uniqueness via
//! multistart, quantitative coercivity bounds, and continuous dependence of
//! solutions on the parameter function u.

// `!(v > 0.0)` is used throughout validation so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod energy;
mod error;
pub mod grid;
pub mod lab;
pub mod nonlinearity;
pub mod solver;

pub use constants::ConstantsBundle;
pub use energy::{EnergyBreakdown, ProblemInstance};
pub use error::{Error, Result};
pub use grid::{
    h_dist, summation_by_parts_defect, ExponentField, GridFunction, ParameterFunction, WeightField,
};
pub use nonlinearity::{
    classify_regime, powq, CanonicalFamily, ExpressionNonlinearity, GrowthData, Nonlinearity,
    PrimalRegime, RegimeReport, SamplingPlan,
};
pub use solver::{
    maximize_dual, minimize, multistart, tridiagonal_oracle, SolveReport, SolverOptions,
    UniquenessReport, UniquenessVerdict,
};
