//! Numerical laboratory for relaxed functionals of linear growth on weighted
//! interval metric measure spaces.
//!
//! The space is a compact interval `[a, b]` with the Euclidean metric and a
//! weighted Lebesgue measure `dmu = w dL`, `w` piecewise constant and bounded
//! between positive constants. On such a space the functional
//!
//! ```text
//! F(u, Omega) = inf { liminf_i  int_Omega f(g_{u_i}) dmu :
//!                     u_i locally Lipschitz, u_i -> u in L1_loc(Omega) }
//! ```
//!
//! (with `f` convex, nondecreasing, of linear growth) is computed here by
//! constrained convex minimization over piecewise-linear grid functions, and
//! its measure property, integral-representation bounds, Whitney/discrete
//! convolution machinery, boundary traces and the fat-Cantor counterexample
//! are all checked against exact or independently computed values.
//!
//! Measure theory is done in exact rational arithmetic; floating point enters
//! only inside the optimization.

pub mod acceptance;
pub mod bvfunc;
pub mod cantor;
pub mod integrand;
pub mod rational;
pub mod relax;
pub mod solver;
pub mod space;
pub mod traces;
pub mod whitney;

pub use bvfunc::{BvRepresentation, GridFunction, VariationMeasure};
pub use integrand::Integrand;
pub use relax::{RelaxationResult, Schedule};
pub use space::{OpenSet, WeightedIntervalSpace};

/// Numeric tolerance of the LP backend on scaled data.
pub const SOLVER_TOL: f64 = 1e-8;
