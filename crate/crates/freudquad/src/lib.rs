//! Numerical weighted integration over R^d and sparse-grid sampling
//! recovery for functions of Sobolev mixed smoothness.
//!
//! The crate provides, for Freud-type weights `exp(-a |x|^lambda + b)` and
//! Markov–Sonin weights `|x|^beta exp(-a x^2 + b)`:
//!
//! - Gaussian quadrature rules from three-term recurrences (closed forms
//!   for the Gaussian and Markov–Sonin cases, a discretized Stieltjes
//!   procedure for general Freud exponents), via the symmetric
//!   tridiagonal eigenproblem ([`orthopoly`]);
//! - truncated Gaussian rules that discard nodes beyond a fraction of the
//!   Mhaskar–Rakhmanov–Saff scale, plus the adversarial bump construction
//!   certifying lower bounds for any node set ([`quad1d`]);
//! - Smolyak difference quadratures on step hyperbolic crosses in the
//!   function domain R^d, built from a dyadic ladder of univariate rules
//!   ([`sparse_quad`]);
//! - base quadratures on the unit cube (Fibonacci lattice for d = 2,
//!   a Smolyak B-spline rule for general d) and the smooth periodization
//!   transform ([`cube_rules`]);
//! - the assembled quadrature over integer-shifted cubes with an
//!   exponentially decaying node-budget schedule ([`assembled_quad`]);
//! - B-spline quasi-interpolation and the sparse-grid sampling recovery
//!   operator for periodic functions ([`bspline_recover`]);
//! - a corpus of test functions with certified reference integrals and a
//!   high-precision oracle integrator ([`corpus_oracle`]);
//! - convergence tables, rate fitting and deterministic emission for the
//!   benchmark CLI ([`mod@bench`]).

pub mod error;
pub mod gamma;
pub mod panels;
pub mod weights;
pub mod orthopoly;
pub mod taylor;
pub mod quad1d;
pub mod sparse_quad;
pub mod bspline_recover;
pub mod cube_rules;
pub mod corpus_oracle;
pub mod assembled_quad;
pub mod bench;

pub use error::{Error, Result};
