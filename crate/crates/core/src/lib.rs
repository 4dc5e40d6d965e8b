//! Orthogonal polynomials on the unit circle: the Szegő recursion, point-mass
//! insertion for Verblunsky coefficients, moment/Toeplitz oracles, Szegő
//! functions, and tail asymptotics of perturbed coefficients.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod pointmass;
pub mod quadrature;
pub mod recursion;
pub mod sequence;
pub mod summation;
pub mod szego;
pub mod validation;
