//! Certified evaluation of Kloosterman sums, Bessel functions and Fourier
//! coefficients of holomorphic Poincaré series, with rigorous error balls.
//!
//! Every real quantity is returned as a [`CertifiedReal`], a midpoint-radius
//! ball guaranteed to contain the exact value.

pub mod arith;
pub mod bessel;
pub mod error;
pub mod kloosterman;
pub mod poincare;
pub mod real;

pub use arith::{factorize, Factorization};
pub use bessel::{bessel_j, BesselQuery};
pub use error::{Error, Result};
pub use kloosterman::{KloostermanTable, KloostermanValue, Route};
pub use poincare::{
    certify_nonzero, coefficient, order_of_vanishing, CertifyOptions, CoefficientQuery,
    CoefficientResult, Sign, Theorem, VanishingReport,
};
pub use real::CertifiedReal;
