//! Numerical spectral theory of composition semigroups on weighted Bergman
//! spaces of the unit disk.
//!
//! Functions are carried as truncated Taylor series ([`series::AnalyticSeries`]),
//! weights as [`weights::RadialWeight`] and semigroups through their Koenigs
//! data ([`semigroup::SemigroupSpec`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod cli;
pub mod config;
pub mod difference;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod quadrature;
pub mod resolvent;
pub mod semigroup;
pub mod series;
pub mod spectral;
pub mod trend;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
