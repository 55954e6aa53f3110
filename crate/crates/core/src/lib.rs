//! Exact Hasse-Schmidt derivations on the exterior algebra of a free
//! module of finite rank.
//!
//! The crate computes characteristic polynomials without determinants,
//! checks the graded Cayley-Hamilton identities term by term, and builds
//! exact truncated series for `exp(ft)` through three independent routes.
//! All arithmetic is over arbitrary-precision rationals; every comparison is
//! exact equality.

pub mod cayley;
pub mod endoseries;
pub mod expode;
pub mod exterior;
pub mod input;
pub mod matrix;
pub mod scalar;
pub mod verify;

pub use cayley::{CharCoeffs, Endomorphism, Pipeline};
pub use endoseries::{EndoSeries, GradedEndo};
pub use exterior::{Blade, Context, Multivector};
pub use matrix::Matrix;
pub use scalar::Rational;
