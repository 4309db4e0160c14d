//! Zero distributions of random polynomials spanned by structured bases.
//!
//! The crate builds compact supports with known logarithmic capacity,
//! constructs asymptotically minimal polynomial bases on them (orthonormal,
//! L^p-minimal, Fekete, Faber), samples random linear combinations with
//! prescribed coefficient tails, finds their zeros, and measures how the
//! normalized zero counting measures approach the equilibrium measure of the
//! support.
//!
//! Everything numeric is generic over the scalar through [`num::Real`]
//! (`f32` or `f64`); the experiment layer in [`experiment`] fixes `f64`.

// Index-style loops mirror the matrix notation in the numerical kernels.
#![allow(clippy::needless_range_loop)]

pub mod basis;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod num;
pub mod poly;
pub mod rng;
pub mod roots;
pub mod support;

pub use error::{Error, Result};
pub use num::{Cplx, Real};

/// Complex scalar aliases for the two supported precisions.
pub type C32 = num_complex::Complex<f32>;
/// See [`C32`].
pub type C64 = num_complex::Complex<f64>;
