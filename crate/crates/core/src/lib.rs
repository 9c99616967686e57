//! One-dimensional path-integral laboratory.
//!
//! The crate is organised bottom-up:
//!
//! - [`units`], [`grid`] and [`wave`] hold the numeric substrate (ħ, uniform
//!   grids, sampled wavefunctions and trapezoid inner products).
//! - [`propagator`] builds time-sliced kernels, closed-form reference kernels,
//!   path actions and the tube-amplitude study.
//! - [`wavepacket`] evaluates free Gaussian spreading estimates.
//! - [`branches`] evolves a two-branch, pointer-labelled ensemble and measures
//!   interference visibility.
//! - [`catbox`] simulates the decay-triggered clock box under three collapse
//!   engines and compares their observable statistics.
//! - [`cli`] wires everything into the `branchpath` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branches;
pub mod catbox;
pub mod cli;
pub mod error;
pub mod grid;
pub mod propagator;
pub mod units;
pub mod wave;
pub mod wavepacket;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use num_complex::Complex64;
pub use units::UnitSystem;
pub use wave::WaveFunction;
