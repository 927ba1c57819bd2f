//! Almost squares in short intervals.
//!
//! An integer `n` is a `(θ, C)`-almost square when `n = a·b` with both factors
//! inside `[√n − C·n^θ, √n + C·n^θ]`. This crate certifies and enumerates such
//! integers, measures how often short intervals `[x, x + H(x)]` miss them, and
//! evaluates the analytic quantities (ζ on the critical line, short Dirichlet
//! polynomials, the product counter Φ and Perron remainders) used to reason
//! about their distribution.
//!
//! The crate is `no_std` and only needs an allocator. Parallel drivers, file
//! formats and the command line live in the `almsq` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod detector;
mod error;
pub mod exact;
pub mod oracles;
pub mod params;
pub mod quad;
pub mod scanner;

pub use error::{Error, Result};
pub use params::{
    choose_parameters, in_window, interval_length, window_of, AlmostSquareParams, AnalyticConfig,
    IntervalSpec, ParameterChoice, Preset, Window,
};
