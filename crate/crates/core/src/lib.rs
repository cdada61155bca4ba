//! Numerical core for studying the value distribution of `ζ'/ζ(σ+it)` just to
//! the right of the critical line.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: IO, file formats, thread pools and the command-line driver
//! live in the `zetadist` crate.
//!
//! Modules, bottom-up:
//!
//! * [`arith`]: prime-power sieve and the von Mangoldt function.
//! * [`batch`]: fixed-chunk jobs that any runner evaluates identically.
//! * [`zeta`]: Euler–Maclaurin evaluation of `ζ`, `ζ'`, `ζ'/ζ`, the Hardy
//!   `Z` function, zero location and zero counting.
//! * [`variance`]: the variance `V(σ)`, `ψ(T)` and the regime thresholds.
//! * [`selberg`]: the weighted prime-power approximation to `-ζ'/ζ`.
//! * [`torus`]: the random Euler product on the torus.
//! * [`extremal`]: Beurling–Selberg band-limited majorants and minorants.
//! * [`lab`]: line sampling and the distribution reports built on it.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
pub mod batch;
pub mod error;
pub mod extremal;
pub mod lab;
pub mod numeric;
pub mod selberg;
pub mod torus;
pub mod variance;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
