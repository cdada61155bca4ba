//! Parallel runners, file formats and the command-line driver around
//! [`zetadist_core`].

pub mod commands;
pub mod config;
pub mod io;
pub mod parallel;

pub use zetadist_core as core;
