//! Homogenized spectra of the Laplacian on two box sheets joined by many
//! thin tubes: regime classification, limit spectra, and a finite-difference
//! model for verifying the convergence theorems.

pub mod base;
pub mod cli;
pub mod direct;
pub mod error;
pub mod limit;
pub mod pencil;
pub mod regime;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
pub use cli::run;
