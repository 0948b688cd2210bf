//! Fidelity-kernel classification toolkit.
//!
//! The crate is `no_std` (with `alloc`) and holds every numeric piece of the
//! pipeline: a dense state-vector simulator, a small circuit IR with moment
//! scheduling, dynamical-decoupling insertion and trajectory noise, angle and
//! IQP feature maps, kernel-matrix estimation, an SMO kernel SVM, and the
//! image preprocessing chain (grayscale, box resize, PCA, angle scaling).
//!
//! IO, file formats, parallel execution and the experiment runner live in the
//! `qkdefect` companion crate.

#![no_std]
#![warn(rust_2018_idioms, missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod encode;
mod error;
pub mod linalg;
pub mod pipeline;
pub mod qkernel;
pub mod rng;
pub mod statevec;
pub mod svm;

pub use error::{Error, Result};
