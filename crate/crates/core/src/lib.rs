//! Handwritten number classification with labeled projective dictionary
//! pair learning.
//!
//! The pipeline runs raw scans through [`preprocess`] (Otsu binarization,
//! cropping, 32×32 resampling) and [`hog`] descriptors, trains per-class
//! analysis/synthesis dictionary pairs with [`dpl`], and labels test vectors
//! with [`classifier`]. [`eval`] holds the cross-validation and sweep
//! harness, [`datasets`] the corpus loaders and model file format.

extern crate blas_src;

pub mod classifier;
pub mod cli;
pub mod datasets;
pub mod dpl;
pub mod error;
pub mod eval;
pub mod features;
pub mod hog;
pub mod linalg;
pub mod model;
pub mod preprocess;

pub use error::{Error, Result};
pub use model::TrainedModel;
