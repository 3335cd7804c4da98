//! Mutation-sensitive correlation filter tracking.
//!
//! A background-aware discriminative correlation filter whose regression
//! label is learned jointly with the filter. Per frame the response map is
//! scored for dangerous sub-peaks (the mutation threat factor); the score
//! reshapes a hybrid label built from a Gaussian peak over a cruciform
//! pedestal, and a fixed-iteration ADMM retrains the filter and label
//! together in the frequency domain.
//!
//! Pipeline modules:
//!
//! - [`grid`], [`geometry`], [`config`] — shared value types and parameters
//! - [`spectral`] — unitary 2-D DFT and circular correlation
//! - [`features`] — HOG / color-names / gray cell features
//! - [`mutation`] — sub-peak detection and threat scoring
//! - [`label`] — Gaussian + cruciform hybrid label construction
//! - [`solver`] — three-block ADMM over filter and label
//! - [`tracker`] — the per-frame loop
//! - [`eval`] — one-pass-evaluation metrics
//! - [`harness`] — dataset I/O, synthetic sequences, CLI

pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod label;
pub mod mutation;
pub mod solver;
pub mod spectral;
pub mod tracker;

pub use config::MscfConfig;
pub use error::{MscfError, Result};
pub use geometry::BoundingBox;
