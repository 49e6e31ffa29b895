//! Harmonic retrieval from partial uniform samples.
//!
//! A mixture of `K` complex exponentials sampled at `N` uniform instants is
//! recovered from a random subset of its samples. The sample vector is lifted
//! into a structured matrix (Hankel or double-Hankel) whose rank is bounded by
//! `K`; the missing entries are then filled in by weighted nuclear-norm
//! minimization, with diagonal weights tuned from leverage scores.
//!
//! The crate is organised bottom-up:
//!
//! - [`signal`]: exponential mixtures, bounded noise and sampling patterns.
//! - [`lifting`]: lifting bases, the lift and its back projection.
//! - [`scores`]: leverage scores, weighted scores and the associated
//!   recovery diagnostics.
//! - [`weights`]: weight pairs and the two-stage reweighting pipeline.
//! - [`solver`]: ADMM with singular value thresholding.
//! - [`experiments`]: Monte-Carlo phase transitions and noise sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod lifting;
mod linalg;
pub mod scores;
pub mod signal;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
