//! Generalization bounds for learning with data augmentation.
//!
//! The crate is `no_std` (with `alloc`) and holds every numerical piece:
//!
//! - [`loss`] and [`bound`]: bounded losses, sub-Gaussian constants, CGF checks and
//!   assembly of the three-term bounds (dataset-level and per-sample forms).
//! - [`discrete`]: exact enumeration over finite data/group/hypothesis worlds, used
//!   to check the gap decomposition, orbit contraction, reverse Pinsker and the
//!   augmentation-MI bounds to machine precision.
//! - [`gaussian`]: closed forms for the Gaussian mean-estimation model together
//!   with Monte-Carlo oracles and the parameter sweeps.
//! - [`geometry`]: affine image augmentation, group diameter estimation and the
//!   circle density check.
//! - [`nn`]: a small dense network with hand-written backprop and Adam.
//! - [`estimators`]: MINE, density-ratio KL and plug-in MI.
//! - [`pipeline`]: augmented datasets, empirical gaps and the per-cell image
//!   bound computation.
//!
//! IO, caching and the command line live in the `augbound` crate.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` style checks are there to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bound;
pub mod discrete;
pub mod error;
pub mod estimators;
pub mod gaussian;
pub mod geometry;
pub mod linalg;
pub mod loss;
pub mod nn;
pub mod pipeline;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use crate::bound::{assemble_bound_thm3, assemble_bound_thm4, BoundReport, TheoremTag};
pub use crate::error::{Error, Result};
pub use crate::linalg::Matrix;
pub use crate::loss::{LossKind, LossSpec};
