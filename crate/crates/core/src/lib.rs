//! Information spectra of finite-alphabet stationary processes.
//!
//! The crate is organised around [`process::ProcessModel`], a finite
//! description of a stationary measure (i.i.d., order-k Markov, sliding-block
//! factor of either, or a finite mixture of ergodic components). From a model
//! you can
//!
//! - evaluate exact log-probabilities and sample paths ([`process`]),
//! - compute the exact staircase spectrum of a mixture and Monte Carlo
//!   estimates of the finite-length spectrum ([`spectrum`]),
//! - push a process through a sliding-block code and check the finite-length
//!   inequalities behind homomorphic monotonicity by exhaustive enumeration
//!   ([`coding`]),
//! - work with overlapping-block Markov types ([`mtypes`]),
//! - paste per-component isomorphisms of regular mixtures and certify the
//!   result on samples ([`isomorph`]).
//!
//! All logarithms are base 2.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod coding;
mod enumerate;
mod error;
pub mod isomorph;
pub mod json;
pub mod mtypes;
pub mod numfmt;
pub mod process;
pub mod spectrum;

pub use enumerate::{EnumerationCap, DEFAULT_CAP};
pub use error::{Error, Result};
