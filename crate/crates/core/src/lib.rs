//! Entanglement-based quNit key distribution and its optimal individual
//! cloning attack.
//!
//! The crate is layered bottom-up:
//!
//! - [`qudit`]: small dense linear algebra, φ-bases, |Φ_N^+⟩, partial trace
//! - [`bell`]: generalized Bell states and overlaps between φ-bases
//! - [`cerf`]: four-slot cloning states, invariance classes, the (v, x, y) family
//! - [`secinfo`]: Alice–Bob and Alice–Eve mutual information
//! - [`threshold`]: Eve's optimum, the I_AB = I_AE crossover, nonlocality thresholds
//! - [`sim`]: seeded Monte-Carlo protocol runs
//! - [`parse`]: config and argument parsers for the command line

pub mod bell;
pub mod cerf;
pub mod error;
pub mod parse;
pub mod qudit;
pub mod search;
pub mod secinfo;
pub mod sim;
pub mod threshold;

pub use error::{Error, Result};
pub use qudit::{Dim, C64};
