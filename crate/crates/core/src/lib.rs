//! Similarity measures on grammar-compressed strings.
//!
//! The crate works directly on straight-line programs (SLPs): Hamming
//! distance through product grammars, exact and (1+eps)-approximate edit
//! distance and LCS through box decompositions of the alignment graph with
//! Monge/SMAWK machinery, median and center k-edit-distance approximation
//! schemes, and FFT-based cyclic shift matching.

pub mod boxdp;
pub mod error;
pub(crate) mod hashing;
pub mod lv;
pub mod monge;
pub mod partition;
pub mod product;
pub mod shift;
pub mod slp;

pub use error::{Error, Result};
pub use slp::{Ch, Slp, SymbolId, Text};
