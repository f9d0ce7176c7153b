//! Error-correction D-LOCO constrained codes over the DNA alphabet {A,T,G,C}.
//!
//! D-LOCO codes are the lexicographically ordered sets of length-m quaternary
//! words with no homopolymer run longer than ell. This crate implements the
//! encoding-decoding rule (rank/unrank), the index-error sets caused by single
//! substitutions, the redundancy-metric search and residue tables, the residue
//! decoding pipeline with guaranteed single-substitution correction and list
//! decoding for double substitutions, stream assembly with bridging and
//! GC balancing, and a reproducible simulation harness.
//!
//! Module map:
//! - [`symbol`], [`word`], [`params`]: alphabet, words, cardinality arithmetic
//! - [`rank`]: symbol contributions, depth, formal index, unranking
//! - [`index_errors`]: index-difference sets (brute force, closed-form
//!   supersets for ell in {1,2}, exact local-window enumeration)
//! - [`redundancy`]: residue arithmetic, R searches, residue tables, storage
//!   accounting, quadratic model fit
//! - [`ec_codec`]: EC encoding, bridging/balancing, residue decoding D0-D5
//! - [`simlab`]: substitution channel and Monte Carlo experiments

pub mod ec_codec;
pub mod error;
pub mod index_errors;
pub mod params;
pub mod rank;
pub mod redundancy;
pub mod simlab;
pub mod symbol;
pub mod word;

pub use error::{Error, Result};
pub use params::CodeParams;
pub use symbol::Symbol;
pub use word::Word;
