//! Formal explanations for positional scoring rules.
//!
//! A voting rule can be read as a classifier from preference profiles to
//! winners. This crate computes the two classical kinds of formal
//! explanations for such a classifier on rank-matrix profiles:
//!
//! * abductive explanations (`AXp`/`iAXp`): minimal sets of locked ballot
//!   entries that force the observed winner in every completion, and
//! * contrastive explanations (`CXp`): minimal sets of entries whose release
//!   admits a completion where the winner loses.
//!
//! The crate also ships the supporting machinery: exact min/max score
//! bounds with an incremental cache, a small seed-map SAT engine used to
//! enumerate all explanations and to find cardinality-smallest ones through
//! hitting-set duality, brute-force reference oracles, statistical culture
//! generators, profile metrics, and a swap-distance map embedding.

// grid code walks several parallel arrays by index
#![allow(clippy::needless_range_loop)]

pub mod cultures;
pub mod enumerate;
mod error;
pub mod explain;
pub mod mapel;
pub mod metrics;
pub mod oracle;
pub mod parallel;
pub mod profile;
pub mod sat;
pub mod scoring;

pub use error::{Error, Result};
pub use explain::{Explanation, ExplanationKind};
pub use profile::{Candidate, CellIndex, PartialRankMatrix, Profile, RankMatrix};
pub use scoring::{MarginReport, ScoreCache, ScoringVector};
