//! Clause-based centering over annotated discourse.
//!
//! Documents in the CDA line format are segmented into utterance units,
//! folded through a stack of attentional states, and each third-person
//! pronoun is resolved against salience tiers under agreement, sortal and
//! binding filters. A Brennan–Friedman–Pollard baseline and corpus
//! statistics run over the same units.

pub mod annot;
pub mod bfp;
pub mod cli;
pub mod engine;
pub mod model;
pub mod segment;
pub mod stats;
