//! Renormalization of the `1/2`-discrepancy sums of an irrational rotation.
//!
//! The orbit of `x` under `x -> x + theta mod 1` is coded over `{A, B, C}`
//! and the sums `S_n` are read off the coding. The coding of special points
//! is produced by a substitution tower driven by the continued fraction of
//! `theta`.

pub mod cf;
pub mod encode;
pub mod generators;
pub mod oracle;
pub mod quad;
pub mod stats;
pub mod synth;
pub mod tower;
pub mod word;
