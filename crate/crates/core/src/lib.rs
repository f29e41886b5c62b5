//! A laboratory for the Kadanoff sand pile model KSPM(D).
//!
//! KSPM(D) starts from N grains stacked on column 0 and repeatedly applies
//! one local rule: when the height difference between columns `i` and `i+1`
//! is at least `D`, `D-1` grains fall from column `i` onto the `D-1` columns
//! to its right. This crate computes fixed points and avalanches exactly,
//! extracts the avalanche combinatorics (peaks, density, long avalanches,
//! influent type words), builds the interval word transducer for any `D`,
//! and cross-validates the transducer predictions and the wave-shaped tails
//! of fixed points against brute-force simulation.
//!
//! Modules:
//! - [`sandpile`]: configurations, the firing rule, leftmost stabilization
//!   and the incremental fixed-point computation;
//! - [`avalanche`]: per-avalanche analysis and the influent type words;
//! - [`transducer`]: mechanical construction of the interval machine;
//! - [`words`]: word heights, basic words, decompositions and convergence;
//! - [`wave`]: the wave tail matcher, the tail formula and the sweep table;
//! - [`pipeline`]: the end-to-end agreement report;
//! - [`render`]: ASCII and SVG views of long avalanches;
//! - [`verify`]: the reproducible verification suites.

pub mod avalanche;
pub mod error;
pub mod pipeline;
pub mod render;
pub mod sandpile;
pub mod transducer;
pub mod verify;
pub mod wave;
pub mod words;

pub use error::{Error, Result};
pub use sandpile::{fixed_point, stabilize_leftmost, Configuration, HeightProfile, ModelParams, Strategy};
