//! Semantic enrichment of bare building-object geometry.
//!
//! Per-object meshes (one PLY file per wall, floor, window or door) go
//! through three enrichment tools in sequence:
//!
//! 1. [`classifier`]: object type from a 19-feature geometric descriptor
//!    ([`features`]), using a decision tree, random forest or KNN.
//! 2. [`relations`]: `adjacentTo` / `hosting` / `hosted` edges from a
//!    bounding-box filter, an exact mesh distance, and box containment.
//! 3. [`attributes`]: type-dependent dimensions (height, length, thickness,
//!    area, volume, slope, ...).
//!
//! The results form a [`graph::BimGraph`] that serializes to a small Turtle
//! subset. [`reconstruct`] reads such a graph back, emits a plan of creation
//! commands, realizes it as meshes and compares the rebuilt scene with the
//! original. [`synth`] generates labeled apartment scenes with analytic
//! ground truth for training and evaluation.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --example roundtrip
//! ```

pub mod attributes;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod features;
pub mod graph;
pub mod mesh;
pub mod numfmt;
pub mod pipeline;
pub mod ply;
pub mod proximity;
pub mod reconstruct;
pub mod record;
pub mod relations;
pub mod solid;
pub mod synth;
pub mod turtle;

mod class;

pub use class::ObjectClass;
pub use error::{Error, Result};
pub use mesh::{Aabb, Mesh, Point, Vector};
