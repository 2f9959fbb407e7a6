//! Semantically encoded floor-plan toolchain.
//!
//! Synthesizes rectilinear floor plans, rasterizes them in four encoding
//! styles, writes fine-tuning corpora with paired caption prompts, parses
//! prompts back, decodes plan rasters into structure and scores image
//! directories against an evaluation suite.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod decode;
pub mod geometry;
pub mod palette;
pub mod rng;
pub mod prompt;
pub mod render;
pub mod synth;

pub use geometry::{FloorPlan, ShapeClass};
pub use palette::ColorName;
