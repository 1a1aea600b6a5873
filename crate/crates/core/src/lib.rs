//! Sketch-based synthesis for a small Java-like object-oriented language.
//!
//! A sketch is a program with unknowns: integer holes `??`, expression
//! choices `{| a, b |}`, `minrepeat { .. }` blocks and `generator` classes.
//! Harnesses (`harness static void h()`) state what the completed program
//! must satisfy. The crate finds values for every unknown and prints the
//! completed program.

pub mod decode;
pub mod desugar;
pub mod frontend;
pub mod span;
pub mod unknowns;
pub mod classtable;
pub mod stdlib;
pub mod lowering;
pub mod engine;
pub mod pipeline;
pub mod cli;
pub use pipeline::{Error, Options};
