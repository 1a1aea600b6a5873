//! Turning a solved sketch back into Java source.

mod apply;
mod unparse;

pub use apply::{apply_solution, mark_harnesses, IncompleteSolutionError, Replacement};
pub use unparse::{expr_to_string, print_unit, unparse, unparse_sketch, PrintMode, Printer};
