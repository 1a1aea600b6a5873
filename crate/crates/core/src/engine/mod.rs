//! The synthesis core.
//!
//! `solve` walks repeat-count vectors in ascending total. For each vector it
//! symbolically executes every harness into an and-inverter graph, asks a
//! SAT solver for a model, and replays each model through the concrete
//! interpreter before accepting it. Objectives are then minimized by
//! descending re-solve and the remaining unknowns are pushed to their
//! smallest values, so the reported solution does not depend on solver
//! internals or worker count.

pub mod aig;
pub mod interp;
mod search;
mod solution;
pub mod symbolic;

use std::time::Duration;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lowering::IrProgram;
use crate::unknowns::Assignment;

pub use interp::{eval_all, eval_harness, EvalOutcome, EvalStatus, Interpreter, Value};
pub use search::{repeat_vectors, solve};
pub use solution::{format_solution, parse_solution, ParsedSolution};

/// Bounds on one concrete or symbolic harness run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Machine integer width in bits.
    pub int_width: u32,
    /// Iterations a single `while` may run.
    pub loop_bound: u32,
    /// Statements and calls per harness run.
    pub step_limit: u64,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { int_width: 32, loop_bound: 64, step_limit: 100_000, max_depth: 256 }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub limits: Limits,
    pub timeout: Duration,
    /// Repeat vectors searched concurrently.
    pub jobs: usize,
    /// Reported but unused: the search has no random choices.
    pub seed: u64,
    /// Report `ms=0` so output is byte-stable.
    pub deterministic_time: bool,
    /// Case splits allowed per harness.
    pub max_leaves: usize,
    /// Graph nodes allowed per repeat vector.
    pub node_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            limits: Limits::default(),
            timeout: Duration::from_secs(600),
            jobs: 1,
            seed: 0,
            deterministic_time: false,
            max_leaves: 4096,
            node_cap: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    /// SAT queries issued up to and including the winning repeat vector.
    pub candidates: u64,
    /// Sum of the repeat counts.
    pub depth: u32,
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Assignment,
    pub objective_values: IndexMap<String, i64>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("no solution within the configured bounds")]
    Unsat { candidates: u64 },
    #[error("timed out")]
    Timeout { candidates: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Replays every harness with a fresh interpreter; true iff all pass with
/// the recorded objective values.
pub fn verify_solution(prog: &IrProgram, solution: &Solution, limits: &Limits) -> bool {
    solution.assignment.is_total(&prog.registry)
        && eval_all(prog, &solution.assignment, limits).is_some_and(|v| v == solution.objective_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classtable::build_class_table;
    use crate::desugar::{assign_unknown_ids, normalize, specialize_class_generators, UnknownBounds};
    use crate::frontend::parse_sources;
    use crate::lowering::lower_program;

    const MULT2: &[(&str, &str)] = &[
        ("SimpleMath.java", "class SimpleMath { static int mult2(int x) { return ?? * {| x , 0 |}; } }"),
        ("Test.java", "class Test { harness static void test() { assert SimpleMath.mult2(3) == 6; } }"),
    ];

    fn lower(src: &[(&str, &str)], hole_bits: u32) -> IrProgram {
        let ast = parse_sources(src).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        let (ids, reg) = assign_unknown_ids(&spec, UnknownBounds { hole_bits, unroll_max: 8 });
        let flat = normalize(&ids).unwrap();
        let table = build_class_table(&flat).unwrap();
        lower_program(&flat, &table, &reg).unwrap()
    }

    fn mult2_asg(h: u64, c: u32) -> Assignment {
        Assignment { repeats: vec![], holes: vec![vec![h]], choices: vec![vec![c]] }
    }

    #[test]
    fn mult2_concrete_runs() {
        let prog = lower(MULT2, 5);
        let lim = Limits::default();
        assert!(eval_harness(&prog, 0, &mult2_asg(2, 0), &lim).passed());
        let out = eval_harness(&prog, 0, &mult2_asg(3, 1), &lim);
        assert!(matches!(out.status, EvalStatus::AssertFail(_)));
    }

    #[test]
    fn mult2_has_one_model_in_small_space() {
        let prog = lower(MULT2, 2);
        let lim = Limits::default();
        let mut passing = Vec::new();
        for h in 0..4 {
            for c in 0..2 {
                if eval_all(&prog, &mult2_asg(h, c), &lim).is_some() {
                    passing.push((h, c));
                }
            }
        }
        assert_eq!(passing, vec![(2, 0)]);
    }

    #[test]
    fn mult2_solves_and_verifies() {
        let prog = lower(MULT2, 3);
        let cfg = EngineConfig { deterministic_time: true, ..EngineConfig::default() };
        let sol = solve(&prog, &cfg).unwrap();
        assert_eq!(sol.assignment, mult2_asg(2, 0));
        assert_eq!(sol.stats.depth, 0);
        assert_eq!(sol.stats.ms, 0);
        assert!(verify_solution(&prog, &sol, &cfg.limits));
        let mut bad = sol.clone();
        bad.assignment.holes[0][0] ^= 1;
        assert!(!verify_solution(&prog, &bad, &cfg.limits));
    }

    #[test]
    fn unsat_reports_candidates() {
        let src = [("A.java", "class A { harness static void h() { int x = ??; assert x * 2 == 7; } }")];
        let prog = lower(&src, 5);
        let err = solve(&prog, &EngineConfig::default()).unwrap_err();
        assert!(matches!(err, SolveError::Unsat { candidates } if candidates >= 1));
    }

    #[test]
    fn objective_is_minimized() {
        let src = [(
            "A.java",
            "class A { static int n = ??; harness static void h() { minimize(n); assert n * n > 20; } }",
        )];
        let prog = lower(&src, 5);
        let sol = solve(&prog, &EngineConfig::default()).unwrap();
        assert_eq!(sol.objective_values.values().copied().collect::<Vec<_>>(), vec![5]);
    }

    #[test]
    fn solution_text_round_trips() {
        let prog = lower(MULT2, 5);
        let sol = solve(&prog, &EngineConfig { deterministic_time: true, ..EngineConfig::default() }).unwrap();
        let text = format_solution(&sol, &prog.registry);
        let parsed = parse_solution(&text).unwrap();
        assert_eq!(parsed.assignment(&prog.registry), Some(sol.assignment.clone()));
        assert_eq!(parsed.stats, Some(sol.stats.clone()));
        assert!(parse_solution("hole e_h1 2").is_err());
    }
}
