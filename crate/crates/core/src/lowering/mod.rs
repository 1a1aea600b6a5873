//! Lowering of the normalized AST into a small first-order IR.
//!
//! Objects become records with one slot per entry of the uniform field
//! layout. Every instance call goes through a `dyn_dispatch_*` function that
//! branches on the receiver's class id. Constructors take the freshly
//! allocated record as `self` and return it.

pub mod ir;
mod lower;
mod print;

use thiserror::Error;

use crate::classtable::ClassTableError;
use crate::span::SourceSpan;

pub use ir::*;
pub use lower::{assignable, lower_program, make_dyn_dispatch};
pub use print::print_program;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LoweringError {
    #[error("{span}: {message}")]
    Type { span: SourceSpan, message: String },
    #[error("{span}: unknown library call `{name}`")]
    UnknownBuiltin { span: SourceSpan, name: String },
    #[error("{span}: {message}")]
    Harness { span: SourceSpan, message: String },
    #[error(transparent)]
    Table(#[from] ClassTableError),
}

impl LoweringError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            LoweringError::Type { span, .. }
            | LoweringError::UnknownBuiltin { span, .. }
            | LoweringError::Harness { span, .. } => span,
            LoweringError::Table(e) => e.span(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classtable::build_class_table;
    use crate::desugar::{assign_unknown_ids, normalize, specialize_class_generators, UnknownBounds};
    use crate::frontend::parse_sources;

    fn lower(src: &[(&str, &str)]) -> Result<IrProgram, LoweringError> {
        let ast = parse_sources(src).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        let (ids, reg) = assign_unknown_ids(&spec, UnknownBounds::default());
        let flat = normalize(&ids).unwrap();
        let table = build_class_table(&flat)?;
        lower_program(&flat, &table, &reg)
    }

    fn automata() -> Vec<(&'static str, &'static str)> {
        vec![
            ("Automaton.java", include_str!("../../sketches/automata/Automaton.java")),
            ("DBConnection.java", include_str!("../../sketches/automata/DBConnection.java")),
            ("CADsR.java", include_str!("../../sketches/automata/CADsR.java")),
            ("TestCADsR.java", include_str!("../../sketches/automata/TestCADsR.java")),
            ("TestDBConnection.java", include_str!("../../sketches/automata/TestDBConnection.java")),
        ]
    }

    #[test]
    fn mult2_lowers() {
        let p = lower(&[
            ("SimpleMath.java", include_str!("../../sketches/mult2/SimpleMath.java")),
            ("Test.java", include_str!("../../sketches/mult2/Test.java")),
        ])
        .unwrap();
        assert_eq!(p.harnesses.len(), 1);
        assert_eq!(p.harnesses[0].name, "test_Test");
        assert!(p.func("mult2_SimpleMath_int").is_some());
    }

    #[test]
    fn dispatch_arms_follow_class_ids() {
        let p = lower(&automata()).unwrap();
        let f = p.func("dyn_dispatch_getId").unwrap();
        assert_eq!(f.kind, FuncKind::Dispatch);
        // three implementers plus the trailing trap
        assert_eq!(f.body.len(), 4);
        assert!(matches!(f.body.last(), Some(IrInstr::Trap(_))));
        let names: Vec<&str> = p.harnesses.iter().map(|h| h.name.as_str()).collect();
        assert!(names.contains(&"min_num_state_Automaton1"));
        assert!(names.contains(&"scenario_bad2_TestDBConnection"));
        assert_eq!(p.objectives.len(), 2);
        assert!(p.char_token.is_some());
        assert!(print_program(&p).contains("fn dyn_dispatch_transition_Token"));
    }

    #[test]
    fn boolean_holes_are_one_bit() {
        let p = lower(&[("A.java", "class A { harness static void h() { boolean b = ??; int x = ??; assert b; } }")])
            .unwrap();
        assert!(p.registry.holes[0].is_bool);
        assert_eq!(p.registry.holes[0].bits, 1);
        assert!(!p.registry.holes[1].is_bool);
    }

    #[test]
    fn rejections() {
        let bad = [
            "class A { void h() { minimize(1); } }",
            "class A { harness void h() { } }",
            "class A { harness static void h() { minrepeat { minrepeat { } } } }",
            "class A { harness static void h() { int x = 1; int y = (x = 2); } }",
            "class A { harness static void h() { boolean b = 1; } }",
            "class A { int f; static void g() { f = 1; } }",
        ];
        for src in bad {
            assert!(lower(&[("A.java", src)]).is_err(), "{src}");
        }
    }

    #[test]
    fn unrolled_copies_are_numbered() {
        let body = vec![IrInstr::Trap("x".into())];
        let copies = lower_minrepeat(0, &body, 3);
        let iters: Vec<u32> = copies
            .iter()
            .map(|c| match c {
                IrInstr::Iteration { iter, .. } => *iter,
                _ => 0,
            })
            .collect();
        assert_eq!(iters, [1, 2, 3]);
    }
}
