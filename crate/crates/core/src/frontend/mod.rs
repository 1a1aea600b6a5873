//! Lexing and parsing of the subject language, including the sketch
//! extensions `??`, `{| e, .. |}`, `minrepeat`, `harness` and `generator`.

pub mod ast;
pub mod lexer;
pub mod parser;

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::span::SourceSpan;
pub use ast::SketchAst;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_unit;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrontendError {
    #[error("{span}: lexical error: {message}")]
    Lex { span: SourceSpan, message: String },
    #[error("{span}: parse error: expected {expected}, found {found}")]
    Parse { span: SourceSpan, expected: String, found: String },
    #[error("{second}: duplicate type `{name}` (first declared at {first})")]
    DuplicateType { name: String, first: SourceSpan, second: SourceSpan },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl FrontendError {
    pub fn span(&self) -> Option<&SourceSpan> {
        match self {
            FrontendError::Lex { span, .. } | FrontendError::Parse { span, .. } => Some(span),
            FrontendError::DuplicateType { second, .. } => Some(second),
            FrontendError::Io { .. } => None,
        }
    }
}

/// Parses in-memory sources given as `(file name, text)` pairs.
pub fn parse_sources<S: AsRef<str>, T: AsRef<str>>(sources: &[(S, T)]) -> Result<SketchAst, FrontendError> {
    let mut ast = SketchAst::default();
    let mut seen: HashMap<String, SourceSpan> = HashMap::new();
    for (name, text) in sources {
        let tokens = tokenize(text.as_ref(), name.as_ref())?;
        let unit = parse_unit(&tokens, name.as_ref())?;
        for decl in &unit.types {
            if let Some(first) = seen.get(&decl.name) {
                return Err(FrontendError::DuplicateType {
                    name: decl.name.clone(),
                    first: first.clone(),
                    second: decl.span.clone(),
                });
            }
            seen.insert(decl.name.clone(), decl.span.clone());
        }
        ast.units.push(unit);
    }
    Ok(ast)
}

/// Reads and parses every file, in order, into one AST.
pub fn parse_program<P: AsRef<Path>>(files: &[P]) -> Result<SketchAst, FrontendError> {
    let mut sources = Vec::with_capacity(files.len());
    for f in files {
        let path = f.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FrontendError::Io { path: path.display().to_string(), message: e.to_string() })?;
        sources.push((path.display().to_string(), text));
    }
    parse_sources(&sources)
}

#[cfg(test)]
mod tests {
    use super::ast::*;
    use super::*;

    pub(crate) const SIMPLE_MATH: &str =
        "class SimpleMath {\n    static int mult2(int x) { return (?? * {| x , 0 |}); }\n}\n";
    pub(crate) const TEST: &str =
        "class Test {\n    harness static void test() { assert(SimpleMath.mult2(3) == 6); }\n}\n";

    #[test]
    fn two_files_two_classes() {
        let ast = parse_sources(&[("SimpleMath.java", SIMPLE_MATH), ("Test.java", TEST)]).unwrap();
        assert_eq!(ast.units.len(), 2);
        let names: Vec<_> = ast.units.iter().flat_map(|u| u.types.iter().map(|t| t.name.clone())).collect();
        assert_eq!(names, ["SimpleMath", "Test"]);
        let test = &ast.units[1].types[0];
        let Member::Method(m) = &test.members[0] else { panic!() };
        assert!(m.modifiers.has(Modifier::Harness) && m.modifiers.is_static());
    }

    #[test]
    fn minimal_class() {
        let ast = parse_sources(&[("A.java", "class A {}")]).unwrap();
        let a = &ast.units[0].types[0];
        assert_eq!(a.name, "A");
        assert!(a.members.is_empty());
    }

    #[test]
    fn duplicate_type_in_one_file() {
        let err = parse_sources(&[("A.java", "class A {}\nclass A {}")]).unwrap_err();
        assert!(matches!(err, FrontendError::DuplicateType { ref name, .. } if name == "A"));
    }

    #[test]
    fn parse_error_reports_location() {
        let err = parse_sources(&[("Bad.java", "class A {\n  int f( { }\n}")]).unwrap_err();
        let FrontendError::Parse { span, .. } = &err else { panic!("{err}") };
        assert_eq!((&*span.file, span.line), ("Bad.java", 2));
        assert!(err.to_string().starts_with("Bad.java:2:"));
    }

    #[test]
    fn mult2_body_has_hole_times_choice() {
        let ast = parse_sources(&[("S.java", SIMPLE_MATH)]).unwrap();
        let Member::Method(m) = &ast.units[0].types[0].members[0] else { panic!() };
        let StmtKind::Return(Some(e)) = &m.body.as_ref().unwrap().stmts[0].kind else { panic!() };
        let ExprKind::Binary { op: BinOp::Mul, lhs, rhs } = &e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Hole { id: None }));
        let ExprKind::Choice { alts, .. } = &rhs.kind else { panic!() };
        assert_eq!(alts.len(), 2);
    }

    #[test]
    fn precedence_is_c_like() {
        let ast = parse_sources(&[("P.java", "class P { boolean f(int a){ return 0 <= a && a < 1 + 2 * 3; } }")])
            .unwrap();
        let Member::Method(m) = &ast.units[0].types[0].members[0] else { panic!() };
        let StmtKind::Return(Some(e)) = &m.body.as_ref().unwrap().stmts[0].kind else { panic!() };
        let ExprKind::Binary { op: BinOp::And, rhs, .. } = &e.kind else { panic!("{:?}", e.kind) };
        let ExprKind::Binary { op: BinOp::Lt, rhs: sum, .. } = &rhs.kind else { panic!() };
        assert!(matches!(sum.kind, ExprKind::Binary { op: BinOp::Add, .. }));
    }

    #[test]
    fn generic_parameter_is_recorded() {
        let ast = parse_sources(&[("G.java", "class G { void f(Iterator<Token> it) { List<Token> l = null; } }")])
            .unwrap();
        let Member::Method(m) = &ast.units[0].types[0].members[0] else { panic!() };
        assert_eq!(m.params[0].ty.name, "Iterator");
        assert_eq!(m.params[0].ty.args[0].name, "Token");
        assert!(matches!(m.body.as_ref().unwrap().stmts[0].kind, StmtKind::Local { .. }));
    }
}
