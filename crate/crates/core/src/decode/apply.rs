use std::fmt;

use thiserror::Error;

use crate::frontend::ast::*;
use crate::unknowns::{instance_name, Assignment, UnknownKind, UnknownRegistry};

use super::unparse::expr_to_string;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("solution has no value for `{name}`")]
pub struct IncompleteSolutionError {
    pub name: String,
}

/// One substituted unknown, for the replacement log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub kind: UnknownKind,
    pub owner: String,
    /// Instance name, e.g. `e_h5_2`.
    pub name: String,
    pub value: String,
}

impl fmt::Display for Replacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "replaced: {}.{} = {}", self.owner, self.name, self.value)
    }
}

struct Apply<'a> {
    reg: &'a UnknownRegistry,
    asg: &'a Assignment,
    iter: Option<u32>,
    log: Vec<Replacement>,
    error: Option<IncompleteSolutionError>,
}

impl Apply<'_> {
    fn missing(&mut self, name: String) {
        if self.error.is_none() {
            self.error = Some(IncompleteSolutionError { name });
        }
    }

    fn instance(&self, repeat: Option<usize>) -> Option<u32> {
        repeat.and(self.iter)
    }

    /// Copies of a `minrepeat` body, one per iteration.
    fn expand(&mut self, id: &Option<crate::unknowns::UnknownId>, body: &Block) -> Vec<Stmt> {
        let Some(id) = id else {
            self.missing("minrepeat".into());
            return Vec::new();
        };
        let Some(&n) = self.asg.repeats.get(id.index()) else {
            self.missing(id.name.clone());
            return Vec::new();
        };
        self.log.push(Replacement {
            kind: UnknownKind::Repeat,
            owner: id.owner.clone(),
            name: id.name.clone(),
            value: n.to_string(),
        });
        let mut out = Vec::new();
        for i in 1..=n {
            let saved = self.iter.replace(i);
            let mut copy = body.clone();
            self.visit_block(&mut copy);
            self.iter = saved;
            if copy.stmts.iter().any(|s| matches!(s.kind, StmtKind::Local { .. })) {
                let span = copy.span.clone();
                out.push(Stmt::new(StmtKind::Block(copy), span));
            } else {
                out.extend(copy.stmts);
            }
        }
        out
    }
}

impl VisitMut for Apply<'_> {
    fn visit_block(&mut self, block: &mut Block) {
        let stmts = std::mem::take(&mut block.stmts);
        for mut s in stmts {
            if let StmtKind::MinRepeat { id, body } = &s.kind {
                let copies = self.expand(id, body);
                block.stmts.extend(copies);
            } else {
                self.visit_stmt(&mut s);
                block.stmts.push(s);
            }
        }
    }

    fn visit_stmt(&mut self, stmt: &mut Stmt) {
        if let StmtKind::MinRepeat { id, body } = &stmt.kind {
            let stmts = self.expand(id, body);
            stmt.kind = StmtKind::Block(Block { stmts, span: stmt.span.clone() });
            return;
        }
        walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &mut Expr) {
        match &mut expr.kind {
            ExprKind::Hole { id } => {
                let Some(id) = id.clone() else {
                    return self.missing("??".into());
                };
                let info = &self.reg.holes[id.index()];
                let iter = self.instance(info.repeat);
                let name = instance_name(&id.name, iter);
                let inst = iter.map_or(0, |i| i as usize - 1);
                let Some(&v) = self.asg.holes.get(id.index()).and_then(|vals| vals.get(inst)) else {
                    return self.missing(name);
                };
                expr.kind = if info.is_bool { ExprKind::Bool(v != 0) } else { ExprKind::Int(v as i64) };
                self.log.push(Replacement { kind: UnknownKind::Hole, owner: id.owner, name, value: expr_to_string(expr) });
            }
            ExprKind::Choice { id, alts } => {
                let Some(id) = id.clone() else {
                    return self.missing("{| |}".into());
                };
                let info = &self.reg.choices[id.index()];
                let iter = self.instance(info.repeat);
                let name = instance_name(&id.name, iter);
                let inst = iter.map_or(0, |i| i as usize - 1);
                let Some(&k) = self.asg.choices.get(id.index()).and_then(|vals| vals.get(inst)) else {
                    return self.missing(name);
                };
                let Some(mut chosen) = alts.get(k as usize).cloned() else {
                    return self.missing(name);
                };
                self.visit_expr(&mut chosen);
                self.log.push(Replacement {
                    kind: UnknownKind::Choice,
                    owner: id.owner,
                    name,
                    value: expr_to_string(&chosen),
                });
                *expr = chosen;
            }
            _ => walk_expr(self, expr),
        }
    }
}

/// Substitutes every unknown of `ast` by its value in `asg`, expanding each
/// `minrepeat` into as many copies as its count. Returns the concrete AST and
/// the replacements in traversal order.
pub fn apply_solution(
    ast: &SketchAst,
    reg: &UnknownRegistry,
    asg: &Assignment,
) -> Result<(SketchAst, Vec<Replacement>), IncompleteSolutionError> {
    let mut out = ast.clone();
    let mut a = Apply { reg, asg, iter: None, log: Vec::new(), error: None };
    walk_ast(&mut a, &mut out);
    match a.error {
        Some(e) => Err(e),
        None => Ok((out, a.log)),
    }
}

/// Restores the `harness` modifier on the given (class, method) pairs; used
/// when reparsing emitted output, which drops it.
pub fn mark_harnesses(ast: &mut SketchAst, harnesses: &[(String, String)]) {
    fn visit(decl: &mut TypeDecl, harnesses: &[(String, String)]) {
        for m in &mut decl.members {
            match m {
                Member::Method(md) if harnesses.iter().any(|(c, n)| *c == decl.name && *n == md.name) => {
                    md.modifiers.insert(Modifier::Harness);
                }
                Member::Type(t) => visit(t, harnesses),
                _ => {}
            }
        }
    }
    for unit in &mut ast.units {
        for decl in &mut unit.types {
            visit(decl, harnesses);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::unparse;
    use crate::desugar::{assign_unknown_ids, UnknownBounds};
    use crate::frontend::parse_sources;

    fn ids(src: &str) -> (SketchAst, UnknownRegistry) {
        let ast = parse_sources(&[("A.java", src)]).unwrap();
        assign_unknown_ids(&ast, UnknownBounds::default())
    }

    #[test]
    fn mult2_decodes_to_literal_and_choice() {
        let (ast, reg) = ids("class SimpleMath { static int mult2(int x) { return ?? * {| x , 0 |}; } }");
        let asg = Assignment { repeats: vec![], holes: vec![vec![2]], choices: vec![vec![0]] };
        let (out, log) = apply_solution(&ast, &reg, &asg).unwrap();
        assert!(unparse(&out)["A.java"].contains("return 2 * x;"));
        let lines: Vec<String> = log.iter().map(|r| r.to_string()).collect();
        assert_eq!(lines, vec!["replaced: SimpleMath.e_h1 = 2", "replaced: SimpleMath.e_c1 = x"]);
    }

    #[test]
    fn no_unknowns_is_identity() {
        let (ast, reg) = ids("class A { int f(int y) { return y + 1; } }");
        let (out, log) = apply_solution(&ast, &reg, &Assignment::zeroed(&reg, &[])).unwrap();
        assert_eq!(out, ast);
        assert!(log.is_empty());
    }

    #[test]
    fn minrepeat_copies_take_their_own_values() {
        let (ast, reg) = ids("class A { static int s; static void t(int id) { minrepeat { if (id == ??) { s = ??; } } } }");
        let asg = Assignment { repeats: vec![2], holes: vec![vec![1, 2], vec![7, 8]], choices: vec![] };
        let (out, _) = apply_solution(&ast, &reg, &asg).unwrap();
        let text = &unparse(&out)["A.java"];
        assert!(text.contains("if (id == 1) {\n            s = 7;"), "{text}");
        assert!(text.contains("if (id == 2) {\n            s = 8;"), "{text}");
        assert!(!text.contains("minrepeat"));
    }

    #[test]
    fn missing_value_is_reported() {
        let (ast, reg) = ids("class A { static int f() { return ??; } }");
        let empty = Assignment { repeats: vec![], holes: vec![], choices: vec![] };
        let err = apply_solution(&ast, &reg, &empty).unwrap_err();
        assert_eq!(err.name, "e_h1");
    }
}
