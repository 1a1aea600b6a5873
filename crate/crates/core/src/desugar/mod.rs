//! AST-to-AST rewrites that run before the class table is built.
//!
//! The pipeline order is fixed: [`specialize_class_generators`], then
//! [`assign_unknown_ids`] (the result is what decoding substitutes into),
//! then [`normalize`].

mod ids;
mod names;
mod normalize;
mod specialize;

use thiserror::Error;

use crate::span::SourceSpan;

pub use ids::{assign_unknown_ids, UnknownBounds};
pub use names::{mangle_inner, FlatNames};
pub use normalize::{normalize, CHAR_TOKENS_NAMES, CHAR_TOKEN_CLASS, CLINIT, OBJECT};
pub use specialize::{specialize_class_generators, Specialization, SpecializationMap};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DesugarError {
    #[error("{span}: generator class `{name}` can only be extended, not used directly")]
    DirectGeneratorUse { name: String, span: SourceSpan },
    #[error("{span}: generator class `{name}` extends another generator class")]
    NestedGenerator { name: String, span: SourceSpan },
    #[error("{span}: unsupported: {message}")]
    Unsupported { span: SourceSpan, message: String },
}

impl DesugarError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            DesugarError::DirectGeneratorUse { span, .. }
            | DesugarError::NestedGenerator { span, .. }
            | DesugarError::Unsupported { span, .. } => span,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::*;
    use crate::frontend::parse_sources;
    use crate::unknowns::UnknownRegistry;

    const AUTOMATON: &str = include_str!("../../sketches/automata/Automaton.java");
    const DB: &str = include_str!("../../sketches/automata/DBConnection.java");
    const CADSR: &str = include_str!("../../sketches/automata/CADsR.java");

    fn class_names(ast: &SketchAst) -> Vec<String> {
        ast.units.iter().flat_map(|u| u.types.iter().map(|t| t.name.clone())).collect()
    }

    fn find<'a>(ast: &'a SketchAst, name: &str) -> &'a TypeDecl {
        fn go<'a>(ds: &'a [TypeDecl], name: &str) -> Option<&'a TypeDecl> {
            for d in ds {
                if d.name == name {
                    return Some(d);
                }
                for m in &d.members {
                    if let Member::Type(t) = m {
                        if let Some(x) = go(std::slice::from_ref(t), name) {
                            return Some(x);
                        }
                    }
                }
            }
            None
        }
        ast.units.iter().find_map(|u| go(&u.types, name)).unwrap_or_else(|| panic!("no class {name}"))
    }

    fn registry(src: &[(&str, &str)]) -> UnknownRegistry {
        let ast = parse_sources(src).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        assign_unknown_ids(&spec, UnknownBounds::default()).1
    }

    #[test]
    fn automaton_specializes_per_extending_class() {
        let ast = parse_sources(&[("Automaton.java", AUTOMATON), ("DBConnection.java", DB), ("CADsR.java", CADSR)])
            .unwrap();
        let (out, map) = specialize_class_generators(&ast).unwrap();
        let fresh: Vec<_> = map.entries.iter().map(|e| (e.context.as_str(), e.fresh.as_str())).collect();
        assert_eq!(fresh, [("Monitor", "Automaton1"), ("CADsR", "Automaton2")]);
        assert_eq!(class_names(&out), ["Token", "Automaton1", "Automaton2", "DBConnection", "CADsR"]);
        assert_eq!(find(&out, "Monitor").extends.as_ref().unwrap().name, "Automaton1");
        assert!(!find(&out, "Automaton2").is_generator());
    }

    #[test]
    fn no_generators_is_identity() {
        let ast = parse_sources(&[("A.java", "class A { int f() { return ??; } }")]).unwrap();
        let (out, map) = specialize_class_generators(&ast).unwrap();
        assert_eq!(out, ast);
        assert!(map.is_empty());
    }

    #[test]
    fn copies_multiply_generator_unknowns() {
        // the generator alone holds g unknowns; the plain class holds 1
        let gen = "generator class G { int x = ??; int f(int a) { return {| a, ?? |}; } }";
        let plain = "class P { int y = ??; }";
        let count = |r: &UnknownRegistry| r.holes.len() + r.choices.len() + r.repeats.len();
        let g_alone = {
            let ast = parse_sources(&[("G.java", gen.replace("generator ", "").as_str())]).unwrap();
            count(&assign_unknown_ids(&ast, UnknownBounds::default()).1)
        };
        for k in 0..4 {
            let users: String = (0..k).map(|i| format!("class U{} extends G {{ }}\n", i)).collect();
            let r = registry(&[("G.java", gen), ("P.java", plain), ("U.java", users.as_str())]);
            assert_eq!(count(&r), k * g_alone + 1, "k = {k}");
        }
    }

    #[test]
    fn direct_generator_use_is_rejected() {
        let gen = "generator class G { }";
        for user in ["class U { G g; }", "class U { void f() { Object o = new G(); } }"] {
            let ast = parse_sources(&[("G.java", gen), ("U.java", user)]).unwrap();
            let err = specialize_class_generators(&ast).unwrap_err();
            assert!(matches!(err, DesugarError::DirectGeneratorUse { ref name, .. } if name == "G"), "{err}");
        }
        let nested = parse_sources(&[("G.java", "generator class G { } generator class H extends G { }")]).unwrap();
        assert!(matches!(specialize_class_generators(&nested), Err(DesugarError::NestedGenerator { .. })));
    }

    #[test]
    fn mult2_registry() {
        let r = registry(&[("SimpleMath.java", include_str!("../../sketches/mult2/SimpleMath.java"))]);
        assert_eq!(r.holes.len(), 1);
        assert_eq!(r.holes[0].id.name, "e_h1");
        assert_eq!(r.holes[0].id.owner, "SimpleMath");
        assert_eq!(r.choices.len(), 1);
        assert_eq!((r.choices[0].id.name.as_str(), r.choices[0].arity), ("e_c1", 2));
        assert!(r.repeats.is_empty());
    }

    #[test]
    fn empty_registry_without_unknowns() {
        assert!(registry(&[("A.java", "class A { int f() { return 1; } }")]).is_empty());
    }

    #[test]
    fn two_automata_registry_shape() {
        let r = registry(&[("Automaton.java", AUTOMATON), ("DBConnection.java", DB), ("CADsR.java", CADSR)]);
        // per copy: state, num_state, accept plus three per-iteration templates
        assert_eq!(r.holes.len(), 12);
        assert_eq!(r.holes.iter().filter(|h| h.repeat.is_some()).count(), 6);
        assert_eq!(r.repeats.len(), 2);
        let owners: Vec<_> = r.repeats.iter().map(|x| x.id.owner.as_str()).collect();
        assert_eq!(owners, ["Automaton1", "Automaton2"]);
        let names: Vec<_> = r.holes.iter().map(|h| h.id.name.as_str()).collect();
        assert_eq!(names[..6], ["e_h1", "e_h2", "e_h3", "e_h4", "e_h5", "e_h6"]);
    }

    #[test]
    fn holes_widen_to_literals() {
        let r = registry(&[("A.java", "class A { boolean f(int c) { return c == ??; } void g() { f('r'); } }")]);
        assert_eq!(r.holes[0].bits, 7);
        let r = registry(&[("A.java", "class A { boolean f(String s) { return s == \"cdr\"; } int g() { return ??; } }")]);
        assert_eq!(r.holes[0].bits, 7);
        let r = registry(&[("A.java", "class A { int g() { return ?? + 3; } }")]);
        assert_eq!(r.holes[0].bits, 5);
    }

    #[test]
    fn assignment_is_idempotent() {
        let ast = parse_sources(&[("Automaton.java", AUTOMATON), ("CADsR.java", CADSR)]).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        let (once, r1) = assign_unknown_ids(&spec, UnknownBounds::default());
        let (twice, r2) = assign_unknown_ids(&once, UnknownBounds::default());
        assert_eq!(once, twice);
        assert_eq!(r1, r2);
    }

    fn normalized(src: &[(&str, &str)]) -> SketchAst {
        let ast = parse_sources(src).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        let (ids, _) = assign_unknown_ids(&spec, UnknownBounds::default());
        normalize(&ids).unwrap()
    }

    fn ctor(decl: &TypeDecl) -> &CtorDecl {
        decl.members.iter().find_map(|m| if let Member::Ctor(c) = m { Some(c) } else { None }).unwrap()
    }

    #[test]
    fn instance_initializer_moves_into_constructor() {
        let out = normalized(&[("A.java", "class A { int x = ??; }")]);
        let a = &out.units[0].types[0];
        let Member::Field(f) = &a.members[0] else { panic!() };
        assert!(f.init.is_none());
        let c = ctor(a);
        assert_eq!(c.name, "A");
        assert!(matches!(c.body.stmts[0].kind, StmtKind::Expr(Expr { kind: ExprKind::SuperCall { .. }, .. })));
        let StmtKind::Expr(Expr { kind: ExprKind::Assign { target, value }, .. }) = &c.body.stmts[1].kind else {
            panic!()
        };
        assert!(matches!(&target.kind, ExprKind::Field { name, .. } if name == "x"));
        assert!(matches!(value.kind, ExprKind::Hole { id: Some(_) }));
        assert_eq!(a.extends.as_ref().unwrap().name, OBJECT);
    }

    #[test]
    fn generics_are_erased() {
        let out = normalized(&[("A.java", "interface Token {} class A { void f(Iterator<Token> it) { } }")]);
        let Member::Method(m) = &out.units[0].types[1].members[0] else { panic!() };
        assert_eq!(m.params[0].ty.name, "Iterator");
        assert!(m.params[0].ty.args.is_empty());
    }

    #[test]
    fn static_initializer_becomes_clinit() {
        let out = normalized(&[("A.java", "class A { static int n = 3; }")]);
        let a = &out.units[0].types[0];
        let clinit = a
            .members
            .iter()
            .find_map(|m| if let Member::Method(m) = m { (m.name == CLINIT).then_some(m) } else { None })
            .unwrap();
        assert!(clinit.modifiers.is_static());
        assert_eq!(clinit.body.as_ref().unwrap().stmts.len(), 1);
    }

    #[test]
    fn monitor_flattens_with_anonymous_tokens() {
        let out = normalized(&[("Automaton.java", AUTOMATON), ("DBConnection.java", DB)]);
        assert_eq!(
            class_names(&out),
            ["Token", "Automaton1", "DBConnection", "Monitor_DBConnection", "Token_1", "Token_2"]
        );
        let tok = find(&out, "Token_1");
        assert_eq!(tok.interfaces[0].name, "Token");
        let db = find(&out, "DBConnection");
        let Member::Field(m) = &db.members[0] else { panic!() };
        assert_eq!(m.ty.name, "Monitor_DBConnection");
        assert_eq!(find(&out, "Monitor_DBConnection").extends.as_ref().unwrap().name, "Automaton1");
    }

    #[test]
    fn char_tokens_adds_token_class() {
        let out = normalized(&[("Automaton.java", AUTOMATON), ("CADsR.java", CADSR)]);
        let ct = find(&out, CHAR_TOKEN_CLASS);
        assert_eq!(ct.interfaces[0].name, "Token");
    }

    #[test]
    fn owners_match_flattened_names() {
        let src = "class O { class I { int f() { return ??; } } Object t = new Object() { int g() { return ??; } }; }";
        let ast = parse_sources(&[("O.java", src)]).unwrap();
        let (ids, reg) = assign_unknown_ids(&ast, UnknownBounds::default());
        let owners: Vec<_> = reg.holes.iter().map(|h| h.id.owner.clone()).collect();
        let out = normalize(&ids).unwrap();
        assert_eq!(owners, ["I_O", "Object_1"]);
        assert_eq!(class_names(&out), ["O", "I_O", "Object_1"]);
    }

    #[test]
    fn outer_statics_are_qualified() {
        let src = "class O { static int k = 1; static int h() { return 2; } class I { int f() { return k + h(); } } }";
        let out = normalized(&[("O.java", src)]);
        let i = find(&out, "I_O");
        let Member::Method(f) = &i.members[0] else { panic!() };
        let StmtKind::Return(Some(e)) = &f.body.as_ref().unwrap().stmts[0].kind else { panic!() };
        let ExprKind::Binary { lhs, rhs, .. } = &e.kind else { panic!() };
        assert!(matches!(&lhs.kind, ExprKind::Field { target, .. } if matches!(&target.kind, ExprKind::Name(n) if n == "O")));
        assert!(matches!(&rhs.kind, ExprKind::Call { target: Some(_), .. }));
    }
}
