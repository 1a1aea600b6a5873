use std::collections::{HashMap, HashSet};

use crate::frontend::ast::*;
use crate::span::SourceSpan;

use super::DesugarError;

/// One instantiation of a generator class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub generator: String,
    /// The class whose `extends` clause was rewritten.
    pub context: String,
    pub fresh: String,
}

/// Specializations in creation order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecializationMap {
    pub entries: Vec<Specialization>,
}

impl SpecializationMap {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, generator: &str, context: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.generator == generator && e.context == context)
            .map(|e| e.fresh.as_str())
    }
}

fn collect_types<'a>(decls: &'a [TypeDecl], out: &mut Vec<&'a TypeDecl>) {
    for d in decls {
        out.push(d);
        for m in &d.members {
            if let Member::Type(t) = m {
                collect_types(std::slice::from_ref(t), out);
            }
        }
    }
}

/// Renames every reference to one type name.
struct Rename<'a> {
    from: &'a str,
    to: &'a str,
}

impl VisitMut for Rename<'_> {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        if decl.name == self.from {
            decl.name = self.to.to_string();
        }
        walk_type_decl(self, decl)
    }
    fn visit_member(&mut self, member: &mut Member) {
        if let Member::Ctor(c) = member {
            if c.name == self.from {
                c.name = self.to.to_string();
            }
        }
        walk_member(self, member)
    }
    fn visit_expr(&mut self, expr: &mut Expr) {
        if let ExprKind::Name(n) = &mut expr.kind {
            if n == self.from {
                *n = self.to.to_string();
            }
        }
        walk_expr(self, expr)
    }
    fn visit_type_ref(&mut self, ty: &mut TypeRef) {
        if ty.name == self.from {
            ty.name = self.to.to_string();
        }
        for a in &mut ty.args {
            self.visit_type_ref(a);
        }
    }
}

/// Clears unknown ids so the copy gets fresh ones.
struct ClearIds;

impl VisitMut for ClearIds {
    fn visit_stmt(&mut self, stmt: &mut Stmt) {
        if let StmtKind::MinRepeat { id, .. } = &mut stmt.kind {
            *id = None;
        }
        walk_stmt(self, stmt)
    }
    fn visit_expr(&mut self, expr: &mut Expr) {
        match &mut expr.kind {
            ExprKind::Hole { id } | ExprKind::Choice { id, .. } => *id = None,
            _ => {}
        }
        walk_expr(self, expr)
    }
}

/// Rewrites `extends G` clauses and records the copies to create.
struct Extenders<'a> {
    generators: &'a HashSet<String>,
    taken: HashSet<String>,
    counters: HashMap<String, u32>,
    map: SpecializationMap,
}

impl Extenders<'_> {
    fn fresh(&mut self, gen: &str) -> String {
        let k = self.counters.entry(gen.to_string()).or_insert(0);
        loop {
            *k += 1;
            let name = format!("{}{}", gen, k);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

impl VisitMut for Extenders<'_> {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        if decl.is_generator() {
            return;
        }
        if let Some(ext) = &mut decl.extends {
            if self.generators.contains(&ext.name) {
                let fresh = self.fresh(&ext.name);
                self.map.entries.push(Specialization {
                    generator: ext.name.clone(),
                    context: decl.name.clone(),
                    fresh: fresh.clone(),
                });
                ext.name = fresh;
                ext.args.clear();
            }
        }
        walk_type_decl(self, decl)
    }
}

/// Finds any remaining use of a generator name.
struct Uses<'a> {
    generators: &'a HashSet<String>,
    found: Option<(String, SourceSpan)>,
}

impl VisitMut for Uses<'_> {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        if decl.is_generator() {
            return;
        }
        walk_type_decl(self, decl)
    }
    fn visit_expr(&mut self, expr: &mut Expr) {
        if let ExprKind::Name(n) = &expr.kind {
            if self.generators.contains(n) && self.found.is_none() {
                self.found = Some((n.clone(), expr.span.clone()));
            }
        }
        walk_expr(self, expr)
    }
    fn visit_type_ref(&mut self, ty: &mut TypeRef) {
        if self.generators.contains(&ty.name) && self.found.is_none() {
            self.found = Some((ty.name.clone(), ty.span.clone()));
        }
        for a in &mut ty.args {
            self.visit_type_ref(a);
        }
    }
}

/// Replaces each generator declaration, wherever it sits, by its copies.
fn splice(decls: &mut Vec<TypeDecl>, copies: &HashMap<String, Vec<TypeDecl>>) {
    let old = std::mem::take(decls);
    for mut d in old {
        if d.is_generator() {
            if let Some(cs) = copies.get(&d.name) {
                decls.extend(cs.iter().cloned());
            }
            continue;
        }
        splice_members(&mut d.members, copies);
        decls.push(d);
    }
}

fn splice_members(members: &mut Vec<Member>, copies: &HashMap<String, Vec<TypeDecl>>) {
    let old = std::mem::take(members);
    for m in old {
        match m {
            Member::Type(mut t) => {
                if t.is_generator() {
                    if let Some(cs) = copies.get(&t.name) {
                        members.extend(cs.iter().cloned().map(Member::Type));
                    }
                    continue;
                }
                splice_members(&mut t.members, copies);
                members.push(Member::Type(t));
            }
            other => members.push(other),
        }
    }
}

/// Creates one copy of each generator class per extending class and drops
/// the generators themselves.
pub fn specialize_class_generators(ast: &SketchAst) -> Result<(SketchAst, SpecializationMap), DesugarError> {
    let mut all = Vec::new();
    for u in &ast.units {
        collect_types(&u.types, &mut all);
    }
    let generators: HashSet<String> = all.iter().filter(|d| d.is_generator()).map(|d| d.name.clone()).collect();
    if generators.is_empty() {
        return Ok((ast.clone(), SpecializationMap::default()));
    }
    for d in all.iter().filter(|d| d.is_generator()) {
        if let Some(ext) = &d.extends {
            if generators.contains(&ext.name) {
                return Err(DesugarError::NestedGenerator { name: d.name.clone(), span: d.span.clone() });
            }
        }
    }
    let templates: HashMap<String, TypeDecl> =
        all.iter().filter(|d| d.is_generator()).map(|d| (d.name.clone(), (*d).clone())).collect();
    let taken = all.iter().map(|d| d.name.clone()).collect();

    let mut out = ast.clone();
    let mut ext =
        Extenders { generators: &generators, taken, counters: HashMap::new(), map: SpecializationMap::default() };
    walk_ast(&mut ext, &mut out);
    let map = ext.map;

    let mut uses = Uses { generators: &generators, found: None };
    walk_ast(&mut uses, &mut out);
    if let Some((name, span)) = uses.found {
        return Err(DesugarError::DirectGeneratorUse { name, span });
    }

    let mut copies: HashMap<String, Vec<TypeDecl>> = HashMap::new();
    for e in &map.entries {
        let mut copy = templates[&e.generator].clone();
        copy.modifiers.remove(Modifier::Generator);
        Rename { from: &e.generator, to: &e.fresh }.visit_type_decl(&mut copy);
        ClearIds.visit_type_decl(&mut copy);
        copies.entry(e.generator.clone()).or_default().push(copy);
    }
    for u in &mut out.units {
        splice(&mut u.types, &copies);
    }
    Ok((out, map))
}
