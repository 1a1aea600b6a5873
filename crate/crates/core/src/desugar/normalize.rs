use std::collections::{HashMap, HashSet};

use crate::frontend::ast::*;
use crate::span::SourceSpan;

use super::names::FlatNames;
use super::DesugarError;

/// Names of the free function that turns a string into a token iterator.
pub const CHAR_TOKENS_NAMES: [&str; 2] = ["convertToIterator", "char_tokens"];
/// Class of the tokens produced by the char-token iterator.
pub const CHAR_TOKEN_CLASS: &str = "CharToken";
/// Synthetic static method holding static field initializers.
pub const CLINIT: &str = "__clinit";
/// Implicit root of every class hierarchy.
pub const OBJECT: &str = "Object";

struct FlatClass {
    decl: TypeDecl,
    unit: usize,
    /// Enclosing classes, innermost first.
    outer: Vec<String>,
    /// Base type of an anonymous class, as written.
    anon_base: Option<TypeRef>,
    /// Name as declared, for inner classes.
    simple: Option<String>,
}

/// Pulls nested and anonymous classes out into a flat list in pre-order.
struct Flatten {
    names: FlatNames,
    scope: Vec<String>,
    unit: usize,
    out: Vec<Option<FlatClass>>,
    error: Option<DesugarError>,
}

impl Flatten {
    fn outer(&self) -> Vec<String> {
        self.scope.iter().rev().cloned().collect()
    }
}

impl VisitMut for Flatten {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        let flat = match self.scope.last() {
            None => decl.name.clone(),
            Some(o) => {
                let o = o.clone();
                self.names.inner(&decl.name, &o)
            }
        };
        let slot = self.out.len();
        self.out.push(None);
        let outer = self.outer();
        self.scope.push(flat.clone());
        walk_type_decl(self, decl);
        self.scope.pop();
        let mut copy = decl.clone();
        // constructors keep their class's new name
        for m in &mut copy.members {
            if let Member::Ctor(c) = m {
                if c.name == decl.name {
                    c.name = flat.clone();
                }
            }
        }
        copy.name = flat;
        copy.members.retain(|m| !matches!(m, Member::Type(_)));
        let simple = (!outer.is_empty()).then(|| decl.name.clone());
        self.out[slot] = Some(FlatClass { decl: copy, unit: self.unit, outer, anon_base: None, simple });
    }

    fn visit_expr(&mut self, expr: &mut Expr) {
        if let ExprKind::New { ty, args, body } = &mut expr.kind {
            if let Some(members) = body {
                let flat = self.names.anon(&ty.name);
                if !args.is_empty() && self.error.is_none() {
                    self.error = Some(DesugarError::Unsupported {
                        span: expr.span.clone(),
                        message: "anonymous class creation with constructor arguments".into(),
                    });
                }
                let slot = self.out.len();
                self.out.push(None);
                let outer = self.outer();
                for a in args.iter_mut() {
                    self.visit_expr(a);
                }
                self.scope.push(flat.clone());
                for m in members.iter_mut() {
                    self.visit_member(m);
                }
                self.scope.pop();
                let members: Vec<Member> =
                    body.take().unwrap().into_iter().filter(|m| !matches!(m, Member::Type(_))).collect();
                let decl = TypeDecl {
                    kind: TypeKind::Class,
                    modifiers: Modifiers::default(),
                    name: flat.clone(),
                    extends: None,
                    interfaces: Vec::new(),
                    members,
                    span: expr.span.clone(),
                };
                self.out[slot] = Some(FlatClass { decl, unit: self.unit, outer, anon_base: Some(ty.clone()), simple: None });
                *ty = TypeRef::simple(flat, ty.span.clone());
                return;
            }
        }
        walk_expr(self, expr)
    }
}

#[derive(Default)]
struct MemberIndex {
    /// Field name to whether it is static.
    fields: HashMap<String, bool>,
    /// Method name to whether every overload is static.
    methods: HashMap<String, bool>,
    superclass: Option<String>,
}

struct World {
    top: HashSet<String>,
    flat: HashSet<String>,
    interfaces: HashSet<String>,
    /// Flat class name to its directly nested types (simple name to flat name).
    nested: HashMap<String, HashMap<String, String>>,
    members: HashMap<String, MemberIndex>,
}

impl World {
    /// Resolves a simple type name as seen from `chain` (self, then outers).
    fn resolve(&self, name: &str, chain: &[String]) -> Option<String> {
        for c in chain {
            if let Some(f) = self.nested.get(c).and_then(|m| m.get(name)) {
                return Some(f.clone());
            }
        }
        if self.top.contains(name) || self.flat.contains(name) {
            return Some(name.to_string());
        }
        None
    }

    fn find_field(&self, class: &str, name: &str) -> Option<bool> {
        let mut cur = Some(class.to_string());
        let mut seen = HashSet::new();
        while let Some(c) = cur {
            if !seen.insert(c.clone()) {
                break;
            }
            let idx = self.members.get(&c)?;
            if let Some(s) = idx.fields.get(name) {
                return Some(*s);
            }
            cur = idx.superclass.clone();
        }
        None
    }

    fn find_method(&self, class: &str, name: &str) -> Option<bool> {
        let mut cur = Some(class.to_string());
        let mut seen = HashSet::new();
        while let Some(c) = cur {
            if !seen.insert(c.clone()) {
                break;
            }
            let idx = self.members.get(&c)?;
            if let Some(s) = idx.methods.get(name) {
                return Some(*s);
            }
            cur = idx.superclass.clone();
        }
        None
    }
}

/// Resolves names inside one class's bodies.
struct Resolver<'a> {
    world: &'a World,
    /// Self, then enclosing classes.
    chain: Vec<String>,
    locals: Vec<Vec<String>>,
    uses_char_tokens: bool,
    error: Option<DesugarError>,
}

impl Resolver<'_> {
    fn is_local(&self, n: &str) -> bool {
        self.locals.iter().any(|s| s.iter().any(|x| x == n))
    }

    fn fail(&mut self, span: &SourceSpan, message: String) {
        if self.error.is_none() {
            self.error = Some(DesugarError::Unsupported { span: span.clone(), message });
        }
    }

    fn resolve_ty(&self, ty: &mut TypeRef) {
        if let Some(f) = self.world.resolve(&ty.name, &self.chain) {
            ty.name = f;
        }
        ty.args.clear();
    }

    fn block(&mut self, b: &mut Block) {
        self.locals.push(Vec::new());
        for s in &mut b.stmts {
            self.stmt(s);
        }
        self.locals.pop();
    }

    fn nested_stmt(&mut self, s: &mut Stmt) {
        self.locals.push(Vec::new());
        self.stmt(s);
        self.locals.pop();
    }

    fn stmt(&mut self, s: &mut Stmt) {
        match &mut s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::Local { ty, name, init } => {
                self.resolve_ty(ty);
                if let Some(e) = init {
                    self.expr(e);
                }
                self.locals.last_mut().unwrap().push(name.clone());
            }
            StmtKind::If { cond, then, els } => {
                self.expr(cond);
                self.nested_stmt(then);
                if let Some(e) = els {
                    self.nested_stmt(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.nested_stmt(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Expr(e) | StmtKind::Assert(e) => self.expr(e),
            StmtKind::MinRepeat { body, .. } => self.block(body),
            StmtKind::Empty => {}
        }
    }

    fn expr(&mut self, e: &mut Expr) {
        let span = e.span.clone();
        match &mut e.kind {
            ExprKind::Name(n) => {
                if self.is_local(n) || self.world.find_field(&self.chain[0], n).is_some() {
                    return;
                }
                for outer in self.chain[1..].to_vec() {
                    match self.world.find_field(&outer, n) {
                        Some(true) => {
                            let target = Expr::new(ExprKind::Name(outer), span.clone());
                            e.kind = ExprKind::Field { target: Box::new(target), name: n.clone() };
                            return;
                        }
                        Some(false) => {
                            let msg = format!("`{}` is an instance field of enclosing class `{}`", n, outer);
                            self.fail(&span, msg);
                            return;
                        }
                        None => {}
                    }
                }
                if let Some(f) = self.world.resolve(n, &self.chain) {
                    *n = f;
                }
            }
            ExprKind::Field { target, .. } => self.expr(target),
            ExprKind::Call { target, name, args } => {
                match target {
                    Some(t) => self.expr(t),
                    None => {
                        if self.world.find_method(&self.chain[0], name).is_none() {
                            let mut found = false;
                            for outer in self.chain[1..].to_vec() {
                                match self.world.find_method(&outer, name) {
                                    Some(true) => {
                                        *target = Some(Box::new(Expr::new(ExprKind::Name(outer), span.clone())));
                                        found = true;
                                        break;
                                    }
                                    Some(false) => {
                                        let msg = format!("`{}` is an instance method of enclosing class `{}`", name, outer);
                                        self.fail(&span, msg);
                                        found = true;
                                        break;
                                    }
                                    None => {}
                                }
                            }
                            if !found && CHAR_TOKENS_NAMES.contains(&name.as_str()) {
                                self.uses_char_tokens = true;
                            }
                        }
                    }
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::SuperCall { args } => {
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::New { ty, args, .. } => {
                self.resolve_ty(ty);
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::Assign { target, value } => {
                self.expr(target);
                self.expr(value);
            }
            ExprKind::Choice { alts, .. } => {
                for a in alts {
                    self.expr(a);
                }
            }
            ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Str(_)
            | ExprKind::Char(_)
            | ExprKind::Null
            | ExprKind::This
            | ExprKind::Super
            | ExprKind::Hole { .. } => {}
        }
    }

    fn member(&mut self, m: &mut Member) {
        match m {
            Member::Field(f) => {
                self.resolve_ty(&mut f.ty);
                if let Some(e) = &mut f.init {
                    self.expr(e);
                }
            }
            Member::Method(md) => {
                self.resolve_ty(&mut md.ret);
                for p in &mut md.params {
                    self.resolve_ty(&mut p.ty);
                }
                self.locals.push(md.params.iter().map(|p| p.name.clone()).collect());
                if let Some(b) = &mut md.body {
                    self.block(b);
                }
                self.locals.pop();
            }
            Member::Ctor(c) => {
                for p in &mut c.params {
                    self.resolve_ty(&mut p.ty);
                }
                self.locals.push(c.params.iter().map(|p| p.name.clone()).collect());
                self.block(&mut c.body);
                self.locals.pop();
            }
            Member::Type(_) => {}
        }
    }
}

fn synth_expr(kind: ExprKind) -> Expr {
    Expr::new(kind, SourceSpan::synthetic())
}

fn synth_stmt(kind: StmtKind) -> Stmt {
    Stmt::new(kind, SourceSpan::synthetic())
}

fn is_super_call(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::Expr(e) if matches!(e.kind, ExprKind::SuperCall { .. }))
}

/// Hoists field initializers, adds default constructors, explicit `super()`
/// calls, the implicit root and the static initializer method.
fn complete_class(decl: &mut TypeDecl) {
    if decl.is_interface() {
        return;
    }
    if decl.extends.is_none() {
        decl.extends = Some(TypeRef::simple(OBJECT, SourceSpan::synthetic()));
    }
    let mut inits = Vec::new();
    let mut statics = Vec::new();
    for m in &mut decl.members {
        if let Member::Field(f) = m {
            if let Some(init) = f.init.take() {
                let span = f.span.clone();
                if f.modifiers.is_static() {
                    let target = Expr::new(ExprKind::Name(f.name.clone()), span.clone());
                    let assign = ExprKind::Assign { target: Box::new(target), value: Box::new(init) };
                    statics.push(Stmt::new(StmtKind::Expr(Expr::new(assign, span.clone())), span));
                } else {
                    let this = Expr::new(ExprKind::This, span.clone());
                    let target =
                        Expr::new(ExprKind::Field { target: Box::new(this), name: f.name.clone() }, span.clone());
                    let assign = ExprKind::Assign { target: Box::new(target), value: Box::new(init) };
                    inits.push(Stmt::new(StmtKind::Expr(Expr::new(assign, span.clone())), span));
                }
            }
        }
    }
    if !decl.members.iter().any(|m| matches!(m, Member::Ctor(_))) {
        decl.members.push(Member::Ctor(CtorDecl {
            modifiers: Modifiers::default(),
            name: decl.name.clone(),
            params: Vec::new(),
            body: Block { stmts: Vec::new(), span: SourceSpan::synthetic() },
            span: SourceSpan::synthetic(),
        }));
    }
    for m in &mut decl.members {
        if let Member::Ctor(c) = m {
            if !c.body.stmts.first().is_some_and(is_super_call) {
                let call = synth_expr(ExprKind::SuperCall { args: Vec::new() });
                c.body.stmts.insert(0, synth_stmt(StmtKind::Expr(call)));
            }
            for (i, s) in inits.iter().enumerate() {
                c.body.stmts.insert(1 + i, s.clone());
            }
        }
    }
    if !statics.is_empty() {
        decl.members.push(Member::Method(MethodDecl {
            modifiers: Modifiers(vec![Modifier::Static]),
            ret: TypeRef::simple("void", SourceSpan::synthetic()),
            name: CLINIT.to_string(),
            params: Vec::new(),
            body: Some(Block { stmts: statics, span: SourceSpan::synthetic() }),
            span: SourceSpan::synthetic(),
        }));
    }
}

fn char_token_class(implements_token: bool) -> TypeDecl {
    let span = SourceSpan::synthetic();
    let id_read = synth_expr(ExprKind::Name("id".into()));
    TypeDecl {
        kind: TypeKind::Class,
        modifiers: Modifiers::default(),
        name: CHAR_TOKEN_CLASS.into(),
        extends: None,
        interfaces: if implements_token { vec![TypeRef::simple("Token", span.clone())] } else { Vec::new() },
        members: vec![
            Member::Field(FieldDecl {
                modifiers: Modifiers::default(),
                ty: TypeRef::simple("int", span.clone()),
                name: "id".into(),
                init: None,
                span: span.clone(),
            }),
            Member::Method(MethodDecl {
                modifiers: Modifiers(vec![Modifier::Public]),
                ret: TypeRef::simple("int", span.clone()),
                name: "getId".into(),
                params: Vec::new(),
                body: Some(Block { stmts: vec![synth_stmt(StmtKind::Return(Some(id_read)))], span: span.clone() }),
                span: span.clone(),
            }),
        ],
        span,
    }
}

/// Flattens the program into top-level classes and rewrites it into the
/// core form used by the class table and lowering.
///
/// Inner classes become `Inner_Outer`, anonymous classes `Base_<n>`; type
/// names are resolved to flattened names and generic arguments erased;
/// names of enclosing-class statics are qualified; instance field
/// initializers move into every constructor after the `super` call and
/// static ones into a static `__clinit` method.
pub fn normalize(ast: &SketchAst) -> Result<SketchAst, DesugarError> {
    let mut work = ast.clone();
    let mut flatten = Flatten { names: FlatNames::new(ast), scope: Vec::new(), unit: 0, out: Vec::new(), error: None };
    for (i, unit) in work.units.iter_mut().enumerate() {
        flatten.unit = i;
        for d in &mut unit.types {
            flatten.visit_type_decl(d);
        }
    }
    if let Some(e) = flatten.error {
        return Err(e);
    }
    let mut classes: Vec<FlatClass> = flatten.out.into_iter().map(|c| c.expect("class slot filled")).collect();

    let mut world = World {
        top: ast.units.iter().flat_map(|u| u.types.iter().map(|t| t.name.clone())).collect(),
        flat: classes.iter().map(|c| c.decl.name.clone()).collect(),
        interfaces: classes.iter().filter(|c| c.decl.is_interface()).map(|c| c.decl.name.clone()).collect(),
        nested: HashMap::new(),
        members: HashMap::new(),
    };
    for c in &classes {
        if let (Some(simple), Some(o)) = (&c.simple, c.outer.first()) {
            world.nested.entry(o.clone()).or_default().insert(simple.clone(), c.decl.name.clone());
        }
    }

    // resolve anonymous bases and supertypes
    for c in &mut classes {
        let mut chain = vec![c.decl.name.clone()];
        chain.extend(c.outer.iter().cloned());
        if let Some(base) = &c.anon_base {
            let resolved = world.resolve(&base.name, &c.outer).unwrap_or_else(|| base.name.clone());
            let ty = TypeRef::simple(resolved.clone(), base.span.clone());
            if world.interfaces.contains(&resolved) {
                c.decl.interfaces.push(ty);
            } else {
                c.decl.extends = Some(ty);
            }
        } else {
            // supertypes resolve from the enclosing scope of the declaration
            if let Some(ext) = &mut c.decl.extends {
                if let Some(f) = world.resolve(&ext.name, &chain) {
                    ext.name = f;
                }
                ext.args.clear();
            }
            for i in &mut c.decl.interfaces {
                if let Some(f) = world.resolve(&i.name, &chain) {
                    i.name = f;
                }
                i.args.clear();
            }
        }
    }
    for c in &classes {
        let mut idx = MemberIndex { superclass: c.decl.extends.as_ref().map(|e| e.name.clone()), ..Default::default() };
        for m in &c.decl.members {
            match m {
                Member::Field(f) => {
                    idx.fields.insert(f.name.clone(), f.modifiers.is_static() || c.decl.is_interface());
                }
                Member::Method(md) => {
                    let e = idx.methods.entry(md.name.clone()).or_insert(true);
                    *e = *e && md.modifiers.is_static();
                }
                _ => {}
            }
        }
        world.members.insert(c.decl.name.clone(), idx);
    }

    let mut char_token_unit = None;
    for c in &mut classes {
        let mut chain = vec![c.decl.name.clone()];
        chain.extend(c.outer.iter().cloned());
        let mut r = Resolver { world: &world, chain, locals: Vec::new(), uses_char_tokens: false, error: None };
        for m in &mut c.decl.members {
            r.member(m);
        }
        if let Some(e) = r.error {
            return Err(e);
        }
        if r.uses_char_tokens && char_token_unit.is_none() {
            char_token_unit = Some(c.unit);
        }
        if c.decl.is_interface() {
            for m in &mut c.decl.members {
                if let Member::Field(f) = m {
                    f.modifiers.insert(Modifier::Static);
                }
            }
        }
        complete_class(&mut c.decl);
    }

    let mut out = SketchAst {
        units: ast.units.iter().map(|u| CompilationUnit { file: u.file.clone(), types: Vec::new() }).collect(),
    };
    for c in classes {
        out.units[c.unit].types.push(c.decl);
    }
    if let Some(unit) = char_token_unit {
        if world.flat.contains(CHAR_TOKEN_CLASS) {
            return Err(DesugarError::Unsupported {
                span: SourceSpan::synthetic(),
                message: format!("class name `{}` is reserved for the char-token builtin", CHAR_TOKEN_CLASS),
            });
        }
        let token = world.interfaces.contains("Token");
        let mut decl = char_token_class(token);
        complete_class(&mut decl);
        out.units[unit].types.push(decl);
    }
    Ok(out)
}
