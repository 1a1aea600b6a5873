use std::fmt;

use crate::span::SourceSpan;
use crate::unknowns::UnknownId;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SketchAst {
    pub units: Vec<CompilationUnit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationUnit {
    pub file: String,
    pub types: Vec<TypeDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modifier {
    Public,
    Private,
    Protected,
    Static,
    Final,
    Abstract,
    Harness,
    Generator,
}

impl Modifier {
    pub fn as_str(self) -> &'static str {
        match self {
            Modifier::Public => "public",
            Modifier::Private => "private",
            Modifier::Protected => "protected",
            Modifier::Static => "static",
            Modifier::Final => "final",
            Modifier::Abstract => "abstract",
            Modifier::Harness => "harness",
            Modifier::Generator => "generator",
        }
    }
}

/// Modifiers in source order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Modifiers(pub Vec<Modifier>);

impl Modifiers {
    pub fn has(&self, m: Modifier) -> bool {
        self.0.contains(&m)
    }

    pub fn insert(&mut self, m: Modifier) {
        if !self.has(m) {
            self.0.push(m);
        }
    }

    pub fn remove(&mut self, m: Modifier) {
        self.0.retain(|x| *x != m);
    }

    pub fn is_static(&self) -> bool {
        self.has(Modifier::Static)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub kind: TypeKind,
    pub modifiers: Modifiers,
    pub name: String,
    /// Superclass of a class. Always `None` for interfaces.
    pub extends: Option<TypeRef>,
    /// Implemented interfaces of a class, or extended interfaces of an interface.
    pub interfaces: Vec<TypeRef>,
    pub members: Vec<Member>,
    pub span: SourceSpan,
}

impl TypeDecl {
    pub fn is_interface(&self) -> bool {
        self.kind == TypeKind::Interface
    }

    pub fn is_generator(&self) -> bool {
        self.modifiers.has(Modifier::Generator)
    }
}

/// A type as written. Generic arguments are kept for printing only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeRef {
    pub name: String,
    pub args: Vec<TypeRef>,
    pub span: SourceSpan,
}

impl TypeRef {
    pub fn simple(name: impl Into<String>, span: SourceSpan) -> Self {
        TypeRef { name: name.into(), args: Vec::new(), span }
    }

    pub fn is_void(&self) -> bool {
        self.name == "void"
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("<")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", a)?;
            }
            f.write_str(">")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Ctor(CtorDecl),
    Type(TypeDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub modifiers: Modifiers,
    pub ret: TypeRef,
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for interface and abstract methods.
    pub body: Option<Block>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDecl {
    pub modifiers: Modifiers,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Block(Block),
    Local { ty: TypeRef, name: String, init: Option<Expr> },
    If { cond: Expr, then: Box<Stmt>, els: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    Return(Option<Expr>),
    Expr(Expr),
    Assert(Expr),
    MinRepeat { id: Option<UnknownId>, body: Block },
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Str(String),
    Char(char),
    Null,
    This,
    /// Only valid as the target of a call: `super.m(..)`.
    Super,
    Name(String),
    Field { target: Box<Expr>, name: String },
    Call { target: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    /// `super(..)` inside a constructor.
    SuperCall { args: Vec<Expr> },
    /// Object creation; `body` holds the members of an anonymous class.
    New { ty: TypeRef, args: Vec<Expr>, body: Option<Vec<Member>> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, operand: Box<Expr> },
    Assign { target: Box<Expr>, value: Box<Expr> },
    Hole { id: Option<UnknownId> },
    Choice { id: Option<UnknownId>, alts: Vec<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr { kind, span }
    }
}

impl Stmt {
    pub fn new(kind: StmtKind, span: SourceSpan) -> Self {
        Stmt { kind, span }
    }
}

/// Mutable pre-order traversal. Override a method and call the matching
/// `walk_*` function to keep descending.
pub trait VisitMut {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        walk_type_decl(self, decl)
    }
    fn visit_member(&mut self, member: &mut Member) {
        walk_member(self, member)
    }
    fn visit_block(&mut self, block: &mut Block) {
        walk_block(self, block)
    }
    fn visit_stmt(&mut self, stmt: &mut Stmt) {
        walk_stmt(self, stmt)
    }
    fn visit_expr(&mut self, expr: &mut Expr) {
        walk_expr(self, expr)
    }
    fn visit_type_ref(&mut self, _ty: &mut TypeRef) {}
}

pub fn walk_ast<V: VisitMut + ?Sized>(v: &mut V, ast: &mut SketchAst) {
    for unit in &mut ast.units {
        for decl in &mut unit.types {
            v.visit_type_decl(decl);
        }
    }
}

pub fn walk_type_decl<V: VisitMut + ?Sized>(v: &mut V, decl: &mut TypeDecl) {
    if let Some(ext) = &mut decl.extends {
        v.visit_type_ref(ext);
    }
    for i in &mut decl.interfaces {
        v.visit_type_ref(i);
    }
    for m in &mut decl.members {
        v.visit_member(m);
    }
}

pub fn walk_member<V: VisitMut + ?Sized>(v: &mut V, member: &mut Member) {
    match member {
        Member::Field(f) => {
            v.visit_type_ref(&mut f.ty);
            if let Some(init) = &mut f.init {
                v.visit_expr(init);
            }
        }
        Member::Method(m) => {
            v.visit_type_ref(&mut m.ret);
            for p in &mut m.params {
                v.visit_type_ref(&mut p.ty);
            }
            if let Some(body) = &mut m.body {
                v.visit_block(body);
            }
        }
        Member::Ctor(c) => {
            for p in &mut c.params {
                v.visit_type_ref(&mut p.ty);
            }
            v.visit_block(&mut c.body);
        }
        Member::Type(t) => v.visit_type_decl(t),
    }
}

pub fn walk_block<V: VisitMut + ?Sized>(v: &mut V, block: &mut Block) {
    for s in &mut block.stmts {
        v.visit_stmt(s);
    }
}

pub fn walk_stmt<V: VisitMut + ?Sized>(v: &mut V, stmt: &mut Stmt) {
    match &mut stmt.kind {
        StmtKind::Block(b) => v.visit_block(b),
        StmtKind::Local { ty, init, .. } => {
            v.visit_type_ref(ty);
            if let Some(e) = init {
                v.visit_expr(e);
            }
        }
        StmtKind::If { cond, then, els } => {
            v.visit_expr(cond);
            v.visit_stmt(then);
            if let Some(e) = els {
                v.visit_stmt(e);
            }
        }
        StmtKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_stmt(body);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                v.visit_expr(e);
            }
        }
        StmtKind::Expr(e) | StmtKind::Assert(e) => v.visit_expr(e),
        StmtKind::MinRepeat { body, .. } => v.visit_block(body),
        StmtKind::Empty => {}
    }
}

pub fn walk_expr<V: VisitMut + ?Sized>(v: &mut V, expr: &mut Expr) {
    match &mut expr.kind {
        ExprKind::Int(_)
        | ExprKind::Bool(_)
        | ExprKind::Str(_)
        | ExprKind::Char(_)
        | ExprKind::Null
        | ExprKind::This
        | ExprKind::Super
        | ExprKind::Name(_)
        | ExprKind::Hole { .. } => {}
        ExprKind::Field { target, .. } => v.visit_expr(target),
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                v.visit_expr(t);
            }
            for a in args {
                v.visit_expr(a);
            }
        }
        ExprKind::SuperCall { args } => {
            for a in args {
                v.visit_expr(a);
            }
        }
        ExprKind::New { ty, args, body } => {
            v.visit_type_ref(ty);
            for a in args {
                v.visit_expr(a);
            }
            if let Some(members) = body {
                for m in members {
                    v.visit_member(m);
                }
            }
        }
        ExprKind::Binary { lhs, rhs, .. } => {
            v.visit_expr(lhs);
            v.visit_expr(rhs);
        }
        ExprKind::Unary { operand, .. } => v.visit_expr(operand),
        ExprKind::Assign { target, value } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
        ExprKind::Choice { alts, .. } => {
            for a in alts {
                v.visit_expr(a);
            }
        }
    }
}
