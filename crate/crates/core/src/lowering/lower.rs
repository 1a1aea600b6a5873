use std::sync::Arc;

use indexmap::IndexMap;

use crate::classtable::{ClassId, ClassTable, MethodInfo, Signature, TypeTag};
use crate::desugar::{CHAR_TOKEN_CLASS, CLINIT};
use crate::frontend::ast::*;
use crate::span::SourceSpan;
use crate::stdlib::{self, AppendKind, Builtin, ParamKind, Receiver};
use crate::unknowns::UnknownRegistry;

use super::ir::*;
use super::LoweringError;

/// `from` may be stored where `to` is expected.
pub fn assignable(table: &ClassTable, from: TypeTag, to: TypeTag) -> bool {
    use TypeTag::*;
    if from == to || (from.is_numeric() && to.is_numeric()) {
        return true;
    }
    match (from, to) {
        (Null, t) | (AnyObj, t) => t.is_ref(),
        (f, AnyObj) => f.is_ref(),
        (Obj(a), Obj(b)) => table.is_subclass(a, b),
        _ => false,
    }
}

/// Dispatch function for `sig`: one arm per implementing class, ascending id.
/// Method ids double as function ids.
pub fn make_dyn_dispatch(table: &ClassTable, sig: &Signature, ret: TypeTag) -> IrFunction {
    let mut locals = vec![("self".to_string(), TypeTag::AnyObj)];
    for (i, p) in sig.params.iter().enumerate() {
        locals.push((format!("a{}", i), *p));
    }
    let args: Vec<IrExpr> = (0..locals.len()).map(IrExpr::Local).collect();
    let mut body = Vec::new();
    for (class, method) in table.implementers(sig) {
        let call = IrExpr::Call { func: method, args: args.clone() };
        let then = if ret == TypeTag::Void {
            vec![IrInstr::Eval(call), IrInstr::Return(None)]
        } else {
            vec![IrInstr::Return(Some(call))]
        };
        let cond = IrExpr::Binary {
            op: IrBinOp::Eq(EqKind::Int),
            lhs: Box::new(IrExpr::ClassIdOf(Box::new(IrExpr::Local(0)))),
            rhs: Box::new(IrExpr::Const(Const::Int(class as i64))),
        };
        body.push(IrInstr::If { cond, then, els: Vec::new() });
    }
    body.push(IrInstr::Trap(format!("no implementation of `{}`", sig.name)));
    IrFunction {
        name: table.dispatch_name(sig),
        kind: FuncKind::Dispatch,
        params: locals.len(),
        locals,
        ret,
        body,
    }
}

type Lowered = (IrExpr, TypeTag);

struct FnCtx {
    class: ClassId,
    is_static: bool,
    is_ctor: bool,
    harness: Option<usize>,
    ret: TypeTag,
    locals: Vec<(String, TypeTag)>,
    scopes: Vec<Vec<(String, LocalId)>>,
    repeat: Option<usize>,
}

impl FnCtx {
    fn lookup(&self, name: &str) -> Option<LocalId> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).find(|(n, _)| n == name).map(|(_, id)| *id)
    }

    fn declare(&mut self, name: &str, ty: TypeTag) -> LocalId {
        let id = self.locals.len();
        self.locals.push((name.to_string(), ty));
        self.scopes.last_mut().expect("scope").push((name.to_string(), id));
        id
    }
}

struct Lowerer<'a> {
    table: &'a ClassTable,
    ast: &'a SketchAst,
    registry: UnknownRegistry,
    functions: Vec<IrFunction>,
    /// Dispatch functions; their ids follow the method ids.
    dispatchers: Vec<IrFunction>,
    dispatch: IndexMap<Signature, FuncId>,
    harnesses: Vec<Harness>,
    objectives: Vec<Objective>,
}

fn err(span: &SourceSpan, message: impl Into<String>) -> LoweringError {
    LoweringError::Type { span: span.clone(), message: message.into() }
}

impl<'a> Lowerer<'a> {
    fn name(&self, t: TypeTag) -> String {
        self.table.tag_name(t)
    }

    fn ty(&self, t: &TypeRef) -> Result<TypeTag, LoweringError> {
        Ok(self.table.resolve_type(t)?)
    }

    fn check(&self, got: TypeTag, want: TypeTag, span: &SourceSpan) -> Result<(), LoweringError> {
        if assignable(self.table, got, want) {
            Ok(())
        } else {
            Err(err(span, format!("expected {}, found {}", self.name(want), self.name(got))))
        }
    }

    fn decl(&self, class: ClassId) -> &'a TypeDecl {
        let (u, i) = self.table.class(class).decl;
        &self.ast.units[u].types[i]
    }

    fn dispatch_fn(&mut self, sig: &Signature, ret: TypeTag) -> FuncId {
        if let Some(f) = self.dispatch.get(sig) {
            return *f;
        }
        let id = self.table.methods.len() + self.dispatchers.len();
        self.dispatchers.push(make_dyn_dispatch(self.table, sig, ret));
        self.dispatch.insert(sig.clone(), id);
        id
    }

    fn lower_method(&mut self, m: &MethodInfo) -> Result<IrFunction, LoweringError> {
        let decl = self.decl(m.class);
        let (params, body) = match &decl.members[m.member] {
            Member::Method(md) => (&md.params, md.body.as_ref()),
            Member::Ctor(c) => (&c.params, Some(&c.body)),
            _ => unreachable!("method id points at a non-method member"),
        };
        let harness = if m.is_harness {
            if !m.is_static || m.ret != TypeTag::Void || !m.params.is_empty() {
                return Err(LoweringError::Harness {
                    span: m.span.clone(),
                    message: format!("harness `{}` must be static, void and parameterless", m.name),
                });
            }
            self.harnesses.push(Harness {
                name: m.mangled.clone(),
                func: m.id,
                class: self.table.class(m.class).name.clone(),
                method: m.name.clone(),
                objectives: Vec::new(),
            });
            Some(self.harnesses.len() - 1)
        } else {
            None
        };
        let mut ctx = FnCtx {
            class: m.class,
            is_static: m.is_static,
            is_ctor: m.is_ctor,
            harness,
            ret: m.ret,
            locals: Vec::new(),
            scopes: vec![Vec::new()],
            repeat: None,
        };
        if !m.is_static {
            ctx.declare("this", TypeTag::Obj(m.class));
        }
        for (p, ty) in params.iter().zip(&m.params) {
            ctx.declare(&p.name, *ty);
        }
        let nparams = ctx.locals.len();
        let mut out = Vec::new();
        match body {
            Some(b) => self.block(&mut ctx, b, &mut out)?,
            None => out.push(IrInstr::Trap(format!("abstract method `{}` called", m.name))),
        }
        let kind = if m.is_ctor {
            out.push(IrInstr::Return(Some(IrExpr::Local(0))));
            FuncKind::Ctor
        } else {
            FuncKind::Method
        };
        Ok(IrFunction { name: m.mangled.clone(), kind, params: nparams, locals: ctx.locals, ret: m.ret, body: out })
    }

    fn block(&mut self, ctx: &mut FnCtx, b: &Block, out: &mut Vec<IrInstr>) -> Result<(), LoweringError> {
        ctx.scopes.push(Vec::new());
        let r = b.stmts.iter().try_for_each(|s| self.stmt(ctx, s, out));
        ctx.scopes.pop();
        r
    }

    fn scoped(&mut self, ctx: &mut FnCtx, s: &Stmt) -> Result<Vec<IrInstr>, LoweringError> {
        let mut out = Vec::new();
        ctx.scopes.push(Vec::new());
        let r = self.stmt(ctx, s, &mut out);
        ctx.scopes.pop();
        r.map(|_| out)
    }

    fn cond(&mut self, ctx: &mut FnCtx, e: &Expr) -> Result<IrExpr, LoweringError> {
        let (c, t) = self.expr(ctx, e, Some(TypeTag::Bool))?;
        self.check(t, TypeTag::Bool, &e.span)?;
        Ok(c)
    }

    fn stmt(&mut self, ctx: &mut FnCtx, s: &Stmt, out: &mut Vec<IrInstr>) -> Result<(), LoweringError> {
        match &s.kind {
            StmtKind::Block(b) => self.block(ctx, b, out)?,
            StmtKind::Local { ty, name, init } => {
                let t = self.ty(ty)?;
                let value = match init {
                    Some(e) => {
                        let (v, vt) = self.expr(ctx, e, Some(t))?;
                        self.check(vt, t, &e.span)?;
                        v
                    }
                    None => IrExpr::Const(Const::default_for(t)),
                };
                let id = ctx.declare(name, t);
                out.push(IrInstr::Assign { target: LValue::Local(id), value });
            }
            StmtKind::If { cond, then, els } => {
                let cond = self.cond(ctx, cond)?;
                let then = self.scoped(ctx, then)?;
                let els = match els {
                    Some(e) => self.scoped(ctx, e)?,
                    None => Vec::new(),
                };
                out.push(IrInstr::If { cond, then, els });
            }
            StmtKind::While { cond, body } => {
                let cond = self.cond(ctx, cond)?;
                let body = self.scoped(ctx, body)?;
                out.push(IrInstr::While { cond, body });
            }
            StmtKind::Return(e) => {
                if ctx.is_ctor {
                    if e.is_some() {
                        return Err(err(&s.span, "constructor cannot return a value"));
                    }
                    out.push(IrInstr::Return(Some(IrExpr::Local(0))));
                } else {
                    match (e, ctx.ret) {
                        (None, TypeTag::Void) => out.push(IrInstr::Return(None)),
                        (None, _) => return Err(err(&s.span, "missing return value")),
                        (Some(e), TypeTag::Void) => return Err(err(&e.span, "void method returns a value")),
                        (Some(e), ret) => {
                            let (v, t) = self.expr(ctx, e, Some(ret))?;
                            self.check(t, ret, &e.span)?;
                            out.push(IrInstr::Return(Some(v)));
                        }
                    }
                }
            }
            StmtKind::Assert(e) => {
                let cond = self.cond(ctx, e)?;
                out.push(IrInstr::Assert { cond, span: s.span.clone() });
            }
            StmtKind::MinRepeat { id, body } => {
                let id = id.as_ref().ok_or_else(|| err(&s.span, "minrepeat without an id"))?;
                if ctx.repeat.is_some() {
                    return Err(err(&s.span, "nested minrepeat is not supported"));
                }
                ctx.repeat = Some(id.index());
                let mut inner = Vec::new();
                let r = self.block(ctx, body, &mut inner);
                ctx.repeat = None;
                r?;
                out.push(IrInstr::Repeat { repeat: id.index(), body: inner });
            }
            StmtKind::Empty => {}
            StmtKind::Expr(e) => self.expr_stmt(ctx, e, out)?,
        }
        Ok(())
    }

    fn expr_stmt(&mut self, ctx: &mut FnCtx, e: &Expr, out: &mut Vec<IrInstr>) -> Result<(), LoweringError> {
        match &e.kind {
            ExprKind::Assign { target, value } => {
                let (lv, t) = self.lvalue(ctx, target)?;
                let (v, vt) = self.expr(ctx, value, Some(t))?;
                self.check(vt, t, &value.span)?;
                out.push(IrInstr::Assign { target: lv, value: v });
            }
            ExprKind::Call { target: None, name, args } if name == "minimize" => {
                let h = ctx.harness.ok_or_else(|| err(&e.span, "minimize is only allowed in a harness"))?;
                if args.len() != 1 {
                    return Err(err(&e.span, "minimize takes one argument"));
                }
                let (v, t) = self.expr(ctx, &args[0], Some(TypeTag::Int))?;
                self.check(t, TypeTag::Int, &args[0].span)?;
                let harness = &mut self.harnesses[h];
                let name = match harness.objectives.len() {
                    0 => harness.name.clone(),
                    n => format!("{}_{}", harness.name, n + 1),
                };
                harness.objectives.push(self.objectives.len());
                self.objectives.push(Objective { name, harness: h, expr: v });
            }
            ExprKind::SuperCall { args } => {
                if !ctx.is_ctor {
                    return Err(err(&e.span, "super(..) outside a constructor"));
                }
                match self.table.class(ctx.class).superclass {
                    None if args.is_empty() => {}
                    None => return Err(err(&e.span, "Object has no constructor with arguments")),
                    Some(sup) => {
                        let cands = self.table.constructors(sup);
                        let (m, mut lowered) = self.resolve(ctx, &cands, args, &e.span, "constructor")?;
                        lowered.insert(0, IrExpr::Local(0));
                        out.push(IrInstr::Eval(IrExpr::Call { func: m, args: lowered }));
                    }
                }
            }
            _ => {
                let (v, _) = self.expr(ctx, e, None)?;
                out.push(IrInstr::Eval(v));
            }
        }
        Ok(())
    }

    /// A name that refers to a class rather than a value.
    fn class_name(&self, ctx: &FnCtx, e: &Expr) -> Option<ClassId> {
        match &e.kind {
            ExprKind::Name(n) if ctx.lookup(n).is_none() && self.table.find_field(ctx.class, n).is_none() => {
                self.table.id(n)
            }
            _ => None,
        }
    }

    fn field_access(&mut self, ctx: &mut FnCtx, e: &Expr) -> Result<(LValue, TypeTag), LoweringError> {
        match &e.kind {
            ExprKind::Name(n) => {
                if let Some(id) = ctx.lookup(n) {
                    return Ok((LValue::Local(id), ctx.locals[id].1));
                }
                let slot = self
                    .table
                    .find_field(ctx.class, n)
                    .ok_or_else(|| err(&e.span, format!("unknown variable `{}`", n)))?;
                let f = &self.table.field_layout[slot];
                if f.is_static {
                    Ok((LValue::Static(slot), f.ty))
                } else if ctx.is_static {
                    Err(err(&e.span, format!("instance field `{}` used in a static context", n)))
                } else {
                    Ok((LValue::Field { obj: IrExpr::Local(0), slot }, f.ty))
                }
            }
            ExprKind::Field { target, name } => {
                if let Some(c) = self.class_name(ctx, target) {
                    let slot = self
                        .table
                        .find_field(c, name)
                        .filter(|s| self.table.field_layout[*s].is_static)
                        .ok_or_else(|| err(&e.span, format!("no static field `{}` in `{}`", name, self.table.class(c).name)))?;
                    return Ok((LValue::Static(slot), self.table.field_layout[slot].ty));
                }
                let (obj, t) = self.expr(ctx, target, None)?;
                let TypeTag::Obj(c) = t else {
                    return Err(err(&e.span, format!("field `{}` of non-object type {}", name, self.name(t))));
                };
                let slot = self
                    .table
                    .find_field(c, name)
                    .ok_or_else(|| err(&e.span, format!("no field `{}` in `{}`", name, self.table.class(c).name)))?;
                let f = &self.table.field_layout[slot];
                if f.is_static {
                    Ok((LValue::Static(slot), f.ty))
                } else {
                    Ok((LValue::Field { obj, slot }, f.ty))
                }
            }
            _ => Err(err(&e.span, "not assignable")),
        }
    }

    fn lvalue(&mut self, ctx: &mut FnCtx, e: &Expr) -> Result<(LValue, TypeTag), LoweringError> {
        self.field_access(ctx, e)
    }

    fn hole(&mut self, ctx: &FnCtx, e: &Expr, id: &Option<crate::unknowns::UnknownId>, expected: Option<TypeTag>) -> Result<Lowered, LoweringError> {
        let id = id.as_ref().ok_or_else(|| err(&e.span, "hole without an id"))?;
        let idx = id.index();
        let info = &mut self.registry.holes[idx];
        if info.repeat != ctx.repeat {
            return Err(err(&e.span, "hole and minrepeat ids disagree"));
        }
        if expected == Some(TypeTag::Bool) {
            info.is_bool = true;
            info.bits = 1;
            Ok((IrExpr::Hole(idx), TypeTag::Bool))
        } else if info.is_bool {
            Err(err(&e.span, format!("hole `{}` used as both boolean and integer", id.name)))
        } else {
            Ok((IrExpr::Hole(idx), if expected == Some(TypeTag::Char) { TypeTag::Char } else { TypeTag::Int }))
        }
    }

    fn is_hole_like(e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Hole { .. } => true,
            ExprKind::Choice { alts, .. } => alts.iter().all(Self::is_hole_like),
            _ => false,
        }
    }

    fn expr(&mut self, ctx: &mut FnCtx, e: &Expr, expected: Option<TypeTag>) -> Result<Lowered, LoweringError> {
        use TypeTag as T;
        Ok(match &e.kind {
            ExprKind::Int(v) => (IrExpr::Const(Const::Int(*v)), T::Int),
            ExprKind::Bool(b) => (IrExpr::Const(Const::Bool(*b)), T::Bool),
            ExprKind::Str(s) => (IrExpr::Const(Const::Str(Arc::from(s.as_str()))), T::Str),
            ExprKind::Char(c) => (IrExpr::Const(Const::Int(stdlib::char_code(*c))), T::Char),
            ExprKind::Null => (IrExpr::Const(Const::Null), T::Null),
            ExprKind::This => {
                if ctx.is_static {
                    return Err(err(&e.span, "`this` in a static context"));
                }
                (IrExpr::Local(0), T::Obj(ctx.class))
            }
            ExprKind::Super => return Err(err(&e.span, "`super` is only valid as a call target")),
            ExprKind::Name(_) | ExprKind::Field { .. } => {
                if let ExprKind::Name(n) = &e.kind {
                    if ctx.lookup(n).is_none() && self.table.find_field(ctx.class, n).is_none() {
                        let what = if self.table.id(n).is_some() { "type used as a value" } else { "unknown variable" };
                        return Err(err(&e.span, format!("{} `{}`", what, n)));
                    }
                }
                let (lv, t) = self.field_access(ctx, e)?;
                let v = match lv {
                    LValue::Local(i) => IrExpr::Local(i),
                    LValue::Static(s) => IrExpr::Static(s),
                    LValue::Field { obj, slot } => IrExpr::Field { obj: Box::new(obj), slot },
                };
                (v, t)
            }
            ExprKind::Call { target, name, args } => self.call(ctx, e, target.as_deref(), name, args)?,
            ExprKind::SuperCall { .. } => return Err(err(&e.span, "super(..) must be a statement")),
            ExprKind::New { ty, args, body } => {
                if body.is_some() {
                    return Err(err(&e.span, "anonymous class survived normalization"));
                }
                match self.ty(ty)? {
                    T::Lib(k) => {
                        let sig = stdlib::lookup(Receiver::New(k), "<init>", args.len())
                            .ok_or_else(|| LoweringError::UnknownBuiltin { span: e.span.clone(), name: format!("new {}", ty.name) })?;
                        (IrExpr::Builtin { op: sig.op, args: Vec::new() }, sig.ret)
                    }
                    T::Obj(c) if !self.table.class(c).is_interface => {
                        let cands = self.table.constructors(c);
                        let (m, mut lowered) = self.resolve(ctx, &cands, args, &e.span, "constructor")?;
                        lowered.insert(0, IrExpr::Alloc(c));
                        (IrExpr::Call { func: m, args: lowered }, T::Obj(c))
                    }
                    t => return Err(err(&e.span, format!("cannot instantiate {}", self.name(t)))),
                }
            }
            ExprKind::Unary { op, operand } => match op {
                UnOp::Not => {
                    let c = self.cond(ctx, operand)?;
                    (IrExpr::Not(Box::new(c)), T::Bool)
                }
                UnOp::Neg => {
                    let (v, t) = self.expr(ctx, operand, Some(T::Int))?;
                    self.check(t, T::Int, &operand.span)?;
                    (IrExpr::Neg(Box::new(v)), T::Int)
                }
            },
            ExprKind::Binary { op, lhs, rhs } => self.binary(ctx, e, *op, lhs, rhs)?,
            ExprKind::Assign { .. } => return Err(err(&e.span, "assignment used as a value")),
            ExprKind::Hole { id } => self.hole(ctx, e, id, expected)?,
            ExprKind::Choice { id, alts } => {
                let id = id.as_ref().ok_or_else(|| err(&e.span, "choice without an id"))?;
                if self.registry.choices[id.index()].repeat != ctx.repeat {
                    return Err(err(&e.span, "choice and minrepeat ids disagree"));
                }
                let mut out = Vec::new();
                let mut ty: Option<TypeTag> = None;
                for a in alts {
                    let (v, t) = self.expr(ctx, a, expected.or(ty))?;
                    ty = Some(match ty {
                        None => t,
                        Some(p) if assignable(self.table, t, p) => p,
                        Some(p) if assignable(self.table, p, t) => t,
                        Some(p) => {
                            return Err(err(&a.span, format!("choice mixes {} and {}", self.name(p), self.name(t))))
                        }
                    });
                    out.push(v);
                }
                (IrExpr::Choice { index: id.index(), alts: out }, ty.unwrap_or(T::Int))
            }
        })
    }

    fn binary(&mut self, ctx: &mut FnCtx, e: &Expr, op: BinOp, lhs: &Expr, rhs: &Expr) -> Result<Lowered, LoweringError> {
        use TypeTag as T;
        let bin = |op: IrBinOp, l: IrExpr, r: IrExpr| IrExpr::Binary { op, lhs: Box::new(l), rhs: Box::new(r) };
        match op {
            BinOp::And | BinOp::Or => {
                let l = self.cond(ctx, lhs)?;
                let r = self.cond(ctx, rhs)?;
                let op = if op == BinOp::And { IrBinOp::And } else { IrBinOp::Or };
                Ok((bin(op, l, r), T::Bool))
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let (l, lt) = self.expr(ctx, lhs, Some(T::Int))?;
                let (r, rt) = self.expr(ctx, rhs, Some(T::Int))?;
                for (t, s) in [(lt, &lhs.span), (rt, &rhs.span)] {
                    if !t.is_numeric() {
                        return Err(err(s, format!("`{}` needs numbers, found {}", op.as_str(), self.name(t))));
                    }
                }
                let (iop, ty) = match op {
                    BinOp::Add => (IrBinOp::Add, T::Int),
                    BinOp::Sub => (IrBinOp::Sub, T::Int),
                    BinOp::Mul => (IrBinOp::Mul, T::Int),
                    BinOp::Div => (IrBinOp::Div, T::Int),
                    BinOp::Rem => (IrBinOp::Rem, T::Int),
                    BinOp::Lt => (IrBinOp::Lt, T::Bool),
                    BinOp::Le => (IrBinOp::Le, T::Bool),
                    BinOp::Gt => (IrBinOp::Gt, T::Bool),
                    _ => (IrBinOp::Ge, T::Bool),
                };
                Ok((bin(iop, l, r), ty))
            }
            BinOp::Eq | BinOp::Ne => {
                // the side without holes fixes the type of the other
                let ((l, lt), (r, rt)) = if Self::is_hole_like(lhs) && !Self::is_hole_like(rhs) {
                    let r = self.expr(ctx, rhs, None)?;
                    let l = self.expr(ctx, lhs, Some(r.1))?;
                    (l, r)
                } else {
                    let l = self.expr(ctx, lhs, None)?;
                    let r = self.expr(ctx, rhs, Some(l.1))?;
                    (l, r)
                };
                let kind = if lt.is_numeric() && rt.is_numeric() {
                    EqKind::Int
                } else if lt == T::Bool && rt == T::Bool {
                    EqKind::Bool
                } else if lt == T::Str && rt == T::Str {
                    EqKind::Str
                } else if lt.is_ref() && rt.is_ref() && (assignable(self.table, lt, rt) || assignable(self.table, rt, lt)) {
                    EqKind::Ref
                } else {
                    return Err(err(&e.span, format!("cannot compare {} with {}", self.name(lt), self.name(rt))));
                };
                let iop = if op == BinOp::Eq { IrBinOp::Eq(kind) } else { IrBinOp::Ne(kind) };
                Ok((bin(iop, l, r), T::Bool))
            }
        }
    }

    /// Picks an overload by arity, then by argument assignability.
    fn resolve(
        &mut self,
        ctx: &mut FnCtx,
        cands: &[usize],
        args: &[Expr],
        span: &SourceSpan,
        what: &str,
    ) -> Result<(usize, Vec<IrExpr>), LoweringError> {
        let by_arity: Vec<usize> =
            cands.iter().copied().filter(|m| self.table.methods[*m].params.len() == args.len()).collect();
        match by_arity.as_slice() {
            [] => Err(err(span, format!("no {} taking {} argument(s)", what, args.len()))),
            [m] => {
                let params = self.table.methods[*m].params.clone();
                let mut out = Vec::new();
                for (a, p) in args.iter().zip(params) {
                    let (v, t) = self.expr(ctx, a, Some(p))?;
                    self.check(t, p, &a.span)?;
                    out.push(v);
                }
                Ok((*m, out))
            }
            many => {
                let mut out = Vec::new();
                let mut types = Vec::new();
                for a in args {
                    let (v, t) = self.expr(ctx, a, None)?;
                    out.push(v);
                    types.push(t);
                }
                many.iter()
                    .copied()
                    .find(|m| {
                        self.table.methods[*m].params.iter().zip(&types).all(|(p, t)| assignable(self.table, *t, *p))
                    })
                    .map(|m| (m, out))
                    .ok_or_else(|| err(span, format!("no matching {}", what)))
            }
        }
    }

    fn builtin(
        &mut self,
        ctx: &mut FnCtx,
        e: &Expr,
        receiver: Receiver,
        recv: Option<IrExpr>,
        name: &str,
        args: &[Expr],
    ) -> Result<Lowered, LoweringError> {
        let sig = stdlib::lookup(receiver, name, args.len())
            .ok_or_else(|| LoweringError::UnknownBuiltin { span: e.span.clone(), name: name.to_string() })?;
        let mut op = sig.op;
        let mut out: Vec<IrExpr> = recv.into_iter().collect();
        for (a, p) in args.iter().zip(sig.params) {
            let want = match p {
                ParamKind::Int => Some(TypeTag::Int),
                ParamKind::Str => Some(TypeTag::Str),
                ParamKind::Any => None,
            };
            let (v, t) = self.expr(ctx, a, want)?;
            if let Some(w) = want {
                self.check(t, w, &a.span)?;
            }
            if let Builtin::SbAppend(_) = op {
                op = Builtin::SbAppend(match t {
                    TypeTag::Int => AppendKind::Int,
                    TypeTag::Char => AppendKind::Char,
                    TypeTag::Bool => AppendKind::Bool,
                    _ => AppendKind::Str,
                });
            }
            out.push(v);
        }
        Ok((IrExpr::Builtin { op, args: out }, sig.ret))
    }

    fn method_call(
        &mut self,
        ctx: &mut FnCtx,
        e: &Expr,
        recv: Option<IrExpr>,
        class: ClassId,
        name: &str,
        args: &[Expr],
        only_static: bool,
    ) -> Result<Lowered, LoweringError> {
        let mut cands = self.table.visible_methods(class, name);
        if only_static {
            cands.retain(|m| self.table.methods[*m].is_static);
        }
        if cands.is_empty() {
            return Err(err(&e.span, format!("no method `{}` in `{}`", name, self.table.class(class).name)));
        }
        let (m, mut lowered) = self.resolve(ctx, &cands, args, &e.span, &format!("method `{}`", name))?;
        let info = &self.table.methods[m];
        let ret = info.ret;
        if info.is_static {
            return Ok((IrExpr::Call { func: m, args: lowered }, ret));
        }
        let recv = match recv {
            Some(r) => r,
            None if ctx.is_static => {
                return Err(err(&e.span, format!("instance method `{}` called from a static context", name)))
            }
            None => IrExpr::Local(0),
        };
        lowered.insert(0, recv);
        let sig = info.signature();
        let f = self.dispatch_fn(&sig, ret);
        Ok((IrExpr::Call { func: f, args: lowered }, ret))
    }

    fn call(&mut self, ctx: &mut FnCtx, e: &Expr, target: Option<&Expr>, name: &str, args: &[Expr]) -> Result<Lowered, LoweringError> {
        match target {
            None => {
                if name == "minimize" {
                    return Err(err(&e.span, "minimize must be a harness statement"));
                }
                if !self.table.visible_methods(ctx.class, name).is_empty() {
                    return self.method_call(ctx, e, None, ctx.class, name, args, false);
                }
                self.builtin(ctx, e, Receiver::Free, None, name, args)
            }
            Some(t) if matches!(t.kind, ExprKind::Super) => {
                if ctx.is_static {
                    return Err(err(&e.span, "`super` in a static context"));
                }
                let sup = self
                    .table
                    .class(ctx.class)
                    .superclass
                    .ok_or_else(|| err(&e.span, format!("no method `{}` in Object", name)))?;
                let cands: Vec<usize> = self
                    .table
                    .visible_methods(sup, name)
                    .into_iter()
                    .filter(|m| !self.table.methods[*m].is_static)
                    .collect();
                let (m, mut lowered) = self.resolve(ctx, &cands, args, &e.span, &format!("method `{}`", name))?;
                let sig = self.table.methods[m].signature();
                let imp = self
                    .table
                    .lookup_vtable(sup, &sig)
                    .ok_or_else(|| err(&e.span, format!("`super.{}` is abstract", name)))?;
                lowered.insert(0, IrExpr::Local(0));
                Ok((IrExpr::Call { func: imp, args: lowered }, self.table.methods[imp].ret))
            }
            Some(t) => {
                if let Some(c) = self.class_name(ctx, t) {
                    return self.method_call(ctx, e, None, c, name, args, true);
                }
                let (recv, rt) = self.expr(ctx, t, None)?;
                match rt {
                    TypeTag::Obj(c) => self.method_call(ctx, e, Some(recv), c, name, args, false),
                    TypeTag::Str => self.builtin(ctx, e, Receiver::Str, Some(recv), name, args),
                    TypeTag::Lib(k) => self.builtin(ctx, e, Receiver::Lib(k), Some(recv), name, args),
                    other => Err(err(
                        &e.span,
                        format!("cannot call `{}` on {}; store it in a typed variable first", name, self.name(other)),
                    )),
                }
            }
        }
    }
}

/// Lowers a normalized program. `registry` comes from id assignment; holes in
/// boolean positions are marked in the returned copy.
pub fn lower_program(ast: &SketchAst, table: &ClassTable, registry: &UnknownRegistry) -> Result<IrProgram, LoweringError> {
    let mut l = Lowerer {
        table,
        ast,
        registry: registry.clone(),
        functions: Vec::new(),
        dispatchers: Vec::new(),
        dispatch: IndexMap::new(),
        harnesses: Vec::new(),
        objectives: Vec::new(),
    };
    for m in &table.methods {
        let f = l.lower_method(m)?;
        l.functions.push(f);
    }
    let dispatchers = std::mem::take(&mut l.dispatchers);
    l.functions.extend(dispatchers);
    let mut func_ids = IndexMap::new();
    for (i, f) in l.functions.iter().enumerate() {
        func_ids.insert(f.name.clone(), i);
    }
    let mut body = Vec::new();
    for c in &table.classes {
        if let Some(&m) = table.method_ids.get(&format!("{}_{}", CLINIT, c.name)) {
            body.push(IrInstr::Eval(IrExpr::Call { func: m, args: Vec::new() }));
        }
    }
    let static_init = l.functions.len();
    l.functions.push(IrFunction {
        name: "static_init".into(),
        kind: FuncKind::StaticInit,
        params: 0,
        locals: Vec::new(),
        ret: TypeTag::Void,
        body,
    });
    func_ids.insert("static_init".into(), static_init);

    let char_token = table.id(CHAR_TOKEN_CLASS).and_then(|c| table.find_field(c, "id").map(|s| (c, s)));
    let slots = table
        .field_layout
        .iter()
        .map(|f| Slot { owner: table.class(f.owner).name.clone(), name: f.name.clone(), ty: f.ty, is_static: f.is_static })
        .collect();
    Ok(IrProgram {
        functions: l.functions,
        func_ids,
        harnesses: l.harnesses,
        objectives: l.objectives,
        static_init,
        slots,
        class_names: table.classes.iter().map(|c| c.name.clone()).collect(),
        char_token,
        registry: l.registry,
    })
}
