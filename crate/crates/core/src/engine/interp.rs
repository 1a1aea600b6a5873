//! Concrete big-step interpreter over the IR. It is the candidate oracle:
//! every model the solver proposes is replayed here before it is accepted.

use indexmap::IndexMap;

use crate::lowering::*;
use crate::span::SourceSpan;
use crate::stdlib::{builtin_eval, BuiltinCtx, Heap, HeapObj, Ref, Scalar};
use crate::unknowns::Assignment;

use super::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Ref(Ref),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalStatus {
    Pass,
    AssertFail(SourceSpan),
    Trap(String),
    ResourceExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub status: EvalStatus,
    pub steps_used: u64,
    /// Objective name to value; empty unless the status is `Pass`.
    pub objective_values: IndexMap<String, i64>,
}

impl EvalOutcome {
    pub fn passed(&self) -> bool {
        self.status == EvalStatus::Pass
    }
}

/// Why evaluation stopped early.
#[derive(Debug)]
pub enum Stop {
    Assert(SourceSpan),
    Trap(String),
    Resource,
}

impl Scalar for Value {
    type Error = Stop;
    fn int(v: i64) -> Self {
        Value::Int(v)
    }
    fn boolean(b: bool) -> Self {
        Value::Bool(b)
    }
    fn reference(r: Ref) -> Self {
        Value::Ref(r)
    }
    fn as_int(&self) -> Result<i64, Stop> {
        match self {
            Value::Int(v) => Ok(*v),
            other => Err(Stop::Trap(format!("expected int, found {:?}", other))),
        }
    }
    fn as_bool(&self) -> Result<bool, Stop> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(Stop::Trap(format!("expected boolean, found {:?}", other))),
        }
    }
    fn as_ref(&self) -> Result<Ref, Stop> {
        match self {
            Value::Ref(r) => Ok(r.clone()),
            other => Err(Stop::Trap(format!("expected reference, found {:?}", other))),
        }
    }
    fn trap(message: String) -> Stop {
        Stop::Trap(message)
    }
}

pub fn const_value(c: &Const) -> Value {
    match c {
        Const::Int(v) => Value::Int(*v),
        Const::Bool(b) => Value::Bool(*b),
        Const::Str(s) => Value::Ref(Ref::Str(s.clone())),
        Const::Null => Value::Ref(Ref::Null),
    }
}

/// Sign-extends the low `width` bits of `v`.
pub fn wrap(v: i64, width: u32) -> i64 {
    if width >= 64 {
        return v;
    }
    let shift = 64 - width;
    (v << shift) >> shift
}

enum Flow {
    Normal,
    Return(Option<Value>),
}

struct Frame {
    locals: Vec<Value>,
    iter: Option<u32>,
}

/// One harness run: owns the heap and the static slots.
pub struct Interpreter<'a> {
    prog: &'a IrProgram,
    asg: &'a Assignment,
    limits: Limits,
    heap: Heap<Value>,
    statics: Vec<Value>,
    ctx: BuiltinCtx<Value>,
    steps: u64,
    depth: usize,
}

impl<'a> Interpreter<'a> {
    pub fn new(prog: &'a IrProgram, asg: &'a Assignment, limits: Limits) -> Self {
        let defaults: Vec<Value> = prog.slot_defaults().iter().map(const_value).collect();
        Interpreter {
            prog,
            asg,
            limits,
            heap: Heap::default(),
            statics: defaults.clone(),
            ctx: BuiltinCtx { char_token: prog.char_token, record_defaults: defaults },
            steps: 0,
            depth: 0,
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.steps += 1;
        if self.steps > self.limits.step_limit {
            Err(Stop::Resource)
        } else {
            Ok(())
        }
    }

    fn wrap(&self, v: i64) -> Value {
        Value::Int(wrap(v, self.limits.int_width))
    }

    fn record(&mut self, v: &Value) -> Result<&mut Vec<Value>, Stop> {
        match v.as_ref()? {
            Ref::Obj(a) => match &mut self.heap.objs[a] {
                HeapObj::Record { slots, .. } => Ok(slots),
                _ => Err(Stop::Trap("field access on a library object".into())),
            },
            Ref::Null => Err(Stop::Trap("null dereference".into())),
            Ref::Str(_) => Err(Stop::Trap("field access on a string".into())),
        }
    }

    fn expr(&mut self, f: &mut Frame, e: &IrExpr) -> Result<Value, Stop> {
        Ok(match e {
            IrExpr::Const(c) => const_value(c),
            IrExpr::Local(i) => f.locals[*i].clone(),
            IrExpr::Field { obj, slot } => {
                let o = self.expr(f, obj)?;
                self.record(&o)?[*slot].clone()
            }
            IrExpr::Static(s) => self.statics[*s].clone(),
            IrExpr::Hole(i) => {
                let info = &self.prog.registry.holes[*i];
                let iter = if info.repeat.is_some() { f.iter } else { None };
                let v = self.asg.hole(*i, iter);
                if info.is_bool {
                    Value::Bool(v != 0)
                } else {
                    self.wrap(v as i64)
                }
            }
            IrExpr::Choice { index, alts } => {
                let info = &self.prog.registry.choices[*index];
                let iter = if info.repeat.is_some() { f.iter } else { None };
                let k = self.asg.choice(*index, iter) as usize;
                let alt = alts.get(k).ok_or_else(|| Stop::Trap("choice index out of range".into()))?;
                self.expr(f, alt)?
            }
            IrExpr::Not(x) => Value::Bool(!self.expr(f, x)?.as_bool()?),
            IrExpr::Neg(x) => {
                let v = self.expr(f, x)?.as_int()?;
                self.wrap(v.wrapping_neg())
            }
            IrExpr::Binary { op, lhs, rhs } => self.binary(f, *op, lhs, rhs)?,
            IrExpr::Call { func, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(f, a)?);
                }
                self.call(*func, vals)?.unwrap_or(Value::Int(0))
            }
            IrExpr::Builtin { op, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(f, a)?);
                }
                let v = builtin_eval(*op, &vals, &mut self.heap, &self.ctx)?;
                match v {
                    Value::Int(i) => self.wrap(i),
                    other => other,
                }
            }
            IrExpr::Alloc(c) => {
                let slots = self.ctx.record_defaults.clone();
                Value::Ref(Ref::Obj(self.heap.alloc(HeapObj::Record { class: *c, slots })))
            }
            IrExpr::ClassIdOf(x) => {
                let v = self.expr(f, x)?;
                match v.as_ref()? {
                    Ref::Obj(a) => match &self.heap.objs[a] {
                        HeapObj::Record { class, .. } => Value::Int(*class as i64),
                        _ => return Err(Stop::Trap("method call on a library object".into())),
                    },
                    Ref::Null => return Err(Stop::Trap("method call on null".into())),
                    Ref::Str(_) => return Err(Stop::Trap("method call on a string".into())),
                }
            }
        })
    }

    fn binary(&mut self, f: &mut Frame, op: IrBinOp, lhs: &IrExpr, rhs: &IrExpr) -> Result<Value, Stop> {
        match op {
            IrBinOp::And => {
                return Ok(Value::Bool(self.expr(f, lhs)?.as_bool()? && self.expr(f, rhs)?.as_bool()?));
            }
            IrBinOp::Or => {
                return Ok(Value::Bool(self.expr(f, lhs)?.as_bool()? || self.expr(f, rhs)?.as_bool()?));
            }
            _ => {}
        }
        let l = self.expr(f, lhs)?;
        let r = self.expr(f, rhs)?;
        let eq = |k: EqKind| -> Result<bool, Stop> {
            Ok(match k {
                EqKind::Int => l.as_int()? == r.as_int()?,
                EqKind::Bool => l.as_bool()? == r.as_bool()?,
                EqKind::Ref | EqKind::Str => l.as_ref()? == r.as_ref()?,
            })
        };
        Ok(match op {
            IrBinOp::Eq(k) => Value::Bool(eq(k)?),
            IrBinOp::Ne(k) => Value::Bool(!eq(k)?),
            _ => {
                let (a, b) = (l.as_int()?, r.as_int()?);
                match op {
                    IrBinOp::Add => self.wrap(a.wrapping_add(b)),
                    IrBinOp::Sub => self.wrap(a.wrapping_sub(b)),
                    IrBinOp::Mul => self.wrap(a.wrapping_mul(b)),
                    IrBinOp::Div | IrBinOp::Rem if b == 0 => return Err(Stop::Trap("division by zero".into())),
                    IrBinOp::Div => self.wrap(a.wrapping_div(b)),
                    IrBinOp::Rem => self.wrap(a.wrapping_rem(b)),
                    IrBinOp::Lt => Value::Bool(a < b),
                    IrBinOp::Le => Value::Bool(a <= b),
                    IrBinOp::Gt => Value::Bool(a > b),
                    IrBinOp::Ge => Value::Bool(a >= b),
                    _ => unreachable!("handled above"),
                }
            }
        })
    }

    fn call(&mut self, func: FuncId, args: Vec<Value>) -> Result<Option<Value>, Stop> {
        self.tick()?;
        if self.depth >= self.limits.max_depth {
            return Err(Stop::Resource);
        }
        let fun = &self.prog.functions[func];
        let mut locals = args;
        for (_, ty) in &fun.locals[locals.len()..] {
            locals.push(const_value(&Const::default_for(*ty)));
        }
        let mut frame = Frame { locals, iter: None };
        self.depth += 1;
        let r = self.block(&mut frame, &fun.body);
        self.depth -= 1;
        match r? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Some(const_value(&Const::default_for(fun.ret)))),
        }
    }

    fn block(&mut self, f: &mut Frame, body: &[IrInstr]) -> Result<Flow, Stop> {
        for i in body {
            if let Flow::Return(v) = self.instr(f, i)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn iteration(&mut self, f: &mut Frame, iter: u32, body: &[IrInstr]) -> Result<Flow, Stop> {
        let saved = f.iter.replace(iter);
        let r = self.block(f, body);
        f.iter = saved;
        r
    }

    fn instr(&mut self, f: &mut Frame, i: &IrInstr) -> Result<Flow, Stop> {
        self.tick()?;
        match i {
            IrInstr::Assign { target, value } => {
                let v = self.expr(f, value)?;
                match target {
                    LValue::Local(l) => f.locals[*l] = v,
                    LValue::Static(s) => self.statics[*s] = v,
                    LValue::Field { obj, slot } => {
                        let o = self.expr(f, obj)?;
                        self.record(&o)?[*slot] = v;
                    }
                }
            }
            IrInstr::Eval(e) => {
                self.expr(f, e)?;
            }
            IrInstr::If { cond, then, els } => {
                let c = self.expr(f, cond)?.as_bool()?;
                return self.block(f, if c { then } else { els });
            }
            IrInstr::While { cond, body } => {
                let mut count = 0;
                while self.expr(f, cond)?.as_bool()? {
                    if count == self.limits.loop_bound {
                        return Err(Stop::Resource);
                    }
                    count += 1;
                    if let Flow::Return(v) = self.block(f, body)? {
                        return Ok(Flow::Return(v));
                    }
                    self.tick()?;
                }
            }
            IrInstr::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.expr(f, e)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            IrInstr::Assert { cond, span } => {
                if !self.expr(f, cond)?.as_bool()? {
                    return Err(Stop::Assert(span.clone()));
                }
            }
            IrInstr::Repeat { repeat, body } => {
                for iter in 1..=self.asg.repeats[*repeat] {
                    if let Flow::Return(v) = self.iteration(f, iter, body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            IrInstr::Iteration { iter, body, .. } => return self.iteration(f, *iter, body),
            IrInstr::Trap(msg) => return Err(Stop::Trap(msg.clone())),
        }
        Ok(Flow::Normal)
    }

    /// Runs static initialization, then the harness body, then its
    /// objectives in the harness's final frame.
    pub fn run_harness(mut self, harness: usize) -> EvalOutcome {
        let prog = self.prog;
        let h = &prog.harnesses[harness];
        let result = (|| -> Result<IndexMap<String, i64>, Stop> {
            self.call(prog.static_init, Vec::new())?;
            let fun = &prog.functions[h.func];
            let locals = fun.locals.iter().map(|(_, t)| const_value(&Const::default_for(*t))).collect();
            let mut frame = Frame { locals, iter: None };
            self.depth += 1;
            self.block(&mut frame, &fun.body)?;
            let mut values = IndexMap::new();
            for &o in &h.objectives {
                let obj = &prog.objectives[o];
                let v = self.expr(&mut frame, &obj.expr)?.as_int()?;
                values.insert(obj.name.clone(), v);
            }
            Ok(values)
        })();
        let (status, objective_values) = match result {
            Ok(v) => (EvalStatus::Pass, v),
            Err(Stop::Assert(s)) => (EvalStatus::AssertFail(s), IndexMap::new()),
            Err(Stop::Trap(m)) => (EvalStatus::Trap(m), IndexMap::new()),
            Err(Stop::Resource) => (EvalStatus::ResourceExceeded, IndexMap::new()),
        };
        EvalOutcome { status, steps_used: self.steps.min(self.limits.step_limit), objective_values }
    }
}

/// Evaluates one harness under a total assignment with a fresh heap.
pub fn eval_harness(prog: &IrProgram, harness: usize, asg: &Assignment, limits: &Limits) -> EvalOutcome {
    Interpreter::new(prog, asg, limits.clone()).run_harness(harness)
}

/// Every harness passes; returns the merged objective values.
pub fn eval_all(prog: &IrProgram, asg: &Assignment, limits: &Limits) -> Option<IndexMap<String, i64>> {
    let mut values = IndexMap::new();
    for h in 0..prog.harnesses.len() {
        let out = eval_harness(prog, h, asg, limits);
        if !out.passed() {
            return None;
        }
        values.extend(out.objective_values);
    }
    Some(values)
}

