//! Symbolic execution of a harness into the AIG with guarded updates.
//!
//! Every statement runs under a guard literal; writes become multiplexers on
//! that guard, so both branches of an `if` execute on one state. Heap
//! addresses stay concrete: a reference is a union of guarded concrete
//! addresses. When a builtin needs a concrete value, or a mutating builtin
//! runs under a non-trivial guard, the executor asks for a case split on the
//! smallest free input bit in the offending literal's support. Each
//! combination of split bits is a leaf; the harness formula is the
//! conjunction of `leaf condition -> leaf ok`.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::classtable::TypeTag;
use crate::lowering::*;
use crate::stdlib::{builtin_eval, BuiltinCtx, Heap, HeapObj, Ref, Scalar};

use super::aig::{not, Aig, Bv, Lit, FALSE, TRUE};
use super::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SVal {
    Int(Bv),
    Bool(Lit),
    /// Guarded concrete references; guards are pairwise disjoint.
    Ref(Vec<(Lit, Ref)>),
}

/// A value that had to be concrete was not; carries a literal that depends
/// on the free inputs involved.
#[derive(Debug)]
pub enum SymIssue {
    Symbolic(Lit),
    Trap(String),
}

impl Scalar for SVal {
    type Error = SymIssue;
    fn int(v: i64) -> Self {
        // width fixed on first read, see `Exec::fit`
        SVal::Int(Bv((0..64).map(|i| if (v >> i) & 1 == 1 { TRUE } else { FALSE }).collect()))
    }
    fn boolean(b: bool) -> Self {
        SVal::Bool(if b { TRUE } else { FALSE })
    }
    fn reference(r: Ref) -> Self {
        SVal::Ref(vec![(TRUE, r)])
    }
    fn as_int(&self) -> Result<i64, SymIssue> {
        match self {
            SVal::Int(bv) => bv.as_const().ok_or_else(|| {
                SymIssue::Symbolic(*bv.0.iter().find(|l| **l > TRUE).expect("non-constant bit"))
            }),
            _ => Err(SymIssue::Trap("expected int".into())),
        }
    }
    fn as_bool(&self) -> Result<bool, SymIssue> {
        match self {
            SVal::Bool(TRUE) => Ok(true),
            SVal::Bool(FALSE) => Ok(false),
            SVal::Bool(l) => Err(SymIssue::Symbolic(*l)),
            _ => Err(SymIssue::Trap("expected boolean".into())),
        }
    }
    fn as_ref(&self) -> Result<Ref, SymIssue> {
        match self {
            SVal::Ref(opts) if opts.len() == 1 => Ok(opts[0].1.clone()),
            SVal::Ref(opts) if opts.is_empty() => Ok(Ref::Null),
            SVal::Ref(opts) => Err(SymIssue::Symbolic(opts[0].0)),
            _ => Err(SymIssue::Trap("expected reference".into())),
        }
    }
    fn trap(message: String) -> SymIssue {
        SymIssue::Trap(message)
    }
}

/// Input bits of every unknown instance for one repeat-count vector.
#[derive(Clone, Debug, Default)]
pub struct Inputs {
    /// Per hole, per instance: value bits, least significant first.
    pub holes: Vec<Vec<Vec<Lit>>>,
    /// Per choice, per instance: index bits, least significant first.
    pub choices: Vec<Vec<Vec<Lit>>>,
    pub counts: Vec<u32>,
}

impl Inputs {
    /// Allocates fresh inputs: holes first, then choices, in registry order.
    pub fn allocate(aig: &mut Aig, prog: &IrProgram, counts: &[u32]) -> Inputs {
        let reg = &prog.registry;
        let inst = |r: Option<usize>| r.map_or(1, |r| counts[r] as usize);
        let holes = reg
            .holes
            .iter()
            .map(|h| (0..inst(h.repeat)).map(|_| (0..h.bits).map(|_| aig.input()).collect()).collect())
            .collect();
        let choices = reg
            .choices
            .iter()
            .map(|c| (0..inst(c.repeat)).map(|_| (0..index_bits(c.arity)).map(|_| aig.input()).collect()).collect())
            .collect();
        Inputs { holes, choices, counts: counts.to_vec() }
    }
}

/// Bits needed to index `arity` alternatives.
pub fn index_bits(arity: u32) -> u32 {
    32 - arity.saturating_sub(1).leading_zeros()
}

#[derive(Debug)]
pub enum SymError {
    /// Re-run with this input fixed both ways.
    Split(u32),
    TooLarge(String),
}

pub struct Leaf {
    pub ok: Lit,
    pub objectives: Vec<Bv>,
}

struct Frame {
    locals: Vec<SVal>,
    iter: Option<u32>,
    returned: Lit,
    ret: Option<SVal>,
}

struct Exec<'a> {
    aig: &'a mut Aig,
    prog: &'a IrProgram,
    inputs: &'a Inputs,
    fixed: &'a BTreeMap<u32, bool>,
    limits: &'a Limits,
    width: usize,
    heap: Heap<SVal>,
    statics: Vec<SVal>,
    ctx: BuiltinCtx<SVal>,
    fail: Lit,
    depth: usize,
    node_cap: usize,
}

type R<T> = Result<T, SymError>;

impl<'a> Exec<'a> {
    fn default_of(&self, ty: TypeTag) -> SVal {
        match ty {
            TypeTag::Bool => SVal::Bool(FALSE),
            t if t.is_ref() => SVal::Ref(vec![(TRUE, Ref::Null)]),
            _ => SVal::Int(self.aig.bv_const(0, self.width)),
        }
    }

    fn const_val(&self, c: &Const) -> SVal {
        match c {
            Const::Int(v) => SVal::Int(self.aig.bv_const(*v, self.width)),
            Const::Bool(b) => SVal::Bool(if *b { TRUE } else { FALSE }),
            Const::Str(s) => SVal::Ref(vec![(TRUE, Ref::Str(s.clone()))]),
            Const::Null => SVal::Ref(vec![(TRUE, Ref::Null)]),
        }
    }

    fn fit(&self, v: SVal) -> SVal {
        match v {
            SVal::Int(bv) if bv.width() != self.width => SVal::Int(self.aig.bv_zext(&bv.0, self.width)),
            v => v,
        }
    }

    fn input(&self, l: Lit) -> Lit {
        match self.aig.input_index(l).and_then(|i| self.fixed.get(&i)) {
            Some(true) => TRUE,
            Some(false) => FALSE,
            None => l,
        }
    }

    fn split_on(&self, l: Lit) -> SymError {
        match self.aig.support(l).first() {
            Some(&v) => SymError::Split(v),
            None => SymError::TooLarge("split requested on a constant".into()),
        }
    }

    fn check_size(&self) -> R<()> {
        if self.aig.num_nodes() > self.node_cap {
            Err(SymError::TooLarge(format!("encoding exceeds {} nodes", self.node_cap)))
        } else {
            Ok(())
        }
    }

    fn add_fail(&mut self, cond: Lit) {
        self.fail = self.aig.or(self.fail, cond);
    }

    fn mux(&mut self, c: Lit, t: SVal, e: SVal) -> SVal {
        match c {
            TRUE => return t,
            FALSE => return e,
            _ => {}
        }
        match (t, e) {
            (SVal::Int(a), SVal::Int(b)) => SVal::Int(self.aig.bv_ite(c, &a, &b)),
            (SVal::Bool(a), SVal::Bool(b)) => SVal::Bool(self.aig.ite(c, a, b)),
            (SVal::Ref(a), SVal::Ref(b)) => {
                let mut out: IndexMap<Ref, Lit> = IndexMap::new();
                for (g, r) in a {
                    let x = self.aig.and(c, g);
                    let cur = out.get(&r).copied().unwrap_or(FALSE);
                    out.insert(r, self.aig.or(cur, x));
                }
                for (g, r) in b {
                    let x = self.aig.and(not(c), g);
                    let cur = out.get(&r).copied().unwrap_or(FALSE);
                    out.insert(r, self.aig.or(cur, x));
                }
                SVal::Ref(out.into_iter().filter(|(_, g)| *g != FALSE).map(|(r, g)| (g, r)).collect())
            }
            (t, _) => t,
        }
    }

    fn int(&self, v: &SVal) -> Bv {
        match v {
            SVal::Int(b) => b.clone(),
            _ => self.aig.bv_const(0, self.width),
        }
    }

    fn boolean(v: &SVal) -> Lit {
        match v {
            SVal::Bool(l) => *l,
            _ => FALSE,
        }
    }

    fn refs(v: &SVal) -> Vec<(Lit, Ref)> {
        match v {
            SVal::Ref(o) => o.clone(),
            _ => Vec::new(),
        }
    }

    /// Addresses of `v` that are records; null or string options fail under `g`.
    fn records(&mut self, v: &SVal, g: Lit) -> Vec<(Lit, usize)> {
        let mut out = Vec::new();
        for (og, r) in Self::refs(v) {
            match r {
                Ref::Obj(a) if matches!(self.heap.objs[a], HeapObj::Record { .. }) => out.push((og, a)),
                _ => {
                    let bad = self.aig.and(g, og);
                    self.add_fail(bad);
                }
            }
        }
        out
    }

    fn hole_bits(&self, index: usize, iter: Option<u32>) -> Vec<Lit> {
        let inst = iter.map_or(0, |i| i as usize - 1);
        self.inputs.holes[index][inst].iter().map(|&l| self.input(l)).collect()
    }

    fn expr(&mut self, f: &mut Frame, e: &IrExpr, g: Lit) -> R<SVal> {
        let v = self.expr_inner(f, e, g)?;
        Ok(self.fit(v))
    }

    fn expr_inner(&mut self, f: &mut Frame, e: &IrExpr, g: Lit) -> R<SVal> {
        Ok(match e {
            IrExpr::Const(c) => self.const_val(c),
            IrExpr::Local(i) => f.locals[*i].clone(),
            IrExpr::Static(s) => self.statics[*s].clone(),
            IrExpr::Field { obj, slot } => {
                let o = self.expr(f, obj, g)?;
                let recs = self.records(&o, g);
                let mut acc: Option<SVal> = None;
                for (og, a) in recs.into_iter().rev() {
                    let HeapObj::Record { slots, .. } = &self.heap.objs[a] else { unreachable!() };
                    let v = self.fit(slots[*slot].clone());
                    acc = Some(match acc {
                        None => v,
                        Some(rest) => self.mux(og, v, rest),
                    });
                }
                acc.unwrap_or_else(|| self.default_of(self.prog.slots[*slot].ty))
            }
            IrExpr::Hole(i) => {
                let info = &self.prog.registry.holes[*i];
                let iter = if info.repeat.is_some() { f.iter } else { None };
                let bits = self.hole_bits(*i, iter);
                if info.is_bool {
                    SVal::Bool(bits[0])
                } else {
                    SVal::Int(self.aig.bv_zext(&bits, self.width))
                }
            }
            IrExpr::Choice { index, alts } => {
                let info = &self.prog.registry.choices[*index];
                let iter = if info.repeat.is_some() { f.iter } else { None };
                let inst = iter.map_or(0, |i| i as usize - 1);
                let bits: Vec<Lit> = self.inputs.choices[*index][inst].iter().map(|&l| self.input(l)).collect();
                let w = bits.len() + 1;
                let idx = self.aig.bv_zext(&bits, w);
                let mut acc: Option<SVal> = None;
                for (k, alt) in alts.iter().enumerate().rev() {
                    let kc = self.aig.bv_const(k as i64, w);
                    let sel = self.aig.bv_eq(&idx, &kc);
                    let sg = self.aig.and(g, sel);
                    if sg == FALSE && acc.is_some() {
                        continue;
                    }
                    let v = self.expr(f, alt, sg)?;
                    acc = Some(match acc {
                        None => v,
                        Some(rest) => self.mux(sel, v, rest),
                    });
                }
                acc.expect("choice with no alternatives")
            }
            IrExpr::Not(x) => {
                let v = self.expr(f, x, g)?;
                SVal::Bool(not(Self::boolean(&v)))
            }
            IrExpr::Neg(x) => {
                let v = self.expr(f, x, g)?;
                let b = self.int(&v);
                SVal::Int(self.aig.bv_neg(&b))
            }
            IrExpr::Binary { op, lhs, rhs } => self.binary(f, *op, lhs, rhs, g)?,
            IrExpr::Call { func, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(f, a, g)?);
                }
                self.call(*func, vals, g)?
            }
            IrExpr::Builtin { op, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(f, a, g)?);
                }
                if op.mutates() && g != TRUE {
                    return Err(self.split_on(g));
                }
                match builtin_eval(*op, &vals, &mut self.heap, &self.ctx) {
                    Ok(v) => v,
                    Err(SymIssue::Symbolic(l)) => return Err(self.split_on(l)),
                    Err(SymIssue::Trap(_)) => {
                        self.add_fail(g);
                        self.default_of(op.ret())
                    }
                }
            }
            IrExpr::Alloc(c) => {
                let slots = self.ctx.record_defaults.clone();
                SVal::Ref(vec![(TRUE, Ref::Obj(self.heap.alloc(HeapObj::Record { class: *c, slots })))])
            }
            IrExpr::ClassIdOf(x) => {
                let v = self.expr(f, x, g)?;
                let recs = self.records(&v, g);
                let mut acc = self.aig.bv_const(-1, self.width);
                for (og, a) in recs.into_iter().rev() {
                    let HeapObj::Record { class, .. } = &self.heap.objs[a] else { unreachable!() };
                    let c = self.aig.bv_const(*class as i64, self.width);
                    acc = self.aig.bv_ite(og, &c, &acc);
                }
                SVal::Int(acc)
            }
        })
    }

    fn binary(&mut self, f: &mut Frame, op: IrBinOp, lhs: &IrExpr, rhs: &IrExpr, g: Lit) -> R<SVal> {
        match op {
            IrBinOp::And | IrBinOp::Or => {
                let l = Self::boolean(&self.expr(f, lhs, g)?);
                let rg = if op == IrBinOp::And { self.aig.and(g, l) } else { self.aig.and(g, not(l)) };
                let r = if rg == FALSE { FALSE } else { Self::boolean(&self.expr(f, rhs, rg)?) };
                return Ok(SVal::Bool(if op == IrBinOp::And { self.aig.and(l, r) } else { self.aig.or(l, r) }));
            }
            _ => {}
        }
        let l = self.expr(f, lhs, g)?;
        let r = self.expr(f, rhs, g)?;
        let eq = |s: &mut Self, k: EqKind| -> Lit {
            match k {
                EqKind::Int => {
                    let (a, b) = (s.int(&l), s.int(&r));
                    s.aig.bv_eq(&a, &b)
                }
                EqKind::Bool => s.aig.xnor(Self::boolean(&l), Self::boolean(&r)),
                EqKind::Ref | EqKind::Str => {
                    let mut acc = FALSE;
                    for (ga, ra) in Self::refs(&l) {
                        for (gb, rb) in Self::refs(&r) {
                            if ra == rb {
                                let both = s.aig.and(ga, gb);
                                acc = s.aig.or(acc, both);
                            }
                        }
                    }
                    acc
                }
            }
        };
        Ok(match op {
            IrBinOp::Eq(k) => SVal::Bool(eq(self, k)),
            IrBinOp::Ne(k) => SVal::Bool(not(eq(self, k))),
            _ => {
                let (a, b) = (self.int(&l), self.int(&r));
                match op {
                    IrBinOp::Add => SVal::Int(self.aig.bv_add(&a, &b)),
                    IrBinOp::Sub => SVal::Int(self.aig.bv_sub(&a, &b)),
                    IrBinOp::Mul => SVal::Int(self.aig.bv_mul(&a, &b)),
                    IrBinOp::Div | IrBinOp::Rem => {
                        let zero = self.aig.bv_const(0, self.width);
                        let z = self.aig.bv_eq(&b, &zero);
                        let bad = self.aig.and(g, z);
                        self.add_fail(bad);
                        let (q, r) = self.aig.bv_sdivrem(&a, &b);
                        SVal::Int(if op == IrBinOp::Div { q } else { r })
                    }
                    IrBinOp::Lt => SVal::Bool(self.aig.bv_slt(&a, &b)),
                    IrBinOp::Le => SVal::Bool(self.aig.bv_sle(&a, &b)),
                    IrBinOp::Gt => SVal::Bool(self.aig.bv_slt(&b, &a)),
                    IrBinOp::Ge => SVal::Bool(self.aig.bv_sle(&b, &a)),
                    _ => unreachable!("handled above"),
                }
            }
        })
    }

    fn call(&mut self, func: FuncId, args: Vec<SVal>, g: Lit) -> R<SVal> {
        let fun = &self.prog.functions[func];
        if g == FALSE {
            return Ok(self.default_of(fun.ret));
        }
        if self.depth >= self.limits.max_depth {
            self.add_fail(g);
            return Ok(self.default_of(fun.ret));
        }
        self.check_size()?;
        let mut locals = args;
        for (_, ty) in &fun.locals[locals.len()..] {
            locals.push(self.default_of(*ty));
        }
        let mut frame = Frame { locals, iter: None, returned: FALSE, ret: None };
        self.depth += 1;
        let r = self.block(&mut frame, &fun.body, g);
        self.depth -= 1;
        r?;
        Ok(frame.ret.unwrap_or_else(|| self.default_of(fun.ret)))
    }

    fn block(&mut self, f: &mut Frame, body: &[IrInstr], g: Lit) -> R<()> {
        for i in body {
            let eff = self.aig.and(g, not(f.returned));
            if eff == FALSE {
                break;
            }
            self.instr(f, i, eff)?;
        }
        Ok(())
    }

    fn assign(&mut self, g: Lit, new: SVal, old: SVal) -> SVal {
        self.mux(g, new, old)
    }

    fn iteration(&mut self, f: &mut Frame, iter: u32, body: &[IrInstr], g: Lit) -> R<()> {
        let saved = f.iter.replace(iter);
        let r = self.block(f, body, g);
        f.iter = saved;
        r
    }

    fn instr(&mut self, f: &mut Frame, i: &IrInstr, g: Lit) -> R<()> {
        match i {
            IrInstr::Assign { target, value } => {
                let v = self.expr(f, value, g)?;
                match target {
                    LValue::Local(l) => {
                        let old = std::mem::replace(&mut f.locals[*l], SVal::Bool(FALSE));
                        f.locals[*l] = self.assign(g, v, old);
                    }
                    LValue::Static(s) => {
                        let old = std::mem::replace(&mut self.statics[*s], SVal::Bool(FALSE));
                        self.statics[*s] = self.assign(g, v, old);
                    }
                    LValue::Field { obj, slot } => {
                        let o = self.expr(f, obj, g)?;
                        for (og, a) in self.records(&o, g) {
                            let wg = self.aig.and(g, og);
                            let HeapObj::Record { slots, .. } = &mut self.heap.objs[a] else { unreachable!() };
                            let old = std::mem::replace(&mut slots[*slot], SVal::Bool(FALSE));
                            let old = self.fit(old);
                            let nv = self.assign(wg, v.clone(), old);
                            let HeapObj::Record { slots, .. } = &mut self.heap.objs[a] else { unreachable!() };
                            slots[*slot] = nv;
                        }
                    }
                }
            }
            IrInstr::Eval(e) => {
                self.expr(f, e, g)?;
            }
            IrInstr::If { cond, then, els } => {
                let c = Self::boolean(&self.expr(f, cond, g)?);
                let tg = self.aig.and(g, c);
                if tg != FALSE {
                    self.block(f, then, tg)?;
                }
                let eg = self.aig.and(g, not(c));
                if eg != FALSE {
                    self.block(f, els, eg)?;
                }
            }
            IrInstr::While { cond, body } => {
                let mut lg = g;
                let mut count = 0;
                loop {
                    lg = self.aig.and(lg, not(f.returned));
                    if lg == FALSE {
                        break;
                    }
                    let c = Self::boolean(&self.expr(f, cond, lg)?);
                    let bg = self.aig.and(lg, c);
                    if bg == FALSE {
                        break;
                    }
                    if count == self.limits.loop_bound {
                        // still looping at the cap
                        self.add_fail(bg);
                        break;
                    }
                    count += 1;
                    self.block(f, body, bg)?;
                    lg = bg;
                }
            }
            IrInstr::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.expr(f, e, g)?),
                    None => None,
                };
                if let Some(v) = v {
                    f.ret = Some(match f.ret.take() {
                        None => v,
                        Some(old) => self.mux(g, v, old),
                    });
                }
                f.returned = self.aig.or(f.returned, g);
            }
            IrInstr::Assert { cond, .. } => {
                let c = Self::boolean(&self.expr(f, cond, g)?);
                let bad = self.aig.and(g, not(c));
                self.add_fail(bad);
            }
            IrInstr::Repeat { repeat, body } => {
                for iter in 1..=self.inputs.counts[*repeat] {
                    let eff = self.aig.and(g, not(f.returned));
                    if eff == FALSE {
                        break;
                    }
                    self.iteration(f, iter, body, eff)?;
                }
            }
            IrInstr::Iteration { iter, body, .. } => self.iteration(f, *iter, body, g)?,
            IrInstr::Trap(_) => self.add_fail(g),
        }
        Ok(())
    }
}

/// Executes one leaf: the harness with the inputs in `fixed` replaced by
/// constants.
pub fn run_leaf(
    aig: &mut Aig,
    prog: &IrProgram,
    inputs: &Inputs,
    fixed: &BTreeMap<u32, bool>,
    harness: usize,
    limits: &Limits,
    node_cap: usize,
) -> Result<Leaf, SymError> {
    let width = limits.int_width as usize;
    let defaults: Vec<SVal> = {
        let tmp = Aig::new();
        prog.slots
            .iter()
            .map(|s| match Const::default_for(s.ty) {
                Const::Int(v) => SVal::Int(tmp.bv_const(v, width)),
                Const::Bool(_) => SVal::Bool(FALSE),
                _ => SVal::Ref(vec![(TRUE, Ref::Null)]),
            })
            .collect()
    };
    let mut ex = Exec {
        aig,
        prog,
        inputs,
        fixed,
        limits,
        width,
        heap: Heap::default(),
        statics: defaults.clone(),
        ctx: BuiltinCtx { char_token: prog.char_token, record_defaults: defaults },
        fail: FALSE,
        depth: 0,
        node_cap,
    };
    ex.call(prog.static_init, Vec::new(), TRUE)?;
    let h = &prog.harnesses[harness];
    let fun = &prog.functions[h.func];
    let locals = fun.locals.iter().map(|(_, t)| ex.default_of(*t)).collect();
    let mut frame = Frame { locals, iter: None, returned: FALSE, ret: None };
    ex.depth = 1;
    ex.block(&mut frame, &fun.body, TRUE)?;
    let mut objectives = Vec::new();
    for &o in &h.objectives {
        let v = ex.expr(&mut frame, &prog.objectives[o].expr, TRUE)?;
        objectives.push(ex.int(&v));
    }
    Ok(Leaf { ok: not(ex.fail), objectives })
}

/// Harness formula and objective values over all leaves.
pub struct Encoded {
    pub ok: Lit,
    pub objectives: Vec<Bv>,
    pub leaves: usize,
}

pub fn encode_harness(
    aig: &mut Aig,
    prog: &IrProgram,
    inputs: &Inputs,
    harness: usize,
    limits: &Limits,
    max_leaves: usize,
    node_cap: usize,
) -> Result<Encoded, String> {
    let mut stack = vec![BTreeMap::new()];
    let mut leaves: Vec<(Lit, Leaf)> = Vec::new();
    while let Some(fixed) = stack.pop() {
        match run_leaf(aig, prog, inputs, &fixed, harness, limits, node_cap) {
            Ok(leaf) => {
                let conds: Vec<Lit> = fixed
                    .iter()
                    .map(|(&i, &b)| {
                        let l = aig.input_lit(i);
                        if b {
                            l
                        } else {
                            not(l)
                        }
                    })
                    .collect();
                let cond = aig.and_all(conds);
                leaves.push((cond, leaf));
            }
            Err(SymError::Split(v)) => {
                if fixed.contains_key(&v) {
                    return Err(format!("split on already fixed input {}", v));
                }
                if leaves.len() + stack.len() + 2 > max_leaves {
                    return Err(format!("harness `{}` needs more than {} case splits", prog.harnesses[harness].name, max_leaves));
                }
                for b in [true, false] {
                    let mut next = fixed.clone();
                    next.insert(v, b);
                    stack.push(next);
                }
            }
            Err(SymError::TooLarge(m)) => return Err(m),
        }
    }
    let mut ok = TRUE;
    for (cond, leaf) in &leaves {
        let imp = aig.implies(*cond, leaf.ok);
        ok = aig.and(ok, imp);
    }
    let nobj = prog.harnesses[harness].objectives.len();
    let mut objectives = Vec::with_capacity(nobj);
    for k in 0..nobj {
        let mut acc = leaves.last().expect("at least one leaf").1.objectives[k].clone();
        for (cond, leaf) in leaves.iter().rev().skip(1) {
            acc = aig.bv_ite(*cond, &leaf.objectives[k], &acc);
        }
        objectives.push(acc);
    }
    Ok(Encoded { ok, objectives, leaves: leaves.len() })
}
