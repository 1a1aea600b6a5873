use std::sync::Arc;

use indexmap::IndexMap;

use crate::classtable::{ClassId, TypeTag};
use crate::span::SourceSpan;
use crate::stdlib::Builtin;
use crate::unknowns::UnknownRegistry;

pub type FuncId = usize;
pub type LocalId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Null,
}

impl Const {
    /// Default value of a slot or local of type `ty`.
    pub fn default_for(ty: TypeTag) -> Const {
        match ty {
            TypeTag::Int | TypeTag::Char => Const::Int(0),
            TypeTag::Bool => Const::Bool(false),
            _ => Const::Null,
        }
    }
}

/// What `==` compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EqKind {
    Int,
    Bool,
    /// Reference identity.
    Ref,
    /// String contents; `null` equals only `null`.
    Str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IrBinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq(EqKind),
    Ne(EqKind),
    /// Short-circuit.
    And,
    /// Short-circuit.
    Or,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrExpr {
    Const(Const),
    Local(LocalId),
    Field { obj: Box<IrExpr>, slot: usize },
    Static(usize),
    /// Registry hole; a template hole reads the instance of the enclosing
    /// iteration.
    Hole(usize),
    /// Registry choice; only the selected alternative is evaluated.
    Choice { index: usize, alts: Vec<IrExpr> },
    Not(Box<IrExpr>),
    Neg(Box<IrExpr>),
    Binary { op: IrBinOp, lhs: Box<IrExpr>, rhs: Box<IrExpr> },
    Call { func: FuncId, args: Vec<IrExpr> },
    Builtin { op: Builtin, args: Vec<IrExpr> },
    /// Fresh record of the given class with default slots.
    Alloc(ClassId),
    ClassIdOf(Box<IrExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LValue {
    Local(LocalId),
    Field { obj: IrExpr, slot: usize },
    Static(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrInstr {
    Assign { target: LValue, value: IrExpr },
    Eval(IrExpr),
    If { cond: IrExpr, then: Vec<IrInstr>, els: Vec<IrInstr> },
    While { cond: IrExpr, body: Vec<IrInstr> },
    Return(Option<IrExpr>),
    Assert { cond: IrExpr, span: SourceSpan },
    /// A `minrepeat` block; its count comes from the assignment.
    Repeat { repeat: usize, body: Vec<IrInstr> },
    /// One unrolled copy of a `minrepeat` body.
    Iteration { repeat: usize, iter: u32, body: Vec<IrInstr> },
    Trap(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuncKind {
    Method,
    Ctor,
    Dispatch,
    StaticInit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrFunction {
    pub name: String,
    pub kind: FuncKind,
    /// Number of parameters, `self` included; they are the first locals.
    pub params: usize,
    pub locals: Vec<(String, TypeTag)>,
    pub ret: TypeTag,
    pub body: Vec<IrInstr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Harness {
    /// Mangled name, e.g. `test_Test`.
    pub name: String,
    pub func: FuncId,
    pub class: String,
    pub method: String,
    /// Indices into [`IrProgram::objectives`].
    pub objectives: Vec<usize>,
}

/// A `minimize(e)` call, evaluated at the end of its harness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub name: String,
    pub harness: usize,
    pub expr: IrExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub owner: String,
    pub name: String,
    pub ty: TypeTag,
    pub is_static: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrProgram {
    pub functions: Vec<IrFunction>,
    pub func_ids: IndexMap<String, FuncId>,
    pub harnesses: Vec<Harness>,
    pub objectives: Vec<Objective>,
    /// Runs every static initializer; called before each harness.
    pub static_init: FuncId,
    pub slots: Vec<Slot>,
    pub class_names: Vec<String>,
    /// Class id and `id` slot of the char-token class.
    pub char_token: Option<(ClassId, usize)>,
    pub registry: UnknownRegistry,
}

impl IrProgram {
    pub fn func(&self, name: &str) -> Option<&IrFunction> {
        self.func_ids.get(name).map(|&i| &self.functions[i])
    }

    pub fn harness(&self, name: &str) -> Option<usize> {
        self.harnesses.iter().position(|h| h.name == name)
    }

    /// Default value of every slot, in layout order.
    pub fn slot_defaults(&self) -> Vec<Const> {
        self.slots.iter().map(|s| Const::default_for(s.ty)).collect()
    }
}

/// `n` unrolled copies of a `minrepeat` body, numbered from 1.
pub fn lower_minrepeat(repeat: usize, body: &[IrInstr], n: u32) -> Vec<IrInstr> {
    (1..=n).map(|iter| IrInstr::Iteration { repeat, iter, body: body.to_vec() }).collect()
}
