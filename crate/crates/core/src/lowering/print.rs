use std::fmt::Write as _;

use super::ir::*;
use crate::unknowns::instance_name;

fn expr(p: &IrProgram, f: &IrFunction, e: &IrExpr) -> String {
    match e {
        IrExpr::Const(Const::Int(v)) => v.to_string(),
        IrExpr::Const(Const::Bool(b)) => b.to_string(),
        IrExpr::Const(Const::Str(s)) => format!("{:?}", s),
        IrExpr::Const(Const::Null) => "null".into(),
        IrExpr::Local(i) => format!("%{}", f.locals.get(*i).map_or("?", |l| l.0.as_str())),
        IrExpr::Field { obj, slot } => format!("{}.{}", expr(p, f, obj), slot_name(p, *slot)),
        IrExpr::Static(slot) => format!("@{}", slot_name(p, *slot)),
        IrExpr::Hole(i) => p.registry.holes[*i].id.name.clone(),
        IrExpr::Choice { index, alts } => {
            let alts: Vec<String> = alts.iter().map(|a| expr(p, f, a)).collect();
            format!("{}{{| {} |}}", p.registry.choices[*index].id.name, alts.join(", "))
        }
        IrExpr::Not(x) => format!("!{}", expr(p, f, x)),
        IrExpr::Neg(x) => format!("-{}", expr(p, f, x)),
        IrExpr::Binary { op, lhs, rhs } => format!("({} {} {})", expr(p, f, lhs), op_name(*op), expr(p, f, rhs)),
        IrExpr::Call { func, args } => {
            let args: Vec<String> = args.iter().map(|a| expr(p, f, a)).collect();
            format!("{}({})", p.functions[*func].name, args.join(", "))
        }
        IrExpr::Builtin { op, args } => {
            let args: Vec<String> = args.iter().map(|a| expr(p, f, a)).collect();
            format!("{}({})", op.name(), args.join(", "))
        }
        IrExpr::Alloc(c) => format!("alloc {}", p.class_names[*c as usize]),
        IrExpr::ClassIdOf(x) => format!("classid({})", expr(p, f, x)),
    }
}

fn slot_name(p: &IrProgram, slot: usize) -> String {
    let s = &p.slots[slot];
    format!("{}.{}", s.owner, s.name)
}

fn op_name(op: IrBinOp) -> &'static str {
    match op {
        IrBinOp::Add => "+",
        IrBinOp::Sub => "-",
        IrBinOp::Mul => "*",
        IrBinOp::Div => "/",
        IrBinOp::Rem => "%",
        IrBinOp::Lt => "<",
        IrBinOp::Le => "<=",
        IrBinOp::Gt => ">",
        IrBinOp::Ge => ">=",
        IrBinOp::Eq(EqKind::Ref) => "==ref",
        IrBinOp::Eq(EqKind::Str) => "==str",
        IrBinOp::Eq(_) => "==",
        IrBinOp::Ne(EqKind::Ref) => "!=ref",
        IrBinOp::Ne(EqKind::Str) => "!=str",
        IrBinOp::Ne(_) => "!=",
        IrBinOp::And => "&&",
        IrBinOp::Or => "||",
    }
}

fn block(p: &IrProgram, f: &IrFunction, body: &[IrInstr], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for i in body {
        match i {
            IrInstr::Assign { target, value } => {
                let t = match target {
                    LValue::Local(l) => expr(p, f, &IrExpr::Local(*l)),
                    LValue::Static(s) => expr(p, f, &IrExpr::Static(*s)),
                    LValue::Field { obj, slot } => format!("{}.{}", expr(p, f, obj), slot_name(p, *slot)),
                };
                let _ = writeln!(out, "{}{} = {}", pad, t, expr(p, f, value));
            }
            IrInstr::Eval(e) => {
                let _ = writeln!(out, "{}{}", pad, expr(p, f, e));
            }
            IrInstr::If { cond, then, els } => {
                let _ = writeln!(out, "{}if {}", pad, expr(p, f, cond));
                block(p, f, then, depth + 1, out);
                if !els.is_empty() {
                    let _ = writeln!(out, "{}else", pad);
                    block(p, f, els, depth + 1, out);
                }
            }
            IrInstr::While { cond, body } => {
                let _ = writeln!(out, "{}while {}", pad, expr(p, f, cond));
                block(p, f, body, depth + 1, out);
            }
            IrInstr::Return(None) => {
                let _ = writeln!(out, "{}return", pad);
            }
            IrInstr::Return(Some(e)) => {
                let _ = writeln!(out, "{}return {}", pad, expr(p, f, e));
            }
            IrInstr::Assert { cond, span } => {
                let _ = writeln!(out, "{}assert {}  ; {}", pad, expr(p, f, cond), span);
            }
            IrInstr::Repeat { repeat, body } => {
                let _ = writeln!(out, "{}repeat {}", pad, p.registry.repeats[*repeat].id.name);
                block(p, f, body, depth + 1, out);
            }
            IrInstr::Iteration { repeat, iter, body } => {
                let name = instance_name(&p.registry.repeats[*repeat].id.name, Some(*iter));
                let _ = writeln!(out, "{}iteration {}", pad, name);
                block(p, f, body, depth + 1, out);
            }
            IrInstr::Trap(msg) => {
                let _ = writeln!(out, "{}trap {:?}", pad, msg);
            }
        }
    }
}

/// Human-readable listing of a lowered program.
pub fn print_program(p: &IrProgram) -> String {
    let mut out = String::new();
    for (i, s) in p.slots.iter().enumerate() {
        let kind = if s.is_static { "static " } else { "" };
        let _ = writeln!(out, "slot {} {}{}.{} : {:?}", i, kind, s.owner, s.name, s.ty);
    }
    for h in &p.harnesses {
        let _ = writeln!(out, "harness {}", h.name);
    }
    for o in &p.objectives {
        let _ = writeln!(out, "objective {} in {}", o.name, p.harnesses[o.harness].name);
    }
    for f in &p.functions {
        let params: Vec<String> =
            f.locals[..f.params].iter().map(|(n, t)| format!("{}: {:?}", n, t)).collect();
        let _ = writeln!(out, "\nfn {}({}) -> {:?}  ; {:?}", f.name, params.join(", "), f.ret, f.kind);
        block(p, f, &f.body, 1, &mut out);
    }
    out
}
