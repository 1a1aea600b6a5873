use crate::frontend::ast::*;
use crate::unknowns::*;

use super::names::FlatNames;

/// Search bounds that shape the registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownBounds {
    /// Minimum width of integer holes.
    pub hole_bits: u32,
    /// Largest count tried for each `minrepeat`.
    pub unroll_max: u32,
}

impl Default for UnknownBounds {
    fn default() -> Self {
        UnknownBounds { hole_bits: 5, unroll_max: 8 }
    }
}

/// Bits needed to write `v` in binary.
fn bits_for(v: i64) -> u32 {
    64 - v.unsigned_abs().leading_zeros()
}

/// Largest literal width in the program: ints, chars and string characters.
struct LiteralWidth(u32);

impl VisitMut for LiteralWidth {
    fn visit_expr(&mut self, expr: &mut Expr) {
        let w = match &expr.kind {
            ExprKind::Int(v) => bits_for(*v),
            ExprKind::Char(c) => bits_for(*c as i64),
            ExprKind::Str(s) => s.chars().map(|c| bits_for(c as i64)).max().unwrap_or(0),
            _ => 0,
        };
        self.0 = self.0.max(w);
        walk_expr(self, expr)
    }
}

struct Assign {
    names: FlatNames,
    owners: Vec<String>,
    repeats: Vec<usize>,
    bits: u32,
    unroll_max: u32,
    reg: UnknownRegistry,
}

impl Assign {
    fn owner(&self) -> String {
        self.owners.last().cloned().unwrap_or_default()
    }

    fn next_id(&self, kind: UnknownKind) -> UnknownId {
        let n = match kind {
            UnknownKind::Hole => self.reg.holes.len(),
            UnknownKind::Choice => self.reg.choices.len(),
            UnknownKind::Repeat => self.reg.repeats.len(),
        };
        UnknownId::new(kind, n as u32 + 1, self.owner())
    }
}

impl VisitMut for Assign {
    fn visit_type_decl(&mut self, decl: &mut TypeDecl) {
        let flat = match self.owners.last() {
            None => decl.name.clone(),
            Some(outer) => {
                let outer = outer.clone();
                self.names.inner(&decl.name, &outer)
            }
        };
        self.owners.push(flat);
        walk_type_decl(self, decl);
        self.owners.pop();
    }

    fn visit_stmt(&mut self, stmt: &mut Stmt) {
        if let StmtKind::MinRepeat { id, body } = &mut stmt.kind {
            let rid = self.next_id(UnknownKind::Repeat);
            self.reg.repeats.push(RepeatInfo { id: rid.clone(), max: self.unroll_max });
            *id = Some(rid);
            self.repeats.push(self.reg.repeats.len() - 1);
            self.visit_block(body);
            self.repeats.pop();
            return;
        }
        walk_stmt(self, stmt)
    }

    fn visit_expr(&mut self, expr: &mut Expr) {
        let repeat = self.repeats.last().copied();
        match &mut expr.kind {
            ExprKind::Hole { id } => {
                let hid = self.next_id(UnknownKind::Hole);
                self.reg.holes.push(HoleInfo { id: hid.clone(), bits: self.bits, is_bool: false, repeat });
                *id = Some(hid);
            }
            ExprKind::Choice { id, alts } => {
                let cid = self.next_id(UnknownKind::Choice);
                self.reg.choices.push(ChoiceInfo { id: cid.clone(), arity: alts.len() as u32, repeat });
                *id = Some(cid);
            }
            ExprKind::New { ty, body: Some(_), .. } => {
                let anon = self.names.anon(&ty.name);
                self.owners.push(anon);
                walk_expr(self, expr);
                self.owners.pop();
                return;
            }
            _ => {}
        }
        walk_expr(self, expr)
    }
}

/// Numbers every hole, choice and `minrepeat` in file, declaration and
/// pre-order, and builds the registry.
///
/// Integer holes are as wide as the widest literal in the program, and never
/// narrower than `bounds.hole_bits`.
pub fn assign_unknown_ids(ast: &SketchAst, bounds: UnknownBounds) -> (SketchAst, UnknownRegistry) {
    let mut out = ast.clone();
    let mut width = LiteralWidth(0);
    walk_ast(&mut width, &mut out);
    let bits = bounds.hole_bits.max(width.0).min(31);
    let mut pass = Assign {
        names: FlatNames::new(ast),
        owners: Vec::new(),
        repeats: Vec::new(),
        bits,
        unroll_max: bounds.unroll_max,
        reg: UnknownRegistry::default(),
    };
    walk_ast(&mut pass, &mut out);
    (out, pass.reg)
}
