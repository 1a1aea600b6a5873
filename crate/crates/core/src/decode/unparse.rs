use indexmap::IndexMap;

use crate::frontend::ast::*;

/// What to keep when printing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrintMode {
    /// Everything, including sketch modifiers and unknowns.
    Sketch,
    /// Plain output: `harness` and `generator` modifiers are dropped.
    Concrete,
}

const INDENT: &str = "    ";

const PREC_ASSIGN: u8 = 0;
const PREC_UNARY: u8 = 7;
const PREC_POSTFIX: u8 = 8;
const PREC_ATOM: u8 = 9;

pub struct Printer {
    out: String,
    indent: usize,
    mode: PrintMode,
}

impl Printer {
    pub fn new(mode: PrintMode) -> Self {
        Printer { out: String::new(), indent: 0, mode }
    }

    pub fn finish(self) -> String {
        self.out
    }

    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str(INDENT);
        }
    }

    fn modifiers(&mut self, mods: &Modifiers) {
        for m in &mods.0 {
            if self.mode == PrintMode::Concrete && matches!(m, Modifier::Harness | Modifier::Generator) {
                continue;
            }
            self.out.push_str(m.as_str());
            self.out.push(' ');
        }
    }

    pub fn unit(&mut self, unit: &CompilationUnit) {
        for (i, decl) in unit.types.iter().enumerate() {
            if i > 0 {
                self.out.push('\n');
            }
            self.type_decl(decl);
        }
    }

    pub fn type_decl(&mut self, decl: &TypeDecl) {
        self.line_start();
        self.modifiers(&decl.modifiers);
        match decl.kind {
            TypeKind::Class => {
                self.out.push_str("class ");
                self.out.push_str(&decl.name);
                if let Some(ext) = &decl.extends {
                    self.out.push_str(" extends ");
                    self.out.push_str(&ext.to_string());
                }
                if !decl.interfaces.is_empty() {
                    self.out.push_str(" implements ");
                    self.type_list(&decl.interfaces);
                }
            }
            TypeKind::Interface => {
                self.out.push_str("interface ");
                self.out.push_str(&decl.name);
                if !decl.interfaces.is_empty() {
                    self.out.push_str(" extends ");
                    self.type_list(&decl.interfaces);
                }
            }
        }
        self.out.push(' ');
        self.members_block(&decl.members);
        self.out.push('\n');
    }

    fn type_list(&mut self, list: &[TypeRef]) {
        let names: Vec<String> = list.iter().map(|t| t.to_string()).collect();
        self.out.push_str(&names.join(", "));
    }

    /// Prints `{ members }`, leaving the cursor after the closing brace.
    fn members_block(&mut self, members: &[Member]) {
        if members.is_empty() {
            self.out.push_str("{ }");
            return;
        }
        self.out.push_str("{\n");
        self.indent += 1;
        for m in members {
            self.member(m);
        }
        self.indent -= 1;
        self.line_start();
        self.out.push('}');
    }

    fn params(&mut self, params: &[Param]) {
        self.out.push('(');
        let list: Vec<String> = params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
        self.out.push_str(&list.join(", "));
        self.out.push(')');
    }

    fn member(&mut self, member: &Member) {
        match member {
            Member::Type(t) => self.type_decl(t),
            Member::Field(f) => {
                self.line_start();
                self.modifiers(&f.modifiers);
                self.out.push_str(&format!("{} {}", f.ty, f.name));
                if let Some(init) = &f.init {
                    self.out.push_str(" = ");
                    self.expr(init, PREC_ASSIGN);
                }
                self.out.push_str(";\n");
            }
            Member::Method(m) => {
                self.line_start();
                self.modifiers(&m.modifiers);
                self.out.push_str(&format!("{} {}", m.ret, m.name));
                self.params(&m.params);
                match &m.body {
                    Some(body) => {
                        self.out.push(' ');
                        self.block(body);
                        self.out.push('\n');
                    }
                    None => self.out.push_str(";\n"),
                }
            }
            Member::Ctor(c) => {
                self.line_start();
                self.modifiers(&c.modifiers);
                self.out.push_str(&c.name);
                self.params(&c.params);
                self.out.push(' ');
                self.block(&c.body);
                self.out.push('\n');
            }
        }
    }

    /// Prints `{ .. }` starting at the cursor; no trailing newline.
    fn block(&mut self, block: &Block) {
        if block.stmts.is_empty() {
            self.out.push_str("{ }");
            return;
        }
        self.out.push_str("{\n");
        self.indent += 1;
        for s in &block.stmts {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line_start();
        self.out.push('}');
    }

    /// Prints the body of an `if`/`while`/`else` after its header.
    fn nested(&mut self, stmt: &Stmt) {
        if let StmtKind::Block(b) = &stmt.kind {
            self.out.push(' ');
            self.block(b);
        } else {
            self.out.push('\n');
            self.indent += 1;
            self.stmt_inline(stmt);
            self.indent -= 1;
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        self.stmt_inline(stmt);
    }

    /// One statement on its own line(s), ending with a newline.
    fn stmt_inline(&mut self, stmt: &Stmt) {
        self.line_start();
        match &stmt.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::Local { ty, name, init } => {
                self.out.push_str(&format!("{} {}", ty, name));
                if let Some(e) = init {
                    self.out.push_str(" = ");
                    self.expr(e, PREC_ASSIGN);
                }
                self.out.push(';');
            }
            StmtKind::If { cond, then, els } => {
                self.out.push_str("if (");
                self.expr(cond, PREC_ASSIGN);
                self.out.push(')');
                self.nested(then);
                if let Some(e) = els {
                    if matches!(then.kind, StmtKind::Block(_)) {
                        self.out.push_str(" else");
                    } else {
                        self.line_start();
                        self.out.push_str("else");
                    }
                    self.nested(e);
                }
                if !matches!(els.as_ref().map(|e| &e.kind).unwrap_or(&then.kind), StmtKind::Block(_)) {
                    // a non-block body already ended its line
                    return;
                }
            }
            StmtKind::While { cond, body } => {
                self.out.push_str("while (");
                self.expr(cond, PREC_ASSIGN);
                self.out.push(')');
                self.nested(body);
                if !matches!(body.kind, StmtKind::Block(_)) {
                    return;
                }
            }
            StmtKind::Return(e) => {
                self.out.push_str("return");
                if let Some(e) = e {
                    self.out.push(' ');
                    self.expr(e, PREC_ASSIGN);
                }
                self.out.push(';');
            }
            StmtKind::Expr(e) => {
                self.expr(e, PREC_ASSIGN);
                self.out.push(';');
            }
            StmtKind::Assert(e) => {
                self.out.push_str("assert ");
                self.expr(e, PREC_ASSIGN);
                self.out.push(';');
            }
            StmtKind::MinRepeat { body, .. } => {
                self.out.push_str("minrepeat ");
                self.block(body);
            }
            StmtKind::Empty => self.out.push(';'),
        }
        self.out.push('\n');
    }

    fn args(&mut self, args: &[Expr]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a, PREC_ASSIGN);
        }
        self.out.push(')');
    }

    pub fn expr(&mut self, e: &Expr, min_prec: u8) {
        let prec = expr_prec(e);
        let paren = prec < min_prec;
        if paren {
            self.out.push('(');
        }
        match &e.kind {
            ExprKind::Int(v) => self.out.push_str(&v.to_string()),
            ExprKind::Bool(b) => self.out.push_str(if *b { "true" } else { "false" }),
            ExprKind::Str(s) => self.out.push_str(&quote_str(s)),
            ExprKind::Char(c) => self.out.push_str(&quote_char(*c)),
            ExprKind::Null => self.out.push_str("null"),
            ExprKind::This => self.out.push_str("this"),
            ExprKind::Super => self.out.push_str("super"),
            ExprKind::Name(n) => self.out.push_str(n),
            ExprKind::Field { target, name } => {
                self.expr(target, PREC_POSTFIX);
                self.out.push('.');
                self.out.push_str(name);
            }
            ExprKind::Call { target, name, args } => {
                if let Some(t) = target {
                    self.expr(t, PREC_POSTFIX);
                    self.out.push('.');
                }
                self.out.push_str(name);
                self.args(args);
            }
            ExprKind::SuperCall { args } => {
                self.out.push_str("super");
                self.args(args);
            }
            ExprKind::New { ty, args, body } => {
                self.out.push_str("new ");
                self.out.push_str(&ty.to_string());
                self.args(args);
                if let Some(members) = body {
                    self.out.push(' ');
                    self.members_block(members);
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                self.expr(lhs, p);
                self.out.push(' ');
                self.out.push_str(op.as_str());
                self.out.push(' ');
                self.expr(rhs, p + 1);
            }
            ExprKind::Unary { op, operand } => {
                self.out.push(match op {
                    UnOp::Not => '!',
                    UnOp::Neg => '-',
                });
                let before = self.out.len();
                self.expr(operand, PREC_UNARY);
                if self.out[before..].starts_with('-') {
                    self.out.insert(before, ' ');
                }
            }
            ExprKind::Assign { target, value } => {
                self.expr(target, PREC_POSTFIX);
                self.out.push_str(" = ");
                self.expr(value, PREC_ASSIGN);
            }
            ExprKind::Hole { .. } => self.out.push_str("??"),
            ExprKind::Choice { alts, .. } => {
                self.out.push_str("{| ");
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(a, PREC_ASSIGN);
                }
                self.out.push_str(" |}");
            }
        }
        if paren {
            self.out.push(')');
        }
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Assign { .. } => PREC_ASSIGN,
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => PREC_UNARY,
        ExprKind::Int(v) if *v < 0 => PREC_UNARY,
        ExprKind::Field { .. } | ExprKind::Call { .. } => PREC_POSTFIX,
        _ => PREC_ATOM,
    }
}

fn escape_char(c: char, quote: char, out: &mut String) {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        '\0' => out.push_str("\\0"),
        '\\' => out.push_str("\\\\"),
        c if c == quote => {
            out.push('\\');
            out.push(c);
        }
        c => out.push(c),
    }
}

fn quote_str(s: &str) -> String {
    let mut out = String::from('"');
    for c in s.chars() {
        escape_char(c, '"', &mut out);
    }
    out.push('"');
    out
}

fn quote_char(c: char) -> String {
    let mut out = String::from('\'');
    escape_char(c, '\'', &mut out);
    out.push('\'');
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut p = Printer::new(PrintMode::Sketch);
    p.expr(e, PREC_ASSIGN);
    p.finish()
}

pub fn print_unit(unit: &CompilationUnit, mode: PrintMode) -> String {
    let mut p = Printer::new(mode);
    p.unit(unit);
    p.finish()
}

/// Source text per input file, in input order. Sketch-only modifiers are
/// dropped; the AST is expected to be free of unknowns.
pub fn unparse(ast: &SketchAst) -> IndexMap<String, String> {
    ast.units.iter().map(|u| (u.file.clone(), print_unit(u, PrintMode::Concrete))).collect()
}

/// Like [`unparse`] but keeps every sketch construct.
pub fn unparse_sketch(ast: &SketchAst) -> IndexMap<String, String> {
    ast.units.iter().map(|u| (u.file.clone(), print_unit(u, PrintMode::Sketch))).collect()
}
