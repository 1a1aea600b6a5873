use super::ast::*;
use super::lexer::{Token, TokenKind};
use super::FrontendError;
use crate::span::SourceSpan;

pub struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    file: String,
}

type PResult<T> = Result<T, FrontendError>;

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], file: &str) -> Self {
        Parser { toks, pos: 0, file: file.to_string() }
    }

    fn peek(&self, ahead: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek(0) == Some(kind)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn span(&self) -> SourceSpan {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) => t.span.clone(),
            None => SourceSpan::new(self.file.as_str().into(), 1, 1, 0),
        }
    }

    fn error(&self, expected: impl Into<String>) -> FrontendError {
        let found = match self.toks.get(self.pos) {
            Some(t) => format!("`{}`", t.kind),
            None => "end of input".to_string(),
        };
        FrontendError::Parse { span: self.span(), expected: expected.into(), found }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<SourceSpan> {
        if self.at(&kind) {
            let span = self.span();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.error(format!("`{}`", kind)))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek(0) {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error("identifier")),
        }
    }

    pub fn parse_unit(&mut self) -> PResult<CompilationUnit> {
        let mut types = Vec::new();
        while self.peek(0).is_some() {
            if self.eat(&TokenKind::Semi) {
                continue;
            }
            let span = self.span();
            let mods = self.modifiers();
            types.push(self.type_decl(mods, span)?);
        }
        Ok(CompilationUnit { file: self.file.clone(), types })
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut mods = Modifiers::default();
        loop {
            let m = match self.peek(0) {
                Some(TokenKind::Public) => Modifier::Public,
                Some(TokenKind::Private) => Modifier::Private,
                Some(TokenKind::Protected) => Modifier::Protected,
                Some(TokenKind::Static) => Modifier::Static,
                Some(TokenKind::Final) => Modifier::Final,
                Some(TokenKind::Abstract) => Modifier::Abstract,
                Some(TokenKind::Harness) => Modifier::Harness,
                Some(TokenKind::Generator) => Modifier::Generator,
                _ => return mods,
            };
            self.pos += 1;
            mods.0.push(m);
        }
    }

    fn type_decl(&mut self, modifiers: Modifiers, span: SourceSpan) -> PResult<TypeDecl> {
        let kind = if self.eat(&TokenKind::Class) {
            TypeKind::Class
        } else if self.eat(&TokenKind::Interface) {
            TypeKind::Interface
        } else {
            return Err(self.error("`class` or `interface`"));
        };
        let name = self.ident()?;
        let mut extends = None;
        let mut interfaces = Vec::new();
        match kind {
            TypeKind::Class => {
                if self.eat(&TokenKind::Extends) {
                    extends = Some(self.type_ref()?);
                }
                if self.eat(&TokenKind::Implements) {
                    interfaces = self.type_list()?;
                }
            }
            TypeKind::Interface => {
                if self.eat(&TokenKind::Extends) {
                    interfaces = self.type_list()?;
                }
            }
        }
        let members = self.class_body(&name)?;
        Ok(TypeDecl { kind, modifiers, name, extends, interfaces, members, span })
    }

    fn type_list(&mut self) -> PResult<Vec<TypeRef>> {
        let mut list = vec![self.type_ref()?];
        while self.eat(&TokenKind::Comma) {
            list.push(self.type_ref()?);
        }
        Ok(list)
    }

    fn class_body(&mut self, class_name: &str) -> PResult<Vec<Member>> {
        self.expect(TokenKind::LBrace)?;
        let mut members = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.peek(0).is_none() {
                return Err(self.error("`}`"));
            }
            if self.eat(&TokenKind::Semi) {
                continue;
            }
            self.member(class_name, &mut members)?;
        }
        Ok(members)
    }

    fn member(&mut self, class_name: &str, out: &mut Vec<Member>) -> PResult<()> {
        let span = self.span();
        let modifiers = self.modifiers();
        if matches!(self.peek(0), Some(TokenKind::Class) | Some(TokenKind::Interface)) {
            out.push(Member::Type(self.type_decl(modifiers, span)?));
            return Ok(());
        }
        if let (Some(TokenKind::Ident(n)), Some(TokenKind::LParen)) = (self.peek(0), self.peek(1)) {
            if n == class_name {
                let name = self.ident()?;
                let params = self.params()?;
                let body = self.block()?;
                out.push(Member::Ctor(CtorDecl { modifiers, name, params, body, span }));
                return Ok(());
            }
        }
        let ty = self.type_ref()?;
        let name = self.ident()?;
        if self.at(&TokenKind::LParen) {
            let params = self.params()?;
            let body = if self.eat(&TokenKind::Semi) { None } else { Some(self.block()?) };
            out.push(Member::Method(MethodDecl { modifiers, ret: ty, name, params, body, span }));
            return Ok(());
        }
        let mut name = name;
        let mut field_span = span;
        loop {
            let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
            out.push(Member::Field(FieldDecl {
                modifiers: modifiers.clone(),
                ty: ty.clone(),
                name,
                init,
                span: field_span,
            }));
            if self.eat(&TokenKind::Comma) {
                field_span = self.span();
                name = self.ident()?;
            } else {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                let span = self.span();
                // `final` on parameters is accepted and dropped
                self.eat(&TokenKind::Final);
                let ty = self.type_ref()?;
                let name = self.ident()?;
                params.push(Param { ty, name, span });
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma)?;
            }
        }
        Ok(params)
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let span = self.span();
        let name = match self.peek(0) {
            Some(TokenKind::IntKw) => "int".to_string(),
            Some(TokenKind::Boolean) => "boolean".to_string(),
            Some(TokenKind::CharKw) => "char".to_string(),
            Some(TokenKind::Void) => "void".to_string(),
            Some(TokenKind::Ident(_)) => {
                let mut name = self.ident()?;
                while self.at(&TokenKind::Dot) && matches!(self.peek(1), Some(TokenKind::Ident(_))) {
                    self.pos += 1;
                    name.push('.');
                    name.push_str(&self.ident()?);
                }
                let mut args = Vec::new();
                if self.eat(&TokenKind::Lt) {
                    args = self.type_list()?;
                    self.expect(TokenKind::Gt)?;
                }
                return Ok(TypeRef { name, args, span });
            }
            _ => return Err(self.error("type")),
        };
        self.pos += 1;
        Ok(TypeRef { name, args: Vec::new(), span })
    }

    fn block(&mut self) -> PResult<Block> {
        let span = self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.peek(0).is_none() {
                return Err(self.error("`}`"));
            }
            self.block_stmt(&mut stmts)?;
        }
        Ok(Block { stmts, span })
    }

    /// Statement inside a block; local declarations with several
    /// declarators expand to several statements.
    fn block_stmt(&mut self, out: &mut Vec<Stmt>) -> PResult<()> {
        if self.is_local_decl() {
            let span = self.span();
            self.eat(&TokenKind::Final);
            let ty = self.type_ref()?;
            let mut decl_span = span;
            loop {
                let name = self.ident()?;
                let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
                out.push(Stmt::new(StmtKind::Local { ty: ty.clone(), name, init }, decl_span));
                if self.eat(&TokenKind::Comma) {
                    decl_span = self.span();
                } else {
                    break;
                }
            }
            self.expect(TokenKind::Semi)?;
            return Ok(());
        }
        out.push(self.stmt()?);
        Ok(())
    }

    fn is_local_decl(&self) -> bool {
        match self.peek(0) {
            Some(TokenKind::IntKw) | Some(TokenKind::Boolean) | Some(TokenKind::CharKw) => true,
            Some(TokenKind::Final) => true,
            Some(TokenKind::Ident(_)) => {
                let mut probe = Parser { toks: self.toks, pos: self.pos, file: String::new() };
                probe.type_ref().is_ok() && matches!(probe.peek(0), Some(TokenKind::Ident(_)))
            }
            _ => false,
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek(0) {
            Some(TokenKind::LBrace) => StmtKind::Block(self.block()?),
            Some(TokenKind::Semi) => {
                self.pos += 1;
                StmtKind::Empty
            }
            Some(TokenKind::If) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let then = Box::new(self.stmt()?);
                let els = if self.eat(&TokenKind::Else) { Some(Box::new(self.stmt()?)) } else { None };
                StmtKind::If { cond, then, els }
            }
            Some(TokenKind::While) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                StmtKind::While { cond, body: Box::new(self.stmt()?) }
            }
            Some(TokenKind::Return) => {
                self.pos += 1;
                let value = if self.at(&TokenKind::Semi) { None } else { Some(self.expr()?) };
                self.expect(TokenKind::Semi)?;
                StmtKind::Return(value)
            }
            Some(TokenKind::Assert) => {
                self.pos += 1;
                let cond = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Assert(cond)
            }
            Some(TokenKind::MinRepeat) => {
                self.pos += 1;
                StmtKind::MinRepeat { id: None, body: self.block()? }
            }
            _ => {
                if self.is_local_decl() {
                    return Err(self.error("statement (declarations must appear directly in a block)"));
                }
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt::new(kind, span))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.binary(1)?;
        if self.at(&TokenKind::Assign) {
            let span = self.span();
            if !matches!(lhs.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                return Err(FrontendError::Parse {
                    span,
                    expected: "assignable expression".into(),
                    found: "`=`".into(),
                });
            }
            self.pos += 1;
            let value = self.expr()?;
            let span = lhs.span.clone();
            return Ok(Expr::new(ExprKind::Assign { target: Box::new(lhs), value: Box::new(value) }, span));
        }
        Ok(lhs)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek(0)? {
            TokenKind::OrOr => BinOp::Or,
            TokenKind::AndAnd => BinOp::And,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing over the left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.clone();
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let op = match self.peek(0) {
            Some(TokenKind::Bang) => UnOp::Not,
            Some(TokenKind::Minus) => UnOp::Neg,
            _ => return self.postfix(),
        };
        self.pos += 1;
        let operand = self.unary()?;
        Ok(Expr::new(ExprKind::Unary { op, operand: Box::new(operand) }, span))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma)?;
            }
        }
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat(&TokenKind::Dot) {
            let span = self.span();
            let name = self.ident()?;
            e = if self.at(&TokenKind::LParen) {
                let args = self.args()?;
                Expr::new(ExprKind::Call { target: Some(Box::new(e)), name, args }, span)
            } else {
                Expr::new(ExprKind::Field { target: Box::new(e), name }, span)
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let tok = match self.peek(0) {
            Some(t) => t.clone(),
            None => return Err(self.error("expression")),
        };
        let kind = match tok {
            TokenKind::Int(v) => {
                self.pos += 1;
                ExprKind::Int(v)
            }
            TokenKind::Str(s) => {
                self.pos += 1;
                ExprKind::Str(s)
            }
            TokenKind::Char(c) => {
                self.pos += 1;
                ExprKind::Char(c)
            }
            TokenKind::True | TokenKind::False => {
                self.pos += 1;
                ExprKind::Bool(tok == TokenKind::True)
            }
            TokenKind::Null => {
                self.pos += 1;
                ExprKind::Null
            }
            TokenKind::This => {
                self.pos += 1;
                ExprKind::This
            }
            TokenKind::Super => {
                self.pos += 1;
                if self.at(&TokenKind::LParen) {
                    ExprKind::SuperCall { args: self.args()? }
                } else if self.at(&TokenKind::Dot) {
                    ExprKind::Super
                } else {
                    return Err(self.error("`(` or `.` after `super`"));
                }
            }
            TokenKind::Hole => {
                self.pos += 1;
                ExprKind::Hole { id: None }
            }
            TokenKind::ChoiceOpen => {
                self.pos += 1;
                let mut alts = vec![self.expr()?];
                while self.eat(&TokenKind::Comma) {
                    alts.push(self.expr()?);
                }
                self.expect(TokenKind::ChoiceClose)?;
                ExprKind::Choice { id: None, alts }
            }
            TokenKind::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(e);
            }
            TokenKind::New => {
                self.pos += 1;
                let ty = self.type_ref()?;
                let args = self.args()?;
                let body = if self.at(&TokenKind::LBrace) {
                    // anonymous bodies have no constructors, so no member name can match ""
                    Some(self.class_body("")?)
                } else {
                    None
                };
                ExprKind::New { ty, args, body }
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                if self.at(&TokenKind::LParen) {
                    let args = self.args()?;
                    ExprKind::Call { target: None, name, args }
                } else {
                    ExprKind::Name(name)
                }
            }
            _ => return Err(self.error("expression")),
        };
        Ok(Expr::new(kind, span))
    }
}

/// Parses one file's tokens into a compilation unit.
pub fn parse_unit(tokens: &[Token], file: &str) -> Result<CompilationUnit, FrontendError> {
    Parser::new(tokens, file).parse_unit()
}
