use std::fmt;
use std::sync::Arc;

use super::FrontendError;
use crate::span::SourceSpan;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    Char(char),

    // keywords
    Class,
    Interface,
    Extends,
    Implements,
    Public,
    Private,
    Protected,
    Static,
    Final,
    Abstract,
    Void,
    IntKw,
    Boolean,
    CharKw,
    If,
    Else,
    While,
    Return,
    New,
    This,
    Super,
    Null,
    True,
    False,
    Assert,

    // sketch extensions
    Harness,
    Generator,
    MinRepeat,
    Hole,
    ChoiceOpen,
    ChoiceClose,

    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    NotEq,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    AndAnd,
    OrOr,
    Comma,
    Semi,
    Dot,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        use TokenKind::*;
        Some(match word {
            "class" => Class,
            "interface" => Interface,
            "extends" => Extends,
            "implements" => Implements,
            "public" => Public,
            "private" => Private,
            "protected" => Protected,
            "static" => Static,
            "final" => Final,
            "abstract" => Abstract,
            "void" => Void,
            "int" => IntKw,
            "boolean" => Boolean,
            "char" => CharKw,
            "if" => If,
            "else" => Else,
            "while" => While,
            "return" => Return,
            "new" => New,
            "this" => This,
            "super" => Super,
            "null" => Null,
            "true" => True,
            "false" => False,
            "assert" => Assert,
            "harness" => Harness,
            "generator" => Generator,
            "minrepeat" => MinRepeat,
            _ => return None,
        })
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s = match self {
            Ident(name) => return write!(f, "{}", name),
            Int(v) => return write!(f, "{}", v),
            Str(s) => return write!(f, "{:?}", s),
            Char(c) => return write!(f, "{:?}", c),
            Class => "class",
            Interface => "interface",
            Extends => "extends",
            Implements => "implements",
            Public => "public",
            Private => "private",
            Protected => "protected",
            Static => "static",
            Final => "final",
            Abstract => "abstract",
            Void => "void",
            IntKw => "int",
            Boolean => "boolean",
            CharKw => "char",
            If => "if",
            Else => "else",
            While => "while",
            Return => "return",
            New => "new",
            This => "this",
            Super => "super",
            Null => "null",
            True => "true",
            False => "false",
            Assert => "assert",
            Harness => "harness",
            Generator => "generator",
            MinRepeat => "minrepeat",
            Hole => "??",
            ChoiceOpen => "{|",
            ChoiceClose => "|}",
            LParen => "(",
            RParen => ")",
            LBrace => "{",
            RBrace => "}",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            EqEq => "==",
            NotEq => "!=",
            Assign => "=",
            Plus => "+",
            Minus => "-",
            Star => "*",
            Slash => "/",
            Percent => "%",
            Bang => "!",
            AndAnd => "&&",
            OrOr => "||",
            Comma => ",",
            Semi => ";",
            Dot => ".",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: Arc<str>,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, line: u32, col: u32, start: usize) -> SourceSpan {
        SourceSpan::new(self.file.clone(), line, col, (self.pos - start) as u32)
    }

    fn error(&self, line: u32, col: u32, message: impl Into<String>) -> FrontendError {
        FrontendError::Lex {
            span: SourceSpan::new(self.file.clone(), line, col, 1),
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(0), self.peek(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => return Err(self.error(line, col, "unterminated comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn escape(&mut self, line: u32, col: u32) -> Result<char, FrontendError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('0') => Ok('\0'),
            Some('\\') => Ok('\\'),
            Some('\'') => Ok('\''),
            Some('"') => Ok('"'),
            Some(other) => Err(self.error(line, col, format!("unknown escape `\\{}`", other))),
            None => Err(self.error(line, col, "unterminated literal")),
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, FrontendError> {
        self.skip_trivia()?;
        let (line, col, start) = (self.line, self.col, self.pos);
        let c = match self.bump() {
            Some(c) => c,
            None => return Ok(None),
        };
        use TokenKind::*;
        let kind = match c {
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let mut word = String::from(c);
                while let Some(n) = self.peek(0) {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '$' {
                        word.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::keyword(&word).unwrap_or(Ident(word))
            }
            c if c.is_ascii_digit() => {
                let mut value: i64 = c.to_digit(10).unwrap() as i64;
                while let Some(n) = self.peek(0) {
                    if let Some(d) = n.to_digit(10) {
                        value = value
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(d as i64))
                            .ok_or_else(|| self.error(line, col, "integer literal too large"))?;
                        self.bump();
                    } else {
                        break;
                    }
                }
                if matches!(self.peek(0), Some(n) if n.is_ascii_alphabetic() || n == '_') {
                    return Err(self.error(line, col, "malformed number"));
                }
                Int(value)
            }
            '"' => {
                let mut text = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => text.push(self.escape(line, col)?),
                        Some('\n') | None => return Err(self.error(line, col, "unterminated string")),
                        Some(ch) => text.push(ch),
                    }
                }
                Str(text)
            }
            '\'' => {
                let ch = match self.bump() {
                    Some('\\') => self.escape(line, col)?,
                    Some('\'') | Some('\n') | None => {
                        return Err(self.error(line, col, "malformed character literal"))
                    }
                    Some(ch) => ch,
                };
                if self.bump() != Some('\'') {
                    return Err(self.error(line, col, "unterminated character literal"));
                }
                Char(ch)
            }
            '?' if self.peek(0) == Some('?') => {
                self.bump();
                Hole
            }
            '{' if self.peek(0) == Some('|') && self.peek(1) != Some('|') => {
                self.bump();
                ChoiceOpen
            }
            '|' if self.peek(0) == Some('}') => {
                self.bump();
                ChoiceClose
            }
            '|' if self.peek(0) == Some('|') => {
                self.bump();
                OrOr
            }
            '&' if self.peek(0) == Some('&') => {
                self.bump();
                AndAnd
            }
            '=' if self.peek(0) == Some('=') => {
                self.bump();
                EqEq
            }
            '!' if self.peek(0) == Some('=') => {
                self.bump();
                NotEq
            }
            '<' if self.peek(0) == Some('=') => {
                self.bump();
                Le
            }
            '>' if self.peek(0) == Some('=') => {
                self.bump();
                Ge
            }
            '(' => LParen,
            ')' => RParen,
            '{' => LBrace,
            '}' => RBrace,
            '<' => Lt,
            '>' => Gt,
            '=' => Assign,
            '+' => Plus,
            '-' => Minus,
            '*' => Star,
            '/' => Slash,
            '%' => Percent,
            '!' => Bang,
            ',' => Comma,
            ';' => Semi,
            '.' => Dot,
            other => return Err(self.error(line, col, format!("unexpected character `{}`", other))),
        };
        Ok(Some(Token { kind, span: self.span_from(line, col, start) }))
    }
}

/// Splits `source` into tokens. Comments and whitespace are dropped.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lexer = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file: Arc::from(file),
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, "t.java").unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn mult2_return_statement() {
        use TokenKind::*;
        assert_eq!(
            kinds("return (?? * {| x , 0 |});"),
            vec![
                Return,
                LParen,
                Hole,
                Star,
                ChoiceOpen,
                Ident("x".into()),
                Comma,
                Int(0),
                ChoiceClose,
                RParen,
                Semi
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
    }

    #[test]
    fn hole_inside_comment_is_ignored() {
        let toks = kinds("int x = 1; /* ?? */");
        assert_eq!(toks.len(), 5);
        assert!(!toks.contains(&TokenKind::Hole));
        assert!(kinds("// ?? {| |}\nx").len() == 1);
    }

    #[test]
    fn sketch_keywords_are_distinct() {
        use TokenKind::*;
        assert_eq!(kinds("minrepeat harness generator"), vec![MinRepeat, Harness, Generator]);
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = tokenize("class A\r\n{ ?? }", "a.java").unwrap();
        let hole = &toks[3];
        assert_eq!(hole.kind, TokenKind::Hole);
        assert_eq!((hole.span.line, hole.span.col, hole.span.len), (2, 3, 2));
    }

    #[test]
    fn literals() {
        use TokenKind::*;
        assert_eq!(kinds(r#""c\"a" 'r' '\n'"#), vec![Str("c\"a".into()), Char('r'), Char('\n')]);
    }

    #[test]
    fn lex_errors() {
        for bad in ["a # b", "\"open", "/* never closed", "x ? y", "a & b", "'ab'"] {
            let err = tokenize(bad, "bad.java").unwrap_err();
            assert!(matches!(err, FrontendError::Lex { .. }), "{bad}");
        }
    }

    #[test]
    fn or_and_choice_close_do_not_clash() {
        use TokenKind::*;
        assert_eq!(
            kinds("{| a || b, c |}"),
            vec![ChoiceOpen, Ident("a".into()), OrOr, Ident("b".into()), Comma, Ident("c".into()), ChoiceClose]
        );
    }
}
