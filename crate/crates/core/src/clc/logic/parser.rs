//! Lexer and recursive-descent parser for contract logic.
//!
//! ```text
//! expr    := "if" expr "then" expr "else" expr
//!          | "let" IDENT "=" or ";" expr
//!          | "enforce" or ";" expr
//!          | or
//! or      := and ("||" and)*
//! and     := cmp ("&&" cmp)*
//! cmp     := sum (("==" | "!=" | "<" | "<=" | ">" | ">=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/" | "%") unary)*
//! unary   := ("!" | "-") unary | atom
//! atom    := INT | STRING | "true" | "false" | "value" | "approve" | "reject"
//!          | ("term" | "input" | "party") "." IDENT
//!          | "ratio" "(" expr ")" | "len" "(" expr ")"
//!          | "verify_sig" "(" expr "," "[" (expr ("," expr)*)? "]" "," expr ")"
//!          | IDENT | "(" expr ")"
//! ```
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use super::ast::{BinaryOp, Expr, UnaryOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Str(String),
    Ident(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const PUNCT: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "(", ")", "[", "]", ",", ";", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!",
];

fn lex(src: &str) -> Result<Vec<(Tok, Location)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| SyntaxError { location: Location { line, column }, message };
    while i < chars.len() {
        let c = chars[i];
        let here = Location { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().filter(|c| **c != '_').collect();
            let n = text
                .parse::<i128>()
                .map_err(|_| err(line, col, format!("integer literal `{text}` out of range")))?;
            col += i - start;
            out.push((Tok::Int(n), here));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), here));
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(here.line, here.column, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => {
                        let escaped = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            _ => return Err(err(line, col, "unknown escape".into())),
                        };
                        s.push(escaped);
                        i += 2;
                        col += 2;
                    }
                    Some(ch) => {
                        s.push(*ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push((Tok::Str(s), here));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push((Tok::Punct(p), here));
            }
            None => return Err(err(line, col, format!("unexpected character `{c}`"))),
        }
    }
    out.push((Tok::Eof, Location { line, column: col }));
    Ok(out)
}

const RESERVED: &[&str] = &[
    "if", "then", "else", "let", "enforce", "true", "false", "value", "approve", "reject", "ratio", "len", "verify_sig",
    "term", "input", "party",
];

struct Parser {
    toks: Vec<(Tok, Location)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Location {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T, SyntaxError> {
        Err(SyntaxError { location: self.loc(), message })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", self.peek()))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<(), SyntaxError> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        if self.is_keyword("if") {
            self.bump();
            let cond = self.expr()?;
            self.expect_keyword("then")?;
            let then = self.expr()?;
            self.expect_keyword("else")?;
            let otherwise = self.expr()?;
            return Ok(Expr::If { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) });
        }
        if self.is_keyword("let") {
            self.bump();
            let name = self.ident()?;
            self.expect_punct("=")?;
            let value = self.or()?;
            self.expect_punct(";")?;
            let body = self.expr()?;
            return Ok(Expr::Let { name, value: Box::new(value), body: Box::new(body) });
        }
        if self.is_keyword("enforce") {
            self.bump();
            let pred = self.or()?;
            self.expect_punct(";")?;
            let body = self.expr()?;
            return Ok(Expr::Enforce { pred: Box::new(pred), body: Box::new(body) });
        }
        self.or()
    }

    fn binary_level(
        &mut self,
        ops: &[(&str, BinaryOp)],
        next: fn(&mut Self) -> Result<Expr, SyntaxError>,
        chain: bool,
    ) -> Result<Expr, SyntaxError> {
        let mut lhs = next(self)?;
        loop {
            let Some((_, op)) = ops.iter().find(|(sym, _)| self.is_punct(sym)) else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = next(self)?;
            lhs = Expr::Binary { op: *op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
            if !chain {
                if ops.iter().any(|(sym, _)| self.is_punct(sym)) {
                    return self.error("comparison operators do not chain; add parentheses".into());
                }
                return Ok(lhs);
            }
        }
    }

    fn or(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("||", BinaryOp::Or)], Self::and, true)
    }

    fn and(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("&&", BinaryOp::And)], Self::cmp, true)
    }

    fn cmp(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(
            &[
                ("==", BinaryOp::Eq),
                ("!=", BinaryOp::Ne),
                ("<=", BinaryOp::Le),
                (">=", BinaryOp::Ge),
                ("<", BinaryOp::Lt),
                (">", BinaryOp::Gt),
            ],
            Self::sum,
            false,
        )
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("+", BinaryOp::Add), ("-", BinaryOp::Sub)], Self::product, true)
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        self.binary_level(&[("*", BinaryOp::Mul), ("/", BinaryOp::Div), ("%", BinaryOp::Rem)], Self::unary, true)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        let op = if self.is_punct("!") {
            UnaryOp::Not
        } else if self.is_punct("-") {
            UnaryOp::Neg
        } else {
            return self.atom();
        };
        self.bump();
        let expr = self.unary()?;
        Ok(Expr::Unary { op, expr: Box::new(expr) })
    }

    fn call_arg(&mut self) -> Result<Expr, SyntaxError> {
        self.expect_punct("(")?;
        let e = self.expr()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::Punct("(") => self.call_arg(),
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Bool(word == "true"))
                }
                "value" => {
                    self.bump();
                    Ok(Expr::ContractValue)
                }
                "approve" => {
                    self.bump();
                    Ok(Expr::Approve)
                }
                "reject" => {
                    self.bump();
                    Ok(Expr::Reject)
                }
                "term" | "input" | "party" => {
                    self.bump();
                    self.expect_punct(".")?;
                    let name = self.ident()?;
                    Ok(match word.as_str() {
                        "term" => Expr::Term(name),
                        "input" => Expr::Input(name),
                        _ => Expr::Party(name),
                    })
                }
                "ratio" => {
                    self.bump();
                    Ok(Expr::Ratio(Box::new(self.call_arg()?)))
                }
                "len" => {
                    self.bump();
                    Ok(Expr::Len(Box::new(self.call_arg()?)))
                }
                "verify_sig" => {
                    self.bump();
                    self.expect_punct("(")?;
                    let key = self.expr()?;
                    self.expect_punct(",")?;
                    self.expect_punct("[")?;
                    let mut message = Vec::new();
                    if !self.is_punct("]") {
                        loop {
                            message.push(self.expr()?);
                            if self.is_punct(",") {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_punct("]")?;
                    self.expect_punct(",")?;
                    let sig = self.expr()?;
                    self.expect_punct(")")?;
                    Ok(Expr::VerifySig { key: Box::new(key), message, sig: Box::new(sig) })
                }
                _ => Ok(Expr::Name(self.ident()?)),
            },
            other => self.error(format!("expected expression, found {other}")),
        }
    }
}

/// Parses a complete logic program.
pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let mut parser = Parser { toks: lex(src)?, pos: 0 };
    let expr = parser.expr()?;
    match parser.peek() {
        Tok::Eof => Ok(expr),
        other => parser.error(format!("unexpected {other} after end of expression")),
    }
}
