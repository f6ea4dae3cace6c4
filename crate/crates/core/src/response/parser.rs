//! Recursive-descent parser with shape checking.
//!
//! ```text
//! model     = component { ";" component } [ ";" ]
//! component = sum
//! sum       = product { ("+" | "-") product }
//! product   = unary { ("*" | "/") unary }
//! unary     = ("-" | "+") unary | power
//! power     = primary [ "^" unary ]
//! primary   = number | symbol | func "(" sum { "," sum } ")" | "(" sum ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use super::ast::{BinOp, Expr, Func, Shape, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    Arity { func: String, expected: usize, found: usize },
    Shape(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: Position,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity { func, expected, found } => {
                write!(f, "`{func}` takes {expected} argument(s), found {found}")
            }
            ParseErrorKind::Shape(msg) => write!(f, "shape error: {msg}"),
            ParseErrorKind::Empty => f.write_str("model has no components"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    tokens: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, tokens: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c == '#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| error(src, start, ParseErrorKind::Syntax(format!("malformed number `{text}`"))))?;
                lx.tokens.push((Tok::Num(value), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.tokens.push((Tok::Ident(src[start..i].to_string()), start));
            } else if "+-*/^(),;".contains(c) {
                lx.tokens.push((Tok::Op(c), i));
                i += 1;
            } else {
                let ch = lx.src[i..].chars().next().unwrap_or('?');
                return Err(error(src, i, ParseErrorKind::Syntax(format!("unexpected character `{ch}`"))));
            }
        }
        lx.tokens.push((Tok::Eof, src.len()));
        Ok(lx.tokens)
    }
}

fn position(src: &str, offset: usize) -> Position {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    Position { offset, line, column }
}

fn error(src: &str, offset: usize, kind: ParseErrorKind) -> ParseError {
    ParseError {
        kind,
        position: position(src, offset),
    }
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

type Typed = (Expr, Shape, usize);

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(error(self.src, offset, kind))
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek());
            self.fail(self.offset(), ParseErrorKind::Syntax(format!("expected `{op}`, found {found}")))
        }
    }

    fn binary(&self, op: BinOp, lhs: Typed, rhs: Typed, at: usize) -> Result<Typed, ParseError> {
        match op.result_shape(lhs.1, rhs.1) {
            Some(shape) => Ok((Expr::Bin(op, Box::new(lhs.0), Box::new(rhs.0)), shape, lhs.2)),
            None => self.fail(
                at,
                ParseErrorKind::Shape(format!("operator `{}` not defined for {} and {}", op.symbol(), lhs.1, rhs.1)),
            ),
        }
    }

    fn sum(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = self.bump().1;
            let rhs = self.product()?;
            lhs = self.binary(op, lhs, rhs, at)?;
        }
    }

    fn product(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let at = self.bump().1;
            let rhs = self.unary()?;
            lhs = self.binary(op, lhs, rhs, at)?;
        }
    }

    fn unary(&mut self) -> Result<Typed, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                let at = self.bump().1;
                let (e, s, _) = self.unary()?;
                Ok((Expr::Neg(Box::new(e)), s, at))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Typed, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            let at = self.bump().1;
            let exponent = self.unary()?;
            return self.binary(BinOp::Pow, base, exponent, at);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Typed, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok((Expr::Num(v), Shape::Scalar, at)),
            Tok::Op('(') => {
                let inner = self.sum()?;
                self.expect(')')?;
                Ok((inner.0, inner.1, at))
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    let Some(func) = Func::lookup(&name) else {
                        return self.fail(at, ParseErrorKind::UnknownIdentifier(name));
                    };
                    self.bump();
                    let mut args: Vec<Typed> = Vec::new();
                    if *self.peek() != Tok::Op(')') {
                        args.push(self.sum()?);
                        while *self.peek() == Tok::Op(',') {
                            self.bump();
                            args.push(self.sum()?);
                        }
                    }
                    self.expect(')')?;
                    let (params, result) = func.signature();
                    if params.len() != args.len() {
                        return self.fail(
                            at,
                            ParseErrorKind::Arity {
                                func: name,
                                expected: params.len(),
                                found: args.len(),
                            },
                        );
                    }
                    for (k, (arg, want)) in args.iter().zip(params).enumerate() {
                        if arg.1 != *want {
                            return self.fail(
                                arg.2,
                                ParseErrorKind::Shape(format!(
                                    "argument {} of `{name}` must be a {want}, found a {}",
                                    k + 1,
                                    arg.1
                                )),
                            );
                        }
                    }
                    Ok((Expr::Call(func, args.into_iter().map(|a| a.0).collect()), result, at))
                } else {
                    match Symbol::lookup(&name) {
                        Some(sym) => Ok((Expr::Sym(sym), sym.shape(), at)),
                        None => self.fail(at, ParseErrorKind::UnknownIdentifier(name)),
                    }
                }
            }
            other => self.fail(at, ParseErrorKind::Syntax(format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses `;`-separated scalar components.
pub fn parse_components(src: &str) -> Result<Vec<Expr>, ParseError> {
    let tokens = Lexer::run(src)?;
    let mut p = Parser { src, tokens, pos: 0 };
    let mut out = Vec::new();
    loop {
        if *p.peek() == Tok::Eof {
            break;
        }
        let (expr, shape, at) = p.sum()?;
        if shape != Shape::Scalar {
            return p.fail(at, ParseErrorKind::Shape(format!("component must be a scalar, found a {shape}")));
        }
        out.push(expr);
        match p.peek() {
            Tok::Op(';') => {
                p.bump();
            }
            Tok::Eof => break,
            other => {
                let msg = format!("expected `;` or end of input, found {}", describe(other));
                return p.fail(p.offset(), ParseErrorKind::Syntax(msg));
            }
        }
    }
    if out.is_empty() {
        return p.fail(0, ParseErrorKind::Empty);
    }
    Ok(out)
}
