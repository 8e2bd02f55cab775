//! A small arithmetic expression language for scalar component fields.
//!
//! Manifests declare metric, structure-tensor and structure-function
//! components as strings such as `1 - exp(2*c*x)*z^2/4`. Identifiers are
//! resolved at parse time against the chart's coordinate names, the
//! manifest's named constants and a function registry, so an [`Expr`] never
//! contains an unresolved name.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          -- right associative
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! Evaluation is plain IEEE double arithmetic, except that operations whose
//! result would be undefined (division by zero, `log`/`sqrt` outside their
//! domain, a negative base raised to a non-integer power) are reported as
//! [`EvalError`]s instead of producing NaN.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Parse failure with the byte offset into the source where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

/// Evaluation failure, carrying the offending subexpression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot evaluate `{expr}`: {message}")]
pub struct EvalError {
    pub expr: String,
    pub message: String,
}

/// A named unary real function.
#[derive(Clone)]
pub struct Function {
    name: Arc<str>,
    eval: fn(f64) -> Result<f64, &'static str>,
}

impl Function {
    pub fn new(name: &str, eval: fn(f64) -> Result<f64, &'static str>) -> Self {
        Self {
            name: Arc::from(name),
            eval,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: f64) -> Result<f64, &'static str> {
        (self.eval)(x)
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Function({})", self.name)
    }
}

impl PartialEq for Function {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// Functions callable from expressions, keyed by name.
#[derive(Debug, Clone)]
pub struct FunctionRegistry {
    functions: BTreeMap<String, Function>,
}

impl Default for FunctionRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Function::new("exp", |x| Ok(x.exp())));
        registry.register(Function::new("log", |x| {
            if x > 0.0 {
                Ok(x.ln())
            } else {
                Err("log of a non-positive value")
            }
        }));
        registry.register(Function::new("sin", |x| Ok(x.sin())));
        registry.register(Function::new("cos", |x| Ok(x.cos())));
        registry.register(Function::new("sqrt", |x| {
            if x >= 0.0 {
                Ok(x.sqrt())
            } else {
                Err("sqrt of a negative value")
            }
        }));
        registry
    }
}

impl FunctionRegistry {
    pub fn empty() -> Self {
        Self {
            functions: BTreeMap::new(),
        }
    }

    /// Adds or replaces a function.
    pub fn register(&mut self, function: Function) {
        self.functions.insert(function.name().to_owned(), function);
    }

    pub fn get(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

/// Expression tree with all names resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord { index: usize, name: Arc<str> },
    Const { index: usize, name: Arc<str> },
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call { func: Function, arg: Box<Expr> },
}

impl Expr {
    pub fn num(value: f64) -> Self {
        Expr::Num(value)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// True when the expression references no coordinate.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const { .. } => true,
            Expr::Coord { .. } => false,
            Expr::Neg(e) => e.is_constant(),
            Expr::Binary { lhs, rhs, .. } => lhs.is_constant() && rhs.is_constant(),
            Expr::Call { arg, .. } => arg.is_constant(),
        }
    }

    /// True for the literal `0` (possibly negated); such components are skipped
    /// when building derived expressions.
    pub fn is_zero_literal(&self) -> bool {
        match self {
            Expr::Num(v) => *v == 0.0,
            Expr::Neg(e) => e.is_zero_literal(),
            _ => false,
        }
    }

    /// Evaluates the expression at `point` with constant values in declaration
    /// order.
    pub fn eval(&self, point: &[f64], constants: &[f64]) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Coord { index, name } => *point.get(*index).ok_or_else(|| EvalError {
                expr: name.to_string(),
                message: format!(
                    "coordinate index {index} outside a point of length {}",
                    point.len()
                ),
            })?,
            Expr::Const { index, name } => *constants.get(*index).ok_or_else(|| EvalError {
                expr: name.to_string(),
                message: "constant is not bound".into(),
            })?,
            Expr::Neg(e) => -e.eval(point, constants)?,
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(point, constants)?;
                let b = rhs.eval(point, constants)?;
                self.apply_binary(*op, a, b)?
            }
            Expr::Call { func, arg } => {
                let x = arg.eval(point, constants)?;
                func.apply(x).map_err(|message| self.domain_error(message))?
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.domain_error("non-finite result"))
        }
    }

    fn apply_binary(&self, op: BinOp, a: f64, b: f64) -> Result<f64, EvalError> {
        match op {
            BinOp::Add => Ok(a + b),
            BinOp::Sub => Ok(a - b),
            BinOp::Mul => Ok(a * b),
            BinOp::Div => {
                if b == 0.0 {
                    Err(self.domain_error("division by zero"))
                } else {
                    Ok(a / b)
                }
            }
            BinOp::Pow => {
                if a < 0.0 && b.fract() != 0.0 {
                    Err(self.domain_error("negative base with non-integer exponent"))
                } else if a == 0.0 && b < 0.0 {
                    Err(self.domain_error("division by zero"))
                } else if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                    Ok(a.powi(b as i32))
                } else {
                    Ok(a.powf(b))
                }
            }
        }
    }

    fn domain_error(&self, message: &str) -> EvalError {
        EvalError {
            expr: self.to_string(),
            message: message.to_owned(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if v.is_sign_negative() => NEG_PRECEDENCE,
            Expr::Neg(_) => NEG_PRECEDENCE,
            Expr::Binary { op, .. } => op.precedence(),
            _ => ATOM_PRECEDENCE,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Coord { name, .. } | Expr::Const { name, .. } => f.write_str(name),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrapped(f, e, e.precedence() < NEG_PRECEDENCE)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                let (left_parens, right_parens) = match op {
                    BinOp::Pow => (lhs.precedence() <= p, rhs.precedence() < NEG_PRECEDENCE),
                    _ => (lhs.precedence() < p, rhs.precedence() <= p),
                };
                wrapped(f, lhs, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                wrapped(f, rhs, right_parens)
            }
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Parses `source` against the given coordinate and constant names using the
/// default function registry.
pub fn parse<S: AsRef<str>>(source: &str, chart: &[S], constants: &[S]) -> Result<Expr, ParseError> {
    parse_with(source, chart, constants, &FunctionRegistry::default())
}

pub fn parse_with<S: AsRef<str>>(
    source: &str,
    chart: &[S],
    constants: &[S],
    functions: &FunctionRegistry,
) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        chart: chart.iter().map(|s| s.as_ref()).collect(),
        constants: constants.iter().map(|s| s.as_ref()).collect(),
        functions,
    };
    if parser.peek().kind == TokenKind::End {
        return Err(ParseError::new(0, "empty expression"));
    }
    let expr = parser.expr()?;
    let next = parser.peek();
    if next.kind != TokenKind::End {
        return Err(ParseError::new(
            next.offset,
            format!("unexpected {}", next.kind.describe()),
        ));
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("operator `{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &source[start..i];
            let value = text
                .parse::<f64>()
                .map_err(|_| ParseError::new(start, format!("malformed number `{text}`")))?;
            TokenKind::Number(value)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            TokenKind::Ident(source[start..i].to_owned())
        } else {
            i += 1;
            match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => TokenKind::Op(c as char),
                b'(' => TokenKind::LParen,
                b')' => TokenKind::RParen,
                _ => {
                    let ch = source[start..].chars().next().unwrap_or('?');
                    return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
                }
            }
        };
        tokens.push(Token { kind, offset: start });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        offset: source.len(),
    });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: Vec<&'a str>,
    constants: Vec<&'a str>,
    functions: &'a FunctionRegistry,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if token.kind != TokenKind::End {
            self.pos += 1;
        }
        token
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek().kind {
            TokenKind::Op(c) if ops.contains(&c) => {
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let token = self.advance();
        match token.kind {
            TokenKind::Number(v) => Ok(Expr::Num(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if self.peek().kind == TokenKind::LParen {
                    let func = self.functions.get(&name).cloned().ok_or_else(|| {
                        ParseError::new(token.offset, format!("unknown function `{name}`"))
                    })?;
                    self.advance();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call {
                        func,
                        arg: Box::new(arg),
                    });
                }
                if let Some(index) = self.chart.iter().position(|c| *c == name) {
                    Ok(Expr::Coord {
                        index,
                        name: Arc::from(name.as_str()),
                    })
                } else if let Some(index) = self.constants.iter().position(|c| *c == name) {
                    Ok(Expr::Const {
                        index,
                        name: Arc::from(name.as_str()),
                    })
                } else {
                    Err(ParseError::new(
                        token.offset,
                        format!("unknown identifier `{name}`"),
                    ))
                }
            }
            other => Err(ParseError::new(
                token.offset,
                format!("expected a value, found {}", other.describe()),
            )),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let token = self.advance();
        if token.kind == TokenKind::RParen {
            Ok(())
        } else {
            Err(ParseError::new(
                token.offset,
                format!("expected `)`, found {}", token.kind.describe()),
            ))
        }
    }
}
