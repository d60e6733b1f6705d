//! Arithmetic expression language for coefficients and data.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | 'pi' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1`, `x2`, `x3` and `t`; functions are `sin`, `cos`, `exp`,
//! `sqrt` and `abs`. `+ - * /` associate to the left, `^` to the right, and
//! unary minus binds looser than `^` so `-x1^2 = -(x1^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("function `{name}` at byte {offset} takes {expected} argument(s), got {got}")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("variable `{0}` is not permitted here")]
    VariableNotAllowed(String),
    #[error("expression is not smooth in t at t = 0: {0}")]
    NonSmooth(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    T,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::T => "t",
        }
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Point at which an expression is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Vars {
    pub x: [f64; 3],
    pub t: f64,
}

impl Vars {
    pub fn at(x: &[f64], t: f64) -> Vars {
        let mut v = Vars { x: [0.0; 3], t };
        for (slot, &xi) in v.x.iter_mut().zip(x) {
            *slot = xi;
        }
        v
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, len: src.len() };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(tok) => Err(ExprError::Syntax {
                offset: tok.offset,
                message: format!("unexpected {}", tok.kind.describe()),
            }),
        }
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn eval(&self, vars: &Vars) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(v) => match v {
                Var::X1 => vars.x[0],
                Var::X2 => vars.x[1],
                Var::X3 => vars.x[2],
                Var::T => vars.t,
            },
            Expr::Neg(a) => -a.eval(vars),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars), b.eval(vars));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(vars)),
        }
    }

    pub fn eval_at(&self, x: &[f64], t: f64) -> f64 {
        self.eval(&Vars::at(x, t))
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses(var),
            Expr::Bin(_, a, b) => a.uses(var) || b.uses(var),
        }
    }

    pub fn depends_on_t(&self) -> bool {
        self.uses(Var::T)
    }

    /// Rejects spatial variables beyond `dim` and `t` unless allowed.
    pub fn check_vars(&self, dim: usize, allow_t: bool) -> Result<(), ExprError> {
        let spatial = [Var::X1, Var::X2, Var::X3];
        for (i, v) in spatial.iter().enumerate() {
            if i >= dim && self.uses(*v) {
                return Err(ExprError::VariableNotAllowed(v.name().to_string()));
            }
        }
        if !allow_t && self.uses(Var::T) {
            return Err(ExprError::VariableNotAllowed("t".to_string()));
        }
        Ok(())
    }

    /// Normalized Taylor coefficients in `t` about `t = 0` at a fixed spatial
    /// point: entry `k` is `(1/k!) ∂^k e/∂t^k (x, 0)`.
    ///
    /// Evaluated exactly with truncated power-series arithmetic. Fails with
    /// [`ExprError::NonSmooth`] where the expression is not analytic at
    /// `t = 0` (e.g. `abs` or `sqrt` of a quantity vanishing there).
    pub fn taylor_in_t(&self, x: &[f64], order: usize) -> Result<Vec<f64>, ExprError> {
        let vars = Vars::at(x, 0.0);
        self.series(&vars, order + 1)
    }

    fn series(&self, vars: &Vars, n: usize) -> Result<Vec<f64>, ExprError> {
        Ok(match self {
            Expr::Num(_) | Expr::Pi => constant_series(self.eval(vars), n),
            Expr::Var(Var::T) => {
                let mut s = vec![0.0; n];
                if n > 1 {
                    s[1] = 1.0;
                }
                s
            }
            Expr::Var(_) => constant_series(self.eval(vars), n),
            Expr::Neg(a) => a.series(vars, n)?.into_iter().map(|v| -v).collect(),
            Expr::Bin(op, a, b) => {
                let sa = a.series(vars, n)?;
                let sb = b.series(vars, n)?;
                match op {
                    BinOp::Add => sa.iter().zip(&sb).map(|(x, y)| x + y).collect(),
                    BinOp::Sub => sa.iter().zip(&sb).map(|(x, y)| x - y).collect(),
                    BinOp::Mul => series_mul(&sa, &sb),
                    BinOp::Div => series_div(&sa, &sb)?,
                    BinOp::Pow => series_pow(&sa, &sb)?,
                }
            }
            Expr::Call(f, a) => {
                let sa = a.series(vars, n)?;
                match f {
                    Func::Sin => series_sin_cos(&sa).0,
                    Func::Cos => series_sin_cos(&sa).1,
                    Func::Exp => series_exp(&sa),
                    Func::Sqrt => series_sqrt(&sa)?,
                    Func::Abs => {
                        if sa[0] > 0.0 {
                            sa
                        } else if sa[0] < 0.0 {
                            sa.into_iter().map(|v| -v).collect()
                        } else {
                            return Err(ExprError::NonSmooth("abs of a vanishing argument".into()));
                        }
                    }
                }
            }
        })
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

fn constant_series(v: f64, n: usize) -> Vec<f64> {
    let mut s = vec![0.0; n];
    s[0] = v;
    s
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

fn series_div(a: &[f64], b: &[f64]) -> Result<Vec<f64>, ExprError> {
    if b[0] == 0.0 {
        return Err(ExprError::NonSmooth("division by a quantity vanishing at t = 0".into()));
    }
    let n = a.len();
    let mut q = vec![0.0; n];
    for k in 0..n {
        let s: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
        q[k] = (a[k] - s) / b[0];
    }
    Ok(q)
}

fn series_exp(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut e = vec![0.0; n];
    e[0] = a[0].exp();
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e[k] = s / k as f64;
    }
    e
}

fn series_ln(a: &[f64]) -> Result<Vec<f64>, ExprError> {
    if a[0] <= 0.0 {
        return Err(ExprError::NonSmooth("power with non-positive base and variable exponent".into()));
    }
    let n = a.len();
    let mut l = vec![0.0; n];
    l[0] = a[0].ln();
    for k in 1..n {
        let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
        l[k] = (a[k] - s / k as f64) / a[0];
    }
    Ok(l)
}

fn series_sin_cos(a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut s = vec![0.0; n];
    let mut c = vec![0.0; n];
    s[0] = a[0].sin();
    c[0] = a[0].cos();
    for k in 1..n {
        let mut ss = 0.0;
        let mut cs = 0.0;
        for j in 1..=k {
            let w = j as f64 * a[j];
            ss += w * c[k - j];
            cs += w * s[k - j];
        }
        s[k] = ss / k as f64;
        c[k] = -cs / k as f64;
    }
    (s, c)
}

fn series_sqrt(a: &[f64]) -> Result<Vec<f64>, ExprError> {
    if a[0] <= 0.0 {
        if a.iter().all(|&v| v == 0.0) {
            return Ok(vec![0.0; a.len()]);
        }
        return Err(ExprError::NonSmooth("sqrt of a non-positive quantity".into()));
    }
    let n = a.len();
    let mut r = vec![0.0; n];
    r[0] = a[0].sqrt();
    for k in 1..n {
        let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
        r[k] = (a[k] - s) / (2.0 * r[0]);
    }
    Ok(r)
}

fn series_pow(a: &[f64], b: &[f64]) -> Result<Vec<f64>, ExprError> {
    let n = a.len();
    if b[1..].iter().any(|&v| v != 0.0) {
        let l = series_ln(a)?;
        return Ok(series_exp(&series_mul(b, &l)));
    }
    let p = b[0];
    if p.fract() == 0.0 && (0.0..=64.0).contains(&p) {
        let mut out = constant_series(1.0, n);
        for _ in 0..p as usize {
            out = series_mul(&out, a);
        }
        return Ok(out);
    }
    if a[0] == 0.0 {
        return Err(ExprError::NonSmooth("non-integer power of a vanishing quantity".into()));
    }
    if a[0] < 0.0 && p.fract() != 0.0 {
        return Err(ExprError::NonSmooth("non-integer power of a negative quantity".into()));
    }
    let mut y = vec![0.0; n];
    y[0] = pow(a[0], p);
    for k in 1..n {
        let s: f64 = (1..=k)
            .map(|j| ((p + 1.0) * j as f64 - k as f64) * a[j] * y[k - j])
            .sum();
        y[k] = s / (k as f64 * a[0]);
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// printing

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
        _ => 5,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, precedence(a) < 3)),
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
            Expr::Bin(op, a, b) => {
                let p = precedence(self);
                let (sym, lparen, rparen) = match op {
                    BinOp::Add => ("+", precedence(a) < p, precedence(b) <= p),
                    BinOp::Sub => ("-", precedence(a) < p, precedence(b) <= p),
                    BinOp::Mul => ("*", precedence(a) < p, precedence(b) <= p),
                    BinOp::Div => ("/", precedence(a) < p, precedence(b) <= p),
                    BinOp::Pow => ("^", precedence(a) <= p, precedence(b) < 3),
                };
                write!(f, "{} {} {}", Wrapped(a, lparen), sym, Wrapped(b, rparen))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// lexing and parsing

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Op(c) => format!("`{c}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
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
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token { kind: TokKind::Num(v), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(src[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let kind = match c {
            '+' | '-' | '*' | '/' | '^' => TokKind::Op(c),
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            ',' => TokKind::Comma,
            _ => {
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push(Token { kind, offset: start });
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn eof_err(&self, what: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.len,
            message: format!("unexpected end of input, expected {what}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().cloned().ok_or_else(|| self.eof_err("an operand"))?;
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen(tok.offset)?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    match self.peek() {
                        Some(Token { kind: TokKind::LParen, .. }) => self.pos += 1,
                        Some(t) => {
                            return Err(ExprError::Syntax {
                                offset: t.offset,
                                message: format!("expected `(` after `{name}`"),
                            })
                        }
                        None => return Err(self.eof_err("`(`")),
                    }
                    if let Some(Token { kind: TokKind::RParen, .. }) = self.peek() {
                        return Err(ExprError::Arity {
                            offset: tok.offset,
                            name,
                            expected: 1,
                            got: 0,
                        });
                    }
                    let arg = self.expr()?;
                    let mut got = 1;
                    while let Some(Token { kind: TokKind::Comma, .. }) = self.peek() {
                        self.pos += 1;
                        self.expr()?;
                        got += 1;
                    }
                    if got != 1 {
                        return Err(ExprError::Arity {
                            offset: tok.offset,
                            name,
                            expected: 1,
                            got,
                        });
                    }
                    self.expect_rparen(tok.offset)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "x1" => Ok(Expr::Var(Var::X1)),
                    "x2" => Ok(Expr::Var(Var::X2)),
                    "x3" => Ok(Expr::Var(Var::X3)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "pi" => Ok(Expr::Pi),
                    _ => Err(ExprError::UnknownIdentifier {
                        offset: tok.offset,
                        name,
                    }),
                }
            }
            other => Err(ExprError::Syntax {
                offset: tok.offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ExprError> {
        match self.peek() {
            Some(Token { kind: TokKind::RParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ExprError::Syntax {
                offset: t.offset,
                message: format!("expected `)` to close `(` at byte {open}, found {}", t.kind.describe()),
            }),
            None => Err(self.eof_err("`)`")),
        }
    }
}
