//! Closed-form scalar expressions in `x`, `y`, `t`.
//!
//! Grammar (implicit multiplication allowed, e.g. `sin(x)cos(t)`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := power (('*' | '/')? power)*
//! power  := unary ('^' integer)?
//! unary  := '-' unary | atom
//! atom   := number | 'pi' | 'x' | 'y' | 't'
//!         | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Every expression can be differentiated symbolically, which is what lets
//! analytic scenarios supply exact derivatives to the residual operators.

use std::fmt;

use super::grid::Axis;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Axis),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

use Expr::*;

impl Default for Expr {
    fn default() -> Self {
        Const(0.0)
    }
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Scenario(format!("unexpected trailing input in '{src}'")));
        }
        Ok(e)
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        match self {
            Const(c) => *c,
            Var(a) => p[a.index()],
            Add(l, r) => l.eval(p) + r.eval(p),
            Sub(l, r) => l.eval(p) - r.eval(p),
            Mul(l, r) => l.eval(p) * r.eval(p),
            Div(l, r) => l.eval(p) / r.eval(p),
            Neg(e) => -e.eval(p),
            Pow(e, n) => e.eval(p).powi(*n),
            Sin(e) => e.eval(p).sin(),
            Cos(e) => e.eval(p).cos(),
            Exp(e) => e.eval(p).exp(),
        }
    }

    pub fn diff(&self, axis: Axis) -> Expr {
        let d = |e: &Expr| e.diff(axis);
        let s = match self {
            Const(_) => Const(0.0),
            Var(a) => Const(if *a == axis { 1.0 } else { 0.0 }),
            Add(l, r) => Add(b(d(l)), b(d(r))),
            Sub(l, r) => Sub(b(d(l)), b(d(r))),
            Mul(l, r) => Add(b(Mul(b(d(l)), r.clone())), b(Mul(l.clone(), b(d(r))))),
            Div(l, r) => Div(
                b(Sub(b(Mul(b(d(l)), r.clone())), b(Mul(l.clone(), b(d(r)))))),
                b(Pow(r.clone(), 2)),
            ),
            Neg(e) => Neg(b(d(e))),
            Pow(e, n) => Mul(b(Mul(b(Const(*n as f64)), b(Pow(e.clone(), n - 1)))), b(d(e))),
            Sin(e) => Mul(b(Cos(e.clone())), b(d(e))),
            Cos(e) => Neg(b(Mul(b(Sin(e.clone())), b(d(e))))),
            Exp(e) => Mul(b(Exp(e.clone())), b(d(e))),
        };
        s.simplify()
    }

    /// Folds constants and drops multiplications by zero or one.
    pub fn simplify(self) -> Expr {
        match self {
            Add(l, r) => match (l.simplify(), r.simplify()) {
                (Const(a), Const(c)) => Const(a + c),
                (Const(z), e) | (e, Const(z)) if z == 0.0 => e,
                (l, r) => Add(b(l), b(r)),
            },
            Sub(l, r) => match (l.simplify(), r.simplify()) {
                (Const(a), Const(c)) => Const(a - c),
                (e, Const(z)) if z == 0.0 => e,
                (Const(z), e) if z == 0.0 => Neg(b(e)),
                (l, r) => Sub(b(l), b(r)),
            },
            Mul(l, r) => match (l.simplify(), r.simplify()) {
                (Const(a), Const(c)) => Const(a * c),
                (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
                (Const(o), e) | (e, Const(o)) if o == 1.0 => e,
                (l, r) => Mul(b(l), b(r)),
            },
            Div(l, r) => match (l.simplify(), r.simplify()) {
                (Const(z), _) if z == 0.0 => Const(0.0),
                (e, Const(o)) if o == 1.0 => e,
                (l, r) => Div(b(l), b(r)),
            },
            Neg(e) => match e.simplify() {
                Const(c) => Const(-c),
                Neg(inner) => *inner,
                e => Neg(b(e)),
            },
            Pow(e, n) => match (e.simplify(), n) {
                (_, 0) => Const(1.0),
                (e, 1) => e,
                (Const(c), n) => Const(c.powi(n)),
                (e, n) => Pow(b(e), n),
            },
            Sin(e) => match e.simplify() {
                Const(c) => Const(c.sin()),
                e => Sin(b(e)),
            },
            Cos(e) => match e.simplify() {
                Const(c) => Const(c.cos()),
                e => Cos(b(e)),
            },
            Exp(e) => match e.simplify() {
                Const(c) => Const(c.exp()),
                e => Exp(b(e)),
            },
            e => e,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Const(c) if *c == 0.0)
    }

    pub fn uses(&self, axis: Axis) -> bool {
        match self {
            Const(_) => false,
            Var(a) => *a == axis,
            Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r) => l.uses(axis) || r.uses(axis),
            Neg(e) | Pow(e, _) | Sin(e) | Cos(e) | Exp(e) => e.uses(axis),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "{c}"),
            Var(a) => write!(f, "{a}"),
            Add(l, r) => write!(f, "({l} + {r})"),
            Sub(l, r) => write!(f, "({l} - {r})"),
            Mul(l, r) => write!(f, "{l}*{r}"),
            Div(l, r) => write!(f, "{l}/{r}"),
            Neg(e) => write!(f, "-{e}"),
            Pow(e, n) => write!(f, "{e}^{n}"),
            Sin(e) => write!(f, "sin({e})"),
            Cos(e) => write!(f, "cos({e})"),
            Exp(e) => write!(f, "exp({e})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| Error::Scenario(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(Error::Scenario(format!("unexpected character '{ch}' in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Scenario(format!("expected '{op}' in expression")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Add(b(lhs), b(self.term()?));
            } else if self.eat('-') {
                lhs = Sub(b(lhs), b(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        loop {
            if self.eat('*') {
                lhs = Mul(b(lhs), b(self.power()?));
            } else if self.eat('/') {
                lhs = Div(b(lhs), b(self.power()?));
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                lhs = Mul(b(lhs), b(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.fract() == 0.0 && n.abs() < 64.0 => {
                    self.pos += 1;
                    let n = if neg { -(n as i32) } else { n as i32 };
                    Ok(Pow(b(base), n))
                }
                _ => Err(Error::Scenario("exponent must be a small integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Neg(b(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Const(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Var(Axis::X)),
                    "y" => Ok(Var(Axis::Y)),
                    "t" => Ok(Var(Axis::T)),
                    "pi" => Ok(Const(std::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        self.expect('(')?;
                        let arg = b(self.expr()?);
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "sin" => Sin(arg),
                            "cos" => Cos(arg),
                            _ => Exp(arg),
                        })
                    }
                    other => Err(Error::Scenario(format!("unknown identifier '{other}'"))),
                }
            }
            _ => Err(Error::Scenario("unexpected end of expression".into())),
        }
    }
}
