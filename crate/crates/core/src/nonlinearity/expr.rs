//! A small, total expression language for user-defined nonlinearities
//! f(k, x, u): literals, the three variables, + - * / ^, unary minus,
//! parentheses and the functions sin, cos, exp, abs, powq.
//!
//! Recursive descent with standard precedence; `^` is right-associative and
//! binds tighter than unary minus. Printing emits full parentheses so that
//! print-then-parse reproduces the tree structurally.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    K,
    X,
    U,
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
    Abs,
}

/// Parsed syntax tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    /// powq(t, q) = |t|^{q-1}·t, the signed power.
    Powq(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // optional exponent part
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("malformed number `{s}`"),
                })?;
                toks.push((start, Tok::Num(v)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative)
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "k" => Ok(Expr::Var(Var::K)),
                "x" => Ok(Expr::Var(Var::X)),
                "u" => Ok(Expr::Var(Var::U)),
                "sin" | "cos" | "exp" | "abs" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing function argument")?;
                    let f = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        _ => Func::Abs,
                    };
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                "powq" => {
                    self.expect(Tok::LParen, "`(` after powq")?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma, "`,` between powq arguments")?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing powq")?;
                    Ok(Expr::Powq(Box::new(a), Box::new(b)))
                }
                other => Err(Error::Parse {
                    pos,
                    msg: format!("unknown identifier `{other}` (allowed: k, x, u, sin, cos, exp, abs, powq)"),
                }),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, variable, function call or `(`".into(),
            }),
        }
    }
}

/// Parses expression source text into a syntax tree.
pub fn parse_expression(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse {
            pos: p.here(),
            msg: "trailing input after expression".into(),
        });
    }
    Ok(e)
}

impl Expr {
    /// Evaluates at (k, x, u). Division by zero and 0^negative (and negative
    /// base with non-integer exponent) are runtime errors.
    pub fn eval(&self, k: f64, x: f64, u: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::K) => k,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::U) => u,
            Expr::Neg(e) => -e.eval(k, x, u)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval(k, x, u)?;
                let b = b.eval(k, x, u)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Eval(format!("division by zero: {a} / 0")));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(Error::Eval(format!("0^{b}: zero to a negative power")));
                        }
                        let v = a.powf(b);
                        if v.is_nan() {
                            return Err(Error::Eval(format!(
                                "{a}^{b} is undefined (negative base with non-integer exponent)"
                            )));
                        }
                        v
                    }
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(k, x, u)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Abs => v.abs(),
                }
            }
            Expr::Powq(a, q) => {
                let a = a.eval(k, x, u)?;
                let q = q.eval(k, x, u)?;
                super::powq(a, q)
            }
        })
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Num(v) => write!(w, "{v}"),
            Expr::Var(Var::K) => write!(w, "k"),
            Expr::Var(Var::X) => write!(w, "x"),
            Expr::Var(Var::U) => write!(w, "u"),
            Expr::Neg(e) => write!(w, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(w, "({a} {s} {b})")
            }
            Expr::Call(f, e) => {
                let name = match f {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                    Func::Abs => "abs",
                };
                write!(w, "{name}({e})")
            }
            Expr::Powq(a, b) => write!(w, "powq({a}, {b})"),
        }
    }
}
