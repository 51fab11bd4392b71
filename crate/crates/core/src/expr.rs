//! Expression trees for catalog definitions.
//!
//! Grammar: `+ - * / ^`, calls `exp(..)`, `sinh(..)`, `cosh(..)`, `log(..)`,
//! `tensor(a, b[, c])`, identifiers and integer literals (rationals are
//! written `p/q` and folded at parse time). Exponents are integers or a
//! parenthesised constant such as `(1/2)` or `(-1)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use crate::qseries::{render_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Sinh,
    Cosh,
    Log,
    Tensor,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "log" => Func::Log,
            "tensor" => Func::Tensor,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Log => "log",
            Func::Tensor => "tensor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Rational),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn num(r: Rational) -> Expr {
        Expr::Num(r)
    }

    pub fn sym(s: &str) -> Expr {
        Expr::Sym(s.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_symbols(out),
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_symbols(out)),
        }
    }

    /// Replaces symbols by expressions (single pass, no re-expansion).
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(a, b) => Expr::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(map))),
            Expr::Pow(a, e) => Expr::Pow(Box::new(a.substitute(map)), e.clone()),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(r) if !r.is_integer() => 2,
            Expr::Num(r) if *r < Rational::zero() => 3,
            _ => 5,
        }
    }
}

fn paren(e: &Expr, min: u8) -> String {
    if e.precedence() < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => f.write_str(&render_rational(r)),
            Expr::Sym(s) => f.write_str(s),
            Expr::Add(a, b) => write!(f, "{} + {}", paren(a, 1), paren(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", paren(a, 1), paren(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", paren(a, 2), paren(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", paren(a, 2), paren(b, 5)),
            Expr::Neg(a) => write!(f, "-{}", paren(a, 3)),
            Expr::Pow(a, e) => {
                if e.is_integer() && *e >= Rational::zero() {
                    write!(f, "{}^{}", paren(a, 5), render_rational(e))
                } else {
                    write!(f, "{}^({})", paren(a, 5), render_rational(e))
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| ParseError {
                column: start + 1,
                message: format!("integer literal `{s}` out of range"),
            })?;
            out.push((start, Tok::Num(n)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                column: i + 1,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    macros: &'a BTreeMap<String, Expr>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let column = self.toks.get(self.pos).map(|t| t.0 + 1).unwrap_or(self.end + 1);
        Err(ParseError {
            column,
            message: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                lhs = fold(Expr::Add(Box::new(lhs), Box::new(rhs)));
            } else if self.eat('-') {
                let rhs = self.term()?;
                lhs = fold(Expr::Sub(Box::new(lhs), Box::new(rhs)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                lhs = fold(Expr::Mul(Box::new(lhs), Box::new(rhs)));
            } else if self.eat('/') {
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return self.err("division by literal zero");
                }
                lhs = fold(Expr::Div(Box::new(lhs), Box::new(rhs)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(fold(Expr::Neg(Box::new(inner))));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exponent = if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            e
        } else if self.eat('-') {
            match self.atom()? {
                Expr::Num(r) => Expr::Num(-r),
                _ => return self.err("exponent must be a constant"),
            }
        } else {
            self.atom()?
        };
        match exponent {
            Expr::Num(r) => Ok(fold(Expr::Pow(Box::new(base), r))),
            _ => self.err("exponent must be a constant"),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(Rational::from_integer(n.into())))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let Some(func) = Func::from_name(&name) else {
                        self.pos -= 1;
                        return self.err(format!("unknown function `{name}`"));
                    };
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    let arity_ok = match func {
                        Func::Tensor => args.len() == 2 || args.len() == 3,
                        _ => args.len() == 1,
                    };
                    if !arity_ok {
                        return self.err(format!("wrong number of arguments to `{name}`"));
                    }
                    Ok(Expr::Call(func, args))
                } else if let Some(m) = self.macros.get(&name) {
                    Ok(m.clone())
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.err("expected a number, symbol or `(`"),
        }
    }
}

/// Constant folding on numeric leaves.
fn fold(e: Expr) -> Expr {
    use Expr::*;
    match e {
        Add(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x + y),
            (x, y) => Add(Box::new(x), Box::new(y)),
        },
        Sub(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x - y),
            (x, y) => Sub(Box::new(x), Box::new(y)),
        },
        Mul(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x * y),
            (x, y) => Mul(Box::new(x), Box::new(y)),
        },
        Div(a, b) => match (*a, *b) {
            (Num(x), Num(y)) if !y.is_zero() => Num(x / y),
            (x, y) => Div(Box::new(x), Box::new(y)),
        },
        Neg(a) => match *a {
            Num(x) => Num(-x),
            x => Neg(Box::new(x)),
        },
        Pow(a, k) => match *a {
            Num(x) if k.is_integer() && !(x.is_zero() && k < Rational::zero()) => {
                let n: i32 = k.to_integer().try_into().unwrap_or(0);
                let mut acc = Rational::one();
                for _ in 0..n.unsigned_abs() {
                    acc *= &x;
                }
                Num(if n < 0 { acc.recip() } else { acc })
            }
            x => Pow(Box::new(x), k),
        },
        other => other,
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with_macros(src, &BTreeMap::new())
}

/// Parses with identifier macros expanded in place (e.g. `Dp -> D + M/2`).
pub fn parse_with_macros(src: &str, macros: &BTreeMap<String, Expr>) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count(),
        macros,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    #[test]
    fn folds_rationals() {
        assert_eq!(parse("3/4").unwrap(), Expr::Num(rat(3, 4)));
        assert_eq!(parse("-(1/2)^2").unwrap(), Expr::Num(rat(-1, 4)));
    }

    #[test]
    fn precedence_and_calls() {
        let e = parse("1 - exp(2*z*Jp)/z").unwrap();
        assert_eq!(e.to_string(), "1 - exp(2*z*Jp)/z");
        let e = parse("(1 + tau*cH)^(1/2)").unwrap();
        assert!(matches!(e, Expr::Pow(_, ref r) if *r == rat(1, 2)));
        assert!(parse("tensor(1, Jp, J3)").is_ok());
        assert!(parse("tensor(1)").is_err());
    }

    #[test]
    fn macros_expand() {
        let mut m = BTreeMap::new();
        m.insert("Dp".to_string(), parse("D + M/2").unwrap());
        let e = parse_with_macros("K*Dp", &m).unwrap();
        assert_eq!(e.symbols().into_iter().collect::<Vec<_>>(), vec!["D", "K", "M"]);
    }

    #[test]
    fn errors_carry_column() {
        let err = parse("a + # b").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(parse("foo(x)").is_err());
        assert!(parse("x^y").is_err());
    }

    #[test]
    fn display_reparses() {
        for src in [
            "-z*tensor(Jp, J3) + z*tensor(J3, Jp)",
            "1/(1 - 2*z*cJp)^2*cJ3",
            "-(D + M/2)^(-1)",
            "a - (b - c)",
            "a/(b*c)",
            "-1/2*x",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
