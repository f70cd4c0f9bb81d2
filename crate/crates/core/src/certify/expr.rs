//! Bound expressions over rational constants, pi, square roots and the four
//! field operations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::interval::{pi_enclosure, Interval};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Pi,
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Self {
        Expr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn big(v: BigInt) -> Self {
        Expr::Const(BigRational::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Expr::Const(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(r: BigRational) -> Self {
        Expr::Const(r)
    }

    pub fn pi() -> Self {
        Expr::Pi
    }

    pub fn sqrt(inner: Expr) -> Self {
        Expr::Sqrt(Box::new(inner))
    }

    /// Evaluate to an enclosure at working precision `prec` bits.
    pub fn eval(&self, prec: u32) -> Result<Interval> {
        // Guard bits absorb the outward rounding of each node.
        let work = prec + 8;
        Ok(match self {
            Expr::Const(r) => Interval::from_rational(r, work),
            Expr::Pi => pi_enclosure(work),
            Expr::Sqrt(e) => {
                let inner = e.eval(prec)?;
                inner.sqrt(work).map_err(|_| {
                    Error::Expression(format!("sqrt of possibly negative value {inner}"))
                })?
            }
            Expr::Neg(e) => e.eval(prec)?.neg(),
            Expr::Add(a, b) => a.eval(prec)?.add(&b.eval(prec)?, work),
            Expr::Sub(a, b) => a.eval(prec)?.sub(&b.eval(prec)?, work),
            Expr::Mul(a, b) => a.eval(prec)?.mul(&b.eval(prec)?, work),
            Expr::Div(a, b) => {
                let den = b.eval(prec)?;
                a.eval(prec)?.div(&den, work).map_err(|_| {
                    Error::Expression(format!("division by possibly zero value {den}"))
                })?
            }
        })
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Expr::Const(r) => write!(f, "({}/{})", r.numer(), r.denom()),
            Expr::Pi => write!(f, "pi"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

/// Recursive-descent parser for strings like `sqrt(6/(pi*24*2))`.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Expression(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs + self.term()?;
            } else if self.eat('-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = lhs * self.factor()?;
            } else if self.eat('/') {
                lhs = lhs / self.factor()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        if self.eat('(') {
            let inner = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(inner);
        }
        if self.eat_word("sqrt") {
            if !self.eat('(') {
                return Err(self.err("expected '(' after sqrt"));
            }
            let inner = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::sqrt(inner));
        }
        if self.eat_word("pi") || self.eat_word("π") {
            return Ok(Expr::Pi);
        }
        self.number()
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(self.err("expected a number, 'pi', 'sqrt' or '('"));
        }
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
            return Err(self.err("malformed number"));
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().map_err(|_| self.err("malformed number"))?;
        let den = BigInt::from(10).pow(frac_part.len() as u32);
        Ok(Expr::Const(BigRational::new(num, den)))
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bound_expressions() {
        let e: Expr = "sqrt(6/(pi*24*2))".parse().unwrap();
        let v = e.eval(64).unwrap();
        assert!((v.mid_f64() - 0.199_471_140_200_716_34).abs() < 1e-15);

        let e: Expr = "1.5 - -2 * 3".parse().unwrap();
        let v = e.eval(64).unwrap();
        assert!(v.contains_rational(&BigRational::new(15.into(), 2.into())));
    }

    #[test]
    fn malformed_inputs_are_expression_errors() {
        for bad in ["", "sqrt(2", "1 +", "2..3", "pi pi", "foo(1)", "(1))"] {
            assert!(
                matches!(bad.parse::<Expr>(), Err(Error::Expression(_))),
                "{bad:?} should fail"
            );
        }
    }

    #[test]
    fn evaluation_domain_errors() {
        let e: Expr = "sqrt(1 - 2)".parse().unwrap();
        assert!(matches!(e.eval(64), Err(Error::Expression(_))));
        let e: Expr = "1/(pi - pi)".parse().unwrap();
        assert!(matches!(e.eval(64), Err(Error::Expression(_))));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let e = Expr::int(2) * Expr::sqrt(Expr::int(2) / Expr::pi())
            / (Expr::ratio(3, 7) - Expr::int(1));
        let again: Expr = e.to_string().parse().unwrap();
        let (a, b) = (e.eval(100).unwrap(), again.eval(100).unwrap());
        assert!((a.mid_f64() - b.mid_f64()).abs() < 1e-15);
    }
}
