//! Polynomial expressions: a small recursive-descent parser, a printer
//! that emits the fewest parentheses needed to parse back to the same tree,
//! and evaluation into `MultiPoly`.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' nat)?
//! base   := nat ('/' nat)? | var | '(' expr ')'
//! var    := x | y | z | x1 .. x9
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use witt_residue::coeff::{format_rational, Coeff};
use witt_residue::poly::MultiPoly;
use witt_residue::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// x, y, z
    Letter(u8),
    /// x1 .. x9
    Indexed(u8),
}

impl Var {
    pub fn index(&self) -> usize {
        match self {
            Var::Letter(i) => *i as usize,
            Var::Indexed(i) => *i as usize - 1,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Letter(i) => write!(f, "{}", ["x", "y", "z"][*i as usize]),
            Var::Indexed(i) => write!(f, "x{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative rational literal.
    Num(BigRational),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, at: usize, message: impl Into<String>) -> ParseError {
        let before: String = self.chars[..at.min(self.chars.len())].iter().collect();
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { line, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn describe(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = if self.peek() == Some('-') {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = {
            self.skip_ws();
            self.pos
        };
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let found = self.describe();
            return Err(self.error(at, format!("exponent must be a non-negative integer literal, found {found}")));
        }
        let digits = self.digits();
        let e: u32 = digits.parse().map_err(|_| self.error(at, format!("exponent {digits} is too large")))?;
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().expect("digits");
                if self.peek() != Some('/') {
                    return Ok(Expr::Num(BigRational::from_integer(num)));
                }
                self.pos += 1;
                let dat = {
                    self.skip_ws();
                    self.pos
                };
                if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let found = self.describe();
                    return Err(self.error(dat, format!("expected a denominator, found {found}")));
                }
                let den: BigInt = self.digits().parse().expect("digits");
                if den.is_zero() {
                    return Err(self.error(dat, "zero denominator"));
                }
                Ok(Expr::Num(BigRational::new(num, den)))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    let found = self.describe();
                    return Err(self.error(self.pos, format!("expected ')', found {found}")));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let var = match name.as_str() {
                    "x" => Var::Letter(0),
                    "y" => Var::Letter(1),
                    "z" => Var::Letter(2),
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<u8>().ok()) {
                        Some(i @ 1..=9) if name.len() == 2 => Var::Indexed(i),
                        _ => {
                            return Err(self.error(at, format!("unknown variable '{name}' (use x, y, z or x1..x9)")))
                        }
                    },
                };
                Ok(Expr::Var(var))
            }
            _ => {
                let found = self.describe();
                Err(self.error(at, format!("expected a number, variable or '(', found {found}")))
            }
        }
    }
}

/// Parse a polynomial expression.
pub fn parse_poly(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        let found = p.describe();
        return Err(p.error(p.pos, format!("unexpected {found}")));
    }
    let vars = e.variables();
    let letters = vars.iter().any(|v| matches!(v, Var::Letter(_)));
    let indexed = vars.iter().any(|v| matches!(v, Var::Indexed(_)));
    if letters && indexed {
        return Err(ParseError { line: 1, column: 1, message: "cannot mix x, y, z with x1..x9".into() });
    }
    Ok(e)
}

/// Binding strength of the position an expression is printed in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    /// Leftmost operand of a sum: anything but nothing needs parentheses.
    Lead,
    /// Right operand of + or −, operand of unary minus, left of *.
    Term,
    /// Right operand of *.
    Factor,
    /// Base of ^.
    Base,
}

impl Expr {
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(a, _) | Expr::Neg(a) => a.collect_vars(out),
        }
    }

    fn fits(&self, slot: Slot) -> bool {
        match self {
            Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => slot == Slot::Lead,
            Expr::Mul(..) => slot <= Slot::Term,
            Expr::Pow(..) => slot <= Slot::Factor,
            Expr::Num(q) => !q.is_negative(),
            Expr::Var(_) => true,
        }
    }

    fn write_in(&self, f: &mut fmt::Formatter<'_>, slot: Slot) -> fmt::Result {
        if !self.fits(slot) {
            write!(f, "(")?;
            self.write_in(f, Slot::Lead)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(q) if q.is_negative() => write!(f, "-{}", format_rational(&-q)),
            Expr::Num(q) => write!(f, "{}", format_rational(q)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a, b) => {
                a.write_in(f, Slot::Lead)?;
                write!(f, " + ")?;
                b.write_in(f, Slot::Term)
            }
            Expr::Sub(a, b) => {
                a.write_in(f, Slot::Lead)?;
                write!(f, " - ")?;
                b.write_in(f, Slot::Term)
            }
            Expr::Mul(a, b) => {
                a.write_in(f, Slot::Term)?;
                write!(f, "*")?;
                b.write_in(f, Slot::Factor)
            }
            Expr::Pow(a, e) => {
                a.write_in(f, Slot::Base)?;
                write!(f, "^{e}")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_in(f, Slot::Term)
            }
        }
    }

    /// Evaluate into a polynomial ring with `nvars` variables.
    pub fn to_poly<C: Coeff>(&self, ctx: &C::Ctx, nvars: usize) -> Result<MultiPoly<C>> {
        Ok(match self {
            Expr::Num(q) => MultiPoly::constant(ctx.clone(), nvars, C::from_rational(ctx, q)?),
            Expr::Var(v) => {
                if v.index() >= nvars {
                    return Err(Error::InvalidInput(format!(
                        "variable {v} used but only {nvars} weight(s) given"
                    )));
                }
                MultiPoly::var(ctx.clone(), nvars, v.index())
            }
            Expr::Add(a, b) => a.to_poly(ctx, nvars)?.add_ref(&b.to_poly(ctx, nvars)?),
            Expr::Sub(a, b) => a.to_poly(ctx, nvars)?.sub_ref(&b.to_poly(ctx, nvars)?),
            Expr::Mul(a, b) => a.to_poly(ctx, nvars)?.mul_ref(&b.to_poly(ctx, nvars)?),
            Expr::Pow(a, e) => a.to_poly(ctx, nvars)?.pow(*e),
            Expr::Neg(a) => a.to_poly(ctx, nvars)?.neg_ref(),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_in(f, Slot::Lead)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Box<Expr> {
        Box::new(Expr::Var(Var::Letter(0)))
    }

    #[test]
    fn grammar_examples() {
        let e = parse_poly("x^3 + x*y^2").unwrap();
        assert_eq!(e.to_string(), "x^3 + x*y^2");
        let e = parse_poly("1/3*x^2").unwrap();
        match &e {
            Expr::Mul(a, _) => assert_eq!(**a, Expr::Num(BigRational::new(1.into(), 3.into()))),
            other => panic!("{other:?}"),
        }
        let err = parse_poly("x^(-1)").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(parse_poly("x^-1").is_err());
        assert!(parse_poly("2x").is_err());
        assert!(parse_poly("x + x1").is_err());
        assert!(parse_poly("x/3").is_err());
        assert!(parse_poly("w").is_err());
        assert!(parse_poly("x10").is_err());
        assert!(parse_poly("1/0").is_err());
        let err = parse_poly("x +\n  * y").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn minimal_parentheses() {
        let cases = [
            (Expr::Neg(Box::new(Expr::Neg(x()))), "-(-x)"),
            (Expr::Add(x(), Box::new(Expr::Neg(x()))), "x + (-x)"),
            (Expr::Sub(x(), Box::new(Expr::Sub(x(), x()))), "x - (x - x)"),
            (Expr::Mul(x(), Box::new(Expr::Mul(x(), x()))), "x*(x*x)"),
            (Expr::Pow(Box::new(Expr::Pow(x(), 2)), 3), "(x^2)^3"),
            (Expr::Mul(Box::new(Expr::Neg(x())), x()), "(-x)*x"),
            (Expr::Add(Box::new(Expr::Neg(x())), x()), "-x + x"),
        ];
        for (e, s) in cases {
            assert_eq!(e.to_string(), s);
            assert_eq!(parse_poly(s).unwrap(), e);
        }
    }

    #[test]
    fn evaluation() {
        let e = parse_poly("(x + y)^2 - 2*x*y").unwrap();
        let p: MultiPoly<BigRational> = e.to_poly(&(), 2).unwrap();
        assert_eq!(p.to_string(), "x^2 + y^2");
        assert!(matches!(e.to_poly::<BigRational>(&(), 1), Err(Error::InvalidInput(_))));
    }
}
