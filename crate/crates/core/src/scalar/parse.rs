//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | name | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//!
//! Whitespace is insignificant. The optional leading `-` lets canonical
//! output such as `-2 - 2*gamma^2` parse back.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::poly::{Polynomial, Vars};
use super::rational::Rational;

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    Unexpected(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("exponent larger than {MAX_EXPONENT}")]
    ExponentTooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {pos}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

/// Parses `text` over the given variable list.
pub fn parse_expr(text: &str, vars: &Vars) -> Result<Polynomial, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(out),
        Some(c) => Err(p.err(ParseErrorKind::Unexpected(c as char))),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            pos: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let e = self.uint()?;
            if e > BigInt::from(MAX_EXPONENT) {
                self.pos = start;
                return Err(self.err(ParseErrorKind::ExponentTooLarge));
            }
            let e: u32 = e.try_into().expect("bounded exponent");
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(match self.peek() {
                        Some(c) => self.err(ParseErrorKind::Unexpected(c as char)),
                        None => self.err(ParseErrorKind::UnexpectedEnd),
                    });
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut value = Rational::from_integer(num);
                let save = self.pos;
                self.skip_ws();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let den = self.uint()?;
                    if den.is_zero() {
                        self.pos = at;
                        return Err(self.err(ParseErrorKind::ZeroDenominator));
                    }
                    value /= Rational::from_integer(den);
                } else {
                    self.pos = save;
                }
                Ok(Polynomial::constant(self.vars, value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars.index_of(name) {
                    Some(idx) => Ok(Polynomial::var_at(self.vars, idx)),
                    None => {
                        self.pos = start;
                        Err(self.err(ParseErrorKind::UnknownVariable(name.to_string())))
                    }
                }
            }
            Some(c) => Err(self.err(ParseErrorKind::Unexpected(c as char))),
        }
    }

    fn uint(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.peek() {
                Some(c) => self.err(ParseErrorKind::Unexpected(c as char)),
                None => self.err(ParseErrorKind::UnexpectedEnd),
            });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::VarList;
    use crate::scalar::rational::{int, rat};

    fn vars() -> Vars {
        VarList::new(["beta", "gamma"])
    }

    #[test]
    fn constant_minus_linear() {
        let v = vars();
        let p = parse_expr("2 - 2*beta", &v).unwrap();
        let terms: Vec<_> = p.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect();
        assert_eq!(terms, vec![(vec![0, 0], int(2)), (vec![1, 0], int(-2))]);
    }

    #[test]
    fn zero_parses_to_zero() {
        assert!(parse_expr("0", &vars()).unwrap().is_zero());
        assert!(parse_expr(" 3 - 3 ", &vars()).unwrap().is_zero());
    }

    #[test]
    fn half_square() {
        let v = vars();
        let p = parse_expr("(beta-gamma)^2 * 1/2", &v).unwrap();
        let b = Polynomial::var(&v, "beta").unwrap();
        let g = Polynomial::var(&v, "gamma").unwrap();
        let expected = b.pow(2).scale(&rat(1, 2)) - &b * &g + g.pow(2).scale(&rat(1, 2));
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "1/2*beta^2 - beta*gamma + 1/2*gamma^2");
    }

    #[test]
    fn leading_minus_round_trip() {
        let v = vars();
        let p = parse_expr("-2-2*gamma^2", &v).unwrap();
        assert_eq!(p.to_string(), "-2*gamma^2 - 2");
        assert_eq!(parse_expr(&p.to_string(), &v).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars();
        let e = parse_expr("2 + delta", &v).unwrap_err();
        assert_eq!(e.pos, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownVariable("delta".into()));
        let e = parse_expr("2 * (beta", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
        let e = parse_expr("beta $ 2", &v).unwrap_err();
        assert_eq!((e.pos, e.kind), (5, ParseErrorKind::Unexpected('$')));
        let e = parse_expr("1/0", &v).unwrap_err();
        assert_eq!((e.pos, e.kind), (2, ParseErrorKind::ZeroDenominator));
        assert!(parse_expr("beta/2", &v).is_err());
        assert!(parse_expr("", &v).is_err());
        assert!(parse_expr("beta^-1", &v).is_err());
    }
}
