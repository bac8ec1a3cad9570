//! Text syntax for chart expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | 'w[' i ',' r ']' | 'y[' i ',' r ']' | '(' expr ')'
//! ```
//!
//! Generator indices are 1-based, e.g. `y[1,1]^2 * (w[1,1]-w[2,1])^-1`.

use std::sync::Arc;

use num_bigint::BigInt;

use super::expr::{ChartExpr, Session, Var, VarKind};
use super::PoissonError;
use crate::scalar::Rational;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    session: &'a Arc<Session>,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> PoissonError {
        PoissonError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PoissonError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn digits(&mut self) -> Result<&'a str, PoissonError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn index(&mut self) -> Result<usize, PoissonError> {
        let d = self.digits()?;
        let k: usize = d.parse().map_err(|_| self.err("index too large"))?;
        k.checked_sub(1).ok_or_else(|| self.err("indices are 1-based"))
    }

    fn expr(&mut self) -> Result<ChartExpr, PoissonError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ChartExpr, PoissonError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| PoissonError::Parse {
                    position: at,
                    message: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ChartExpr, PoissonError> {
        if self.eat(b'-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ChartExpr, PoissonError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        let at = self.pos;
        let k: i64 = self
            .digits()?
            .parse()
            .map_err(|_| self.err("exponent too large"))?;
        base.pow(if neg { -k } else { k })
            .map_err(|_| PoissonError::Parse {
                position: at,
                message: "negative power of zero".into(),
            })
    }

    fn atom(&mut self) -> Result<ChartExpr, PoissonError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c @ (b'w' | b'y')) => {
                let start = self.pos;
                self.pos += 1;
                self.expect(b'[')?;
                let node = self.index()?;
                self.expect(b',')?;
                let r = self.index()?;
                self.expect(b']')?;
                let kind = if c == b'w' { VarKind::W } else { VarKind::Y };
                let k = self
                    .session
                    .index_of(Var { kind, node, r })
                    .ok_or(PoissonError::Parse {
                        position: start,
                        message: format!(
                            "generator {}[{},{}] is not in the chart",
                            c as char,
                            node + 1,
                            r + 1
                        ),
                    })?;
                Ok(ChartExpr::var(self.session, k))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let v: BigInt = d.parse().expect("digits");
                Ok(ChartExpr::constant(self.session, Rational::from_integer(v)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses an expression over the generators of `session`.
pub fn parse_expr(session: &Arc<Session>, text: &str) -> Result<ChartExpr, PoissonError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        session,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
