//! Text form of scalars: rationals `p/q`, roots of unity `z<N>^<k>`, sums
//! and products, e.g. `1/2 + 3*z8^3`. Whitespace-insensitive.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::CycScalar;
use crate::error::{Error, Result};

pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src: src.as_bytes(), pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    /// Case-sensitive keyword match at the cursor.
    pub fn eat_kw(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn digits(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| self.err("integer literal too large"))
    }

    pub fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let d = self.digits()? as i64;
        Ok(if neg { -d } else { d })
    }

    /// `p` or `p/q`, optionally negative.
    pub fn rational(&mut self) -> Result<BigRational> {
        let neg = self.eat(b'-');
        let num = self.digits()?;
        let den = if self.eat(b'/') { self.digits()? } else { 1 };
        if den == 0 {
            return Err(self.err("zero denominator"));
        }
        let mut r = BigRational::new(BigInt::from(num), BigInt::from(den));
        if neg {
            r = -r;
        }
        Ok(r)
    }
}

/// Parse one scalar expression, requiring the whole input to be consumed.
pub fn parse_scalar(src: &str) -> Result<CycScalar> {
    let mut cur = Cursor::new(src);
    let v = scalar_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input after scalar"));
    }
    Ok(v)
}

pub(crate) fn scalar_expr(cur: &mut Cursor) -> Result<CycScalar> {
    let mut acc = scalar_term(cur)?;
    loop {
        if cur.eat(b'+') {
            acc = acc.add(&scalar_term(cur)?)?;
        } else if cur.eat(b'-') {
            acc = acc.sub(&scalar_term(cur)?)?;
        } else {
            return Ok(acc);
        }
    }
}

fn scalar_term(cur: &mut Cursor) -> Result<CycScalar> {
    let mut acc = scalar_factor(cur)?;
    while cur.eat(b'*') {
        acc = acc.mul(&scalar_factor(cur)?)?;
    }
    Ok(acc)
}

pub(crate) fn scalar_factor(cur: &mut Cursor) -> Result<CycScalar> {
    match cur.peek() {
        Some(b'-') => {
            cur.bump();
            Ok(scalar_factor(cur)?.neg())
        }
        Some(b'(') => {
            cur.bump();
            let v = scalar_expr(cur)?;
            cur.expect(b')')?;
            Ok(v)
        }
        Some(b'z') => {
            cur.bump();
            let n = cur.digits()?;
            let n = u32::try_from(n).map_err(|_| cur.err("conductor too large"))?;
            let k = if cur.eat(b'^') { cur.signed_int()? } else { 1 };
            CycScalar::root_of_unity(n, k)
        }
        Some(c) if c.is_ascii_digit() => {
            let r = cur.rational()?;
            Ok(CycScalar::from_rational(r))
        }
        _ => Err(cur.err("expected scalar")),
    }
}

/// True when the scalar is syntactically a single product (no top-level sum),
/// so it can be printed as a coefficient without parentheses.
pub(crate) fn is_single_term(s: &CycScalar) -> bool {
    s.is_zero() || s.terms().count() == 1
}

/// Print a scalar so that `<printed>*chi(...)` re-parses: multi-term sums
/// get parenthesized.
pub(crate) fn coeff_string(s: &CycScalar) -> String {
    if is_single_term(s) {
        s.to_string()
    } else {
        format!("({})", s)
    }
}
