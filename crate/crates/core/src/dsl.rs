//! Small text language for polynomials, 1-forms and vector fields.
//!
//! One term per `+`/`-` separated item, e.g.
//! `(2*r^2-1)*dz + r^2*(r^2-1)*dth` or `e^-2*r*(r^2-1)*z*d/dr`.
//! Exact rationals are written `p/q`, the parameter is `e`, differentials
//! are `d<coord>` and basis fields `d/d<coord>`. Errors carry line/column.

use std::sync::Arc;

use num::bigint::BigInt;

use crate::coords::CoordSystem;
use crate::error::Error;
use crate::field::VecField;
use crate::form::Form;
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    VecBasis(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<SpannedTok>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| {
            out.push(SpannedTok {
                tok,
                line: tl,
                col: tc,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '+' => push(Tok::Plus),
            '-' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '/' => push(Tok::Slash),
            '^' => push(Tok::Caret),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n: BigInt = text.parse().expect("digits");
                out.push(SpannedTok {
                    tok: Tok::Int(n),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                // `d/d<name>` lexes as one basis-field token.
                if c == 'd'
                    && i + 2 < chars.len()
                    && chars[i + 1] == '/'
                    && chars[i + 2] == 'd'
                {
                    let start = i + 3;
                    let mut j = start;
                    while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                        j += 1;
                    }
                    if j == start {
                        return Err(Error::parse(line, col, "expected coordinate after `d/d`"));
                    }
                    let name: String = chars[start..j].iter().collect();
                    out.push(SpannedTok {
                        tok: Tok::VecBasis(name),
                        line: tl,
                        col: tc,
                    });
                    col += j - i;
                    i = j;
                    continue;
                }
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                    col += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(SpannedTok {
                    tok: Tok::Ident(name),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            other => {
                return Err(Error::parse(line, col, format!("unexpected character `{}`", other)));
            }
        }
        i += 1;
        col += 1;
    }
    out.push(SpannedTok {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Parsed value: a polynomial, a 1-form, or a vector field.
#[derive(Debug, Clone)]
pub enum Value {
    Scalar(Poly),
    OneForm(Form),
    Field(VecField),
}

struct Parser<'a> {
    toks: Vec<SpannedTok>,
    pos: usize,
    coords: &'a Arc<CoordSystem>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &SpannedTok {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> SpannedTok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &SpannedTok, msg: impl Into<String>) -> Error {
        Error::parse(t.line, t.col, msg)
    }

    fn expr(&mut self) -> Result<Value, Error> {
        let mut lead_neg = false;
        if matches!(self.peek().tok, Tok::Minus) {
            self.bump();
            lead_neg = true;
        } else if matches!(self.peek().tok, Tok::Plus) {
            self.bump();
        }
        let mut acc = self.term()?;
        if lead_neg {
            acc = neg_value(acc);
        }
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.add_values(acc, rhs)?;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = self.add_values(acc, neg_value(rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok.clone() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = self.mul_values(acc, rhs)?;
                }
                Tok::Slash => {
                    let at = self.bump();
                    let rhs = self.factor()?;
                    acc = self.div_values(acc, rhs, &at)?;
                }
                // implicit products like `2r` are not allowed; keep grammar strict
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Value, Error> {
        let base = self.atom()?;
        if matches!(self.peek().tok, Tok::Caret) {
            let at = self.bump();
            let mut neg = false;
            if matches!(self.peek().tok, Tok::Minus) {
                self.bump();
                neg = true;
            }
            let e = match self.bump() {
                SpannedTok {
                    tok: Tok::Int(n), ..
                } => n,
                t => return Err(self.err(&t, "expected integer exponent")),
            };
            let exp: i64 = e
                .try_into()
                .map_err(|_| self.err(&at, "exponent too large"))?;
            let exp = if neg { -exp } else { exp };
            return self.pow_value(base, exp, &at);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value, Error> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Int(n) => Ok(Value::Scalar(Poly::scalar(
                self.coords,
                Scalar::from_integer(n),
            ))),
            Tok::Ident(name) => self.resolve_ident(&name, &t),
            Tok::VecBasis(name) => {
                let i = self
                    .coords
                    .index_of(&name)
                    .ok_or_else(|| self.err(&t, format!("unknown coordinate `{}`", name)))?;
                Ok(Value::Field(VecField::basis(self.coords, i)))
            }
            Tok::LParen => {
                let v = self.expr()?;
                let close = self.bump();
                if !matches!(close.tok, Tok::RParen) {
                    return Err(self.err(&close, "expected `)`"));
                }
                Ok(v)
            }
            Tok::Minus => {
                let v = self.factor()?;
                Ok(neg_value(v))
            }
            _ => Err(self.err(&t, "expected a number, name, or `(`")),
        }
    }

    fn resolve_ident(&self, name: &str, t: &SpannedTok) -> Result<Value, Error> {
        if name == "e" {
            return Ok(Value::Scalar(Poly::eps(self.coords, 1)));
        }
        if let Some(i) = self.coords.index_of(name) {
            return Ok(Value::Scalar(Poly::var(self.coords, i)));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if let Some(i) = self.coords.index_of(rest) {
                return Ok(Value::OneForm(Form::coord_diff(self.coords, i)));
            }
        }
        Err(self.err(t, format!("unknown name `{}`", name)))
    }

    fn add_values(&self, a: Value, b: Value) -> Result<Value, Error> {
        let t = self.peek().clone();
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(
                x.add(&y).map_err(|e| self.err(&t, e.to_string()))?,
            )),
            (Value::OneForm(x), Value::OneForm(y)) => Ok(Value::OneForm(
                x.add(&y).map_err(|e| self.err(&t, e.to_string()))?,
            )),
            (Value::Field(x), Value::Field(y)) => Ok(Value::Field(
                x.add(&y).map_err(|e| self.err(&t, e.to_string()))?,
            )),
            _ => Err(self.err(&t, "cannot add values of different kinds")),
        }
    }

    fn mul_values(&self, a: Value, b: Value) -> Result<Value, Error> {
        let t = self.peek().clone();
        let fail = |msg: &str| Err(self.err(&t, msg.to_string()));
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(
                x.mul(&y).map_err(|e| self.err(&t, e.to_string()))?,
            )),
            (Value::Scalar(x), Value::OneForm(y)) | (Value::OneForm(y), Value::Scalar(x)) => Ok(
                Value::OneForm(y.mul_poly(&x).map_err(|e| self.err(&t, e.to_string()))?),
            ),
            (Value::Scalar(x), Value::Field(y)) | (Value::Field(y), Value::Scalar(x)) => Ok(
                Value::Field(y.mul_poly(&x).map_err(|e| self.err(&t, e.to_string()))?),
            ),
            (Value::OneForm(_), Value::OneForm(_)) => fail("wedge products are not accepted here"),
            _ => fail("cannot multiply these values"),
        }
    }

    fn div_values(&self, a: Value, b: Value, at: &SpannedTok) -> Result<Value, Error> {
        // Division is only by invertible constants (rationals times e^k).
        let divisor = match b {
            Value::Scalar(p) => p,
            _ => return Err(self.err(at, "can only divide by constants")),
        };
        let c = match divisor.terms().next() {
            Some((m, c)) if divisor.num_terms() == 1 && m.is_unit() => c.clone(),
            _ => return Err(self.err(at, "can only divide by constants")),
        };
        let inv = c
            .inverse()
            .ok_or_else(|| self.err(at, "divisor is not invertible"))?;
        match a {
            Value::Scalar(p) => Ok(Value::Scalar(p.mul_coeff(&inv))),
            Value::OneForm(f) => Ok(Value::OneForm(
                f.mul_poly(&Poly::constant(self.coords, inv))
                    .map_err(|e| self.err(at, e.to_string()))?,
            )),
            Value::Field(x) => Ok(Value::Field(
                x.mul_poly(&Poly::constant(self.coords, inv))
                    .map_err(|e| self.err(at, e.to_string()))?,
            )),
        }
    }

    fn pow_value(&self, base: Value, exp: i64, at: &SpannedTok) -> Result<Value, Error> {
        let p = match base {
            Value::Scalar(p) => p,
            _ => return Err(self.err(at, "only scalars can be raised to powers")),
        };
        if exp >= 0 {
            return Ok(Value::Scalar(p.pow(exp as u32)));
        }
        // Negative powers need an invertible constant base (e.g. e^-2).
        let c = match p.terms().next() {
            Some((m, c)) if p.num_terms() == 1 && m.is_unit() => c.clone(),
            _ => return Err(self.err(at, "negative powers need a constant base")),
        };
        let inv = c
            .inverse()
            .ok_or_else(|| self.err(at, "base is not invertible"))?;
        let mut acc = crate::eps::EpsCoeff::one();
        for _ in 0..(-exp) {
            acc = acc.mul(&inv);
        }
        Ok(Value::Scalar(Poly::constant(self.coords, acc)))
    }
}

fn neg_value(v: Value) -> Value {
    match v {
        Value::Scalar(p) => Value::Scalar(p.neg()),
        Value::OneForm(f) => Value::OneForm(f.neg()),
        Value::Field(x) => Value::Field(x.neg()),
    }
}

pub fn parse_value(src: &str, coords: &Arc<CoordSystem>) -> Result<Value, Error> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        coords,
    };
    let v = p.expr()?;
    let t = p.peek().clone();
    if !matches!(t.tok, Tok::Eof) {
        return Err(Error::parse(t.line, t.col, "trailing input"));
    }
    Ok(v)
}

pub fn parse_poly(src: &str, coords: &Arc<CoordSystem>) -> Result<Poly, Error> {
    match parse_value(src, coords)? {
        Value::Scalar(p) => Ok(p),
        _ => Err(Error::parse(1, 1, "expected a polynomial")),
    }
}

pub fn parse_one_form(src: &str, coords: &Arc<CoordSystem>) -> Result<Form, Error> {
    match parse_value(src, coords)? {
        Value::OneForm(f) => Ok(f),
        Value::Scalar(p) if p.is_zero() => Ok(Form::zero(coords, 1)),
        _ => Err(Error::parse(1, 1, "expected a 1-form")),
    }
}

pub fn parse_field(src: &str, coords: &Arc<CoordSystem>) -> Result<VecField, Error> {
    match parse_value(src, coords)? {
        Value::Field(x) => Ok(x),
        Value::Scalar(p) if p.is_zero() => Ok(VecField::zero(coords)),
        _ => Err(Error::parse(1, 1, "expected a vector field")),
    }
}
