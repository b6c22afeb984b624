//! Finite Laurent series in the formal parameter `e` over exact rationals.
//!
//! Exponents may be negative (the constructions below use `e^-2` heavily),
//! so the coefficient ring contains the units `c * e^k`. A series is stored
//! sparsely with no zero coefficients; the empty map is zero.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::Error;
use crate::scalar::{self, Scalar};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EpsCoeff {
    terms: BTreeMap<i32, Scalar>,
}

impl EpsCoeff {
    pub fn zero() -> Self {
        EpsCoeff {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_scalar(Scalar::one())
    }

    pub fn from_scalar(s: Scalar) -> Self {
        let mut t = BTreeMap::new();
        if !s.is_zero() {
            t.insert(0, s);
        }
        EpsCoeff { terms: t }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_scalar(scalar::int(n))
    }

    /// `c * e^k`.
    pub fn monomial(c: Scalar, k: i32) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(k, c);
        }
        EpsCoeff { terms: t }
    }

    /// `e^k`.
    pub fn eps_power(k: i32) -> Self {
        Self::monomial(Scalar::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i32, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i32) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn has_negative_exp(&self) -> bool {
        self.min_exp().map(|k| k < 0).unwrap_or(false)
    }

    fn insert(&mut self, k: i32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        EpsCoeff {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = EpsCoeff::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.insert(ka + kb, ca * cb);
            }
        }
        out
    }

    pub fn mul_scalar(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return EpsCoeff::zero();
        }
        EpsCoeff {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Multiply by `e^k`.
    pub fn shift(&self, k: i32) -> Self {
        EpsCoeff {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// A unit of this ring is a single term `c * e^k` with `c != 0`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Some(Self::monomial(Scalar::one() / c, -k))
    }

    /// Exact Laurent division: `Some(q)` with `self = q * d`, else `None`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(EpsCoeff::zero());
        }
        // Shift both to ordinary polynomials in e and long-divide.
        let sa = self.min_exp().unwrap();
        let sd = d.min_exp().unwrap();
        let da = self.max_exp().unwrap() - sa;
        let dd = d.max_exp().unwrap() - sd;
        if dd > da {
            return None;
        }
        let mut rem: Vec<Scalar> = (0..=da)
            .map(|i| self.coeff(sa + i))
            .collect();
        let div: Vec<Scalar> = (0..=dd)
            .map(|i| d.coeff(sd + i))
            .collect();
        let lead = div.last().unwrap().clone();
        let mut quot = vec![Scalar::zero(); (da - dd + 1) as usize];
        for i in (0..quot.len()).rev() {
            let top = rem[i + dd as usize].clone();
            if top.is_zero() {
                continue;
            }
            let q = top / &lead;
            for (j, dc) in div.iter().enumerate() {
                let cell = &mut rem[i + j];
                *cell -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut out = EpsCoeff::zero();
        for (i, c) in quot.into_iter().enumerate() {
            out.insert(sa - sd + i as i32, c);
        }
        Some(out)
    }

    /// Exact evaluation at a rational `e`. Fails at `e = 0` when negative
    /// powers are present.
    pub fn eval(&self, eps: &Scalar) -> Result<Scalar, Error> {
        if eps.is_zero() && self.has_negative_exp() {
            return Err(Error::EpsZero);
        }
        let mut acc = Scalar::zero();
        for (k, c) in &self.terms {
            acc += c * pow_rational(eps, *k);
        }
        Ok(acc)
    }

    /// True when every coefficient of this series is a constant (exponent 0).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| *k == 0)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return Some(self.coeff(0));
        }
        None
    }
}

fn pow_rational(base: &Scalar, k: i32) -> Scalar {
    if k == 0 {
        return Scalar::one();
    }
    let mut acc = Scalar::one();
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    if k < 0 {
        acc = Scalar::one() / acc;
    }
    acc
}

impl fmt::Display for EpsCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Ascending exponent order: constants first, then e, e^2, ...
        for (k, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let a = c.abs();
            if *k == 0 {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write_eps(f, *k)?;
            } else {
                write!(f, "{}*", a)?;
                write_eps(f, *k)?;
            }
        }
        Ok(())
    }
}

fn write_eps(f: &mut fmt::Formatter<'_>, k: i32) -> fmt::Result {
    if k == 1 {
        write!(f, "e")
    } else {
        write!(f, "e^{}", k)
    }
}
