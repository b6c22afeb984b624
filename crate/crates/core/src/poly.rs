//! Sparse multivariate polynomials with Laurent-series coefficients.
//!
//! Monomials are ordered graded-lexicographically with earlier coordinates
//! taking priority (`z > r > th > x1 > y1 > ..` in the jet system), which
//! fixes a canonical printing order and a leading term for exact division.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{Signed, ToPrimitive, Zero};

use crate::coords::CoordSystem;
use crate::eps::EpsCoeff;
use crate::error::Error;
use crate::real::{Ctx, Real};
use crate::scalar::Scalar;

/// Exponent vector over the coordinates of one system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise division; `None` when some exponent would go negative.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same total degree: a larger exponent on an earlier coordinate wins.
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct Poly {
    coords: Arc<CoordSystem>,
    terms: BTreeMap<Monomial, EpsCoeff>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        CoordSystem::same(&self.coords, &other.coords) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(coords: &Arc<CoordSystem>) -> Self {
        Poly {
            coords: coords.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(coords: &Arc<CoordSystem>, c: EpsCoeff) -> Self {
        let mut p = Poly::zero(coords);
        p.add_term(Monomial::unit(coords.len()), c);
        p
    }

    pub fn one(coords: &Arc<CoordSystem>) -> Self {
        Self::constant(coords, EpsCoeff::one())
    }

    pub fn int(coords: &Arc<CoordSystem>, n: i64) -> Self {
        Self::constant(coords, EpsCoeff::from_int(n))
    }

    pub fn scalar(coords: &Arc<CoordSystem>, s: Scalar) -> Self {
        Self::constant(coords, EpsCoeff::from_scalar(s))
    }

    /// The parameter `e^k` as a constant polynomial.
    pub fn eps(coords: &Arc<CoordSystem>, k: i32) -> Self {
        Self::constant(coords, EpsCoeff::eps_power(k))
    }

    pub fn var(coords: &Arc<CoordSystem>, i: usize) -> Self {
        let mut p = Poly::zero(coords);
        p.add_term(Monomial::var(coords.len(), i), EpsCoeff::one());
        p
    }

    /// Named-variable convenience constructor.
    pub fn var_named(coords: &Arc<CoordSystem>, name: &str) -> Result<Self, Error> {
        let i = coords
            .index_of(name)
            .ok_or_else(|| Error::Invalid(format!("unknown coordinate `{}`", name)))?;
        Ok(Self::var(coords, i))
    }

    pub fn from_terms(
        coords: &Arc<CoordSystem>,
        terms: impl IntoIterator<Item = (Monomial, EpsCoeff)>,
    ) -> Self {
        let mut p = Poly::zero(coords);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn coords(&self) -> &Arc<CoordSystem> {
        &self.coords
    }

    pub fn nvars(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &EpsCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> EpsCoeff {
        self.terms.get(m).cloned().unwrap_or_else(EpsCoeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: EpsCoeff) {
        debug_assert_eq!(m.0.len(), self.coords.len());
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &EpsCoeff)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        CoordSystem::check_same(&self.coords, &other.coords)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coords: self.coords.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        CoordSystem::check_same(&self.coords, &other.coords)?;
        let mut out = Poly::zero(&self.coords);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn mul_coeff(&self, c: &EpsCoeff) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.coords);
        }
        Poly {
            coords: self.coords.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.mul_coeff(&EpsCoeff::from_int(n))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(&self.coords);
        for _ in 0..k {
            acc = acc.mul(self).expect("same coords");
        }
        acc
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Poly::zero(&self.coords);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] = e - 1;
            out.add_term(Monomial(exps), c.mul_scalar(&crate::scalar::int(e as i64)));
        }
        out
    }

    pub fn has_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    pub fn max_exp(&self, i: usize) -> u16 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// True when only even powers of coordinate `i` occur.
    pub fn is_even_in(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m.exp(i) % 2 == 0)
    }

    /// Substitute coordinate `i` by the polynomial `q` (Horner evaluation).
    pub fn subst(&self, i: usize, q: &Poly) -> Result<Self, Error> {
        CoordSystem::check_same(&self.coords, q.coords())?;
        // Group by the exponent of variable i.
        let mut by_exp: BTreeMap<u16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            let mut exps = m.0.clone();
            exps[i] = 0;
            by_exp
                .entry(e)
                .or_insert_with(|| Poly::zero(&self.coords))
                .add_term(Monomial(exps), c.clone());
        }
        let mut acc = Poly::zero(&self.coords);
        let max = by_exp.keys().next_back().copied().unwrap_or(0);
        for e in (0..=max).rev() {
            acc = acc.mul(q)?;
            if let Some(part) = by_exp.get(&e) {
                acc = acc.add(part)?;
            }
        }
        Ok(acc)
    }

    /// Substitute `x_i^2 -> q`, mapping the remaining coordinates through
    /// `var_map` into the coordinate system of `q`. Requires `self` even in
    /// coordinate `i`.
    pub fn subst_square_into(
        &self,
        i: usize,
        q: &Poly,
        var_map: &[Option<usize>],
    ) -> Result<Poly, Error> {
        if !self.is_even_in(i) {
            return Err(Error::ReductionFailed(format!(
                "odd powers of `{}` present",
                self.coords.name(i)
            )));
        }
        let target = q.coords();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; target.len()];
            for (j, &e) in m.0.iter().enumerate() {
                if j == i || e == 0 {
                    continue;
                }
                match var_map[j] {
                    Some(t) => exps[t] += e,
                    None => {
                        return Err(Error::ReductionFailed(format!(
                            "coordinate `{}` has no image in [{}]",
                            self.coords.name(j),
                            target
                        )))
                    }
                }
            }
            let base = Poly::from_terms(target, [(Monomial(exps), c.clone())]);
            let half = (m.exp(i) / 2) as u32;
            out = out.add(&base.mul(&q.pow(half))?)?;
        }
        Ok(out)
    }

    /// Transport into another coordinate system along an index map;
    /// coordinates without an image must be absent.
    pub fn map_vars(
        &self,
        target: &Arc<CoordSystem>,
        var_map: &[Option<usize>],
    ) -> Result<Poly, Error> {
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; target.len()];
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match var_map[j] {
                    Some(t) => exps[t] += e,
                    None => {
                        return Err(Error::ForbiddenCoordinate(
                            self.coords.name(j).to_string(),
                        ))
                    }
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Rename coordinates into another system of the same arity.
    pub fn rename(&self, target: &Arc<CoordSystem>) -> Result<Poly, Error> {
        if target.len() != self.coords.len() {
            return Err(Error::CoordMismatch(
                self.coords.to_string(),
                target.to_string(),
            ));
        }
        Ok(Poly {
            coords: target.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Exact multivariate division; `None` when the division has a remainder.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if !CoordSystem::same(&self.coords, &d.coords) || d.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.coords);
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = rm.div(&dm)?;
            let qc = rc.div_exact(&dc)?;
            let step = Poly::from_terms(&self.coords, [(qm, qc)]);
            quot = quot.add(&step).ok()?;
            rem = rem.sub(&step.mul(d).ok()?).ok()?;
        }
        Some(quot)
    }

    /// Divide out the largest common monomial factor, returning it alongside
    /// the reduced polynomial.
    pub fn factor_out_monomial(&self) -> (Monomial, Poly) {
        if self.is_zero() {
            return (Monomial::unit(self.coords.len()), self.clone());
        }
        let mut common = self.terms.keys().next().unwrap().0.clone();
        for m in self.terms.keys() {
            for (c, e) in common.iter_mut().zip(&m.0) {
                *c = (*c).min(*e);
            }
        }
        let common = Monomial(common);
        let out = Poly {
            coords: self.coords.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(&common).unwrap(), c.clone()))
                .collect(),
        };
        (common, out)
    }

    /// Exact evaluation at rational coordinates and rational `e`.
    pub fn eval_scalar(&self, point: &[Scalar], eps: &Scalar) -> Result<Scalar, Error> {
        if point.len() != self.coords.len() {
            return Err(Error::Invalid(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.coords.len()
            )));
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.eval(eps)?;
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Collapse the Laurent coefficients at a rational `e`, leaving a
    /// polynomial with constant coefficients.
    pub fn specialize_eps(&self, eps: &Scalar) -> Result<Poly, Error> {
        let mut out = Poly::zero(&self.coords);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), EpsCoeff::from_scalar(c.eval(eps)?));
        }
        Ok(out)
    }

    /// High-precision evaluation; `e` must already be specialized away.
    pub fn eval_real(&self, ctx: &Ctx, point: &[Real]) -> Result<Real, Error> {
        let powers = self.power_table(ctx, point)?;
        let mut acc = ctx.zero();
        for (m, c) in &self.terms {
            let cv = c
                .constant_value()
                .ok_or_else(|| Error::Invalid("evaluate with symbolic e".into()))?;
            let mut t = ctx.from_scalar(&cv);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = ctx.mul(&t, &powers[i][e as usize]);
                }
            }
            acc = ctx.add(&acc, &t);
        }
        Ok(acc)
    }

    fn power_table(&self, ctx: &Ctx, point: &[Real]) -> Result<Vec<Vec<Real>>, Error> {
        if point.len() != self.coords.len() {
            return Err(Error::Invalid("point arity mismatch".into()));
        }
        let mut table = Vec::with_capacity(point.len());
        for (i, x) in point.iter().enumerate() {
            let maxe = self.max_exp(i) as usize;
            let mut row = Vec::with_capacity(maxe + 1);
            row.push(ctx.one());
            for e in 1..=maxe {
                let prev = row[e - 1].clone();
                row.push(ctx.mul(&prev, x));
            }
            table.push(row);
        }
        Ok(table)
    }

    /// Fast double-precision evaluation; `e` must already be specialized.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let cv = c
                .constant_value()
                .expect("evaluate with symbolic e")
                .to_f64()
                .unwrap_or(f64::NAN);
            let mut t = cv;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            // Single-term coefficients fold their sign into the term.
            let (lead_sign, coeff_str) = format_coeff(c, m.is_unit());
            if first {
                if lead_sign < 0 {
                    write!(f, "-")?;
                }
            } else if lead_sign < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mono = format_monomial(&self.coords, m);
            match (coeff_str, mono) {
                (Some(cs), Some(ms)) => write!(f, "{}*{}", cs, ms)?,
                (Some(cs), None) => write!(f, "{}", cs)?,
                (None, Some(ms)) => write!(f, "{}", ms)?,
                (None, None) => write!(f, "1")?,
            }
        }
        Ok(())
    }
}

fn format_coeff(c: &EpsCoeff, constant_term: bool) -> (i32, Option<String>) {
    if c.num_terms() == 1 {
        let (k, v) = c.iter().next().unwrap();
        let sign = if v.is_negative() { -1 } else { 1 };
        let mag = EpsCoeff::monomial(v.abs(), *k);
        if mag.is_one() && !constant_term {
            (sign, None)
        } else {
            (sign, Some(mag.to_string()))
        }
    } else {
        (1, Some(format!("({})", c)))
    }
}

fn format_monomial(coords: &CoordSystem, m: &Monomial) -> Option<String> {
    if m.is_unit() {
        return None;
    }
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            parts.push(coords.name(i).to_string());
        } else {
            parts.push(format!("{}^{}", coords.name(i), e));
        }
    }
    Some(parts.join("*"))
}
