//! Exact univariate polynomials: Sturm chains, positivity certificates and
//! real-root isolation with multiplicities.

use std::fmt;

use num::{One, Signed, Zero};

use crate::error::Error;
use crate::poly::Poly;
use crate::real::{Ctx, Real};
use crate::scalar::{self, Scalar};

/// Dense univariate polynomial over exact rationals; `coeffs[i]` multiplies
/// `x^i` and the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| scalar::int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    /// Extracts the univariate restriction of a multivariate polynomial that
    /// only involves coordinate `var` (`e` must be specialized already).
    pub fn from_poly(p: &Poly, var: usize) -> Result<Self, Error> {
        let mut coeffs = vec![Scalar::zero(); p.max_exp(var) as usize + 1];
        for (m, c) in p.terms() {
            for (i, &e) in m.0.iter().enumerate() {
                if i != var && e > 0 {
                    return Err(Error::Invalid(format!(
                        "polynomial is not univariate in `{}`",
                        p.coords().name(var)
                    )));
                }
            }
            let v = c
                .constant_value()
                .ok_or_else(|| Error::Invalid("specialize e first".into()))?;
            coeffs[m.exp(var) as usize] += v;
        }
        Ok(Self::new(coeffs))
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_real(&self, ctx: &Ctx, x: &Real) -> Real {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.add(&ctx.mul(&acc, x), &ctx.from_scalar(c));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * scalar::int(i as i64 + 1))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn mul_scalar(&self, s: &Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![Scalar::zero(); self.coeffs.len().saturating_sub(d.coeffs.len() - 1)];
        let dl = d.leading();
        while !rem.is_zero() && rem.degree() >= d.degree() && !(rem.degree() == 0 && d.degree() > 0)
        {
            if rem.coeffs.len() < d.coeffs.len() {
                break;
            }
            let shift = rem.coeffs.len() - d.coeffs.len();
            let q = rem.leading() / &dl;
            quot[shift] = q.clone();
            let mut new = rem.coeffs.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                new[shift + j] -= &q * c;
            }
            new.pop();
            rem = Self::new(new);
        }
        (Self::new(quot), rem)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.mul_scalar(&(Scalar::one() / lead))
    }

    /// Sturm chain `p, p', -rem, ..`.
    pub fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].divmod(&chain[n - 1]);
            chain.push(r.neg());
        }
        chain
    }

    /// Yun square-free factorization: returns `(factor, multiplicity)` pairs
    /// with distinct square-free factors.
    pub fn squarefree_factors(&self) -> Vec<(UniPoly, usize)> {
        if self.is_zero() || self.degree() == 0 {
            return vec![];
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.divmod(&a0).0;
        let mut c = d.divmod(&a0).0;
        let mut out = Vec::new();
        let mut mult = 1usize;
        loop {
            let dd = c.sub(&b.derivative());
            let a = b.gcd(&dd);
            if a.degree() > 0 {
                out.push((a.clone(), mult));
            }
            b = b.divmod(&a).0;
            c = dd.divmod(&a).0;
            mult += 1;
            if b.degree() == 0 {
                break;
            }
        }
        out
    }
}

fn sign_variations(signs: &[i32]) -> usize {
    let mut count = 0;
    let mut last = 0;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(chain: &[UniPoly], x: &Scalar) -> usize {
    let signs: Vec<i32> = chain.iter().map(|p| scalar::sign(&p.eval(x))).collect();
    sign_variations(&signs)
}

/// Number of distinct real roots of the chain's base polynomial in `(a, b]`.
pub fn count_roots(chain: &[UniPoly], a: &Scalar, b: &Scalar) -> usize {
    variations_at(chain, a).saturating_sub(variations_at(chain, b))
}

/// Sturm positivity certificate: `true` iff `p` has no real root in
/// `[lo, hi]` and is positive at the midpoint. Exact arithmetic throughout.
pub fn sturm_positive(p: &UniPoly, lo: &Scalar, hi: &Scalar) -> Result<bool, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(lo < hi, "empty interval");
    if p.eval(lo).is_zero() || p.eval(hi).is_zero() {
        return Ok(false);
    }
    let chain = p.sturm_chain();
    if count_roots(&chain, lo, hi) > 0 {
        return Ok(false);
    }
    let mid = (lo + hi) / scalar::int(2);
    Ok(p.eval(&mid).is_positive())
}

/// Isolating interval `[lo, hi]` for one real root; `lo == hi` marks an
/// exact rational root.
#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    pub lo: Scalar,
    pub hi: Scalar,
    pub multiplicity: usize,
}

impl IsolatedRoot {
    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / scalar::int(2)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Cauchy bound: all real roots lie in `[-b, b]`.
fn root_bound(p: &UniPoly) -> Scalar {
    let lead = p.leading().abs();
    let mx = p
        .coeffs
        .iter()
        .map(|c| c.abs())
        .fold(Scalar::zero(), |a, b| if a > b { a } else { b });
    Scalar::one() + mx / lead
}

/// Isolates all real roots of `p` with multiplicities via Yun factorization
/// and Sturm bisection. Intervals are pairwise disjoint and each contains
/// exactly one root.
pub fn isolate_roots(p: &UniPoly) -> Result<Vec<IsolatedRoot>, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out: Vec<IsolatedRoot> = Vec::new();
    for (factor, mult) in p.squarefree_factors() {
        for root in isolate_squarefree(&factor) {
            out.push(IsolatedRoot {
                lo: root.0,
                hi: root.1,
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    // Shrink until intervals are pairwise disjoint (roots are distinct).
    loop {
        let mut overlap = None;
        'outer: for i in 0..out.len() {
            for j in i + 1..out.len() {
                if out[i].hi >= out[j].lo {
                    overlap = Some((i, j));
                    break 'outer;
                }
            }
        }
        match overlap {
            None => break,
            Some((i, j)) => {
                let pi = sqfree_part_containing(p, &out[i]);
                let pj = sqfree_part_containing(p, &out[j]);
                let w = out[i].width().min(out[j].width()) / scalar::int(4);
                let w = if w.is_zero() { scalar::rat(1, 1 << 20) } else { w };
                refine_root(&pi, &mut out[i], &w);
                refine_root(&pj, &mut out[j], &w);
            }
        }
    }
    Ok(out)
}

fn sqfree_part_containing(p: &UniPoly, root: &IsolatedRoot) -> UniPoly {
    for (f, m) in p.squarefree_factors() {
        if m == root.multiplicity {
            return f;
        }
    }
    p.clone()
}

/// Isolate the roots of a square-free polynomial; returns closed intervals
/// (possibly degenerate for exact rational roots).
fn isolate_squarefree(p: &UniPoly) -> Vec<(Scalar, Scalar)> {
    if p.degree() == 0 {
        return vec![];
    }
    let chain = p.sturm_chain();
    let b = root_bound(p);
    let mut stack = vec![(-b.clone(), b)];
    let mut found = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        // count on (lo, hi]; endpoints handled explicitly
        let n = count_roots(&chain, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            // shrink away from a root at the right endpoint being shared later
            found.push(isolate_single(p, &chain, lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / scalar::int(2);
        if p.eval(&mid).is_zero() {
            found.push((mid.clone(), mid.clone()));
            // perturb the split so the exact root sits in neither half
            let mut q = (&hi - &lo) / scalar::int(131072);
            while p.eval(&(&mid - &q)).is_zero() || p.eval(&(&mid + &q)).is_zero() {
                q /= scalar::int(2);
            }
            stack.push((lo, &mid - &q));
            stack.push((&mid + &q, hi));
        } else {
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
}

fn isolate_single(
    p: &UniPoly,
    chain: &[UniPoly],
    mut lo: Scalar,
    mut hi: Scalar,
) -> (Scalar, Scalar) {
    // Bisect a (lo, hi] interval known to hold exactly one root until signs
    // differ at the endpoints or we hit the root exactly.
    for _ in 0..8 {
        if p.eval(&lo).is_zero() {
            return (lo.clone(), lo);
        }
        if p.eval(&hi).is_zero() {
            return (hi.clone(), hi);
        }
        if scalar::sign(&p.eval(&lo)) * scalar::sign(&p.eval(&hi)) < 0 {
            return (lo, hi);
        }
        let mid = (&lo + &hi) / scalar::int(2);
        if p.eval(&mid).is_zero() {
            return (mid.clone(), mid);
        }
        if count_roots(chain, &lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Refine an isolated root of a square-free `p` below the given width by
/// sign bisection.
pub fn refine_root(p: &UniPoly, root: &mut IsolatedRoot, width: &Scalar) {
    if root.lo == root.hi {
        return;
    }
    let mut flo = p.eval(&root.lo);
    if flo.is_zero() {
        root.hi = root.lo.clone();
        return;
    }
    if p.eval(&root.hi).is_zero() {
        root.lo = root.hi.clone();
        return;
    }
    while root.width() > *width {
        let mid = root.midpoint();
        let fm = p.eval(&mid);
        if fm.is_zero() {
            root.lo = mid.clone();
            root.hi = mid;
            return;
        }
        if scalar::sign(&flo) * scalar::sign(&fm) < 0 {
            root.hi = mid;
        } else {
            root.lo = mid;
            flo = fm;
        }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{}", a)?,
                1 if a.is_one() => write!(f, "x")?,
                1 => write!(f, "{}*x", a)?,
                _ if a.is_one() => write!(f, "x^{}", i)?,
                _ => write!(f, "{}*x^{}", a, i)?,
            }
        }
        Ok(())
    }
}
