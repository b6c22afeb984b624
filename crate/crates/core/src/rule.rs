//! Normal-form reduction modulo a principal ideal that is unit-monic in a
//! power of one distinguished coordinate.
//!
//! The hypersurfaces handled here are cut out by polynomials of the shape
//! `F = u * w^k + g` with `u` an invertible coefficient and `deg_w(g) < k`,
//! so reduction is plain univariate division in `w` over the remaining
//! coordinates: confluent, terminating, and idempotent, with no Groebner
//! machinery needed.

use std::sync::Arc;

use crate::coords::CoordSystem;
use crate::error::Error;
use crate::poly::{Monomial, Poly};

#[derive(Clone, Debug)]
pub struct NormalFormRule {
    coords: Arc<CoordSystem>,
    var: usize,
    power: u16,
    /// `w^power` rewrites to this polynomial (with `deg_w < power`).
    rhs: Poly,
}

impl NormalFormRule {
    /// Builds the rewriting rule from a defining polynomial, eliminating the
    /// leading power of coordinate `var`. The leading coefficient must be a
    /// constant unit (`c * e^j`).
    pub fn from_defining(f: &Poly, var: usize) -> Result<Self, Error> {
        let coords = f.coords().clone();
        let k = f.max_exp(var);
        if k == 0 {
            return Err(Error::NotReducible(coords.name(var).to_string()));
        }
        // Split F = lead * w^k + rest.
        let mut lead = Poly::zero(&coords);
        let mut rest = Poly::zero(&coords);
        for (m, c) in f.terms() {
            if m.exp(var) == k {
                let mut exps = m.0.clone();
                exps[var] = 0;
                lead.add_term(Monomial(exps), c.clone());
            } else {
                rest.add_term(m.clone(), c.clone());
            }
        }
        let unit = match lead.terms().next() {
            Some((m, c)) if lead.num_terms() == 1 && m.is_unit() && c.is_unit() => c.clone(),
            _ => return Err(Error::NotReducible(coords.name(var).to_string())),
        };
        let inv = unit.inverse().expect("unit coefficient");
        let rhs = rest.neg().mul_coeff(&inv);
        Ok(NormalFormRule {
            coords,
            var,
            power: k,
            rhs,
        })
    }

    pub fn coords(&self) -> &Arc<CoordSystem> {
        &self.coords
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn power(&self) -> u16 {
        self.power
    }

    pub fn rhs(&self) -> &Poly {
        &self.rhs
    }

    /// Reduces `p` to its normal form modulo the ideal: afterwards every
    /// monomial has `w`-exponent below the rule's power.
    pub fn reduce(&self, p: &Poly) -> Result<Poly, Error> {
        CoordSystem::check_same(&self.coords, p.coords())?;
        let mut cur = p.clone();
        loop {
            let mut low = Poly::zero(&self.coords);
            let mut high = Poly::zero(&self.coords);
            for (m, c) in cur.terms() {
                let e = m.exp(self.var);
                if e >= self.power {
                    let mut exps = m.0.clone();
                    exps[self.var] = e - self.power;
                    high.add_term(Monomial(exps), c.clone());
                } else {
                    low.add_term(m.clone(), c.clone());
                }
            }
            if high.is_zero() {
                return Ok(low);
            }
            cur = low.add(&high.mul(&self.rhs)?)?;
        }
    }

    /// True when `p` lies in the ideal.
    pub fn reduces_to_zero(&self, p: &Poly) -> Result<bool, Error> {
        Ok(self.reduce(p)?.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::CoordSystem;
    use crate::eps::EpsCoeff;

    /// The quarter-sphere defining polynomial for n = 2:
    /// `r^2 + e^-2 (z^2 + x1^2 + y1^2) - 1 - e`.
    fn sphere_poly(cs: &Arc<CoordSystem>) -> Poly {
        let z = Poly::var(cs, 0);
        let r = Poly::var(cs, 1);
        let x = Poly::var(cs, 3);
        let y = Poly::var(cs, 4);
        let inner = z
            .pow(2)
            .add(&x.pow(2))
            .unwrap()
            .add(&y.pow(2))
            .unwrap()
            .mul_coeff(&EpsCoeff::eps_power(-2));
        r.pow(2)
            .add(&inner)
            .unwrap()
            .sub(&Poly::one(cs))
            .unwrap()
            .sub(&Poly::eps(cs, 1))
            .unwrap()
    }

    #[test]
    fn generator_reduces_to_zero() {
        let cs = CoordSystem::jet(2);
        let f = sphere_poly(&cs);
        let rule = NormalFormRule::from_defining(&f, 0).unwrap();
        assert_eq!(rule.power(), 2);
        assert!(rule.reduces_to_zero(&f).unwrap());
    }

    #[test]
    fn z_cubed_normal_form() {
        let cs = CoordSystem::jet(2);
        let f = sphere_poly(&cs);
        let rule = NormalFormRule::from_defining(&f, 0).unwrap();
        let z = Poly::var(&cs, 0);
        let got = rule.reduce(&z.pow(3)).unwrap();
        // z * (e^2(1+e) - e^2 r^2 - x1^2 - y1^2)
        let expected = z.mul(rule.rhs()).unwrap();
        assert_eq!(got, expected);
        assert!(got.max_exp(0) <= 1);
        // rhs spelled out
        let r = Poly::var(&cs, 1);
        let x = Poly::var(&cs, 3);
        let y = Poly::var(&cs, 4);
        let rhs = Poly::eps(&cs, 2)
            .add(&Poly::eps(&cs, 3))
            .unwrap()
            .sub(&r.pow(2).mul(&Poly::eps(&cs, 2)).unwrap())
            .unwrap()
            .sub(&x.pow(2))
            .unwrap()
            .sub(&y.pow(2))
            .unwrap();
        assert_eq!(rule.rhs(), &rhs);
    }

    #[test]
    fn idempotent_and_multiplicative() {
        let cs = CoordSystem::jet(2);
        let f = sphere_poly(&cs);
        let rule = NormalFormRule::from_defining(&f, 0).unwrap();
        let z = Poly::var(&cs, 0);
        let r = Poly::var(&cs, 1);
        let p = z.pow(4).mul(&r).unwrap().add(&z.pow(2)).unwrap();
        let q = z.pow(3).sub(&r.pow(2)).unwrap();
        let rp = rule.reduce(&p).unwrap();
        assert_eq!(rule.reduce(&rp).unwrap(), rp);
        // reduce(p*q) == reduce(reduce(p)*reduce(q))
        let lhs = rule.reduce(&p.mul(&q).unwrap()).unwrap();
        let rq = rule.reduce(&q).unwrap();
        let rhs = rule.reduce(&rp.mul(&rq).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn linear_generator() {
        // F = z rewrites z -> 0.
        let cs = CoordSystem::new(&["z", "x1", "y1"]).unwrap();
        let z = Poly::var(&cs, 0);
        let rule = NormalFormRule::from_defining(&z, 0).unwrap();
        assert_eq!(rule.power(), 1);
        let x = Poly::var(&cs, 1);
        let p = z.mul(&x).unwrap().add(&x.pow(2)).unwrap();
        assert_eq!(rule.reduce(&p).unwrap(), x.pow(2));
    }

    #[test]
    fn non_monic_is_rejected() {
        let cs = CoordSystem::jet(2);
        let z = Poly::var(&cs, 0);
        let r = Poly::var(&cs, 1);
        // r*z^2 + 1 has non-constant leading coefficient in z
        let f = r.mul(&z.pow(2)).unwrap().add(&Poly::one(&cs)).unwrap();
        assert!(NormalFormRule::from_defining(&f, 0).is_err());
        // (1+e)*z^2 + r has non-unit leading coefficient
        let c = EpsCoeff::from_int(1).add(&EpsCoeff::eps_power(1));
        let f2 = z.pow(2).mul_coeff(&c).add(&r).unwrap();
        assert!(NormalFormRule::from_defining(&f2, 0).is_err());
    }
}
