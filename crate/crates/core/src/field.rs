//! Coordinate vector fields with polynomial components.

use std::fmt;
use std::sync::Arc;

use crate::coords::CoordSystem;
use crate::error::Error;
use crate::poly::Poly;
use crate::real::{Ctx, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecField {
    coords: Arc<CoordSystem>,
    components: Vec<Poly>,
}

impl VecField {
    pub fn new(coords: &Arc<CoordSystem>, components: Vec<Poly>) -> Result<Self, Error> {
        if components.len() != coords.len() {
            return Err(Error::Invalid(format!(
                "{} components for {} coordinates",
                components.len(),
                coords.len()
            )));
        }
        for c in &components {
            CoordSystem::check_same(coords, c.coords())?;
        }
        Ok(VecField {
            coords: coords.clone(),
            components,
        })
    }

    pub fn zero(coords: &Arc<CoordSystem>) -> Self {
        VecField {
            coords: coords.clone(),
            components: vec![Poly::zero(coords); coords.len()],
        }
    }

    /// The coordinate basis field `d/dx_i`.
    pub fn basis(coords: &Arc<CoordSystem>, i: usize) -> Self {
        let mut f = Self::zero(coords);
        f.components[i] = Poly::one(coords);
        f
    }

    pub fn coords(&self) -> &Arc<CoordSystem> {
        &self.coords
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn set_component(&mut self, i: usize, p: Poly) -> Result<(), Error> {
        CoordSystem::check_same(&self.coords, p.coords())?;
        self.components[i] = p;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        CoordSystem::check_same(&self.coords, &other.coords)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        VecField::new(&self.coords, comps)
    }

    pub fn neg(&self) -> Self {
        VecField {
            coords: self.coords.clone(),
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Result<Self, Error> {
        let comps = self
            .components
            .iter()
            .map(|c| c.mul(p))
            .collect::<Result<Vec<_>, _>>()?;
        VecField::new(&self.coords, comps)
    }

    pub fn mul_int(&self, n: i64) -> Self {
        VecField {
            coords: self.coords.clone(),
            components: self.components.iter().map(|c| c.mul_int(n)).collect(),
        }
    }

    /// Directional derivative `X(f)`.
    pub fn apply_to(&self, f: &Poly) -> Result<Poly, Error> {
        CoordSystem::check_same(&self.coords, f.coords())?;
        let mut acc = Poly::zero(&self.coords);
        for (i, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            acc = acc.add(&comp.mul(&f.deriv(i))?)?;
        }
        Ok(acc)
    }

    /// Numeric component values at a point (`e` already specialized).
    pub fn eval_real(&self, ctx: &Ctx, point: &[Real]) -> Result<Vec<Real>, Error> {
        self.components
            .iter()
            .map(|c| c.eval_real(ctx, point))
            .collect()
    }
}

impl fmt::Display for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*d/d{}", c, self.coords.name(i))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::Form;

    #[test]
    fn lie_derivative_of_a_constant_vanishes() {
        let cs = CoordSystem::jet(2);
        let c = Form::scalar(Poly::int(&cs, 5));
        let mut x = VecField::zero(&cs);
        x.set_component(0, Poly::var(&cs, 1)).unwrap();
        x.set_component(3, Poly::var(&cs, 0).pow(2)).unwrap();
        assert!(c.lie_derivative(&x).unwrap().is_zero());
        // nonconstant 0-forms flow: L_X f = X(f)
        let f = Form::scalar(Poly::var(&cs, 0));
        assert_eq!(
            f.lie_derivative(&x).unwrap(),
            Form::scalar(Poly::var(&cs, 1))
        );
    }

    #[test]
    fn directional_derivative() {
        let cs = CoordSystem::jet(2);
        let z = Poly::var(&cs, 0);
        let r = Poly::var(&cs, 1);
        // X = r d/dz; X(z^2 + r) = 2rz
        let mut x = VecField::zero(&cs);
        x.set_component(0, r.clone()).unwrap();
        let f = z.pow(2).add(&r).unwrap();
        assert_eq!(x.apply_to(&f).unwrap(), r.mul(&z.mul_int(2)).unwrap());
    }
}
