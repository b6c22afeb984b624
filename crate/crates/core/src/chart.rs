//! Transport between the cylindrical jet chart `(z, r, th, x_i, y_i)` and
//! the Cartesian chart `(z, u, v, x_i, y_i)` with `u = r cos th`,
//! `v = r sin th`.
//!
//! The cylindrical chart degenerates along `r = 0` (`d/dth` is the zero
//! vector there), so tangency points sitting on that axis are analyzed in
//! the Cartesian chart. Transport is possible exactly for the
//! rotation-invariant objects handled here: coefficients even in `r` and
//! free of `th`, with `dth` entering only through `r^2 dth = u dv - v du`
//! and `dr` only through `r dr = u du + v dv`.

use std::sync::Arc;

use crate::coords::CoordSystem;
use crate::error::Error;
use crate::form::Form;
use crate::poly::Poly;

fn pair_map(n: usize) -> Vec<Option<usize>> {
    // jet index -> cartesian index for z and the pairs; r, th handled apart
    let mut map = vec![None; 2 * n + 1];
    map[0] = Some(0);
    for i in 3..2 * n + 1 {
        map[i] = Some(i);
    }
    map
}

/// `u^2 + v^2` in the Cartesian system.
fn rho_sq(cart: &Arc<CoordSystem>) -> Poly {
    Poly::var(cart, 1)
        .pow(2)
        .add(&Poly::var(cart, 2).pow(2))
        .expect("same coords")
}

/// Transport a rotation-invariant polynomial: requires `th`-freedom and
/// even powers of `r`, which become powers of `u^2 + v^2`.
pub fn poly_to_cartesian(p: &Poly, cart: &Arc<CoordSystem>) -> Result<Poly, Error> {
    let n = (p.coords().len() - 1) / 2;
    if p.has_var(2) {
        return Err(Error::ForbiddenCoordinate("th".into()));
    }
    let mut map = pair_map(n);
    map[1] = None;
    p.subst_square_into(1, &rho_sq(cart), &map)
}

/// Transport a rotation-invariant 1-form. The `dth` coefficient must be
/// divisible by `r^2` and the `dr` coefficient by `r`; all coefficients must
/// be even in `r` after the division.
pub fn one_form_to_cartesian(form: &Form, cart: &Arc<CoordSystem>) -> Result<Form, Error> {
    if form.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            got: form.degree(),
        });
    }
    let cs = form.coords();
    let r = Poly::var(cs, 1);
    let u = Poly::var(cart, 1);
    let v = Poly::var(cart, 2);
    let du = Form::coord_diff(cart, 1);
    let dv = Form::coord_diff(cart, 2);
    let mut out = Form::zero(cart, 1);
    for (idx, coeff) in form.terms() {
        let i = idx[0] as usize;
        match i {
            1 => {
                // g dr = (g / r) (u du + v dv)
                let g_over_r = coeff
                    .div_exact(&r)
                    .ok_or_else(|| Error::ReductionFailed("dr coefficient not odd in r".into()))?;
                let gc = poly_to_cartesian(&g_over_r, cart)?;
                out = out
                    .add(&du.mul_poly(&gc.mul(&u)?)?)?
                    .add(&dv.mul_poly(&gc.mul(&v)?)?)?;
            }
            2 => {
                // b dth = (b / r^2) (u dv - v du)
                let b_over_r2 = coeff.div_exact(&r.pow(2)).ok_or_else(|| {
                    Error::ReductionFailed("dth coefficient not divisible by r^2".into())
                })?;
                let bc = poly_to_cartesian(&b_over_r2, cart)?;
                out = out
                    .add(&dv.mul_poly(&bc.mul(&u)?)?)?
                    .add(&du.mul_poly(&bc.mul(&v)?.neg())?)?;
            }
            _ => {
                let target = if i == 0 { 0 } else { i };
                let cc = poly_to_cartesian(coeff, cart)?;
                out = out.add(&Form::coord_diff(cart, target).mul_poly(&cc)?)?;
            }
        }
    }
    Ok(out)
}
