//! Characteristic vector fields of level-set hypersurfaces in polynomial
//! contact manifolds, tangency sign bookkeeping, and the Thurston-Bennequin
//! count.
//!
//! For contact data `(beta, F)` on a `(2n+1)`-dimensional coordinate system,
//! the characteristic field is the solution `X` of
//!
//! ```text
//!     i_X (beta ^ (dbeta)^n)  =  n * beta ^ dF ^ (dbeta)^(n-1),
//! ```
//!
//! the direction positively oriented for the hypersurface orientation
//! induced by the outward conormal `dF` (i.e. `Omega = dF ^ dvol`). Each
//! component is a signed cofactor of the right-hand side divided by the top
//! coefficient of the volume form; when that division is not exact over the
//! polynomial ring the cofactors themselves are returned, which rescales the
//! field by the (positive, on the region of interest) top coefficient and
//! leaves the oriented line field unchanged.
//!
//! Orientation rule, stated intrinsically: `X` is positive for the induced
//! orientation `dvol` of the hypersurface iff
//! `i_X dvol = gamma ^ (d gamma)^(n-1)` with `gamma` the restriction of
//! `beta` - note the exponent `n-1`, the degree-consistent power on a
//! 2n-dimensional hypersurface. The ambient equation above is its
//! coordinate-free repackaging.

use std::sync::Arc;

use serde::Serialize;

use crate::coords::CoordSystem;
use crate::error::Error;
use crate::field::VecField;
use crate::form::Form;
use crate::poly::Poly;
use crate::real::{Ctx, Real};
use crate::rule::NormalFormRule;

/// Top coefficient of `beta ^ (dbeta)^n`; errors when it vanishes.
pub fn contact_volume_coefficient(beta: &Form, n: usize) -> Result<Poly, Error> {
    let coords = beta.coords();
    if beta.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            got: beta.degree(),
        });
    }
    if coords.len() != 2 * n + 1 {
        return Err(Error::Invalid(format!(
            "{} coordinates for n = {}",
            coords.len(),
            n
        )));
    }
    let dbeta = beta.ext_d()?;
    let mut vol = beta.clone();
    for _ in 0..n {
        vol = vol.wedge(&dbeta)?;
    }
    let full: Vec<u8> = (0..coords.len() as u8).collect();
    let v = vol.coeff(&full);
    if v.is_zero() {
        return Err(Error::DegenerateContact);
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct ContactData {
    coords: Arc<CoordSystem>,
    n: usize,
    beta: Form,
    f: Poly,
    rule: NormalFormRule,
}

impl ContactData {
    pub fn new(n: usize, beta: Form, f: Poly) -> Result<Self, Error> {
        let coords = beta.coords().clone();
        if coords.len() != 2 * n + 1 {
            return Err(Error::Invalid(format!(
                "{} coordinates for n = {}",
                coords.len(),
                n
            )));
        }
        CoordSystem::check_same(&coords, f.coords())?;
        if beta.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                got: beta.degree(),
            });
        }
        let rule = NormalFormRule::from_defining(&f, 0)?;
        Ok(ContactData {
            coords,
            n,
            beta,
            f,
            rule,
        })
    }

    pub fn coords(&self) -> &Arc<CoordSystem> {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &Form {
        &self.beta
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn rule(&self) -> &NormalFormRule {
        &self.rule
    }

    /// The contact condition: the single top coefficient of
    /// `beta ^ (dbeta)^n`. Positivity on the region of interest is the
    /// caller's check (Sturm or sampling).
    pub fn contact_check(&self) -> Result<Poly, Error> {
        contact_volume_coefficient(&self.beta, self.n)
    }

    /// Solves for the characteristic field. See the module docs for the
    /// normalization and the fallback when exact division fails.
    pub fn characteristic_field(&self) -> Result<VecField, Error> {
        let v = self.contact_check()?;
        let df = Form::scalar(self.f.clone()).ext_d()?;
        let dbeta = self.beta.ext_d()?;
        let mut rhs = self.beta.wedge(&df)?;
        for _ in 0..self.n.saturating_sub(1) {
            rhs = rhs.wedge(&dbeta)?;
        }
        let rhs = rhs.mul_int(self.n as i64);

        let nvars = self.coords.len();
        let full: Vec<u8> = (0..nvars as u8).collect();
        let mut cofactors = Vec::with_capacity(nvars);
        for k in 0..nvars {
            let mut idx = full.clone();
            idx.remove(k);
            let w = rhs.coeff(&idx);
            cofactors.push(if k % 2 == 1 { w.neg() } else { w });
        }
        let divided: Option<Vec<Poly>> = cofactors.iter().map(|w| w.div_exact(&v)).collect();
        let comps = divided.unwrap_or(cofactors);
        VecField::new(&self.coords, comps)
    }

    /// Post-hoc membership data for a candidate characteristic field:
    /// `beta(X)` and `dF(X)` (both must vanish identically) and the normal
    /// form of `i_X dbeta ^ beta ^ dF` (zero iff `i_X dbeta` lies in
    /// `span(beta, dF)` along the hypersurface).
    pub fn membership_residuals(&self, x: &VecField) -> Result<(Poly, Poly, Form), Error> {
        let beta_x = self.beta.apply(x)?;
        let df = Form::scalar(self.f.clone()).ext_d()?;
        let df_x = df.apply(x)?;
        let wedge = self
            .beta
            .ext_d()?
            .interior(x)?
            .wedge(&self.beta)?
            .wedge(&df)?;
        let reduced = wedge.map_coeffs(|p| self.rule.reduce(p))?;
        Ok((beta_x, df_x, reduced))
    }

    /// Orientation form of the hypersurface induced by the outward conormal:
    /// `i_G (beta ^ (dbeta)^n)` with `G` the coordinate gradient of `F`, so
    /// that `dF(G) = |grad F|^2 > 0` away from critical points.
    pub fn induced_orientation_form(&self) -> Result<Form, Error> {
        let mut grad = VecField::zero(&self.coords);
        for i in 0..self.coords.len() {
            grad.set_component(i, self.f.deriv(i))?;
        }
        let dbeta = self.beta.ext_d()?;
        let mut vol = self.beta.clone();
        for _ in 0..self.n {
            vol = vol.wedge(&dbeta)?;
        }
        vol.interior(&grad)
    }

    /// Sign of a tangency point: `+` iff the orientation of `ker beta` given
    /// by `(dbeta)^n` agrees with the given orientation form of the
    /// hypersurface at `p`. Numeric comparison of top-form values on a basis
    /// of the tangent space; `e` must be specialized in all inputs.
    pub fn tangency_sign(
        &self,
        ctx: &Ctx,
        point: &[Real],
        orientation_form: &Form,
        eps: &crate::scalar::Scalar,
    ) -> Result<TangencySign, Error> {
        let beta_s = self.beta.map_coeffs(|p| p.specialize_eps(eps))?;
        let f_s = self.f.specialize_eps(eps)?;
        let orient_s = orientation_form.map_coeffs(|p| p.specialize_eps(eps))?;

        // Numeric covectors dF and beta at the point.
        let nvars = self.coords.len();
        let mut g = Vec::with_capacity(nvars);
        for i in 0..nvars {
            g.push(f_s.deriv(i).eval_real(ctx, point)?);
        }
        let mut b = vec![ctx.zero(); nvars];
        for (idx, p) in beta_s.terms() {
            b[idx[0] as usize] = p.eval_real(ctx, point)?;
        }
        // Tangency requires dF and beta proportional: the angle between them
        // stays below 1e-9 for genuine tangencies of this geometry.
        let dot = dot_real(ctx, &g, &b);
        let ng = dot_real(ctx, &g, &g);
        let nb = dot_real(ctx, &b, &b);
        let cross = ctx.sub(&ctx.mul(&ng, &nb), &ctx.mul(&dot, &dot));
        let tol = ctx.from_f64(1e-18);
        let scale = ctx.mul(&ng, &nb);
        if ctx.signum(&ng) == 0
            || ctx.signum(&nb) == 0
            || ctx.lt(&ctx.mul(&tol, &scale), &cross)
        {
            return Err(Error::NotATangency);
        }

        // Basis of ker dF at the point.
        let mut pivot = 0;
        for i in 1..nvars {
            if ctx.lt(&ctx.abs(&g[pivot]), &ctx.abs(&g[i])) {
                pivot = i;
            }
        }
        let mut basis = Vec::with_capacity(nvars - 1);
        for j in 0..nvars {
            if j == pivot {
                continue;
            }
            let mut v = vec![ctx.zero(); nvars];
            v[j] = ctx.one();
            v[pivot] = ctx.neg(&ctx.div(&g[j], &g[pivot]));
            basis.push(v);
        }

        let dbeta_s = beta_s.ext_d()?;
        let mut dbeta_n = Form::scalar(Poly::one(&self.coords));
        for _ in 0..self.n {
            dbeta_n = dbeta_n.wedge(&dbeta_s)?;
        }
        let s1 = dbeta_n.value_on(ctx, point, &basis)?;
        let s2 = orient_s.value_on(ctx, point, &basis)?;
        let sg = ctx.signum(&s1) * ctx.signum(&s2);
        if sg == 0 {
            return Err(Error::DegenerateContact);
        }
        Ok(if sg > 0 {
            TangencySign::Plus
        } else {
            TangencySign::Minus
        })
    }
}

fn dot_real(ctx: &Ctx, a: &[Real], b: &[Real]) -> Real {
    let mut acc = ctx.zero();
    for (x, y) in a.iter().zip(b) {
        acc = ctx.add(&acc, &ctx.mul(x, y));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TangencySign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TangencyKind {
    Source,
    Sink,
    Saddle,
    Rotational,
}

/// A located zero of the (reduced) characteristic field, with sign and
/// index filled in once classified.
#[derive(Clone, Debug, Serialize)]
pub struct TangencyRecord {
    pub point: Vec<f64>,
    pub sign: Option<TangencySign>,
    pub index: Option<i64>,
    pub kind: Option<TangencyKind>,
}

impl TangencyRecord {
    pub fn new(point: Vec<f64>) -> Self {
        TangencyRecord {
            point,
            sign: None,
            index: None,
            kind: None,
        }
    }

    pub fn classified(&self) -> bool {
        self.sign.is_some() && self.index.is_some() && self.kind.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

/// The Thurston-Bennequin count over classified tangencies.
#[derive(Clone, Debug, Serialize)]
pub struct TbReport {
    pub sum_minus: i64,
    pub sum_plus: i64,
    pub euler_rel: i64,
    pub chi: i64,
    pub verdict: Verdict,
}

/// Sums indices over the signed tangencies. The inequality (for contact-type
/// boundary) reads `sum over S_- of Ind <= 0`, so the verdict is `violated`
/// exactly when `sum_minus > 0`. The relative Euler number is
/// `sum_plus - sum_minus`, to be compared against `-chi`.
pub fn tb_evaluate(records: &[TangencyRecord], chi: i64) -> Result<TbReport, Error> {
    let mut sum_minus = 0i64;
    let mut sum_plus = 0i64;
    for rec in records {
        if !rec.classified() {
            return Err(Error::UnclassifiedRecord);
        }
        match rec.sign.unwrap() {
            TangencySign::Plus => sum_plus += rec.index.unwrap(),
            TangencySign::Minus => sum_minus += rec.index.unwrap(),
        }
    }
    Ok(TbReport {
        sum_minus,
        sum_plus,
        euler_rel: sum_plus - sum_minus,
        chi,
        verdict: if sum_minus > 0 {
            Verdict::Violated
        } else {
            Verdict::Holds
        },
    })
}
