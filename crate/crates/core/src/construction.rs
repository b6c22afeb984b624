//! The concrete overtwisted-hypersurface construction and its verification
//! operations.
//!
//! Everything here lives on the product of an overtwisted 3-manifold piece
//! (cylindrical coordinates `z, r, th`) with a small ball (`x_i, y_i`),
//! carrying the contact form
//! `beta = (2r^2-1) dz + r^2(r^2-1) dth + sum(x_i dy_i - y_i dx_i)`.
//! The closed hypersurface is the level set of
//! `F = r^2 + e^-2 (z^2 + sum(x_i^2 + y_i^2)) - 1 - e`, and `Sigma` is its
//! `r - z <= 1` part. The vector field `X` below presents the characteristic
//! foliation; each `verify_*` operation checks one displayed identity of the
//! construction exactly, with no floating point in the symbolic phase.

use std::sync::Arc;

use num::Signed;

use crate::coords::CoordSystem;
use crate::eps::EpsCoeff;
use crate::error::Error;
use crate::field::VecField;
use crate::form::Form;
use crate::poly::Poly;
use crate::real::{Ctx, Real};
use crate::rule::NormalFormRule;
use crate::scalar::{self, Scalar};
use crate::unipoly::{self, UniPoly};

/// `2r^2 - 1`.
fn lambda_poly(cs: &Arc<CoordSystem>, r: usize) -> Poly {
    let rp = Poly::var(cs, r);
    rp.pow(2).mul_int(2).sub(&Poly::one(cs)).unwrap()
}

/// `r^2 (r^2 - 1)`.
fn mu_poly(cs: &Arc<CoordSystem>, r: usize) -> Poly {
    let rp = Poly::var(cs, r);
    rp.pow(2)
        .mul(&rp.pow(2).sub(&Poly::one(cs)).unwrap())
        .unwrap()
}

/// `2r^4 - 2r^2 + 1`, the recurring positive factor.
fn q_poly(cs: &Arc<CoordSystem>, r: usize) -> Poly {
    let rp = Poly::var(cs, r);
    rp.pow(4)
        .mul_int(2)
        .sub(&rp.pow(2).mul_int(2))
        .unwrap()
        .add(&Poly::one(cs))
        .unwrap()
}

/// `e^-2 (2r^2-1) z`, the conformal factor showing up in every identity.
fn conformal_factor(cs: &Arc<CoordSystem>, z: usize, r: usize) -> Poly {
    lambda_poly(cs, r)
        .mul(&Poly::var(cs, z))
        .unwrap()
        .mul_coeff(&EpsCoeff::eps_power(-2))
}

/// The overtwisted-disk contact form `(2r^2-1) dz + r^2(r^2-1) dth` on any
/// system containing `z, r, th`.
pub fn overtwisted_form(cs: &Arc<CoordSystem>) -> Result<Form, Error> {
    let z = cs
        .index_of("z")
        .ok_or_else(|| Error::Invalid("need a `z` coordinate".into()))?;
    let r = cs
        .index_of("r")
        .ok_or_else(|| Error::Invalid("need an `r` coordinate".into()))?;
    let th = cs
        .index_of("th")
        .ok_or_else(|| Error::Invalid("need a `th` coordinate".into()))?;
    Form::coord_diff(cs, z)
        .mul_poly(&lambda_poly(cs, r))?
        .add(&Form::coord_diff(cs, th).mul_poly(&mu_poly(cs, r))?)
}

#[derive(Clone, Debug)]
pub struct ModelData {
    pub n: usize,
    pub coords: Arc<CoordSystem>,
    pub cart_coords: Arc<CoordSystem>,
    pub alpha_prime: Form,
    pub beta: Form,
    pub f: Poly,
    pub x: VecField,
    pub boundary_fn: Poly,
    pub lambda: Poly,
    pub mu: Poly,
    pub rule: NormalFormRule,
    pub beta_cart: Form,
    pub f_cart: Poly,
    pub x_cart: VecField,
}

/// Mutation hooks used to prove the ledger is not vacuously green: each
/// token perturbs a single component of `X`.
pub const MUTATIONS: [&str; 10] = [
    "dz+1",
    "dr+1",
    "dth+1",
    "dx1+1",
    "dy1+1",
    "dz-flip",
    "dr-flip",
    "dth-flip",
    "dx1-flip",
    "dy1-flip",
];

impl ModelData {
    /// Builds every concrete object of the construction; requires `n >= 2`.
    pub fn build(n: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let cs = CoordSystem::jet(n);
        let (zi, ri, thi) = (0usize, 1usize, 2usize);
        let z = Poly::var(&cs, zi);
        let one = Poly::one(&cs);
        let eps1 = Poly::eps(&cs, 1);

        let lambda = lambda_poly(&cs, ri);
        let mu = mu_poly(&cs, ri);
        let q = q_poly(&cs, ri);

        let alpha_prime = overtwisted_form(&cs)?;

        // beta = lambda dz + mu dth + sum(x_i dy_i - y_i dx_i)
        let mut beta = alpha_prime.clone();
        for i in 0..n - 1 {
            let xi = 3 + 2 * i;
            let yi = 4 + 2 * i;
            beta = beta
                .add(&Form::coord_diff(&cs, yi).mul_poly(&Poly::var(&cs, xi))?)?
                .add(&Form::coord_diff(&cs, xi).mul_poly(&Poly::var(&cs, yi).neg())?)?;
        }

        // F = r^2 + e^-2 (z^2 + sum(x^2+y^2)) - 1 - e
        let mut inner = z.pow(2);
        for i in 0..n - 1 {
            inner = inner
                .add(&Poly::var(&cs, 3 + 2 * i).pow(2))?
                .add(&Poly::var(&cs, 4 + 2 * i).pow(2))?;
        }
        let f = Poly::var(&cs, ri)
            .pow(2)
            .add(&inner.mul_coeff(&EpsCoeff::eps_power(-2)))?
            .sub(&one)?
            .sub(&eps1)?;
        let rule = NormalFormRule::from_defining(&f, zi)?;

        // X, component by component.
        let rsq_m1 = Poly::var(&cs, ri).pow(2).sub(&one)?;
        let zsq_term = z
            .pow(2)
            .mul_coeff(&EpsCoeff::eps_power(-2))
            .sub(&eps1)?; // e^-2 z^2 - e
        let x_z = rsq_m1.pow(2).add(&lambda.mul(&zsq_term)?)?;
        let x_r = Poly::var(&cs, ri)
            .mul(&rsq_m1)?
            .mul(&z)?
            .mul_coeff(&EpsCoeff::eps_power(-2));
        let x_th = one
            .add(&eps1.mul_int(2))?
            .sub(&z.pow(2).mul_coeff(&EpsCoeff::monomial(scalar::int(2), -2)))?;
        let radial = conformal_factor(&cs, zi, ri);
        let rot = q.mul_coeff(&EpsCoeff::eps_power(-2));
        let mut comps = vec![x_z.clone(), x_r.clone(), x_th.clone()];
        for i in 0..n - 1 {
            let xv = Poly::var(&cs, 3 + 2 * i);
            let yv = Poly::var(&cs, 4 + 2 * i);
            comps.push(radial.mul(&xv)?.sub(&rot.mul(&yv)?)?);
            comps.push(radial.mul(&yv)?.add(&rot.mul(&xv)?)?);
        }
        let x = VecField::new(&cs, comps)?;

        // boundary function r - z - 1 (the boundary locus of Sigma is z = r - 1)
        let boundary_fn = Poly::var(&cs, ri).sub(&z)?.sub(&one)?;

        // Everything in the pipeline must be free of th.
        let theta_free = |p: &Poly| -> Result<(), Error> {
            if p.has_var(thi) {
                Err(Error::ForbiddenCoordinate("th".into()))
            } else {
                Ok(())
            }
        };
        for c in x.components() {
            theta_free(c)?;
        }
        for (_, p) in beta.terms() {
            theta_free(p)?;
        }
        theta_free(&f)?;
        theta_free(&boundary_fn)?;

        // Cartesian chart (z, u, v, x_i, y_i) on the 3-manifold factor:
        // r^2 = u^2 + v^2, r^2 dth = u dv - v du.
        let cc = CoordSystem::cartesian_jet(n);
        let (zc, uc, vc) = (0usize, 1usize, 2usize);
        let zp = Poly::var(&cc, zc);
        let up = Poly::var(&cc, uc);
        let vp = Poly::var(&cc, vc);
        let rho2 = up.pow(2).add(&vp.pow(2))?;
        let lam_c = rho2.mul_int(2).sub(&Poly::one(&cc))?;
        let udv_vdu = Form::coord_diff(&cc, vc)
            .mul_poly(&up)?
            .add(&Form::coord_diff(&cc, uc).mul_poly(&vp.neg())?)?;
        let mut beta_cart = Form::coord_diff(&cc, zc)
            .mul_poly(&lam_c)?
            .add(&udv_vdu.mul_poly(&rho2.sub(&Poly::one(&cc))?)?)?;
        let mut inner_c = zp.pow(2);
        for i in 0..n - 1 {
            let xi = 3 + 2 * i;
            let yi = 4 + 2 * i;
            beta_cart = beta_cart
                .add(&Form::coord_diff(&cc, yi).mul_poly(&Poly::var(&cc, xi))?)?
                .add(&Form::coord_diff(&cc, xi).mul_poly(&Poly::var(&cc, yi).neg())?)?;
            inner_c = inner_c
                .add(&Poly::var(&cc, xi).pow(2))?
                .add(&Poly::var(&cc, yi).pow(2))?;
        }
        let f_cart = rho2
            .add(&inner_c.mul_coeff(&EpsCoeff::eps_power(-2)))?
            .sub(&Poly::one(&cc))?
            .sub(&Poly::eps(&cc, 1))?;

        // X in the Cartesian chart: d/dr = (u d/du + v d/dv)/r and
        // d/dth = u d/dv - v d/du, so the radial part stays polynomial.
        let x_z_c = rho2
            .sub(&Poly::one(&cc))?
            .pow(2)
            .add(
                &lam_c.mul(
                    &zp.pow(2)
                        .mul_coeff(&EpsCoeff::eps_power(-2))
                        .sub(&Poly::eps(&cc, 1))?,
                )?,
            )?;
        let theta_rate = Poly::one(&cc)
            .add(&Poly::eps(&cc, 1).mul_int(2))?
            .sub(&zp.pow(2).mul_coeff(&EpsCoeff::monomial(scalar::int(2), -2)))?;
        let radial_c = rho2
            .sub(&Poly::one(&cc))?
            .mul(&zp)?
            .mul_coeff(&EpsCoeff::eps_power(-2));
        let x_u = radial_c.mul(&up)?.sub(&theta_rate.mul(&vp)?)?;
        let x_v = radial_c.mul(&vp)?.add(&theta_rate.mul(&up)?)?;
        let radial_pairs_c = lam_c.mul(&zp)?.mul_coeff(&EpsCoeff::eps_power(-2));
        let q_c = rho2
            .pow(2)
            .mul_int(2)
            .sub(&rho2.mul_int(2))?
            .add(&Poly::one(&cc))?;
        let rot_c = q_c.mul_coeff(&EpsCoeff::eps_power(-2));
        let mut comps_c = vec![x_z_c, x_u, x_v];
        for i in 0..n - 1 {
            let xv = Poly::var(&cc, 3 + 2 * i);
            let yv = Poly::var(&cc, 4 + 2 * i);
            comps_c.push(radial_pairs_c.mul(&xv)?.sub(&rot_c.mul(&yv)?)?);
            comps_c.push(radial_pairs_c.mul(&yv)?.add(&rot_c.mul(&xv)?)?);
        }
        let x_cart = VecField::new(&cc, comps_c)?;

        Ok(ModelData {
            n,
            coords: cs,
            cart_coords: cc,
            alpha_prime,
            beta,
            f,
            x,
            boundary_fn,
            lambda,
            mu,
            rule,
            beta_cart,
            f_cart,
            x_cart,
        })
    }

    /// Applies a single-token mutation to `X` (test hook). Accepts
    /// `d<coord>+1` and `d<coord>-flip`; `theta` is an alias for `th`.
    pub fn apply_mutation(&mut self, token: &str) -> Result<(), Error> {
        let token = token.replace("theta", "th");
        let (name, op) = if let Some(p) = token.strip_suffix("+1") {
            (p, "+1")
        } else if let Some(p) = token.strip_suffix("-flip") {
            (p, "-flip")
        } else {
            return Err(Error::Invalid(format!("unknown mutation `{}`", token)));
        };
        let coord = name
            .strip_prefix('d')
            .ok_or_else(|| Error::Invalid(format!("unknown mutation `{}`", token)))?;
        let i = self
            .coords
            .index_of(coord)
            .ok_or_else(|| Error::Invalid(format!("unknown coordinate `{}`", coord)))?;
        let old = self.x.component(i).clone();
        let new = match op {
            "+1" => old.add(&Poly::one(&self.coords))?,
            _ => old.neg(),
        };
        self.x.set_component(i, new)?;
        Ok(())
    }

    /// `dF(X) - 2 e^-2 (2r^2-1) z F`, identically zero for the unmutated
    /// field.
    pub fn tangency_residual(&self) -> Result<Poly, Error> {
        let df_x = self.x.apply_to(&self.f)?;
        let expected = conformal_factor(&self.coords, 0, 1)
            .mul_int(2)
            .mul(&self.f)?;
        df_x.sub(&expected)
    }

    /// `beta(X) - (2r^4-2r^2+1) F`, identically zero.
    pub fn beta_x_residual(&self) -> Result<Poly, Error> {
        let beta_x = self.beta.apply(&self.x)?;
        let expected = q_poly(&self.coords, 1).mul(&self.f)?;
        beta_x.sub(&expected)
    }

    /// `i_X dbeta - 2 e^-2 (2r^2-1) z beta + (2r^4-2r^2+1) dF`, the zero
    /// 1-form.
    pub fn iota_dbeta_residual(&self) -> Result<Form, Error> {
        let iota = self.beta.ext_d()?.interior(&self.x)?;
        let factor = conformal_factor(&self.coords, 0, 1).mul_int(2);
        let df = Form::scalar(self.f.clone()).ext_d()?;
        iota.sub(&self.beta.mul_poly(&factor)?)?
            .add(&df.mul_poly(&q_poly(&self.coords, 1))?)
    }

    /// `L_X beta - 2 e^-2 (2r^2-1) z beta`, which vanishes modulo the
    /// hypersurface ideal (coefficient-wise normal forms).
    pub fn lie_residual_reduced(&self) -> Result<Form, Error> {
        let lie = self.beta.lie_derivative(&self.x)?;
        let factor = conformal_factor(&self.coords, 0, 1).mul_int(2);
        let res = lie.sub(&self.beta.mul_poly(&factor)?)?;
        res.map_coeffs(|p| self.rule.reduce(p))
    }

    /// Boundary transversality, exact phase: substituting `z = r - 1` into
    /// `(dr - dz)(X)` must reproduce
    /// `(r-1)^2 {e^-2(-r^2+r+1) - (r+1)^2} + e (2r^2-1)` identically in `r`
    /// and `e`. Returns the residual and the substituted expression.
    pub fn boundary_exact_residual(&self) -> Result<(Poly, Poly), Error> {
        let cs = &self.coords;
        let r = Poly::var(cs, 1);
        let one = Poly::one(cs);
        let s = self.x.component(1).sub(self.x.component(0))?;
        let substituted = s.subst(0, &r.sub(&one)?)?;
        let bracket = r
            .pow(2)
            .neg()
            .add(&r)?
            .add(&one)?
            .mul_coeff(&EpsCoeff::eps_power(-2))
            .sub(&r.add(&one)?.pow(2))?;
        let expected = r
            .sub(&one)?
            .pow(2)
            .mul(&bracket)?
            .add(&lambda_poly(cs, 1).mul_coeff(&EpsCoeff::eps_power(1)))?;
        Ok((substituted.sub(&expected)?, substituted))
    }

    /// Boundary transversality, positivity phase at rational `eps`: Sturm
    /// certificate that the boundary expression is strictly positive on the
    /// admissible `r`-interval, whose endpoints are the real roots of
    /// `(r-1)^2 - e^2 (1 + e - r^2)`.
    pub fn boundary_positivity(&self, eps: &Scalar) -> Result<BoundaryCertificate, Error> {
        let cs = &self.coords;
        let r = Poly::var(cs, 1);
        let one = Poly::one(cs);
        let (_, substituted) = self.boundary_exact_residual()?;
        let b_eps = UniPoly::from_poly(&substituted.specialize_eps(eps)?, 1)?;
        // admissible interval: (r-1)^2 <= e^2 (1 + e - r^2)
        let admissible = r
            .sub(&one)?
            .pow(2)
            .sub(
                &one.add(&Poly::eps(cs, 1))?
                    .sub(&r.pow(2))?
                    .mul_coeff(&EpsCoeff::eps_power(2)),
            )?
            .specialize_eps(eps)?;
        let adm = UniPoly::from_poly(&admissible, 1)?;
        let mut roots = unipoly::isolate_roots(&adm)?;
        if roots.len() != 2 {
            return Err(Error::Invalid(format!(
                "admissible interval should have 2 endpoints, found {}",
                roots.len()
            )));
        }
        let width = scalar::rat(1, 1_000_000);
        for root in roots.iter_mut() {
            let factor = adm.clone();
            unipoly::refine_root(&factor, root, &width);
        }
        let lo = roots[0].lo.clone();
        let hi = roots[1].hi.clone();
        let positive = unipoly::sturm_positive(&b_eps, &lo, &hi)?;
        Ok(BoundaryCertificate {
            lo,
            hi,
            positive,
        })
    }
}

/// Result of the boundary positivity certificate: the outer rational bounds
/// of the admissible interval and the Sturm verdict on them.
#[derive(Clone, Debug)]
pub struct BoundaryCertificate {
    pub lo: Scalar,
    pub hi: Scalar,
    pub positive: bool,
}

/// The rotation-reduced system on the quarter-sphere, in coordinates
/// `(z, r, rho)` with `rho = |(x, y)|`. The third component is tracked both
/// as the rate of `rho^2` (always polynomial) and as the rate of `rho`
/// (obtained by exact division by `2 rho`).
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub coords: Arc<CoordSystem>,
    pub z_dot: Poly,
    pub r_dot: Poly,
    pub rho_sq_dot: Poly,
    pub rho_dot: Poly,
    pub constraint: Poly,
    pub rule: NormalFormRule,
}

impl ReducedSystem {
    /// Push-forward of the model field under the rotational quotient, with
    /// the well-definedness checks: `dz(X)`, `dr(X)`, `dth(X)` must not
    /// involve `th, x_i, y_i`, and `X(rho^2)` must collapse to
    /// `2 e^-2 (2r^2-1) z rho^2` after substituting `rho^2 = sum(x^2+y^2)`.
    pub fn from_model(obj: &ModelData) -> Result<Self, Error> {
        let cs = &obj.coords;
        let n = obj.n;
        for (label, comp) in [
            ("dz(X)", obj.x.component(0)),
            ("dr(X)", obj.x.component(1)),
            ("dth(X)", obj.x.component(2)),
        ] {
            for i in 2..cs.len() {
                if comp.has_var(i) {
                    return Err(Error::ReductionFailed(format!(
                        "{} involves `{}`",
                        label,
                        cs.name(i)
                    )));
                }
            }
        }
        // X(rho^2) = sum 2 (x_i X^{x_i} + y_i X^{y_i})
        let mut x_rho_sq = Poly::zero(cs);
        for i in 0..n - 1 {
            let xv = Poly::var(cs, 3 + 2 * i);
            let yv = Poly::var(cs, 4 + 2 * i);
            x_rho_sq = x_rho_sq
                .add(&xv.mul(obj.x.component(3 + 2 * i))?.mul_int(2))?
                .add(&yv.mul(obj.x.component(4 + 2 * i))?.mul_int(2))?;
        }
        let mut sigma = Poly::zero(cs);
        for i in 0..n - 1 {
            sigma = sigma
                .add(&Poly::var(cs, 3 + 2 * i).pow(2))?
                .add(&Poly::var(cs, 4 + 2 * i).pow(2))?;
        }
        let collapsed = conformal_factor(cs, 0, 1).mul_int(2).mul(&sigma)?;
        if !x_rho_sq.sub(&collapsed)?.is_zero() {
            return Err(Error::ReductionFailed(
                "X(rho^2) does not collapse to the rotational form".into(),
            ));
        }

        let c3 = CoordSystem::reduced();
        let mut var_map = vec![None; cs.len()];
        var_map[0] = Some(0);
        var_map[1] = Some(1);
        let z_dot = obj.x.component(0).map_vars(&c3, &var_map)?;
        let r_dot = obj.x.component(1).map_vars(&c3, &var_map)?;
        let rho = Poly::var(&c3, 2);
        let rho_dot = conformal_factor(&c3, 0, 1).mul(&rho)?;
        let rho_sq_dot = rho_dot.mul(&rho)?.mul_int(2);
        Self::assemble(c3, z_dot, r_dot, rho_sq_dot, rho_dot)
    }

    /// Generic rotational reduction of a characteristic field on the jet
    /// coordinates: collapses `sum(x^2+y^2)` powers into `rho^2`, divides the
    /// triple by its common monomial factor, and checks the parity structure
    /// the quarter-sphere charts rely on.
    pub fn from_field(coords: &Arc<CoordSystem>, x: &VecField) -> Result<Self, Error> {
        let n = (coords.len() - 1) / 2;
        if coords.len() < 5 || !CoordSystem::same(coords, &CoordSystem::jet(n)) {
            return Err(Error::ReductionFailed(
                "rotational reduction needs the (z, r, th, x_i, y_i) coordinates".into(),
            ));
        }
        let mut sigma = Poly::zero(coords);
        for i in 0..n - 1 {
            sigma = sigma
                .add(&Poly::var(coords, 3 + 2 * i).pow(2))?
                .add(&Poly::var(coords, 4 + 2 * i).pow(2))?;
        }
        let c3 = CoordSystem::reduced();
        let z_dot = collapse_pairs(x.component(0), &sigma, &c3)?;
        let r_dot = collapse_pairs(x.component(1), &sigma, &c3)?;
        collapse_pairs(x.component(2), &sigma, &c3)?; // well-definedness of the angular rate
        let mut x_rho_sq = Poly::zero(coords);
        for i in 0..n - 1 {
            let xv = Poly::var(coords, 3 + 2 * i);
            let yv = Poly::var(coords, 4 + 2 * i);
            x_rho_sq = x_rho_sq
                .add(&xv.mul(x.component(3 + 2 * i))?.mul_int(2))?
                .add(&yv.mul(x.component(4 + 2 * i))?.mul_int(2))?;
        }
        let rho_sq_dot = collapse_pairs(&x_rho_sq, &sigma, &c3)?;
        let rho = Poly::var(&c3, 2);
        let rho_dot = rho_sq_dot
            .div_exact(&rho.mul_int(2))
            .ok_or_else(|| Error::ReductionFailed("X(rho^2) is not divisible by rho".into()))?;

        // Divide out the common monomial factor so zeros stay isolated.
        let (mz, _) = z_dot.factor_out_monomial();
        let (mr, _) = r_dot.factor_out_monomial();
        let (mo, _) = rho_dot.factor_out_monomial();
        let common: Vec<u16> = (0..3)
            .map(|i| mz.exp(i).min(mr.exp(i)).min(mo.exp(i)))
            .collect();
        let common = Poly::from_terms(&c3, [(crate::poly::Monomial(common), EpsCoeff::one())]);
        let z_dot = z_dot.div_exact(&common).expect("common factor");
        let r_dot = r_dot.div_exact(&common).expect("common factor");
        let rho_dot = rho_dot.div_exact(&common).expect("common factor");
        let rho_sq_dot = rho_dot.mul(&rho)?.mul_int(2);
        Self::assemble(c3, z_dot, r_dot, rho_sq_dot, rho_dot)
    }

    fn assemble(
        c3: Arc<CoordSystem>,
        z_dot: Poly,
        r_dot: Poly,
        rho_sq_dot: Poly,
        rho_dot: Poly,
    ) -> Result<Self, Error> {
        // Parity structure: reflection-extension through r -> -r and
        // rho -> -rho must leave the field intact.
        let parity_checks = [
            ("dz", &z_dot, 1usize, true),
            ("dz", &z_dot, 2usize, true),
            ("dr", &r_dot, 2usize, true),
            ("drho", &rho_dot, 1usize, true),
        ];
        for (label, p, var, want_even) in parity_checks {
            if p.is_even_in(var) != want_even {
                return Err(Error::ReductionFailed(format!(
                    "{} has the wrong parity in `{}`",
                    label,
                    c3.name(var)
                )));
            }
        }
        for (label, p, var) in [("dr", &r_dot, 1usize), ("drho", &rho_dot, 2usize)] {
            let odd = p.terms().all(|(m, _)| m.exp(var) % 2 == 1);
            if !odd {
                return Err(Error::ReductionFailed(format!(
                    "{} is not odd in `{}`",
                    label,
                    c3.name(var)
                )));
            }
        }
        let z = Poly::var(&c3, 0);
        let r = Poly::var(&c3, 1);
        let rho = Poly::var(&c3, 2);
        let constraint = r
            .pow(2)
            .add(
                &z.pow(2)
                    .add(&rho.pow(2))?
                    .mul_coeff(&EpsCoeff::eps_power(-2)),
            )?
            .sub(&Poly::one(&c3))?
            .sub(&Poly::eps(&c3, 1))?;
        let rule = NormalFormRule::from_defining(&constraint, 0)?;
        Ok(ReducedSystem {
            coords: c3,
            z_dot,
            r_dot,
            rho_sq_dot,
            rho_dot,
            constraint,
            rule,
        })
    }

    /// Numerator and denominator of the first integral
    /// `C = (e^-2 z^2 + r^2 - 1 - e) / (r^2 (r^2 - 1))`.
    pub fn first_integral_parts(&self) -> Result<(Poly, Poly), Error> {
        let c3 = &self.coords;
        let z = Poly::var(c3, 0);
        let n = z
            .pow(2)
            .mul_coeff(&EpsCoeff::eps_power(-2))
            .add(&Poly::var(c3, 1).pow(2))?
            .sub(&Poly::one(c3))?
            .sub(&Poly::eps(c3, 1))?;
        let d = mu_poly(c3, 1);
        Ok((n, d))
    }

    /// Directional derivative along the reduced field.
    pub fn apply_to(&self, p: &Poly) -> Result<Poly, Error> {
        let mut acc = self.z_dot.mul(&p.deriv(0))?;
        acc = acc.add(&self.r_dot.mul(&p.deriv(1))?)?;
        acc.add(&self.rho_dot.mul(&p.deriv(2))?)
    }

    /// Symbolic first-integral certificate: the normal form of
    /// `X'(N) D - N X'(D)` modulo the quarter-sphere constraint. For this
    /// construction the residual vanishes identically, even before
    /// reduction.
    pub fn first_integral_residual(&self) -> Result<Poly, Error> {
        let (n, d) = self.first_integral_parts()?;
        let raw = self
            .apply_to(&n)?
            .mul(&d)?
            .sub(&n.mul(&self.apply_to(&d)?)?)?;
        self.rule.reduce(&raw)
    }

    /// The leaf polynomial `G_C = e^-2 z^2 - (C r^2 - 1)(r^2 - 1) - e`.
    pub fn leaf(&self, c: &Scalar) -> Result<Poly, Error> {
        let c3 = &self.coords;
        let z = Poly::var(c3, 0);
        let r = Poly::var(c3, 1);
        let one = Poly::one(c3);
        let cr2_m1 = r.pow(2).mul_coeff(&EpsCoeff::from_scalar(c.clone())).sub(&one)?;
        z.pow(2)
            .mul_coeff(&EpsCoeff::eps_power(-2))
            .sub(&cr2_m1.mul(&r.pow(2).sub(&one)?)?)?
            .sub(&Poly::eps(c3, 1))
    }
}

/// Collapse every occurrence of the pair-radius polynomial `sigma` in `p`
/// into powers of `rho^2`, transporting `(z, r)` into the reduced system.
/// Fails when `p` is not a polynomial in `(z, r, sigma)`.
fn collapse_pairs(p: &Poly, sigma: &Poly, c3: &Arc<CoordSystem>) -> Result<Poly, Error> {
    let cs = p.coords();
    if p.has_var(2) {
        return Err(Error::ReductionFailed("component involves `th`".into()));
    }
    let mut var_map = vec![None; cs.len()];
    var_map[0] = Some(0);
    var_map[1] = Some(1);
    let rho_sq = Poly::var(c3, 2).pow(2);
    let mut rest = p.clone();
    let mut out = Poly::zero(c3);
    let mut level = 0u32;
    loop {
        // split off the part free of the pair coordinates
        let mut free = Poly::zero(cs);
        for (m, c) in rest.terms() {
            if (3..cs.len()).all(|i| m.exp(i) == 0) {
                free.add_term(m.clone(), c.clone());
            }
        }
        let free3 = free.map_vars(c3, &var_map)?.mul(&rho_sq.pow(level))?;
        out = out.add(&free3)?;
        rest = rest.sub(&free)?;
        if rest.is_zero() {
            return Ok(out);
        }
        rest = rest.div_exact(sigma).ok_or_else(|| {
            Error::ReductionFailed("component is not rotation invariant".into())
        })?;
        level += 1;
    }
}

/// Exact values attached to the special orbits: the squares are rational,
/// the values themselves are evaluated at high precision on demand.
///
/// The hyperbolic circle of the reduced field lifts to
/// `H = {0} x S^1(r0) x S^(2n-3)(n0)` inside the ambient product (the
/// sphere factor has dimension `2n-3`, the unit sphere of the pair
/// coordinates `R^(2n-2)`); the invariant circles lift to
/// `P_+- = {+-e sqrt(e)} x S^1(1) x {0}`.
#[derive(Clone, Debug)]
pub struct SpecialOrbits {
    pub eps: Scalar,
}

impl SpecialOrbits {
    pub fn new(eps: Scalar) -> Self {
        SpecialOrbits { eps }
    }

    /// `z^2` on the pole points: `e^2 (1 + e)`.
    pub fn z_pole_sq(&self) -> Scalar {
        &self.eps * &self.eps * (scalar::int(1) + &self.eps)
    }

    /// `z^2` on the periodic circles: `e^3`.
    pub fn z_p_sq(&self) -> Scalar {
        &self.eps * &self.eps * &self.eps
    }

    pub fn z_pole(&self, ctx: &Ctx) -> Real {
        ctx.sqrt(&ctx.from_scalar(&self.z_pole_sq()))
    }

    pub fn z_p(&self, ctx: &Ctx) -> Real {
        ctx.sqrt(&ctx.from_scalar(&self.z_p_sq()))
    }

    /// `w = sqrt(e (1 + e))`.
    pub fn w(&self, ctx: &Ctx) -> Real {
        let w_sq = &self.eps * (scalar::int(1) + &self.eps);
        ctx.sqrt(&ctx.from_scalar(&w_sq))
    }

    /// `r0 = sqrt(1 + e - w)`, the radius of the hyperbolic circle.
    pub fn r0(&self, ctx: &Ctx) -> Real {
        let one_eps = ctx.from_scalar(&(scalar::int(1) + &self.eps));
        ctx.sqrt(&ctx.sub(&one_eps, &self.w(ctx)))
    }

    /// `n0 = sqrt(e^2 w)`.
    pub fn n0(&self, ctx: &Ctx) -> Real {
        let e2 = ctx.from_scalar(&(&self.eps * &self.eps));
        ctx.sqrt(&ctx.mul(&e2, &self.w(ctx)))
    }

    /// Leaf parameter of the separatrix: `C = 1 + 2e + 2w`.
    pub fn c_sep(&self, ctx: &Ctx) -> Real {
        let base = ctx.from_scalar(&(scalar::int(1) + scalar::int(2) * &self.eps));
        ctx.add(&base, &ctx.mul(&ctx.from_i64(2), &self.w(ctx)))
    }

    /// Defining polynomial of `r0`: `t^4 - 2(1+e) t^2 + (1+e)^2 - e(1+e)`.
    pub fn r0_defining(&self) -> UniPoly {
        let one_eps = scalar::int(1) + &self.eps;
        UniPoly::new(vec![
            &one_eps * &one_eps - &self.eps * &one_eps,
            Scalar::from_integer(0.into()),
            -scalar::int(2) * &one_eps,
            Scalar::from_integer(0.into()),
            scalar::int(1),
        ])
    }

    /// Discriminant (in the leaf parameter) of the radial leaf equation:
    /// `C^2 - 2 C (1 + 2e) + 1`; its larger root is the separatrix value.
    pub fn c_discriminant(&self) -> UniPoly {
        UniPoly::new(vec![
            scalar::int(1),
            -scalar::int(2) * (scalar::int(1) + scalar::int(2) * &self.eps),
            scalar::int(1),
        ])
    }
}

/// Result of one verification step: identity name, the checked formula, the
/// residual terms on failure, and which certificate produced the verdict.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VerifyOutcome {
    pub name: String,
    pub paper_anchor: String,
    pub status: String,
    pub residual_terms: Vec<String>,
    pub certificate: String,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn pass(name: &str, anchor: &str, certificate: &str) -> Self {
        VerifyOutcome {
            name: name.into(),
            paper_anchor: anchor.into(),
            status: "pass".into(),
            residual_terms: vec![],
            certificate: certificate.into(),
        }
    }

    pub fn fail(name: &str, anchor: &str, certificate: &str, residual: Vec<String>) -> Self {
        VerifyOutcome {
            name: name.into(),
            paper_anchor: anchor.into(),
            status: "fail".into(),
            residual_terms: residual,
            certificate: certificate.into(),
        }
    }
}

/// Renders the leading terms of a nonzero residual for the ledger.
pub fn residual_terms_poly(p: &Poly) -> Vec<String> {
    let mut out = Vec::new();
    let total = p.num_terms();
    for (i, (m, c)) in p.terms().enumerate() {
        if i >= 6 {
            out.push(format!(".. {} more terms", total - 6));
            break;
        }
        let mono = Poly::from_terms(p.coords(), [(m.clone(), c.clone())]);
        out.push(mono.to_string());
    }
    out
}

pub fn residual_terms_form(f: &Form) -> Vec<String> {
    let mut out = Vec::new();
    for (idx, p) in f.terms() {
        let basis: Vec<String> = idx
            .iter()
            .map(|&i| format!("d{}", f.coords().name(i as usize)))
            .collect();
        out.push(format!("({}) {}", p, basis.join("^")));
        if out.len() >= 6 {
            out.push(".. more".into());
            break;
        }
    }
    out
}

/// Checks that `eps` is an admissible parameter value: `0 < eps <= 1/10`.
pub fn check_eps(eps: &Scalar) -> Result<(), Error> {
    if !eps.is_positive() || eps > &scalar::rat(1, 10) {
        return Err(Error::Invalid(format!(
            "eps must lie in (0, 1/10], got {}",
            eps
        )));
    }
    Ok(())
}
