//! Numeric dynamics on the quarter-sphere: zero finding, classification,
//! winding-number indices, and constrained integration.
//!
//! The reduced field is polynomial in `(z, r, rho)` with the parity
//! structure enforced by `ReducedSystem`, so the two charts used below
//! eliminate `rho` (resp. `r`) through `rho^2 = sigma(z, r)` (resp.
//! `r^2 = varsigma(z, rho)`) and stay polynomial. Evaluating those chart
//! polynomials at negative `sigma`/`varsigma` continues the field through
//! the boundary arcs, which is exactly the reflection extension: boundary
//! zeros become interior points of the extended picture and their winding
//! numbers are well defined.

use std::sync::Arc;

use serde::Serialize;

use crate::construction::ReducedSystem;
use crate::coords::CoordSystem;
use crate::eps::EpsCoeff;
use crate::error::Error;
use crate::poly::Poly;
use crate::real::{scalar_to_f64, Ctx, Real};
use crate::scalar::Scalar;

const GRID: usize = 200;
const WINDING_SAMPLES: usize = 720;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Source,
    Sink,
    Saddle,
    Rotational,
}

/// Eigenvalue data of the constraint-tangent linearization.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub kind: Kind,
    pub eig_re: [f64; 2],
    pub eig_im: f64,
}

/// A reduced system specialized at a rational parameter value, with the
/// chart eliminations precomputed.
pub struct NumericSystem {
    pub eps: Scalar,
    pub coords: Arc<CoordSystem>,
    pub z_dot: Poly,
    pub r_dot: Poly,
    pub rho_dot: Poly,
    pub constraint: Poly,
    pub n_poly: Poly,
    pub d_poly: Poly,
    chart_zr: [Poly; 2],
    chart_zrho: [Poly; 2],
}

impl NumericSystem {
    pub fn new(sys: &ReducedSystem, eps: &Scalar) -> Result<Self, Error> {
        crate::construction::check_eps(eps)?;
        let z_dot = sys.z_dot.specialize_eps(eps)?;
        let r_dot = sys.r_dot.specialize_eps(eps)?;
        let rho_dot = sys.rho_dot.specialize_eps(eps)?;
        let constraint = sys.constraint.specialize_eps(eps)?;
        let (n_poly, d_poly) = sys.first_integral_parts()?;
        let n_poly = n_poly.specialize_eps(eps)?;
        let d_poly = d_poly.specialize_eps(eps)?;

        let one = Scalar::from_integer(1.into());
        let e2 = eps * eps;

        // rho^2 = sigma(z, r) = e^2 (1 + e) - e^2 r^2 - z^2
        let zr = CoordSystem::plane("z", "r");
        let sigma = Poly::scalar(&zr, &e2 * (&one + eps))
            .sub(
                &Poly::var(&zr, 1)
                    .pow(2)
                    .mul_coeff(&EpsCoeff::from_scalar(e2.clone())),
            )?
            .sub(&Poly::var(&zr, 0).pow(2))?;
        let chart_zr = [
            z_dot.subst_square_into(2, &sigma, &[Some(0), Some(1), None])?,
            r_dot.subst_square_into(2, &sigma, &[Some(0), Some(1), None])?,
        ];

        // r^2 = varsigma(z, rho) = (1 + e) - e^-2 z^2 - e^-2 rho^2
        let zrho = CoordSystem::plane("z", "rho");
        let inv_e2 = &one / &e2;
        let varsigma = Poly::scalar(&zrho, &one + eps)
            .sub(
                &Poly::var(&zrho, 0)
                    .pow(2)
                    .mul_coeff(&EpsCoeff::from_scalar(inv_e2.clone())),
            )?
            .sub(
                &Poly::var(&zrho, 1)
                    .pow(2)
                    .mul_coeff(&EpsCoeff::from_scalar(inv_e2)),
            )?;
        let chart_zrho = [
            z_dot.subst_square_into(1, &varsigma, &[Some(0), None, Some(1)])?,
            rho_dot.subst_square_into(1, &varsigma, &[Some(0), None, Some(1)])?,
        ];

        Ok(NumericSystem {
            eps: eps.clone(),
            coords: sys.coords.clone(),
            z_dot,
            r_dot,
            rho_dot,
            constraint,
            n_poly,
            d_poly,
            chart_zr,
            chart_zrho,
        })
    }

    pub fn field_real(&self, ctx: &Ctx, p: &[Real]) -> Result<[Real; 3], Error> {
        Ok([
            self.z_dot.eval_real(ctx, p)?,
            self.r_dot.eval_real(ctx, p)?,
            self.rho_dot.eval_real(ctx, p)?,
        ])
    }

    /// Leaf parameter `C = N/D` at a point; `None` where `D` vanishes
    /// (within the working tolerance).
    pub fn leaf_parameter(&self, ctx: &Ctx, p: &[Real]) -> Result<Option<Real>, Error> {
        let d = self.d_poly.eval_real(ctx, p)?;
        if ctx.to_f64(&ctx.abs(&d)) < 1e-30 {
            return Ok(None);
        }
        let n = self.n_poly.eval_real(ctx, p)?;
        Ok(Some(ctx.div(&n, &d)))
    }

    pub fn eps_f64(&self) -> f64 {
        scalar_to_f64(&self.eps)
    }

    /// Maximal `|z|` on the sphere: `e sqrt(1 + e)`.
    pub fn z_bound(&self) -> f64 {
        let e = self.eps_f64();
        e * (1.0 + e).sqrt()
    }

    /// `sigma(z, r) = rho^2` at working precision.
    fn sigma_real(&self, ctx: &Ctx, z: &Real, r: &Real) -> Real {
        let one = Scalar::from_integer(1.into());
        let e2 = &self.eps * &self.eps;
        let c = ctx.from_scalar(&(&e2 * (&one + &self.eps)));
        let e2r = ctx.from_scalar(&e2);
        let t = ctx.sub(&c, &ctx.mul(&e2r, &ctx.mul(r, r)));
        ctx.sub(&t, &ctx.mul(z, z))
    }

    /// `varsigma(z, rho) = r^2` at working precision.
    fn varsigma_real(&self, ctx: &Ctx, z: &Real, rho: &Real) -> Real {
        let one = Scalar::from_integer(1.into());
        let c = ctx.from_scalar(&(&one + &self.eps));
        let e2 = ctx.from_scalar(&(&self.eps * &self.eps));
        let s = ctx.add(&ctx.mul(z, z), &ctx.mul(rho, rho));
        ctx.sub(&c, &ctx.div(&s, &e2))
    }
}

struct Chart2 {
    f: [Poly; 2],
    jac: [[Poly; 2]; 2],
}

impl Chart2 {
    fn new(f: &[Poly; 2]) -> Self {
        Chart2 {
            f: f.clone(),
            jac: [
                [f[0].deriv(0), f[0].deriv(1)],
                [f[1].deriv(0), f[1].deriv(1)],
            ],
        }
    }

    fn newton_f64(&self, mut x: f64, mut y: f64, box_scale: f64) -> Option<(f64, f64)> {
        for _ in 0..80 {
            let f0 = self.f[0].eval_f64(&[x, y]);
            let f1 = self.f[1].eval_f64(&[x, y]);
            let a = self.jac[0][0].eval_f64(&[x, y]);
            let b = self.jac[0][1].eval_f64(&[x, y]);
            let c = self.jac[1][0].eval_f64(&[x, y]);
            let d = self.jac[1][1].eval_f64(&[x, y]);
            let det = a * d - b * c;
            if det.abs() < 1e-300 || !det.is_finite() {
                return None;
            }
            let dx = (f0 * d - f1 * b) / det;
            let dy = (a * f1 - c * f0) / det;
            x -= dx;
            y -= dy;
            if !x.is_finite() || !y.is_finite() || x.abs() + y.abs() > 100.0 * box_scale {
                return None;
            }
            if dx.abs() + dy.abs() < 1e-13 * box_scale {
                let r0 = self.f[0].eval_f64(&[x, y]);
                let r1 = self.f[1].eval_f64(&[x, y]);
                if r0.abs() + r1.abs() < 1e-9 {
                    return Some((x, y));
                }
            }
        }
        None
    }

    fn polish_real(&self, ctx: &Ctx, x0: f64, y0: f64) -> Option<(Real, Real)> {
        let mut x = ctx.from_f64(x0);
        let mut y = ctx.from_f64(y0);
        let target = ctx.from_f64(10f64.powi(-(ctx.digits() as i32) + 8));
        for _ in 0..64 {
            let pt = [x.clone(), y.clone()];
            let f0 = self.f[0].eval_real(ctx, &pt).ok()?;
            let f1 = self.f[1].eval_real(ctx, &pt).ok()?;
            let a = self.jac[0][0].eval_real(ctx, &pt).ok()?;
            let b = self.jac[0][1].eval_real(ctx, &pt).ok()?;
            let c = self.jac[1][0].eval_real(ctx, &pt).ok()?;
            let d = self.jac[1][1].eval_real(ctx, &pt).ok()?;
            let det = ctx.sub(&ctx.mul(&a, &d), &ctx.mul(&b, &c));
            if ctx.signum(&det) == 0 {
                return None;
            }
            let dx = ctx.div(&ctx.sub(&ctx.mul(&f0, &d), &ctx.mul(&f1, &b)), &det);
            let dy = ctx.div(&ctx.sub(&ctx.mul(&a, &f1), &ctx.mul(&c, &f0)), &det);
            x = ctx.sub(&x, &dx);
            y = ctx.sub(&y, &dy);
            let step = ctx.add(&ctx.abs(&dx), &ctx.abs(&dy));
            if ctx.lt(&step, &target) {
                return Some((x, y));
            }
        }
        None
    }
}

#[derive(Default)]
struct ZeroCollector {
    items: Vec<([f64; 3], [Real; 3])>,
}

impl ZeroCollector {
    fn push(&mut self, key: [f64; 3], value: [Real; 3]) {
        for (k, _) in &self.items {
            if (k[0] - key[0]).abs() < 1e-8
                && (k[1] - key[1]).abs() < 1e-8
                && (k[2] - key[2]).abs() < 1e-8
            {
                return;
            }
        }
        self.items.push((key, value));
    }

    fn into_sorted(mut self) -> Vec<[Real; 3]> {
        self.items.sort_by(|a, b| {
            a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal)
        });
        self.items.into_iter().map(|(_, v)| v).collect()
    }
}

/// All zeros of the reduced field on the closed quarter-sphere (boundary
/// arcs included), Newton-iterated from a 200 x 200 seed grid over the
/// `(z, r)` and `(z, rho)` charts, polished at working precision and
/// deduplicated within 1e-8.
pub fn find_zeros(ns: &NumericSystem, ctx: &Ctx) -> Result<Vec<[Real; 3]>, Error> {
    let e = ns.eps_f64();
    let zb = ns.z_bound();
    let rb = (1.0 + e).sqrt();
    let e2 = e * e;

    let mut zeros = ZeroCollector::default();

    // (z, r) chart
    let chart = Chart2::new(&ns.chart_zr);
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let z = -zb + 2.0 * zb * (i as f64 + 0.5) / GRID as f64;
            let r = rb * (j as f64 + 0.5) / GRID as f64;
            if let Some((z1, r1)) = chart.newton_f64(z, r, 1.0) {
                let sigma = e2 * (1.0 + e) - e2 * r1 * r1 - z1 * z1;
                if r1 > -1e-9 && sigma > -1e-7 {
                    dedup_push(&mut candidates, z1, r1, 1e-6);
                }
            }
        }
    }
    for (z1, r1) in candidates {
        if let Some((z, r)) = chart.polish_real(ctx, z1, r1) {
            let sig = ns.sigma_real(ctx, &z, &r);
            let sigf = ctx.to_f64(&sig);
            let rf = ctx.to_f64(&r);
            if rf < -1e-12 || sigf < -1e-12 {
                continue;
            }
            let rho = if sigf > 0.0 { ctx.sqrt(&sig) } else { ctx.zero() };
            let r = if rf <= 0.0 { ctx.zero() } else { r };
            let key = [ctx.to_f64(&z), rf.max(0.0), ctx.to_f64(&rho)];
            zeros.push(key, [z, r, rho]);
        }
    }

    // (z, rho) chart
    let chart = Chart2::new(&ns.chart_zrho);
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let z = -zb + 2.0 * zb * (i as f64 + 0.5) / GRID as f64;
            let rho = zb * (j as f64 + 0.5) / GRID as f64;
            if let Some((z1, o1)) = chart.newton_f64(z, rho, 1.0) {
                let vs = (1.0 + e) - (z1 * z1 + o1 * o1) / e2;
                if o1 > -1e-9 && vs > -1e-7 {
                    dedup_push(&mut candidates, z1, o1, 1e-6);
                }
            }
        }
    }
    for (z1, o1) in candidates {
        if let Some((z, o)) = chart.polish_real(ctx, z1, o1) {
            let vs = ns.varsigma_real(ctx, &z, &o);
            let vsf = ctx.to_f64(&vs);
            let of = ctx.to_f64(&o);
            if of < -1e-12 || vsf < -1e-12 {
                continue;
            }
            let r = if vsf > 0.0 { ctx.sqrt(&vs) } else { ctx.zero() };
            let o = if of <= 0.0 { ctx.zero() } else { o };
            let key = [ctx.to_f64(&z), ctx.to_f64(&r), of.max(0.0)];
            zeros.push(key, [z, r, o]);
        }
    }

    Ok(zeros.into_sorted())
}

fn dedup_push(list: &mut Vec<(f64, f64)>, x: f64, y: f64, tol: f64) {
    for (a, b) in list.iter() {
        if (a - x).abs() < tol && (b - y).abs() < tol {
            return;
        }
    }
    list.push((x, y));
}

/// Numeric Jacobian of the 3-component field by central differences
/// (step 1e-10 at working precision).
fn jacobian3(ns: &NumericSystem, ctx: &Ctx, p: &[Real; 3]) -> Result<[[Real; 3]; 3], Error> {
    let h = ctx.from_f64(1e-10);
    let comps = [&ns.z_dot, &ns.r_dot, &ns.rho_dot];
    let mut jac = std::array::from_fn::<_, 3, _>(|_| std::array::from_fn::<_, 3, _>(|_| ctx.zero()));
    for j in 0..3 {
        let mut plus = p.clone();
        plus[j] = ctx.add(&plus[j], &h);
        let mut minus = p.clone();
        minus[j] = ctx.sub(&minus[j], &h);
        for i in 0..3 {
            let fp = comps[i].eval_real(ctx, &plus)?;
            let fm = comps[i].eval_real(ctx, &minus)?;
            let two_h = ctx.add(&h, &h);
            jac[i][j] = ctx.div(&ctx.sub(&fp, &fm), &two_h);
        }
    }
    Ok(jac)
}

/// Orthonormal basis of the constraint tangent plane at `p`.
fn tangent_basis(ns: &NumericSystem, ctx: &Ctx, p: &[Real; 3]) -> Result<[[Real; 3]; 2], Error> {
    let g: Vec<Real> = (0..3)
        .map(|i| ns.constraint.deriv(i).eval_real(ctx, p))
        .collect::<Result<_, _>>()?;
    let mut pivot = 0;
    for i in 1..3 {
        if ctx.lt(&ctx.abs(&g[pivot]), &ctx.abs(&g[i])) {
            pivot = i;
        }
    }
    let mut vs: Vec<[Real; 3]> = Vec::new();
    for j in 0..3 {
        if j == pivot {
            continue;
        }
        let mut v = std::array::from_fn::<_, 3, _>(|_| ctx.zero());
        v[j] = ctx.one();
        v[pivot] = ctx.neg(&ctx.div(&g[j], &g[pivot]));
        vs.push(v);
    }
    // Gram-Schmidt
    let norm = |ctx: &Ctx, v: &[Real; 3]| {
        let mut s = ctx.zero();
        for x in v {
            s = ctx.add(&s, &ctx.mul(x, x));
        }
        ctx.sqrt(&s)
    };
    let dot = |ctx: &Ctx, a: &[Real; 3], b: &[Real; 3]| {
        let mut s = ctx.zero();
        for (x, y) in a.iter().zip(b) {
            s = ctx.add(&s, &ctx.mul(x, y));
        }
        s
    };
    let n0 = norm(ctx, &vs[0]);
    let t0 = std::array::from_fn(|i| ctx.div(&vs[0][i], &n0));
    let proj = dot(ctx, &vs[1], &t0);
    let mut w = std::array::from_fn::<_, 3, _>(|i| ctx.sub(&vs[1][i], &ctx.mul(&proj, &t0[i])));
    let n1 = norm(ctx, &w);
    for x in w.iter_mut() {
        *x = ctx.div(x, &n1);
    }
    Ok([t0, w])
}

/// The 2x2 linearization restricted to the constraint tangent plane, plus
/// the basis it is expressed in.
pub fn tangent_jacobian(
    ns: &NumericSystem,
    ctx: &Ctx,
    p: &[Real; 3],
) -> Result<([[Real; 2]; 2], [[Real; 3]; 2]), Error> {
    let jac = jacobian3(ns, ctx, p)?;
    let basis = tangent_basis(ns, ctx, p)?;
    let mut m = std::array::from_fn::<_, 2, _>(|_| std::array::from_fn::<_, 2, _>(|_| ctx.zero()));
    for a in 0..2 {
        for b in 0..2 {
            // t_a . (J t_b)
            let mut s = ctx.zero();
            for i in 0..3 {
                let mut ji = ctx.zero();
                for j in 0..3 {
                    ji = ctx.add(&ji, &ctx.mul(&jac[i][j], &basis[b][j]));
                }
                s = ctx.add(&s, &ctx.mul(&basis[a][i], &ji));
            }
            m[a][b] = s;
        }
    }
    Ok((m, basis))
}

/// Classification by the eigenvalues of the tangent-plane linearization
/// (quadratic formula on the 2x2 restriction). Near-zero eigenvalues defer
/// to the winding-number index.
pub fn classify(ns: &NumericSystem, ctx: &Ctx, p: &[Real; 3]) -> Result<Classification, Error> {
    let (m, _) = tangent_jacobian(ns, ctx, p)?;
    let tr = ctx.add(&m[0][0], &m[1][1]);
    let det = ctx.sub(
        &ctx.mul(&m[0][0], &m[1][1]),
        &ctx.mul(&m[0][1], &m[1][0]),
    );
    let four = ctx.from_i64(4);
    let disc = ctx.sub(&ctx.mul(&tr, &tr), &ctx.mul(&four, &det));
    let two = ctx.from_i64(2);
    if ctx.signum(&disc) >= 0 {
        let sq = ctx.sqrt(&disc);
        let l1 = ctx.div(&ctx.add(&tr, &sq), &two);
        let l2 = ctx.div(&ctx.sub(&tr, &sq), &two);
        let tol = ctx.from_f64(1e-9);
        if ctx.lt(&ctx.abs(&l1), &tol) || ctx.lt(&ctx.abs(&l2), &tol) {
            return Err(Error::DegenerateJacobian);
        }
        let (s1, s2) = (ctx.signum(&l1), ctx.signum(&l2));
        let kind = match (s1 > 0, s2 > 0) {
            (true, true) => Kind::Source,
            (false, false) => Kind::Sink,
            _ => Kind::Saddle,
        };
        Ok(Classification {
            kind,
            eig_re: [ctx.to_f64(&l1), ctx.to_f64(&l2)],
            eig_im: 0.0,
        })
    } else {
        let re = ctx.div(&tr, &two);
        let im = ctx.div(&ctx.sqrt(&ctx.neg(&disc)), &two);
        Ok(Classification {
            kind: Kind::Rotational,
            eig_re: [ctx.to_f64(&re), ctx.to_f64(&re)],
            eig_im: ctx.to_f64(&im),
        })
    }
}

/// Direction (in the ambient `(z, r, rho)` coordinates) of the unstable
/// eigenvector at a saddle.
pub fn saddle_unstable_direction(
    ns: &NumericSystem,
    ctx: &Ctx,
    p: &[Real; 3],
) -> Result<[Real; 3], Error> {
    let (m, basis) = tangent_jacobian(ns, ctx, p)?;
    let tr = ctx.add(&m[0][0], &m[1][1]);
    let det = ctx.sub(
        &ctx.mul(&m[0][0], &m[1][1]),
        &ctx.mul(&m[0][1], &m[1][0]),
    );
    let four = ctx.from_i64(4);
    let disc = ctx.sub(&ctx.mul(&tr, &tr), &ctx.mul(&four, &det));
    if ctx.signum(&disc) < 0 {
        return Err(Error::DegenerateJacobian);
    }
    let two = ctx.from_i64(2);
    let lam = ctx.div(&ctx.add(&tr, &ctx.sqrt(&disc)), &two);
    // (M - lam I) v = 0; take v from the larger row
    let a = ctx.sub(&m[0][0], &lam);
    let b = m[0][1].clone();
    let c = m[1][0].clone();
    let d = ctx.sub(&m[1][1], &lam);
    let (v0, v1) = if ctx.lt(
        &ctx.add(&ctx.abs(&a), &ctx.abs(&b)),
        &ctx.add(&ctx.abs(&c), &ctx.abs(&d)),
    ) {
        (d, ctx.neg(&c))
    } else {
        (b, ctx.neg(&a))
    };
    Ok(std::array::from_fn(|i| {
        ctx.add(&ctx.mul(&v0, &basis[0][i]), &ctx.mul(&v1, &basis[1][i]))
    }))
}

/// Which planar chart a winding-number computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChartChoice {
    /// Interior points: honest `(z, r)` coordinates.
    Zr,
    /// Points on (or near) the `rho = 0` or `r = 0` arcs: `(z, rho)` with
    /// `r^2` eliminated, doubling the field through the arc.
    Zrho,
    /// The corner points `r = rho = 0`: `(r, rho)` with `z` recovered from
    /// the constraint, quadrupling the field.
    Pole { z_sign: i32 },
}

/// Poincare index of an isolated zero: winding number of the field over a
/// circle of the given radius, 720 samples, angles accumulated at working
/// precision. Boundary-arc zeros are computed on the reflection-extended
/// field per the chart choice above.
pub fn poincare_index(
    ns: &NumericSystem,
    ctx: &Ctx,
    p: &[Real; 3],
    radius: f64,
) -> Result<i64, Error> {
    let rf = ctx.to_f64(&p[1]);
    let of = ctx.to_f64(&p[2]);
    let choice = if rf < radius && of < radius {
        ChartChoice::Pole {
            z_sign: ctx.signum(&p[0]),
        }
    } else if of < radius || rf < radius {
        ChartChoice::Zrho
    } else {
        ChartChoice::Zr
    };
    let center = match choice {
        ChartChoice::Zr => [p[0].clone(), p[1].clone()],
        ChartChoice::Zrho => [p[0].clone(), p[2].clone()],
        ChartChoice::Pole { .. } => [p[1].clone(), p[2].clone()],
    };

    let rad = ctx.from_f64(radius);
    let two_pi = ctx.mul(&ctx.from_i64(2), &ctx.pi());
    let mut total = ctx.zero();
    let mut prev: Option<[Real; 2]> = None;
    let mut first: Option<[Real; 2]> = None;
    let tiny = ctx.from_f64(1e-40);
    for k in 0..WINDING_SAMPLES {
        let phi = ctx.div(
            &ctx.mul(&two_pi, &ctx.from_i64(k as i64)),
            &ctx.from_i64(WINDING_SAMPLES as i64),
        );
        let x = ctx.add(&center[0], &ctx.mul(&rad, &ctx.cos(&phi)));
        let y = ctx.add(&center[1], &ctx.mul(&rad, &ctx.sin(&phi)));
        let v = eval_chart_field(ns, ctx, choice, &x, &y)?;
        let mag = ctx.add(&ctx.abs(&v[0]), &ctx.abs(&v[1]));
        if ctx.lt(&mag, &tiny) {
            return Err(Error::FieldVanishesOnCircle);
        }
        if let Some(pv) = &prev {
            total = ctx.add(&total, &angle_step(ctx, pv, &v));
        } else {
            first = Some(v.clone());
        }
        prev = Some(v);
    }
    if let (Some(pv), Some(fv)) = (&prev, &first) {
        total = ctx.add(&total, &angle_step(ctx, pv, fv));
    }
    let winding = ctx.div(&total, &two_pi);
    let wf = ctx.to_f64(&winding);
    let rounded = wf.round();
    if (wf - rounded).abs() > 0.05 {
        return Err(Error::Invalid(format!(
            "winding number did not close up: {}",
            wf
        )));
    }
    Ok(rounded as i64)
}

fn angle_step(ctx: &Ctx, a: &[Real; 2], b: &[Real; 2]) -> Real {
    let dot = ctx.add(&ctx.mul(&a[0], &b[0]), &ctx.mul(&a[1], &b[1]));
    let cross = ctx.sub(&ctx.mul(&a[0], &b[1]), &ctx.mul(&a[1], &b[0]));
    ctx.atan2(&cross, &dot)
}

fn eval_chart_field(
    ns: &NumericSystem,
    ctx: &Ctx,
    choice: ChartChoice,
    x: &Real,
    y: &Real,
) -> Result<[Real; 2], Error> {
    match choice {
        ChartChoice::Zr => {
            let pt = [x.clone(), y.clone()];
            Ok([
                ns.chart_zr[0].eval_real(ctx, &pt)?,
                ns.chart_zr[1].eval_real(ctx, &pt)?,
            ])
        }
        ChartChoice::Zrho => {
            let pt = [x.clone(), y.clone()];
            Ok([
                ns.chart_zrho[0].eval_real(ctx, &pt)?,
                ns.chart_zrho[1].eval_real(ctx, &pt)?,
            ])
        }
        ChartChoice::Pole { z_sign } => {
            // z = sign * sqrt(e^2 (1+e) - e^2 r^2 - rho^2), smooth near the
            // pole where the radicand stays positive.
            let one = Scalar::from_integer(1.into());
            let e2 = &ns.eps * &ns.eps;
            let c = ctx.from_scalar(&(&e2 * (&one + &ns.eps)));
            let e2r = ctx.from_scalar(&e2);
            let zsq = ctx.sub(
                &ctx.sub(&c, &ctx.mul(&e2r, &ctx.mul(x, x))),
                &ctx.mul(y, y),
            );
            if ctx.signum(&zsq) < 0 {
                return Err(Error::Invalid("pole chart left the sphere".into()));
            }
            let mut z = ctx.sqrt(&zsq);
            if z_sign < 0 {
                z = ctx.neg(&z);
            }
            let pt = [z, x.clone(), y.clone()];
            Ok([
                ns.r_dot.eval_real(ctx, &pt)?,
                ns.rho_dot.eval_real(ctx, &pt)?,
            ])
        }
    }
}

/// One integrated trajectory.
pub struct Trajectory {
    pub points: Vec<[Real; 3]>,
    pub clipped: bool,
    pub max_constraint: Real,
    pub c_start: Option<Real>,
    pub c_end: Option<Real>,
    pub max_c_drift: Option<Real>,
}

/// Fourth-order Runge-Kutta with per-step orthogonal projection back onto
/// the sphere. Stops and flags when the trajectory leaves the chart
/// (`r < 0` or `rho < 0`). A start at a zero of the field returns the
/// single-point polyline.
pub fn integrate(
    ns: &NumericSystem,
    ctx: &Ctx,
    start: &[Real; 3],
    steps: usize,
    h: &Real,
) -> Result<Trajectory, Error> {
    let c0 = ns.constraint.eval_real(ctx, start)?;
    if ctx.to_f64(&ctx.abs(&c0)) > 1e-10 {
        return Err(Error::Invalid(
            "start point violates the sphere constraint".into(),
        ));
    }
    let v0 = ns.field_real(ctx, start)?;
    let mag0 = ctx.add(&ctx.add(&ctx.abs(&v0[0]), &ctx.abs(&v0[1])), &ctx.abs(&v0[2]));
    if ctx.to_f64(&mag0) < 1e-20 {
        return Ok(Trajectory {
            points: vec![start.clone()],
            clipped: false,
            max_constraint: ctx.abs(&c0),
            c_start: ns.leaf_parameter(ctx, start)?,
            c_end: ns.leaf_parameter(ctx, start)?,
            max_c_drift: Some(ctx.zero()),
        });
    }

    let mut q = start.clone();
    let mut points = vec![q.clone()];
    let mut clipped = false;
    let mut max_constraint = ctx.zero();
    let c_start = ns.leaf_parameter(ctx, start)?;
    let mut max_c_drift = c_start.as_ref().map(|_| ctx.zero());

    let half = ctx.div(h, &ctx.from_i64(2));
    let sixth = ctx.div(h, &ctx.from_i64(6));
    let two = ctx.from_i64(2);

    for _ in 0..steps {
        let k1 = ns.field_real(ctx, &q)?;
        let q2: [Real; 3] = std::array::from_fn(|i| ctx.add(&q[i], &ctx.mul(&half, &k1[i])));
        let k2 = ns.field_real(ctx, &q2)?;
        let q3: [Real; 3] = std::array::from_fn(|i| ctx.add(&q[i], &ctx.mul(&half, &k2[i])));
        let k3 = ns.field_real(ctx, &q3)?;
        let q4: [Real; 3] = std::array::from_fn(|i| ctx.add(&q[i], &ctx.mul(h, &k3[i])));
        let k4 = ns.field_real(ctx, &q4)?;
        for i in 0..3 {
            let mid = ctx.add(&ctx.mul(&two, &k2[i]), &ctx.mul(&two, &k3[i]));
            let sum = ctx.add(&ctx.add(&k1[i], &mid), &k4[i]);
            q[i] = ctx.add(&q[i], &ctx.mul(&sixth, &sum));
        }
        project_onto_sphere(ns, ctx, &mut q)?;
        let c = ctx.abs(&ns.constraint.eval_real(ctx, &q)?);
        max_constraint = ctx.max(&max_constraint, &c);
        if ctx.signum(&q[1]) < 0 || ctx.signum(&q[2]) < 0 {
            clipped = true;
            points.push(q.clone());
            break;
        }
        if let (Some(c0), Some(track)) = (&c_start, &mut max_c_drift) {
            if let Some(c_now) = ns.leaf_parameter(ctx, &q)? {
                let drift = ctx.abs(&ctx.sub(&c_now, c0));
                *track = ctx.max(track, &drift);
            }
        }
        points.push(q.clone());
    }

    let c_end = ns.leaf_parameter(ctx, points.last().unwrap())?;
    Ok(Trajectory {
        points,
        clipped,
        max_constraint,
        c_start,
        c_end,
        max_c_drift,
    })
}

fn project_onto_sphere(ns: &NumericSystem, ctx: &Ctx, q: &mut [Real; 3]) -> Result<(), Error> {
    for _ in 0..2 {
        let f = ns.constraint.eval_real(ctx, q)?;
        let g: Vec<Real> = (0..3)
            .map(|i| ns.constraint.deriv(i).eval_real(ctx, q))
            .collect::<Result<_, _>>()?;
        let mut g2 = ctx.zero();
        for x in &g {
            g2 = ctx.add(&g2, &ctx.mul(x, x));
        }
        if ctx.signum(&g2) == 0 {
            return Ok(());
        }
        let t = ctx.div(&f, &g2);
        for i in 0..3 {
            q[i] = ctx.sub(&q[i], &ctx.mul(&t, &g[i]));
        }
    }
    Ok(())
}
