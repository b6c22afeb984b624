//! The verification ledger: one entry per checked identity of the
//! construction, with exact certificates where possible and numeric ones
//! where radicals enter.

use crate::construction::{
    residual_terms_form, residual_terms_poly, ModelData, ReducedSystem, SpecialOrbits,
    VerifyOutcome,
};
use crate::dynamics::{self, NumericSystem};
use crate::error::Error;
use crate::poly::Poly;
use crate::real::{Ctx, Real};
use crate::scalar::Scalar;

pub const ANCHOR_TANGENCY: &str = "dF(X) = 2 e^-2 (2r^2-1) z F";
pub const ANCHOR_BETA_X: &str = "beta(X) = (2r^4-2r^2+1) F";
pub const ANCHOR_IOTA: &str =
    "i_X dbeta = 2 e^-2 (2r^2-1) z beta - (2r^4-2r^2+1) dF  (hence L_X beta = 2 e^-2 (2r^2-1) z beta mod F)";
pub const ANCHOR_BOUNDARY: &str =
    "(dr-dz)(X)|_{z=r-1} = (r-1)^2 {e^-2 (-r^2+r+1) - (r+1)^2} + e (2r^2-1) > 0";
pub const ANCHOR_REDUCTION: &str =
    "X' = (dz(X), dr(X), X(rho^2)) is a well-defined push-forward to the quarter-sphere";
pub const ANCHOR_FIRST_INTEGRAL: &str =
    "C = (e^-2 z^2 + r^2 - 1 - e) / (r^2 (r^2-1)) is constant along X'";
pub const ANCHOR_SPECIAL_ORBITS: &str =
    "P_+- = {z = +-e sqrt(e)} x S^1(1) x {0} are invariant circles; H = p^-1(0, r0, n0) is tangent to the angular directions";

/// Runs the seven ledger entries for the built objects at a rational `eps`.
pub fn run_ledger(obj: &ModelData, eps: &Scalar, ctx: &Ctx) -> Result<Vec<VerifyOutcome>, Error> {
    crate::construction::check_eps(eps)?;
    let mut out = Vec::with_capacity(7);

    // 1. dF(X)
    let res = obj.tangency_residual()?;
    out.push(poly_outcome("tangency", ANCHOR_TANGENCY, &res, "exact-identity"));

    // 2. beta(X)
    let res = obj.beta_x_residual()?;
    out.push(poly_outcome("beta_of_x", ANCHOR_BETA_X, &res, "exact-identity"));

    // 3. i_X dbeta, with the Lie-derivative consequence mod F
    let res = obj.iota_dbeta_residual()?;
    let lie = obj.lie_residual_reduced()?;
    if res.is_zero() && lie.is_zero() {
        out.push(VerifyOutcome::pass(
            "iota_x_dbeta",
            ANCHOR_IOTA,
            "exact-identity + normal-form",
        ));
    } else {
        let mut terms = residual_terms_form(&res);
        terms.extend(residual_terms_form(&lie));
        out.push(VerifyOutcome::fail(
            "iota_x_dbeta",
            ANCHOR_IOTA,
            "exact-identity + normal-form",
            terms,
        ));
    }

    // 4. boundary transversality
    let (res, _) = obj.boundary_exact_residual()?;
    if !res.is_zero() {
        out.push(VerifyOutcome::fail(
            "boundary_transversality",
            ANCHOR_BOUNDARY,
            "exact-identity + sturm",
            residual_terms_poly(&res),
        ));
    } else {
        let cert = obj.boundary_positivity(eps)?;
        if cert.positive {
            out.push(VerifyOutcome::pass(
                "boundary_transversality",
                ANCHOR_BOUNDARY,
                "exact-identity + sturm",
            ));
        } else {
            out.push(VerifyOutcome::fail(
                "boundary_transversality",
                ANCHOR_BOUNDARY,
                "exact-identity + sturm",
                vec![format!(
                    "not positive on the admissible interval [{}, {}]",
                    cert.lo, cert.hi
                )],
            ));
        }
    }

    // 5. rotational reduction
    let sys = match ReducedSystem::from_model(obj) {
        Ok(sys) => {
            out.push(VerifyOutcome::pass(
                "rotational_reduction",
                ANCHOR_REDUCTION,
                "symbolic",
            ));
            Some(sys)
        }
        Err(e) => {
            out.push(VerifyOutcome::fail(
                "rotational_reduction",
                ANCHOR_REDUCTION,
                "symbolic",
                vec![e.to_string()],
            ));
            None
        }
    };

    // 6. first integral (symbolic certificate, numeric trajectory fallback)
    match &sys {
        Some(sys) => out.push(first_integral_outcome(sys, eps, ctx)?),
        None => out.push(VerifyOutcome::fail(
            "first_integral",
            ANCHOR_FIRST_INTEGRAL,
            "symbolic",
            vec!["reduction unavailable".into()],
        )),
    }

    // 7. special orbits
    out.push(verify_special_orbits(obj, eps, ctx)?);

    Ok(out)
}

fn poly_outcome(name: &str, anchor: &str, residual: &Poly, certificate: &str) -> VerifyOutcome {
    if residual.is_zero() {
        VerifyOutcome::pass(name, anchor, certificate)
    } else {
        VerifyOutcome::fail(name, anchor, certificate, residual_terms_poly(residual))
    }
}

fn first_integral_outcome(
    sys: &ReducedSystem,
    eps: &Scalar,
    ctx: &Ctx,
) -> Result<VerifyOutcome, Error> {
    let residual = sys.first_integral_residual()?;
    if residual.is_zero() {
        return Ok(VerifyOutcome::pass(
            "first_integral",
            ANCHOR_FIRST_INTEGRAL,
            "symbolic",
        ));
    }
    // Downgrade to the trajectory-conservation certificate.
    let ns = NumericSystem::new(sys, eps)?;
    match conservation_certificate(&ns, ctx) {
        Ok(true) => Ok(VerifyOutcome::pass(
            "first_integral",
            ANCHOR_FIRST_INTEGRAL,
            "numeric-trajectory",
        )),
        Ok(false) | Err(_) => Ok(VerifyOutcome::fail(
            "first_integral",
            ANCHOR_FIRST_INTEGRAL,
            "numeric-trajectory",
            residual_terms_poly(&residual),
        )),
    }
}

/// Trajectory-conservation fallback: relative drift of the leaf parameter
/// below 1e-8 over 10^4 RK4 steps.
pub fn conservation_certificate(ns: &NumericSystem, ctx: &Ctx) -> Result<bool, Error> {
    let start = sphere_point(ns, ctx, 0.95)?;
    let h = ctx.from_f64(1e-3);
    let traj = dynamics::integrate(ns, ctx, &start, 10_000, &h)?;
    let (c0, drift) = match (&traj.c_start, &traj.max_c_drift) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(false),
    };
    let rel = ctx.div(drift, &ctx.abs(c0));
    Ok(ctx.to_f64(&rel) < 1e-8 && !traj.clipped)
}

/// A point of the quarter-sphere with the given `r` and `z = 0`.
pub fn sphere_point(ns: &NumericSystem, ctx: &Ctx, r: f64) -> Result<[Real; 3], Error> {
    let e = ns.eps_f64();
    let rho2 = e * e * (1.0 + e - r * r);
    if rho2 < 0.0 {
        return Err(Error::Invalid("r is too large for the sphere".into()));
    }
    let rr = ctx.from_f64(r);
    let one = Scalar::from_integer(1.into());
    let c = ctx.from_scalar(&(&ns.eps * &ns.eps * (&one + &ns.eps)));
    let e2 = ctx.from_scalar(&(&ns.eps * &ns.eps));
    let rho_sq = ctx.sub(&c, &ctx.mul(&e2, &ctx.mul(&rr, &rr)));
    Ok([ctx.zero(), rr, ctx.sqrt(&rho_sq)])
}

/// Exact and numeric checks for the special orbits.
pub fn verify_special_orbits(
    obj: &ModelData,
    eps: &Scalar,
    ctx: &Ctx,
) -> Result<VerifyOutcome, Error> {
    let cs = &obj.coords;
    let mut failures: Vec<String> = Vec::new();

    // Exact phase: substitute z^2 = e^3, r = 1, x = y = 0 into X and F.
    let z = Poly::var(cs, 0);
    let zsq_rule = crate::rule::NormalFormRule::from_defining(
        &z.pow(2).sub(&Poly::eps(cs, 3))?,
        0,
    )?;
    let substitute = |p: &Poly| -> Result<Poly, Error> {
        let mut q = zsq_rule.reduce(p)?;
        q = q.subst(1, &Poly::one(cs))?;
        for i in 3..cs.len() {
            q = q.subst(i, &Poly::zero(cs))?;
        }
        Ok(q)
    };
    let checks: Vec<(&str, Poly, Poly)> = vec![
        ("dz(X) on P_+-", substitute(obj.x.component(0))?, Poly::zero(cs)),
        ("dr(X) on P_+-", substitute(obj.x.component(1))?, Poly::zero(cs)),
        ("dth(X) on P_+-", substitute(obj.x.component(2))?, Poly::one(cs)),
        ("F on P_+-", substitute(&obj.f)?, Poly::zero(cs)),
    ];
    for (label, got, want) in checks {
        if got != want {
            failures.push(format!("{}: got {}", label, got));
        }
    }

    // Numeric phase: 8 samples of H = {z = 0, r = r0, |(x,y)| = n0}.
    let orbits = SpecialOrbits::new(eps.clone());
    let r0 = orbits.r0(ctx);
    let n0 = orbits.n0(ctx);
    let x_rho_sq = {
        let mut acc = Poly::zero(cs);
        for i in 0..obj.n - 1 {
            let xv = Poly::var(cs, 3 + 2 * i);
            let yv = Poly::var(cs, 4 + 2 * i);
            acc = acc
                .add(&xv.mul(obj.x.component(3 + 2 * i))?.mul_int(2))?
                .add(&yv.mul(obj.x.component(4 + 2 * i))?.mul_int(2))?;
        }
        acc.specialize_eps(eps)?
    };
    let x_spec: Vec<Poly> = obj
        .x
        .components()
        .iter()
        .map(|c| c.specialize_eps(eps))
        .collect::<Result<_, _>>()?;
    let tol = 1e-10;
    for k in 0..8 {
        let phi = ctx.div(
            &ctx.mul(&ctx.mul(&ctx.from_i64(2), &ctx.pi()), &ctx.from_i64(k)),
            &ctx.from_i64(8),
        );
        let mut point = vec![ctx.zero(); cs.len()];
        point[1] = r0.clone();
        point[3] = ctx.mul(&n0, &ctx.cos(&phi));
        point[4] = ctx.mul(&n0, &ctx.sin(&phi));
        let vz = x_spec[0].eval_real(ctx, &point)?;
        let vr = x_spec[1].eval_real(ctx, &point)?;
        let vrho = x_rho_sq.eval_real(ctx, &point)?;
        for (label, v) in [("dz(X)", &vz), ("dr(X)", &vr), ("X(rho^2)", &vrho)] {
            if ctx.to_f64(&ctx.abs(v)).abs() > tol {
                failures.push(format!("{} = {} on H sample {}", label, ctx.to_f64(v), k));
            }
        }
        // angular components must not vanish
        let vth = x_spec[2].eval_real(ctx, &point)?;
        let vx = x_spec[3].eval_real(ctx, &point)?;
        let vy = x_spec[4].eval_real(ctx, &point)?;
        let rot = ctx.add(&ctx.mul(&vx, &vx), &ctx.mul(&vy, &vy));
        if ctx.to_f64(&ctx.abs(&vth)) < 0.5 || ctx.to_f64(&rot) < 1e-6 {
            failures.push(format!("angular components vanish on H sample {}", k));
        }
    }

    // Membership: P_+ (z > 0) lies in Sigma = {r - z <= 1}, P_- does not.
    let z_p = ctx.to_f64(&orbits.z_p(ctx));
    let in_sigma = |zv: f64| 1.0 - zv <= 1.0;
    if !in_sigma(z_p) || in_sigma(-z_p) {
        failures.push("P_+ / P_- membership in Sigma is wrong".into());
    }
    // Both tangency points lie in Sigma: at r = 0 the condition r - z <= 1
    // reads -+ e sqrt(1+e) <= 1, i.e. (exactly) e^2 (1+e) <= 1.
    use num::One;
    if orbits.z_pole_sq() > Scalar::one() {
        failures.push("the tangency points escape Sigma".into());
    }

    Ok(if failures.is_empty() {
        VerifyOutcome::pass(
            "special_orbits",
            ANCHOR_SPECIAL_ORBITS,
            "exact + numeric-samples",
        )
    } else {
        VerifyOutcome::fail(
            "special_orbits",
            ANCHOR_SPECIAL_ORBITS,
            "exact + numeric-samples",
            failures,
        )
    })
}
