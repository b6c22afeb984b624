//! The singularity pipeline shared by `singular`, `tb` and `portrait`:
//! locate the zeros of the reduced field, classify them, compute indices,
//! and attach tangency signs to the hypersurface tangency points.

use serde::Serialize;

use charfol::construction::{ModelData, ReducedSystem, SpecialOrbits};
use charfol::contact::{ContactData, TangencyKind, TangencyRecord, TangencySign};
use charfol::dynamics::{self, Kind, NumericSystem};
use charfol::error::Error;
use charfol::real::{Ctx, Real};
use charfol::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct PointRow {
    pub z: f64,
    pub r: f64,
    pub rho: f64,
    pub kind: String,
    pub index: i64,
    pub sign: Option<String>,
    pub c: Option<f64>,
    pub eig_re: [f64; 2],
    pub eig_im: f64,
}

pub struct Analysis {
    pub rows: Vec<PointRow>,
    pub records: Vec<TangencyRecord>,
    pub zeros: Vec<[Real; 3]>,
    pub c_sep: f64,
}

fn kind_label(k: Kind) -> &'static str {
    match k {
        Kind::Source => "source",
        Kind::Sink => "sink",
        Kind::Saddle => "saddle",
        Kind::Rotational => "rotational",
    }
}

fn kind_enum(k: Kind) -> TangencyKind {
    match k {
        Kind::Source => TangencyKind::Source,
        Kind::Sink => TangencyKind::Sink,
        Kind::Saddle => TangencyKind::Saddle,
        Kind::Rotational => TangencyKind::Rotational,
    }
}

/// Full pipeline on the built-in construction. Exactly five zeros are
/// expected; anything else is a hard failure.
pub fn analyze_model(n: usize, eps: &Scalar, ctx: &Ctx) -> Result<Analysis, Error> {
    let obj = ModelData::build(n)?;
    let sys = ReducedSystem::from_model(&obj)?;
    let ns = NumericSystem::new(&sys, eps)?;
    let zeros = dynamics::find_zeros(&ns, ctx)?;
    if zeros.len() != 5 {
        return Err(Error::ZeroCount {
            expected: 5,
            found: zeros.len(),
        });
    }
    let cart = ContactData::new(n, obj.beta_cart.clone(), obj.f_cart.clone())?;
    let orientation = cart.induced_orientation_form()?;
    analyze_zeros(&ns, ctx, zeros, Some((&cart, &orientation)), eps, n)
}

/// Classify, index and sign a list of located zeros. Tangency signs are
/// computed for zeros on the degenerate axis `r = rho = 0`, where the
/// preimage is a single point of the hypersurface (the Cartesian-chart data
/// must be supplied for that).
pub fn analyze_zeros(
    ns: &NumericSystem,
    ctx: &Ctx,
    zeros: Vec<[Real; 3]>,
    cart: Option<(&ContactData, &charfol::form::Form)>,
    eps: &Scalar,
    n: usize,
) -> Result<Analysis, Error> {
    let radius = ns.eps_f64() / 20.0;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for p in &zeros {
        let index = dynamics::poincare_index(ns, ctx, p, radius)?;
        let (kind, eig_re, eig_im) = match dynamics::classify(ns, ctx, p) {
            Ok(c) => (c.kind, c.eig_re, c.eig_im),
            // borderline eigenvalues: the winding number is authoritative
            Err(Error::DegenerateJacobian) => {
                let k = if index < 0 { Kind::Saddle } else { Kind::Rotational };
                (k, [0.0, 0.0], 0.0)
            }
            Err(e) => return Err(e),
        };
        let clamp = |v: f64| if v.abs() < 1e-13 { 0.0 } else { v };
        let zf = clamp(ctx.to_f64(&p[0]));
        let rf = clamp(ctx.to_f64(&p[1]));
        let of = clamp(ctx.to_f64(&p[2]));

        let mut sign = None;
        if rf < radius && of < radius {
            if let Some((data, orientation)) = cart {
                let mut point = vec![ctx.zero(); 2 * n + 1];
                point[0] = p[0].clone();
                let s = data.tangency_sign(ctx, &point, orientation, eps)?;
                sign = Some(s);
                let mut rec = TangencyRecord::new(vec![zf, rf, of]);
                rec.sign = Some(s);
                rec.index = Some(index);
                rec.kind = Some(kind_enum(kind));
                records.push(rec);
            }
        }

        let c = ns
            .leaf_parameter(ctx, p)?
            .map(|v| ctx.to_f64(&v));
        rows.push(PointRow {
            z: zf,
            r: rf,
            rho: of,
            kind: kind_label(kind).to_string(),
            index,
            sign: sign.map(|s| {
                match s {
                    TangencySign::Plus => "S+".to_string(),
                    TangencySign::Minus => "S-".to_string(),
                }
            }),
            c,
            eig_re,
            eig_im,
        });
    }
    let c_sep = ctx.to_f64(&SpecialOrbits::new(eps.clone()).c_sep(ctx));
    Ok(Analysis {
        rows,
        records,
        zeros,
        c_sep,
    })
}
