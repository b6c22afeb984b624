//! Acceptance suite: every criterion of the build contract, one test per
//! criterion, each printing a single pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`). Tolerances are pinned
//! here, in code.

use std::process::Command;
use std::time::Instant;

use charfol::construction::{ModelData, ReducedSystem, SpecialOrbits, MUTATIONS};
use charfol::contact::ContactData;
use charfol::dynamics::{self, Kind, NumericSystem};
use charfol::field::VecField;
use charfol::form::Form;
use charfol::ledger;
use charfol::poly::Poly;
use charfol::real::{Ctx, Real};
use charfol::scalar::{rat, Scalar};

struct Criterion {
    number: u32,
    label: &'static str,
    passed: std::cell::Cell<bool>,
}

impl Criterion {
    fn new(number: u32, label: &'static str) -> Self {
        Criterion {
            number,
            label,
            passed: std::cell::Cell::new(true),
        }
    }

    fn check(&self, ok: bool, what: &str) {
        if !ok {
            self.passed.set(false);
            println!("criterion {}: FAIL - {}", self.number, what);
        }
        assert!(ok, "criterion {}: {}", self.number, what);
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        if self.passed.get() && !std::thread::panicking() {
            println!("criterion {}: PASS - {}", self.number, self.label);
        } else if !self.passed.get() {
            println!("criterion {}: FAIL - {}", self.number, self.label);
        }
    }
}

fn ctx50() -> Ctx {
    Ctx::new(50)
}

fn model_system(eps: &Scalar) -> NumericSystem {
    let obj = ModelData::build(2).unwrap();
    let sys = ReducedSystem::from_model(&obj).unwrap();
    NumericSystem::new(&sys, eps).unwrap()
}

/// 1. The four displayed identities are identically zero polynomials for
///    n in {2, 3} with symbolic e; total runtime below 10 s.
#[test]
fn criterion_1_exact_identities() {
    let c = Criterion::new(1, "exact identities, n in {2,3}, symbolic e");
    let start = Instant::now();
    for n in [2usize, 3] {
        let obj = ModelData::build(n).unwrap();
        c.check(
            obj.tangency_residual().unwrap().is_zero(),
            "dF(X) = 2 e^-2 (2r^2-1) z F",
        );
        c.check(
            obj.beta_x_residual().unwrap().is_zero(),
            "beta(X) = (2r^4-2r^2+1) F",
        );
        c.check(
            obj.iota_dbeta_residual().unwrap().is_zero(),
            "i_X dbeta = 2 e^-2 (2r^2-1) z beta - (2r^4-2r^2+1) dF",
        );
        c.check(
            obj.lie_residual_reduced().unwrap().is_zero(),
            "L_X beta = 2 e^-2 (2r^2-1) z beta mod F",
        );
    }
    c.check(start.elapsed().as_secs_f64() < 10.0, "runtime < 10 s");
}

/// 2. Boundary transversality: exact reproduction of the substituted
///    expression, and a Sturm positivity certificate on the admissible
///    interval for eps in {1/10, 1/100}; runtime below 2 s.
#[test]
fn criterion_2_boundary_transversality() {
    let c = Criterion::new(2, "boundary transversality: exact identity + Sturm positivity");
    let start = Instant::now();
    let obj = ModelData::build(2).unwrap();
    let (residual, _) = obj.boundary_exact_residual().unwrap();
    c.check(residual.is_zero(), "exact identity in r and e");
    for eps in [rat(1, 10), rat(1, 100)] {
        let cert = obj.boundary_positivity(&eps).unwrap();
        c.check(cert.positive, "Sturm positivity on the admissible interval");
    }
    c.check(start.elapsed().as_secs_f64() < 2.0, "runtime < 2 s");
}

/// 3. The five zeros of the reduced field at eps = 1/10 match the closed
///    forms (evaluated at 50 digits) to 1e-10; runtime below 30 s.
#[test]
fn criterion_3_singularities() {
    let c = Criterion::new(3, "five singular points match the closed forms to 1e-10");
    let start = Instant::now();
    let ctx = ctx50();
    let eps = rat(1, 10);
    let ns = model_system(&eps);
    let zeros = dynamics::find_zeros(&ns, &ctx).unwrap();
    c.check(zeros.len() == 5, "exactly five zeros");
    let orbits = SpecialOrbits::new(eps);
    let zp = ctx.to_f64(&orbits.z_pole(&ctx)); // 0.10488088481701515
    let zq = ctx.to_f64(&orbits.z_p(&ctx)); // 0.03162277660168379 = e sqrt(e)
    let r0 = ctx.to_f64(&orbits.r0(&ctx)); // 0.87654864152793028
    let n0 = ctx.to_f64(&orbits.n0(&ctx)); // 0.05759014490653240
    let expected = [
        [-zp, 0.0, 0.0],
        [-zq, 1.0, 0.0],
        [0.0, r0, n0],
        [zq, 1.0, 0.0],
        [zp, 0.0, 0.0],
    ];
    for (got, want) in zeros.iter().zip(&expected) {
        for i in 0..3 {
            let g = ctx.to_f64(&got[i]);
            c.check((g - want[i]).abs() < 1e-10, "zero coordinate to 1e-10");
        }
    }
    c.check(start.elapsed().as_secs_f64() < 30.0, "runtime < 30 s");
}

/// 4. Classification: source/sink for the tangency pair, saddle at
///    (0, r0, n0); the saddle has index -1 and the other four +1 (covering
///    convention); Jacobian eigenvalues and winding numbers agree on all
///    five.
#[test]
fn criterion_4_classification() {
    let c = Criterion::new(4, "classification and indices agree (Jacobian vs winding)");
    let ctx = ctx50();
    let eps = rat(1, 10);
    let ns = model_system(&eps);
    let zeros = dynamics::find_zeros(&ns, &ctx).unwrap();
    let radius = 0.1 / 20.0;
    let mut kinds = Vec::new();
    for p in &zeros {
        let cls = dynamics::classify(&ns, &ctx, p).unwrap();
        let idx = dynamics::poincare_index(&ns, &ctx, p, radius).unwrap();
        let expected_idx = if cls.kind == Kind::Saddle { -1 } else { 1 };
        c.check(idx == expected_idx, "winding agrees with eigenvalue type");
        kinds.push(cls.kind);
    }
    c.check(kinds[0] == Kind::Source, "z = -e sqrt(1+e): source");
    c.check(kinds[2] == Kind::Saddle, "(0, r0, n0): saddle");
    c.check(kinds[4] == Kind::Sink, "z = +e sqrt(1+e): sink");
}

/// 5. The Thurston-Bennequin verdict: sum over S_- of the indices is
///    1 > 0, so the inequality is violated; the relative Euler number is 0
///    and -<e> = 0 > -chi = -2 with chi = 2. Exact integers.
#[test]
fn criterion_5_tb_verdict() {
    let c = Criterion::new(5, "TB verdict: violated, sum_minus = 1, euler_rel = 0, chi = 2");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_charfol"))
        .args(["tb", "--eps", "1/10", "--json", "tb.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), "tb command succeeds");
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("tb.json")).unwrap()).unwrap();
    c.check(doc["sum_minus"] == 1, "sum over S_- of Ind = 1");
    c.check(doc["sum_plus"] == 1, "sum over S_+ of Ind = 1");
    c.check(doc["euler_rel"] == 0, "relative Euler number 0");
    c.check(doc["chi"] == 2, "chi(D^2 x S^(2n-2)) = 2");
    c.check(doc["verdict"] == "violated", "inequality violated");
}

/// 6. Generic-engine cross-validation: the computed characteristic field is
///    proportional to the presented field modulo (F) (all 2x2 minors reduce
///    to zero exactly), the scalar ratio is positive at 20 random points of
///    the hypersurface (components agree to 1e-9), and the hand-derived
///    radial oracle matches exactly.
#[test]
fn criterion_6_engine_cross_validation() {
    let c = Criterion::new(6, "engine cross-validation: minors, positive ratio, radial oracle");
    // radial oracle
    let cs = charfol::coords::CoordSystem::new(&["z", "x1", "y1"]).unwrap();
    let beta = Form::coord_diff(&cs, 0)
        .add(&Form::coord_diff(&cs, 2).mul_poly(&Poly::var(&cs, 1)).unwrap())
        .unwrap()
        .add(
            &Form::coord_diff(&cs, 1)
                .mul_poly(&Poly::var(&cs, 2).neg())
                .unwrap(),
        )
        .unwrap();
    let data = ContactData::new(1, beta, Poly::var(&cs, 0)).unwrap();
    let x = data.characteristic_field().unwrap();
    let mut oracle = VecField::zero(&cs);
    for i in [1usize, 2] {
        oracle
            .set_component(
                i,
                Poly::scalar(&cs, rat(1, 2)).mul(&Poly::var(&cs, i)).unwrap(),
            )
            .unwrap();
    }
    c.check(x == oracle, "radial field oracle matches exactly");

    // minors and ratio for the construction's data
    for n in [2usize, 3] {
        let obj = ModelData::build(n).unwrap();
        let data = ContactData::new(n, obj.beta.clone(), obj.f.clone()).unwrap();
        let xstar = data.characteristic_field().unwrap();
        for i in 0..obj.coords.len() {
            for j in i + 1..obj.coords.len() {
                let m = xstar
                    .component(i)
                    .mul(obj.x.component(j))
                    .unwrap()
                    .sub(&xstar.component(j).mul(obj.x.component(i)).unwrap())
                    .unwrap();
                c.check(
                    obj.rule.reduce(&m).unwrap().is_zero(),
                    "2x2 minor reduces to the zero polynomial",
                );
            }
        }
    }

    let obj = ModelData::build(2).unwrap();
    let data = ContactData::new(2, obj.beta.clone(), obj.f.clone()).unwrap();
    let xstar = data.characteristic_field().unwrap();
    let ctx = ctx50();
    let eps = rat(1, 10);
    let xs: Vec<Poly> = xstar
        .components()
        .iter()
        .map(|p| p.specialize_eps(&eps).unwrap())
        .collect();
    let xp: Vec<Poly> = obj
        .x
        .components()
        .iter()
        .map(|p| p.specialize_eps(&eps).unwrap())
        .collect();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
    let e = 0.1f64;
    let mut count = 0;
    while count < 20 {
        let zb = e * (1.0 + e).sqrt();
        let z = rng.gen_range(-0.9 * zb..0.9 * zb);
        let amp = (e * e * (1.0 + e) - z * z).sqrt();
        let x1 = rng.gen_range(-0.5 * amp..0.5 * amp);
        let y1 = rng.gen_range(-0.5 * amp..0.5 * amp);
        let r2 = 1.0 + e - (z * z + x1 * x1 + y1 * y1) / (e * e);
        if r2 <= 1e-4 {
            continue;
        }
        let point: Vec<Real> = [z, r2.sqrt(), 0.3, x1, y1]
            .iter()
            .map(|&v| ctx.from_f64(v))
            .collect();
        let mut ratio: Option<Real> = None;
        for (a, b) in xs.iter().zip(&xp) {
            let av = a.eval_real(&ctx, &point).unwrap();
            let bv = b.eval_real(&ctx, &point).unwrap();
            if ctx.to_f64(&ctx.abs(&bv)) < 1e-12 {
                continue;
            }
            let q = ctx.div(&av, &bv);
            c.check(ctx.signum(&q) > 0, "ratio positive");
            if let Some(prev) = &ratio {
                let rel = ctx.div(&ctx.abs(&ctx.sub(prev, &q)), &ctx.abs(prev));
                c.check(ctx.to_f64(&rel) < 1e-9, "component ratios agree to 1e-9");
            }
            ratio = Some(q);
        }
        count += 1;
    }
}

/// 7. Conservation along 10^4-step RK4 trajectories at eps = 1/10:
///    constraint drift below 1e-10 and relative leaf-parameter drift below
///    1e-8.
#[test]
fn criterion_7_conservation() {
    let c = Criterion::new(7, "RK4 conservation: constraint < 1e-10, C drift < 1e-8 relative");
    let ctx = ctx50();
    let eps = rat(1, 10);
    let ns = model_system(&eps);
    let start = ledger::sphere_point(&ns, &ctx, 0.95).unwrap();
    let h = ctx.from_f64(1e-3);
    let traj = dynamics::integrate(&ns, &ctx, &start, 10_000, &h).unwrap();
    c.check(!traj.clipped, "trajectory stays in the chart");
    c.check(
        ctx.to_f64(&traj.max_constraint) < 1e-10,
        "constraint drift < 1e-10",
    );
    let c0 = traj.c_start.as_ref().unwrap();
    let drift = traj.max_c_drift.as_ref().unwrap();
    let rel = ctx.to_f64(&ctx.div(drift, &ctx.abs(c0)));
    c.check(rel < 1e-8, "relative C drift < 1e-8");
}

/// 8. The emitted SVG contains exactly five singular markers and a
///    highlighted separatrix whose sampled points satisfy the leaf equation
///    at C = 1 + 2e + 2 sqrt(e(1+e)) to 1e-6.
#[test]
fn criterion_8_portrait() {
    let c = Criterion::new(8, "portrait: five markers, separatrix on its leaf to 1e-6");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_charfol"))
        .args([
            "portrait",
            "--eps",
            "1/10",
            "--out",
            "p.svg",
            "--json",
            "p.json",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), "portrait command succeeds");
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    c.check(
        svg.matches("class=\"singular\"").count() == 5,
        "exactly five singular markers",
    );
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("p.json")).unwrap()).unwrap();
    let c_sep = doc["c_sep"].as_f64().unwrap();
    c.check((c_sep - 1.86332495807108).abs() < 1e-10, "C_sep value");

    // parse the separatrix path out of the SVG and invert the transform
    let tr = &doc["transform"];
    let (margin, plot_w, plot_h, rmax, zmax) = (
        tr["margin"].as_f64().unwrap(),
        tr["plot_w"].as_f64().unwrap(),
        tr["plot_h"].as_f64().unwrap(),
        tr["rmax"].as_f64().unwrap(),
        tr["zmax"].as_f64().unwrap(),
    );
    let sep_line = svg
        .lines()
        .find(|l| l.contains("class=\"separatrix\""))
        .expect("separatrix path present");
    let d_start = sep_line.find("d=\"").unwrap() + 3;
    let d_end = sep_line[d_start..].find('"').unwrap() + d_start;
    let e = 0.1f64;
    let mut samples = 0usize;
    let mut worst: f64 = 0.0;
    for tok in sep_line[d_start..d_end].split_whitespace() {
        let tok = tok.trim_start_matches(['M', 'L']);
        let (xs, ys) = tok.split_once(',').expect("x,y pair");
        let x: f64 = xs.parse().unwrap();
        let y: f64 = ys.parse().unwrap();
        let r = (x - margin) / plot_w * 2.0 * rmax - rmax;
        let z = zmax - (y - margin) / plot_h * 2.0 * zmax;
        let residual = (z * z / (e * e) - (c_sep * r * r - 1.0) * (r * r - 1.0) - e).abs();
        worst = worst.max(residual);
        samples += 1;
    }
    c.check(samples > 100, "separatrix is densely sampled");
    c.check(worst < 1e-6, "leaf equation residual below 1e-6");
}

/// 9. Mutation sensitivity: each of the ten single-token mutations of the
///    presented field makes at least one ledger entry fail.
#[test]
fn criterion_9_mutation_sensitivity() {
    let c = Criterion::new(9, "all ten mutations are caught by the ledger");
    let ctx = ctx50();
    let eps = rat(1, 10);
    for token in MUTATIONS {
        let mut obj = ModelData::build(2).unwrap();
        obj.apply_mutation(token).unwrap();
        let entries = ledger::run_ledger(&obj, &eps, &ctx).unwrap();
        c.check(
            entries.iter().any(|e| !e.passed()),
            "mutation causes a ledger failure",
        );
    }
}
