//! Structural laws of the exterior calculus: nilpotence of d, Leibniz
//! rules, the Cartan formula (checked definitionally and against a
//! finite-difference pullback along the flow), and the construction's
//! displayed 2-form.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use charfol::coords::CoordSystem;
use charfol::eps::EpsCoeff;
use charfol::field::VecField;
use charfol::form::Form;
use charfol::poly::{Monomial, Poly};
use charfol::scalar::{int, rat};
use charfol::unipoly::{self, UniPoly};

fn random_poly(rng: &mut ChaCha8Rng, cs: &Arc<CoordSystem>) -> Poly {
    let mut p = Poly::zero(cs);
    let terms = rng.gen_range(1..4);
    for _ in 0..terms {
        let exps: Vec<u16> = (0..cs.len()).map(|_| rng.gen_range(0..3)).collect();
        let num = rng.gen_range(-6i64..7);
        let k = rng.gen_range(-2i32..3);
        p.add_term(Monomial(exps), EpsCoeff::monomial(int(num), k));
    }
    p
}

fn random_form(rng: &mut ChaCha8Rng, cs: &Arc<CoordSystem>, degree: usize) -> Form {
    let mut f = Form::zero(cs, degree);
    for _ in 0..rng.gen_range(1..4) {
        let mut idx: Vec<u8> = (0..cs.len() as u8).collect();
        for i in (1..idx.len()).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        let mut idx: Vec<u8> = idx.into_iter().take(degree).collect();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != degree {
            continue;
        }
        f.add_term(idx, random_poly(rng, cs));
    }
    f
}

fn random_field(rng: &mut ChaCha8Rng, cs: &Arc<CoordSystem>) -> VecField {
    let comps = (0..cs.len()).map(|_| random_poly(rng, cs)).collect();
    VecField::new(cs, comps).unwrap()
}

#[test]
fn d_squared_vanishes_on_random_forms() {
    // 1000 random sparse forms of each degree, n in {2, 3}
    for n in [2usize, 3] {
        let cs = CoordSystem::jet(n);
        let mut rng = ChaCha8Rng::seed_from_u64(42 + n as u64);
        let per_degree = 1000 / (cs.len() + 1) + 1;
        for degree in 0..=cs.len() {
            for _ in 0..per_degree {
                let f = random_form(&mut rng, &cs, degree);
                assert!(f.ext_d().unwrap().ext_d().unwrap().is_zero());
            }
        }
    }
}

#[test]
fn leibniz_rule_for_d() {
    let cs = CoordSystem::jet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let da = rng.gen_range(0..3usize);
        let db = rng.gen_range(0..3usize);
        let a = random_form(&mut rng, &cs, da);
        let b = random_form(&mut rng, &cs, db);
        let lhs = a.wedge(&b).unwrap().ext_d().unwrap();
        let mut rhs = a.ext_d().unwrap().wedge(&b).unwrap();
        let sign = if da % 2 == 1 { -1 } else { 1 };
        let term2 = a.wedge(&b.ext_d().unwrap()).unwrap().mul_int(sign);
        rhs = rhs.add(&term2).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn graded_leibniz_for_interior_product() {
    let cs = CoordSystem::jet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let da = rng.gen_range(1..3usize);
        let db = rng.gen_range(1..3usize);
        let a = random_form(&mut rng, &cs, da);
        let b = random_form(&mut rng, &cs, db);
        let x = random_field(&mut rng, &cs);
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let sign = if da % 2 == 1 { -1 } else { 1 };
        let rhs = a
            .interior(&x)
            .unwrap()
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&b.interior(&x).unwrap()).unwrap().mul_int(sign))
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn interior_product_squares_to_zero() {
    let cs = CoordSystem::jet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let deg = rng.gen_range(2..4usize);
        let a = random_form(&mut rng, &cs, deg);
        let x = random_field(&mut rng, &cs);
        let once = a.interior(&x).unwrap();
        assert!(once.interior(&x).unwrap().is_zero());
    }
}

#[test]
fn cartan_formula_is_definitional_and_matches_flow_pullback() {
    let cs = CoordSystem::jet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // Definitional identity on symbolic data.
    for _ in 0..25 {
        let deg = rng.gen_range(1..3usize);
        let a = random_form(&mut rng, &cs, deg);
        let x = random_field(&mut rng, &cs);
        let lie = a.lie_derivative(&x).unwrap();
        let cartan = a
            .ext_d()
            .unwrap()
            .interior(&x)
            .unwrap()
            .add(&a.interior(&x).unwrap().ext_d().unwrap())
            .unwrap();
        assert_eq!(lie, cartan);
    }

    // Numeric cross-check: (phi_h^* a - phi_{-h}^* a) / 2h against L_X a
    // for a random 1-form at random points, step 1e-4, tolerance 1e-6.
    // Coefficients stay O(1) here so the quoted tolerances make sense.
    let tame_poly = |rng: &mut ChaCha8Rng, cs: &Arc<CoordSystem>| {
        let mut p = Poly::zero(cs);
        for _ in 0..rng.gen_range(1..4) {
            let exps: Vec<u16> = (0..cs.len()).map(|_| rng.gen_range(0..3)).collect();
            let num = rng.gen_range(-3i64..4);
            p.add_term(Monomial(exps), EpsCoeff::monomial(int(num), rng.gen_range(0..2)));
        }
        p
    };
    let eps = rat(1, 10);
    let h = 1e-4;
    for trial in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + trial);
        let mut a = Form::zero(&cs, 1);
        for i in 0..cs.len() {
            a.add_term(vec![i as u8], tame_poly(&mut rng, &cs));
        }
        let x = VecField::new(
            &cs,
            (0..cs.len()).map(|_| tame_poly(&mut rng, &cs)).collect(),
        )
        .unwrap();
        let lie = a.lie_derivative(&x).unwrap();

        let a_num: Vec<Poly> = (0..cs.len())
            .map(|i| a.coeff(&[i as u8]).specialize_eps(&eps).unwrap())
            .collect();
        let x_num: Vec<Poly> = (0..cs.len())
            .map(|i| x.component(i).specialize_eps(&eps).unwrap())
            .collect();
        let lie_num: Vec<Poly> = (0..cs.len())
            .map(|i| lie.coeff(&[i as u8]).specialize_eps(&eps).unwrap())
            .collect();

        let flow = |p: &[f64], t: f64| -> Vec<f64> {
            // one RK4 step of size t along X
            let eval = |q: &[f64]| -> Vec<f64> { x_num.iter().map(|c| c.eval_f64(q)).collect() };
            let k1 = eval(p);
            let q2: Vec<f64> = p.iter().zip(&k1).map(|(a, b)| a + 0.5 * t * b).collect();
            let k2 = eval(&q2);
            let q3: Vec<f64> = p.iter().zip(&k2).map(|(a, b)| a + 0.5 * t * b).collect();
            let k3 = eval(&q3);
            let q4: Vec<f64> = p.iter().zip(&k3).map(|(a, b)| a + t * b).collect();
            let k4 = eval(&q4);
            (0..p.len())
                .map(|i| p[i] + t / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        };

        for _ in 0..4 {
            let p: Vec<f64> = (0..cs.len()).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let v: Vec<f64> = (0..cs.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // pullback value (phi_t^* a)(p; v) = a(phi_t(p); dphi_t(p) v)
            let pullback = |t: f64| -> f64 {
                let fp = flow(&p, t);
                let dv = 1e-5;
                let p_plus: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a + dv * b).collect();
                let p_minus: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a - dv * b).collect();
                let fps = flow(&p_plus, t);
                let fms = flow(&p_minus, t);
                let jac_v: Vec<f64> = fps
                    .iter()
                    .zip(&fms)
                    .map(|(a, b)| (a - b) / (2.0 * dv))
                    .collect();
                a_num
                    .iter()
                    .zip(&jac_v)
                    .map(|(c, w)| c.eval_f64(&fp) * w)
                    .sum()
            };
            let numeric = (pullback(h) - pullback(-h)) / (2.0 * h);
            let exact: f64 = lie_num
                .iter()
                .zip(&v)
                .map(|(c, w)| c.eval_f64(&p) * w)
                .sum();
            let scale = 1.0 + exact.abs();
            assert!(
                (numeric - exact).abs() / scale < 1e-6,
                "flow pullback {} vs Lie derivative {}",
                numeric,
                exact
            );
        }
    }
}

#[test]
fn wedge_is_associative_and_graded_commutative() {
    let cs = CoordSystem::jet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..40 {
        let da = rng.gen_range(0..3usize);
        let db = rng.gen_range(0..3usize);
        let dc = rng.gen_range(0..2usize);
        let a = random_form(&mut rng, &cs, da);
        let b = random_form(&mut rng, &cs, db);
        let c = random_form(&mut rng, &cs, dc);
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        // a ^ b = (-1)^(|a||b|) b ^ a
        let sign = if (da * db) % 2 == 1 { -1 } else { 1 };
        assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().mul_int(sign));
    }
}

#[test]
fn values_are_shareable_across_threads() {
    // immutable after construction; independent identities evaluate in
    // parallel with no coordination
    fn is_send_sync<T: Send + Sync>() {}
    is_send_sync::<Poly>();
    is_send_sync::<Form>();
    is_send_sync::<VecField>();
    is_send_sync::<charfol::rule::NormalFormRule>();

    let obj = std::sync::Arc::new(charfol::construction::ModelData::build(2).unwrap());
    let handles: Vec<_> = (0..3)
        .map(|k| {
            let obj = obj.clone();
            std::thread::spawn(move || match k {
                0 => obj.tangency_residual().unwrap().is_zero(),
                1 => obj.beta_x_residual().unwrap().is_zero(),
                _ => obj.iota_dbeta_residual().unwrap().is_zero(),
            })
        })
        .collect();
    for h in handles {
        assert!(h.join().unwrap());
    }
}

#[test]
fn normal_form_is_a_ring_homomorphism_mod_the_ideal() {
    // reduce(p q) = reduce(reduce(p) reduce(q)) and reduce(p + q) =
    // reduce(p) + reduce(q) reduced, on random inputs against the
    // quarter-sphere ideal.
    let obj = charfol::construction::ModelData::build(2).unwrap();
    let rule = &obj.rule;
    let cs = &obj.coords;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let p = random_poly(&mut rng, cs);
        let q = random_poly(&mut rng, cs);
        let rp = rule.reduce(&p).unwrap();
        let rq = rule.reduce(&q).unwrap();
        assert_eq!(rule.reduce(&rp).unwrap(), rp, "idempotence");
        let prod = rule.reduce(&p.mul(&q).unwrap()).unwrap();
        assert_eq!(prod, rule.reduce(&rp.mul(&rq).unwrap()).unwrap());
        let sum = rule.reduce(&p.add(&q).unwrap()).unwrap();
        assert_eq!(sum, rp.add(&rq).unwrap());
        // p - reduce(p) lies in the ideal: multiplying by anything keeps it there
        let diff = p.sub(&rp).unwrap();
        assert!(rule
            .reduce(&diff.mul(&q).unwrap())
            .unwrap()
            .is_zero());
    }
}

/// The displayed 2-form of the construction:
/// `dbeta = 4r dr^dz + 2r(2r^2-1) dr^dth + 2 sum dx_i^dy_i`.
#[test]
fn dbeta_matches_display() {
    for n in [2usize, 3] {
        let obj = charfol::construction::ModelData::build(n).unwrap();
        let cs = &obj.coords;
        let r = Poly::var(cs, 1);
        let dbeta = obj.beta.ext_d().unwrap();
        let mut expected = Form::zero(cs, 2);
        // stored on increasing tuples: dr^dz = -(dz^dr) on (0,1)
        expected.add_term(vec![0, 1], r.mul_int(-4));
        // dr^dth is already increasing on (1,2): + 2r(2r^2-1)
        expected.add_term(
            vec![1, 2],
            r.pow(3).mul_int(4).sub(&r.mul_int(2)).unwrap(),
        );
        for i in 0..n - 1 {
            expected.add_term(vec![3 + 2 * i as u8, 4 + 2 * i as u8], Poly::int(cs, 2));
        }
        assert_eq!(dbeta, expected);
        // d(dbeta) = 0
        assert!(dbeta.ext_d().unwrap().is_zero());
    }
}

/// `beta ^ (dbeta)^n` is a volume form whose coefficient is
/// `n! 2^(n-1) * 2r (2r^4 - 2r^2 + 1)`, strictly positive on r > 0
/// (Sturm check of the univariate factor).
#[test]
fn contact_volume_is_positive() {
    for n in [2usize, 3] {
        let obj = charfol::construction::ModelData::build(n).unwrap();
        let v = charfol::contact::contact_volume_coefficient(&obj.beta, n).unwrap();
        let cs = &obj.coords;
        let r = Poly::var(cs, 1);
        let q = r
            .pow(4)
            .mul_int(2)
            .sub(&r.pow(2).mul_int(2))
            .unwrap()
            .add(&Poly::one(cs))
            .unwrap();
        let factorial: i64 = (1..=n as i64).product();
        let constant = factorial * (1 << (n - 1)) * 2;
        assert_eq!(v, r.mul(&q).unwrap().mul_int(constant));
        // Positivity of the r-factor beyond the radial zero: v / r > 0.
        let univ = v.div_exact(&r).unwrap().specialize_eps(&rat(1, 10)).unwrap();
        let up = UniPoly::from_poly(&univ, 1).unwrap();
        assert!(unipoly::sturm_positive(&up, &int(0), &int(2)).unwrap());
    }
}
