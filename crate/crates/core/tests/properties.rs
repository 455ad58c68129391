//! Randomized algebraic laws of the scalar, form and derivation layers.

use std::sync::Arc;

use gconn_core::connections::curvature;
use gconn_core::{
    parse_expr, Derivation, Form, GradedMetric, LeviCivitaLift, MetricG, Parity, ScalarExpr, VectorField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 3;
const TOL: f64 = 1e-10;

fn names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

fn rand_expr(rng: &mut ChaCha8Rng, depth: u32, dim: usize) -> ScalarExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            ScalarExpr::coord(rng.gen_range(0..dim))
        } else {
            ScalarExpr::constant(rng.gen_range(-4..=4) as f64 / 2.0)
        };
    }
    let sub = |rng: &mut ChaCha8Rng| rand_expr(rng, depth - 1, dim);
    match rng.gen_range(0..7) {
        0 => ScalarExpr::sum([sub(rng), sub(rng)]),
        1 => ScalarExpr::product([sub(rng), sub(rng)]),
        2 => sub(rng).sin(),
        3 => sub(rng).cos(),
        4 => sub(rng).sin().exp(),
        5 => sub(rng).powi(rng.gen_range(2..=3)),
        // 1 / (1 + e²) stays finite.
        _ => ScalarExpr::sum([ScalarExpr::one(), sub(rng).powi(2)]).recip(),
    }
}

fn rand_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A form whose components all have degrees of the given parity.
fn rand_form(rng: &mut ChaCha8Rng, dim: usize, parity: Option<Parity>) -> Form {
    let mut terms: Vec<(u32, ScalarExpr)> = Vec::new();
    for b in 0u32..(1 << dim) {
        if parity.map_or(true, |p| Parity::of_degree(b.count_ones() as usize) == p) && rng.gen_bool(0.5) {
            terms.push((b, rand_expr(rng, 2, dim)));
        }
    }
    Form::from_terms(dim, terms)
}

fn rand_derivation(rng: &mut ChaCha8Rng, dim: usize, parity: Parity) -> Derivation {
    let lie = (0..dim).map(|_| rand_form(rng, dim, Some(parity))).collect();
    let ins = (0..dim).map(|_| rand_form(rng, dim, Some(parity.flip()))).collect();
    Derivation::from_parts(lie, ins)
}

fn rand_vector(rng: &mut ChaCha8Rng, dim: usize) -> VectorField {
    VectorField::new((0..dim).map(|_| rand_expr(rng, 2, dim)).collect())
}

fn rand_parity(rng: &mut ChaCha8Rng) -> Parity {
    if rng.gen_bool(0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn form_gap(a: &Form, b: &Form, p: &[f64]) -> f64 {
    a.eval(p).unwrap().sub(&b.eval(p).unwrap()).max_abs()
}

fn der_gap(a: &Derivation, b: &Derivation, p: &[f64]) -> f64 {
    a.eval(p).unwrap().sub(&b.eval(p).unwrap()).max_abs()
}

fn scale(a: &Form, p: &[f64]) -> f64 {
    1.0 + a.eval(p).unwrap().max_abs()
}

/// A positive definite, non-diagonal metric on the plane.
fn plane_metric() -> Arc<GradedMetric> {
    let c = names(2);
    let e = |s: &str| parse_expr(s, &c).unwrap();
    let g = vec![
        vec![e("2 + sin(x2)"), e("x1 * x2 / 4")],
        vec![e("x1 * x2 / 4"), e("1 + x1^2")],
    ];
    Arc::new(GradedMetric::new(Arc::new(MetricG::new(g).unwrap())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivative_matches_central_difference(seed in any::<u64>(), j in 0..DIM) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = rand_expr(&mut rng, 4, DIM);
        let p = rand_point(&mut rng, DIM);
        let h = 1e-5;
        let (mut lo, mut hi) = (p.clone(), p.clone());
        lo[j] -= h;
        hi[j] += h;
        let fd = (e.eval(&hi).unwrap() - e.eval(&lo).unwrap()) / (2.0 * h);
        let sym = e.diff(j).eval(&p).unwrap();
        prop_assert!((sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()), "{e}: {sym} vs {fd}");
    }

    #[test]
    fn printed_form_is_a_parse_fixed_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = names(DIM);
        let e = rand_expr(&mut rng, 4, DIM);
        let printed = e.display_with(&c).to_string();
        let once = parse_expr(&printed, &c).unwrap();
        let reprinted = once.display_with(&c).to_string();
        let twice = parse_expr(&reprinted, &c).unwrap();
        prop_assert_eq!(&reprinted, &twice.display_with(&c).to_string());
        let p = rand_point(&mut rng, DIM);
        let (a, b) = (e.eval(&p).unwrap(), once.eval(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{printed}: {a} vs {b}");
    }

    #[test]
    fn trig_folding_preserves_value(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rand_expr(&mut rng, 2, DIM);
        let a = rand_expr(&mut rng, 2, DIM);
        let other = rand_expr(&mut rng, 2, DIM);
        let c = rng.gen_range(-3..=3) as f64;
        let terms = vec![
            ScalarExpr::product([m.clone(), a.sin().powi(2)]).scale(c),
            other.clone(),
            ScalarExpr::product([m.clone(), a.cos().powi(2)]).scale(c),
            m.scale(-c),
            ScalarExpr::product([m.clone(), a.sin().powi(3)]),
        ];
        let p = rand_point(&mut rng, DIM);
        let direct: f64 = terms.iter().map(|t| t.eval(&p).unwrap()).sum();
        let folded = ScalarExpr::sum(terms).eval(&p).unwrap();
        prop_assert!((direct - folded).abs() <= 1e-10 * (1.0 + direct.abs()), "{direct} vs {folded}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_form(&mut rng, DIM, None);
        let dd = f.d().d();
        let p = rand_point(&mut rng, DIM);
        prop_assert!(dd.eval(&p).unwrap().max_abs() <= 1e-12 * scale(&f.d(), &p));
    }

    #[test]
    fn d_is_a_graded_derivation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pa = rand_parity(&mut rng);
        let a = rand_form(&mut rng, DIM, Some(pa));
        let b = rand_form(&mut rng, DIM, None);
        let lhs = a.wedge(&b).d();
        let rhs = a.d().wedge(&b).add(&a.wedge(&b.d()).scale_const(pa.sign1()));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(form_gap(&lhs, &rhs, &p) <= TOL * scale(&lhs, &p));
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pa, pb) = (rand_parity(&mut rng), rand_parity(&mut rng));
        let a = rand_form(&mut rng, DIM, Some(pa));
        let b = rand_form(&mut rng, DIM, Some(pb));
        let p = rand_point(&mut rng, DIM);
        let gap = form_gap(&a.wedge(&b), &b.wedge(&a).scale_const(Parity::sign(pa, pb)), &p);
        prop_assert!(gap <= TOL * scale(&a.wedge(&b), &p));
    }

    #[test]
    fn cartan_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_form(&mut rng, DIM, None);
        let v = rand_vector(&mut rng, DIM);
        let cartan = f.interior(&v).d().add(&f.d().interior(&v));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(form_gap(&Derivation::lift_lie(&v).apply(&f), &cartan, &p) <= TOL * scale(&cartan, &p));
        prop_assert!(form_gap(&f.lie(&v), &cartan, &p) <= TOL * scale(&cartan, &p));
    }

    #[test]
    fn lie_and_interior_commute_to_interior_of_bracket(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_form(&mut rng, DIM, None);
        let v = rand_vector(&mut rng, DIM);
        let w = rand_vector(&mut rng, DIM);
        let lhs = f.interior(&w).lie(&v).sub(&f.lie(&v).interior(&w));
        let rhs = f.interior(&v.bracket(&w));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(form_gap(&lhs, &rhs, &p) <= TOL * scale(&lhs, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reconstruction_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let par = rand_parity(&mut rng);
        let w = rand_derivation(&mut rng, DIM, par);
        let r = Derivation::reconstruct(DIM, |a| w.apply(a));
        let p = rand_point(&mut rng, DIM);
        for _ in 0..20 {
            let f = rand_form(&mut rng, DIM, None);
            let (x, y) = (w.apply(&f), r.apply(&f));
            prop_assert!(form_gap(&x, &y, &p) <= TOL * scale(&x, &p));
        }
    }

    #[test]
    fn action_obeys_graded_leibniz(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pw, pa) = (rand_parity(&mut rng), rand_parity(&mut rng));
        let w = rand_derivation(&mut rng, DIM, pw);
        let a = rand_form(&mut rng, DIM, Some(pa));
        let b = rand_form(&mut rng, DIM, None);
        let lhs = w.apply(&a.wedge(&b));
        let rhs = w.apply(&a).wedge(&b).add(&a.wedge(&w.apply(&b)).scale_const(Parity::sign(pw, pa)));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(form_gap(&lhs, &rhs, &p) <= TOL * scale(&lhs, &p));
    }

    #[test]
    fn commutator_is_graded_antisymmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = (rand_parity(&mut rng), rand_parity(&mut rng));
        let x = rand_derivation(&mut rng, DIM, p1);
        let y = rand_derivation(&mut rng, DIM, p2);
        let lhs = x.commutator(&y);
        let rhs = y.commutator(&x).scale_const(-Parity::sign(p1, p2));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(der_gap(&lhs, &rhs, &p) <= TOL * (1.0 + lhs.eval(&p).unwrap().max_abs()));
    }

    #[test]
    fn commutator_acts_as_graded_commutator(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = (rand_parity(&mut rng), rand_parity(&mut rng));
        let x = rand_derivation(&mut rng, DIM, p1);
        let y = rand_derivation(&mut rng, DIM, p2);
        let f = rand_form(&mut rng, DIM, None);
        let lhs = x.commutator(&y).apply(&f);
        let rhs = x.apply(&y.apply(&f)).sub(&y.apply(&x.apply(&f)).scale_const(Parity::sign(p1, p2)));
        let p = rand_point(&mut rng, DIM);
        prop_assert!(form_gap(&lhs, &rhs, &p) <= TOL * scale(&rhs, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn graded_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 2;
        let (px, py, pz) = (rand_parity(&mut rng), rand_parity(&mut rng), rand_parity(&mut rng));
        let x = rand_derivation(&mut rng, dim, px);
        let y = rand_derivation(&mut rng, dim, py);
        let z = rand_derivation(&mut rng, dim, pz);
        let lhs = x.commutator(&y.commutator(&z));
        let rhs = x
            .commutator(&y)
            .commutator(&z)
            .add(&y.commutator(&x.commutator(&z)).scale_const(Parity::sign(px, py)));
        let p = rand_point(&mut rng, dim);
        prop_assert!(der_gap(&lhs, &rhs, &p) <= TOL * (1.0 + lhs.eval(&p).unwrap().max_abs()));
    }

    #[test]
    fn lifts_respect_the_bracket(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = rand_vector(&mut rng, DIM);
        let w = rand_vector(&mut rng, DIM);
        let b = v.bracket(&w);
        let (lv, lw) = (Derivation::lift_lie(&v), Derivation::lift_lie(&w));
        let (iv, iw) = (Derivation::lift_ins(&v), Derivation::lift_ins(&w));
        let p = rand_point(&mut rng, DIM);
        let s = 1.0 + Derivation::lift_lie(&b).eval(&p).unwrap().max_abs();
        prop_assert!(der_gap(&lv.commutator(&lw), &Derivation::lift_lie(&b), &p) <= TOL * s);
        prop_assert!(der_gap(&lv.commutator(&iw), &Derivation::lift_ins(&b), &p) <= TOL * s);
        prop_assert!(iv.commutator(&iw).eval(&p).unwrap().max_abs() <= TOL);
    }

    #[test]
    fn pairing_graded_symmetry_and_linearity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gm = plane_metric();
        let (p1, p2) = (rand_parity(&mut rng), rand_parity(&mut rng));
        let x = rand_derivation(&mut rng, 2, p1);
        let y = rand_derivation(&mut rng, 2, p2);
        let pa = rand_parity(&mut rng);
        let a = rand_form(&mut rng, 2, Some(pa));
        let p = rand_point(&mut rng, 2);
        let xy = gm.pair(&x, &y);
        let s = scale(&xy, &p);
        prop_assert!(form_gap(&xy, &gm.pair(&y, &x).scale_const(Parity::sign(p1, p2)), &p) <= TOL * s);
        let left = gm.pair(&x.left_mul(&a), &y);
        prop_assert!(form_gap(&left, &a.wedge(&xy), &p) <= TOL * scale(&left, &p));
        let right = gm.pair(&x, &y.left_mul(&a));
        let expect = a.wedge(&xy).scale_const(Parity::sign(p1, pa));
        prop_assert!(form_gap(&right, &expect, &p) <= TOL * scale(&right, &p));
    }

    #[test]
    fn curvature_is_tensorial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lc = LeviCivitaLift::new(plane_metric());
        let (j, k, l) = (rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2));
        let x = if rng.gen_bool(0.5) { Derivation::lie_gen(2, j) } else { Derivation::ins_gen(2, j) };
        let y = if rng.gen_bool(0.5) { Derivation::lie_gen(2, k) } else { Derivation::ins_gen(2, k) };
        let z = if rng.gen_bool(0.5) { Derivation::lie_gen(2, l) } else { Derivation::ins_gen(2, l) };
        let pa = rand_parity(&mut rng);
        let a = rand_form(&mut rng, 2, Some(pa));
        let pxy = x.parity().unwrap() + y.parity().unwrap();
        let p = rand_point(&mut rng, 2);
        let base = curvature(&lc, &x, &y, &z).unwrap();
        let first = curvature(&lc, &x.left_mul(&a), &y, &z).unwrap();
        let gap = der_gap(&first, &base.left_mul(&a), &p);
        prop_assert!(gap <= 1e-9 * (1.0 + first.eval(&p).unwrap().max_abs()), "first slot {gap}");
        let third = curvature(&lc, &x, &y, &z.left_mul(&a)).unwrap();
        let gap = der_gap(&third, &base.left_mul(&a).scale_const(Parity::sign(pxy, pa)), &p);
        prop_assert!(gap <= 1e-9 * (1.0 + third.eval(&p).unwrap().max_abs()), "third slot {gap}");
    }
}
