use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use kmn_core::deformation::{apply_deformation, predicted_kmn};
use kmn_core::expr::{parse, BinOp, Expr, FunctionRegistry};
use kmn_core::pointmodel::{basis_tensor, contact_identities, standard_model, synthetic_curvature, AlgebraicModel, SpaceFormCoefficients};
use kmn_core::registry;

const CHART: [&str; 2] = ["x", "y"];
const CONSTANTS: [&str; 1] = ["c"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|n| Expr::num(n as f64 / 8.0)),
        (0usize..2).prop_map(|i| Expr::Coord { index: i, name: CHART[i].into() }),
        Just(Expr::Const { index: 0, name: "c".into() }),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        let func = prop_oneof![Just("exp"), Just("sin"), Just("cos"), Just("log"), Just("sqrt")];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (func, inner).prop_map(|(name, arg)| Expr::Call {
                func: FunctionRegistry::default().get(name).unwrap().clone(),
                arg: Box::new(arg),
            }),
        ]
    })
}

fn same_value(a: &Expr, b: &Expr, p: &[f64], c: &[f64]) -> bool {
    match (a.eval(p, c), b.eval(p, c)) {
        (Ok(u), Ok(v)) => u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

fn orthogonal(d: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(d, d, &entries[..d * d]).qr().q()
}

fn model(n: usize, lambda: f64, entries: &[f64]) -> AlgebraicModel {
    let m = standard_model(n, lambda).unwrap();
    let d = m.dim();
    m.conjugated(&orthogonal(d, entries)).unwrap()
}

fn vector(d: usize, entries: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(&entries[..d])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn display_parse_round_trip(e in expr(), x in -2.0f64..2.0, y in -2.0f64..2.0, c in -2.0f64..2.0) {
        let text = e.to_string();
        let back = parse(&text, &CHART, &CONSTANTS).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        prop_assert!(same_value(&e, &back, &[x, y], &[c]), "{}", text);
    }

    #[test]
    fn basis_tensors_are_trilinear_and_antisymmetric(
        n in 1usize..=3,
        lambda in 0.0f64..2.0,
        q in prop::collection::vec(-1.0f64..1.0, 49),
        v in prop::collection::vec(-1.0f64..1.0, 28),
        s in -3.0f64..3.0,
    ) {
        let m = model(n, lambda, &q);
        let d = m.dim();
        let data = &m.data;
        let (x, x2, y, z) = (vector(d, &v), vector(d, &v[7..]), vector(d, &v[14..]), vector(d, &v[21..]));
        for i in 1..=8 {
            let r = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>| basis_tensor(i, data, a, b, c).unwrap();
            let lin = r(&(&x + &x2 * s), &y, &z) - r(&x, &y, &z) - r(&x2, &y, &z) * s;
            prop_assert!(lin.amax() < 1e-12, "R{i} not linear in X: {:e}", lin.amax());
            let lin_z = r(&x, &y, &(&z + &x2 * s)) - r(&x, &y, &z) - r(&x, &y, &x2) * s;
            prop_assert!(lin_z.amax() < 1e-12, "R{i} not linear in Z");
            let anti = r(&x, &y, &z) + r(&y, &x, &z);
            prop_assert!(anti.amax() < 1e-12, "R{i} not antisymmetric in X, Y");
            let skew = data.inner(&r(&x, &y, &z), &x2) + data.inner(&r(&x, &y, &x2), &z);
            prop_assert!(skew.abs() < 1e-12, "R{i} not skew in Z, W");
        }
    }

    #[test]
    fn conjugated_models_keep_their_identities(
        n in 1usize..=3,
        lambda in 0.0f64..2.0,
        q in prop::collection::vec(-1.0f64..1.0, 49),
        f in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let m = model(n, lambda, &q);
        for (name, r) in m.invariant_residuals() {
            prop_assert!(r < 1e-12, "{name}: {r:e}");
        }
        if n == 1 {
            for (name, r) in contact_identities(&m.data) {
                prop_assert!(r < 1e-12 * (1.0 + lambda * lambda), "{name}: {r:e}");
            }
        }
        let f = SpaceFormCoefficients(f.try_into().unwrap());
        let r = synthetic_curvature(&m, &f);
        prop_assert!(r.symmetry_residuals(&m.data.g).max() < 1e-11);
    }

    #[test]
    fn predicted_laws_compose(kappa in -3.0f64..1.0, mu in -3.0f64..3.0, nu in -2.0f64..2.0, a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let step = predicted_kmn(kappa, mu, nu, a);
        let two = predicted_kmn(step.kappa, step.mu, step.nu, b);
        let one = predicted_kmn(kappa, mu, nu, a * b);
        prop_assert!((two.kappa - one.kappa).abs() < 1e-12 * (1.0 + one.kappa.abs()));
        prop_assert!((two.mu - one.mu).abs() < 1e-12 * (1.0 + one.mu.abs()));
        prop_assert!((two.nu - one.nu).abs() < 1e-12 * (1.0 + one.nu.abs()));
    }

    #[test]
    fn deformations_compose(a in 0.1f64..10.0, b in 0.1f64..10.0, which in 0usize..3) {
        let spec = [registry::sasakian_chart(), registry::heisenberg_frame(), registry::non_sasakian(0.5).unwrap()][which].clone();
        let two = apply_deformation(&apply_deformation(&spec, a).unwrap(), b).unwrap();
        let one = apply_deformation(&spec, a * b).unwrap();
        for p in spec.domain().with_resolution(2).points() {
            let scale = 1.0 + one.metric_at(&p).unwrap().amax();
            prop_assert!((two.metric_at(&p).unwrap() - one.metric_at(&p).unwrap()).amax() < 1e-12 * scale);
            prop_assert!((two.phi_at(&p).unwrap() - one.phi_at(&p).unwrap()).amax() < 1e-12);
            prop_assert!((two.xi_at(&p).unwrap() - one.xi_at(&p).unwrap()).amax() < 1e-12);
            let (s2, s1) = (two.structure_at(&p).unwrap(), one.structure_at(&p).unwrap());
            for (u, v) in s2.iter().zip(&s1) {
                prop_assert!((u - v).abs() < 1e-12 * (1.0 + v.abs()));
            }
        }
    }
}

#[test]
fn dimension_three_identities_do_not_extend() {
    let ids = contact_identities(&standard_model(2, 0.0).unwrap().data);
    assert!(ids["r2_eq_3_r1_plus_r3"] > 1.0);
    let ids = contact_identities(&standard_model(2, 0.7).unwrap().data);
    assert!(ids["r5_eq_0"] > 0.1 && ids["r6_eq_minus_r4"] > 0.1);
    assert!(!ids.contains_key("r8_eq_minus_r7"));
}
