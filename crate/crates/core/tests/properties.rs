use num::Zero;
use proptest::prelude::*;

use twistverify::catalog::{operator_macros, Lattice};
use twistverify::expr::{parse, parse_with_macros};
use twistverify::lattice::{residual_exact, Equation, Family, GridSpec, LatticeParams};
use twistverify::opalg::{Context, Operator, Param, Poly};
use twistverify::qseries::{rat, Rational};
use twistverify::report::{Finding, Record, Report};

fn atom() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("x"),
        Just("t"),
        Just("dx"),
        Just("dt"),
        Just("Tx"),
        Just("Tx^-1"),
        Just("Dx"),
        Just("sigma"),
        Just("m"),
        Just("2"),
        Just("1/3"),
    ]
}

fn operator_expr() -> impl Strategy<Value = String> {
    let term = prop::collection::vec(atom(), 1..4).prop_map(|v| v.join("*"));
    prop::collection::vec(term, 1..4).prop_map(|v| v.join(" + "))
}

fn op(src: &str) -> Operator {
    let ctx = Context::new(Lattice::Space, Param::Formal, Param::Formal);
    ctx.eval(&parse_with_macros(src, &operator_macros()).unwrap()).unwrap()
}

fn test_polys() -> Vec<Poly> {
    (0..=3u32).flat_map(|a| (0..=2u32).map(move |b| Poly::monomial(a, b))).collect()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Canonical products act like composition of actions.
    #[test]
    fn product_matches_composition(a in operator_expr(), b in operator_expr()) {
        let (oa, ob) = (op(&a), op(&b));
        let prod = oa.mul(&ob);
        for f in test_polys() {
            prop_assert_eq!(prod.apply(&f), oa.apply(&ob.apply(&f)));
        }
    }

    #[test]
    fn operator_products_associate(a in operator_expr(), b in operator_expr(), c in operator_expr()) {
        let (oa, ob, oc) = (op(&a), op(&b), op(&c));
        prop_assert_eq!(oa.mul(&ob).mul(&oc), oa.mul(&ob.mul(&oc)));
    }

    #[test]
    fn commutators_satisfy_jacobi(a in operator_expr(), b in operator_expr(), c in operator_expr()) {
        let (oa, ob, oc) = (op(&a), op(&b), op(&c));
        let j = oa.commutator(&ob.commutator(&oc))
            .add(&ob.commutator(&oc.commutator(&oa)))
            .add(&oc.commutator(&oa.commutator(&ob)));
        prop_assert!(j.is_zero());
        prop_assert!(oa.commutator(&ob).add(&ob.commutator(&oa)).is_zero());
    }

    #[test]
    fn rendered_expressions_reparse(src in operator_expr()) {
        let e = parse(&src).unwrap();
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    /// Residuals are unchanged by moving the grid origin by whole steps.
    #[test]
    fn residual_is_translation_invariant(k in rational(), shift in -3i64..=3, m in rational()) {
        prop_assume!(!m.is_zero());
        let mut p = LatticeParams { m, ..LatticeParams::default() };
        p.grid.nx = 5;
        p.grid.nt = 5;
        prop_assume!(k.clone() * &p.grid.sigma != rat(-1, 1));
        for fam in [Family::Geometric { k: k.clone() }, Family::HeatPolynomial { degree: 3 }] {
            let f = fam.exact(&p);
            let moved = LatticeParams {
                grid: GridSpec { x0: &p.grid.x0 + &p.grid.sigma * rat(shift, 1), ..p.grid.clone() },
                ..p.clone()
            };
            let a = residual_exact(Equation::SpaceLattice, &f, &p).unwrap();
            let b = residual_exact(Equation::SpaceLattice, &f, &moved).unwrap();
            prop_assert!(a.is_zero() && b.is_zero(), "{} {} {}", fam.name(), a, b);
        }
    }

    #[test]
    fn time_families_solve_for_any_mass(k in rational(), m in rational()) {
        prop_assume!(!m.is_zero());
        let mut p = LatticeParams { m, ..LatticeParams::default() };
        p.grid.nx = 4;
        p.grid.nt = 4;
        for fam in [Family::Exponential { k: k.clone() }, Family::TimeHeatPolynomial { degree: 4 }] {
            prop_assert!(residual_exact(Equation::TimeLattice, &fam.exact(&p), &p).unwrap().is_zero());
        }
    }

    /// Record order in a report does not depend on completion order.
    #[test]
    fn report_order_is_canonical(perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let records: Vec<Record> = (0..12usize)
            .map(|i| Record {
                suite: ["twist", "hopf", "algebra"][i % 3].into(),
                catalog_ids: vec![format!("id{}", i % 4)],
                finding: Finding::pass(["a", "b"][i % 2], format!("s{i}")),
                millis: i as u64,
            })
            .collect();
        let shuffled: Vec<Record> = perm.iter().map(|&i| records[i].clone()).collect();
        let cfg = serde_json::json!({});
        prop_assert_eq!(
            Report::new(cfg.clone(), records).to_json_without_timing(),
            Report::new(cfg, shuffled).to_json_without_timing()
        );
    }
}
