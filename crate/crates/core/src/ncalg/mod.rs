//! Noncommutative PBW algebras over truncated power series.

mod algebra;
mod element;
mod eval;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::Expr;
use crate::qseries::SeriesError;

pub use algebra::{Algebra, EngineLimits, Relation, RelationTable, DEFAULT_DEGREE_CAP, DEFAULT_FUEL};
pub use element::{concat, is_ordered, render_word, NCElement, TensorElement, TensorKey, Word};
pub use eval::{exp_tensor, Evaluator, FreeAlgebra, Multiplier, Value};


#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("no image assigned to generator `{0}`")]
    UnmappedGenerator(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("word of degree {degree} exceeds the degree cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("rewriting fuel exhausted after {limit} steps")]
    FuelExhausted { limit: usize },
    #[error("tensor arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("argument of exp/log/inverse is not nilpotent in the deformation parameter")]
    NonNilpotentArgument,
    #[error("binding cycle through `{0}`")]
    BindingCycle(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Product in the algebra described by `m`.
pub fn mul_elements(m: &dyn Multiplier, a: &NCElement, b: &NCElement) -> Result<NCElement, AlgebraError> {
    algebra::mul_with(m, a, b)
}

/// Inverse of an element whose constant part is a unit series.
pub fn inverse_of(m: &dyn Multiplier, e: &NCElement) -> Result<NCElement, AlgebraError> {
    eval::inverse_element(m, e)
}

/// Normal form of an expression over the algebra's generators.
pub fn normal_order(alg: &Algebra, e: &Expr, order: usize) -> Result<NCElement, AlgebraError> {
    alg.eval_element(e, order)
}

pub fn commutator(alg: &Algebra, a: &NCElement, b: &NCElement) -> Result<NCElement, AlgebraError> {
    alg.commutator(a, b)
}

/// Image of an expression over target generators, each bound to an
/// expression in the source algebra. Unbound target generators are an error.
pub fn substitute(
    source: &Algebra,
    targets: &[String],
    images: &BTreeMap<String, Expr>,
    e: &Expr,
    order: usize,
) -> Result<NCElement, AlgebraError> {
    for s in e.symbols() {
        if targets.contains(&s) && !images.contains_key(&s) {
            return Err(AlgebraError::UnmappedGenerator(s));
        }
    }
    Evaluator::with_bindings(source, images.clone()).eval_element(e, order)
}

/// Extends an assignment generator → tensor expression multiplicatively
/// (e.g. a coproduct) to an arbitrary expression.
pub fn tensor_extend(
    alg: &Algebra,
    images: &BTreeMap<String, Expr>,
    e: &Expr,
    arity: usize,
    order: usize,
) -> Result<TensorElement, AlgebraError> {
    Evaluator::with_images(alg, images.clone()).eval_tensor(e, arity, order)
}

/// One Jacobi-identity failure.
#[derive(Debug, Clone)]
pub struct JacobiFailure {
    pub triple: [String; 3],
    pub residual: NCElement,
}

/// Checks `[[a,b],c] + [[b,c],a] + [[c,a],b] = 0` on all triples of
/// distinct generators.
pub fn verify_jacobi(alg: &Algebra, order: usize) -> Result<Vec<JacobiFailure>, AlgebraError> {
    let n = alg.names().len();
    let gens: Vec<NCElement> = (0..n).map(|i| NCElement::generator(i as u8, order)).collect();
    let br = |x: &NCElement, y: &NCElement| alg.commutator(x, y);
    let mut failures = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (a, b, c) = (&gens[i], &gens[j], &gens[k]);
                let r = br(&br(a, b)?, c)?
                    .add(&br(&br(b, c)?, a)?)
                    .add(&br(&br(c, a)?, b)?);
                if !r.is_zero() {
                    let names = alg.names();
                    failures.push(JacobiFailure {
                        triple: [names[i].clone(), names[j].clone(), names[k].clone()],
                        residual: r,
                    });
                }
            }
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::qseries::{rat, SeriesScalar};

    fn table(name: &str, gens: &[&str], param: &str, rels: &[(&str, &str, &str)]) -> Algebra {
        let t = RelationTable {
            name: name.into(),
            generators: gens.iter().map(|s| s.to_string()).collect(),
            parameter: param.into(),
            relations: rels
                .iter()
                .map(|(a, b, r)| Relation {
                    left: a.to_string(),
                    right: b.to_string(),
                    rhs: parse(r).unwrap(),
                })
                .collect(),
        };
        Algebra::new(t, EngineLimits::default()).unwrap()
    }

    fn sl2_bc() -> Algebra {
        table(
            "bc",
            &["Jm", "J3", "Jp"],
            "z",
            &[
                ("J3", "Jp", "(exp(2*z*Jp) - 1)/z"),
                ("J3", "Jm", "-2*Jm + z*J3^2"),
                ("Jp", "Jm", "J3"),
            ],
        )
    }

    fn schr_gc() -> Algebra {
        let m = "D + M/2";
        let rels = vec![
            ("D", "P", "(exp(-sigma*P) - 1)/sigma".to_string()),
            ("D", "K", "K".to_string()),
            ("K", "P", "M*exp(-sigma*P)".to_string()),
            ("D", "H", "-2*H".to_string()),
            ("D", "C", format!("2*C + sigma/2*K*({m})")),
            ("H", "C", format!("1/2*(1 + exp(sigma*P))*({m}) - 1/2*M - sigma*K*H")),
            ("K", "C", "sigma/2*K^2".to_string()),
            ("P", "C", format!("-1/2*(1 + exp(-sigma*P))*K + sigma/2*exp(-sigma*P)*M*({m})")),
            ("K", "H", "(exp(sigma*P) - 1)/sigma".to_string()),
        ];
        let rels: Vec<(&str, &str, &str)> = rels.iter().map(|(a, b, r)| (*a, *b, r.as_str())).collect();
        table("gc", &["M", "C", "K", "D", "H", "P"], "sigma", &rels)
    }

    fn el(alg: &Algebra, src: &str, order: usize) -> NCElement {
        normal_order(alg, &parse(src).unwrap(), order).unwrap()
    }

    #[test]
    fn jp_j3_reorders_with_series_tail() {
        let a = sl2_bc();
        let got = el(&a, "Jp*J3", 2);
        let want = el(&a, "J3*Jp - 2*Jp - 2*z*Jp^2 - 4/3*z^2*Jp^3", 2);
        assert_eq!(got, want);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn ordered_words_are_fixed() {
        let a = sl2_bc();
        let jp = a.generator("Jp", 3).unwrap();
        let sq = a.mul(&jp, &jp).unwrap();
        assert_eq!(sq.terms().len(), 1);
        assert!(sq.is_normal_ordered());
    }

    #[test]
    fn textbook_commutators() {
        let a = sl2_bc();
        let c = commutator(&a, &a.generator("Jp", 4).unwrap(), &a.generator("Jm", 4).unwrap()).unwrap();
        assert_eq!(c, a.generator("J3", 4).unwrap());

        let s = schr_gc();
        let mc = commutator(&s, &s.generator("M", 4).unwrap(), &s.generator("C", 4).unwrap()).unwrap();
        assert!(mc.is_zero());
        let kp = commutator(&s, &s.generator("K", 2).unwrap(), &s.generator("P", 2).unwrap()).unwrap();
        assert_eq!(kp, el(&s, "M*(1 - sigma*P + sigma^2*P^2/2)", 2));
    }

    #[test]
    fn ba_presentation_xy() {
        let a = table(
            "ba",
            &["Y", "H", "X"],
            "z",
            &[
                ("H", "X", "2*sinh(z*X)/z"),
                ("H", "Y", "-Y*cosh(z*X) - cosh(z*X)*Y"),
                ("X", "Y", "H"),
            ],
        );
        assert_eq!(el(&a, "X*Y - Y*X", 4), el(&a, "H", 4));
        assert!(verify_jacobi(&a, 4).unwrap().is_empty());
    }

    #[test]
    fn leading_scalar_quotient_divides_the_whole_product() {
        let a = sl2_bc();
        let want = el(&a, "2*Jp + z*Jp^2", 1);
        assert_eq!(el(&a, "2/z*(exp(z*Jp) - 1)", 1), want);
        assert_eq!(el(&a, "(exp(z*Jp) - 1)*2/z", 1), want);
    }

    #[test]
    fn series_functions_of_elements() {
        let a = sl2_bc();
        let n = el(&a, "-2*z*Jp", 3);
        let inv = a.invert_one_plus(&n).unwrap();
        assert_eq!(inv, el(&a, "1 + 2*z*Jp + 4*z^2*Jp^2 + 8*z^3*Jp^3", 3));
        assert_eq!(a.exp_element(&NCElement::zero(3)).unwrap(), NCElement::one(3));

        // -(1/(2z)) log(1 - 2z cJp), needs one extra order before dividing by z
        let log = a.log_one_plus(&el(&a, "-2*z*Jp", 3)).unwrap();
        let mut shifted = NCElement::zero(2);
        for (w, c) in log.terms() {
            shifted.add_term(w.clone(), c.shift_down(1).unwrap().scale(&rat(-1, 2)));
        }
        assert_eq!(shifted, el(&a, "Jp + z*Jp^2 + 4/3*z^2*Jp^3", 2));
        assert_eq!(el(&a, "-log(1 - 2*z*Jp)/(2*z)", 2), shifted);
    }

    #[test]
    fn substitution_and_unmapped() {
        let a = sl2_bc();
        let targets = vec!["cJp".to_string(), "cJ3".to_string()];
        let mut images = BTreeMap::new();
        images.insert("cJp".to_string(), parse("(1 - exp(-2*z*Jp))/(2*z)").unwrap());
        let got = substitute(&a, &targets, &images, &parse("cJp").unwrap(), 2).unwrap();
        assert_eq!(got, el(&a, "Jp - z*Jp^2 + 2/3*z^2*Jp^3", 2));
        let err = substitute(&a, &targets, &images, &parse("cJ3").unwrap(), 2).unwrap_err();
        assert_eq!(err, AlgebraError::UnmappedGenerator("cJ3".into()));
    }

    #[test]
    fn tensor_extension_of_coproduct() {
        let s = schr_gc();
        let mut delta = BTreeMap::new();
        delta.insert("M".to_string(), parse("tensor(1, M) + tensor(M, 1)").unwrap());
        let got = tensor_extend(&s, &delta, &parse("M").unwrap(), 2, 3).unwrap();
        let m = s.generator("M", 3).unwrap();
        let one = NCElement::one(3);
        let want = TensorElement::from_factors(&[&one, &m]).add(&TensorElement::from_factors(&[&m, &one]));
        assert_eq!(got, want);

        let a = sl2_bc();
        let mut d = BTreeMap::new();
        d.insert("Jp".to_string(), parse("tensor(1, Jp) + tensor(Jp, 1)").unwrap());
        d.insert("J3".to_string(), parse("tensor(1, J3) + tensor(J3, exp(2*z*Jp))").unwrap());
        let prod = tensor_extend(&a, &d, &parse("Jp*J3").unwrap(), 2, 3).unwrap();
        let dp = tensor_extend(&a, &d, &parse("Jp").unwrap(), 2, 3).unwrap();
        let d3 = tensor_extend(&a, &d, &parse("J3").unwrap(), 2, 3).unwrap();
        assert_eq!(prod, a.tensor_mul(&dp, &d3).unwrap());
    }

    #[test]
    fn jacobi_passes_and_negative_control_fails() {
        assert!(verify_jacobi(&sl2_bc(), 4).unwrap().is_empty());
        assert!(verify_jacobi(&schr_gc(), 3).unwrap().is_empty());
        let classical = table(
            "fe",
            &["cM", "cAm", "cN", "cAp"],
            "z",
            &[("cN", "cAp", "cAp"), ("cN", "cAm", "-cAm"), ("cAm", "cAp", "cM")],
        );
        assert!(verify_jacobi(&classical, 2).unwrap().is_empty());
        let broken = table(
            "fe-broken",
            &["cM", "cAm", "cN", "cAp"],
            "z",
            &[("cN", "cAp", "2*cAp"), ("cN", "cAm", "-cAm"), ("cAm", "cAp", "cM")],
        );
        let fails = verify_jacobi(&broken, 2).unwrap();
        assert!(!fails.is_empty());
        assert!(!fails[0].residual.is_zero());
    }

    #[test]
    fn degree_cap_and_fuel_are_hard_errors() {
        let t = sl2_bc().table().clone();
        let tight = Algebra::new(t.clone(), EngineLimits { fuel: 3, degree_cap: 12 }).unwrap();
        let w = parse("Jp^3*J3^2*Jm").unwrap();
        assert!(matches!(
            normal_order(&tight, &w, 4),
            Err(AlgebraError::FuelExhausted { .. })
        ));
        let capped = Algebra::new(t, EngineLimits { fuel: DEFAULT_FUEL, degree_cap: 3 }).unwrap();
        assert!(matches!(
            normal_order(&capped, &parse("Jp^4").unwrap(), 2),
            Err(AlgebraError::DegreeCapExceeded { .. })
        ));
    }

    #[test]
    fn classical_projection_of_deformed_table() {
        let a = sl2_bc();
        let c = commutator(&a, &a.generator("J3", 4).unwrap(), &a.generator("Jp", 4).unwrap()).unwrap();
        let proj = c.truncate(0);
        assert_eq!(proj, el(&a, "2*Jp", 0));
        assert_eq!(c.coeff(&[2]), SeriesScalar::constant(rat(2, 1), 4));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word_expr() -> impl Strategy<Value = String> {
            let g = prop_oneof![Just("Jm"), Just("J3"), Just("Jp"), Just("z")];
            prop::collection::vec(g, 1..5).prop_map(|v| v.join("*"))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn normal_order_idempotent(src in word_expr()) {
                let a = sl2_bc();
                let e = el(&a, &src, 3);
                prop_assert_eq!(a.normal_order(&e).unwrap(), e.clone());
                prop_assert!(e.is_normal_ordered());
            }

            #[test]
            fn normal_order_is_multiplicative(x in word_expr(), y in word_expr()) {
                let a = sl2_bc();
                let whole = el(&a, &format!("({x})*({y})"), 3);
                let parts = a.mul(&el(&a, &x, 3), &el(&a, &y, 3)).unwrap();
                prop_assert_eq!(whole, parts);
            }
        }
    }
}
