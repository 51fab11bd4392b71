use std::collections::BTreeMap;

use crate::expr::Expr;
use crate::ncalg::{exp_tensor, AlgebraError, Evaluator, TensorElement};
use crate::report::Finding;

use super::rmatrix::build_rmatrix;
use super::{residual_of, tensor_residual, HopfError, HopfPresentation};

/// Generators of a smaller presentation sent to expressions in a bigger one,
/// together with an identification of the deformation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpec {
    pub id: String,
    pub images: BTreeMap<String, Expr>,
    /// The small algebra's parameter as an expression in the big one's.
    pub parameter: Expr,
}

/// Brackets, coproducts and, when both sides carry one, the R-matrix of
/// `sub` map into `big` exactly.
pub fn check_embedding(
    spec: &EmbeddingSpec,
    sub: &HopfPresentation,
    big: &HopfPresentation,
    order: usize,
) -> Result<Vec<Finding>, HopfError> {
    let mut bindings = spec.images.clone();
    for g in sub.names() {
        if !bindings.contains_key(g) {
            return Err(AlgebraError::UnmappedGenerator(g.clone()).into());
        }
    }
    bindings.insert(sub.parameter().to_string(), spec.parameter.clone());
    let ev = Evaluator::with_images(&big.algebra, bindings);
    let names = sub.names();
    let images = names
        .iter()
        .map(|g| ev.eval_element(&Expr::sym(g), order))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();

    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let br = big.algebra.commutator(&images[i], &images[j])?;
            let want = ev.eval_element(&sub.algebra.table().bracket_expr(&names[i], &names[j]), order)?;
            out.push(Finding::from_residual(
                "embedding_bracket",
                format!("{},{}", names[i], names[j]),
                residual_of(big, &br.sub(&want)),
            ));
        }
    }

    let cache = big.coproduct_images(order)?;
    for (i, g) in names.iter().enumerate() {
        let got = cache.element(&images[i])?;
        let want = ev.eval_tensor(&sub.coproducts[g], 2, order)?;
        out.push(Finding::from_residual(
            "embedding_coproduct",
            g.clone(),
            tensor_residual(big, &got.sub(&want)),
        ));
    }

    if let (Some(rs), Some(rb)) = (&sub.rmatrix, &big.rmatrix) {
        let mapped = ev.eval_tensor(&rs.classical, 2, 1)?;
        let target = Evaluator::new(&big.algebra).eval_tensor(&rb.classical, 2, 1)?;
        out.push(Finding::from_residual(
            "embedding_classical_r",
            spec.id.clone(),
            tensor_residual(big, &mapped.sub(&target)),
        ));
        let mut r = TensorElement::one(2, order);
        for f in &rs.factors {
            let x = ev.eval_tensor(f, 2, order)?;
            r = big.algebra.tensor_mul(&r, &exp_tensor(&big.algebra, &x)?)?;
        }
        let want = build_rmatrix(big, order)?;
        out.push(Finding::from_residual(
            "embedding_rmatrix",
            spec.id.clone(),
            tensor_residual(big, &r.sub(&want)),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::*;
    use crate::expr::parse;
    use crate::report::Status;

    fn borel() -> HopfPresentation {
        presentation(
            "aa",
            &["J3", "Jp"],
            "z",
            &[("J3", "Jp", "(exp(2*z*Jp) - 1)/z")],
            &[
                ("Jp", "tensor(1, Jp) + tensor(Jp, 1)"),
                ("J3", "tensor(1, J3) + tensor(J3, exp(2*z*Jp))"),
            ],
        )
    }

    fn spec(param: &str) -> EmbeddingSpec {
        EmbeddingSpec {
            id: "borel".into(),
            images: [("J3", "J3"), ("Jp", "Jp")]
                .iter()
                .map(|(a, b)| (a.to_string(), parse(b).unwrap()))
                .collect(),
            parameter: parse(param).unwrap(),
        }
    }

    #[test]
    fn borel_sits_inside_sl2() {
        let f = check_embedding(&spec("z"), &borel(), &sl2_bc(), 3).unwrap();
        assert!(f.iter().all(|x| x.status == Status::Pass), "{f:#?}");
    }

    #[test]
    fn wrong_parameter_sign_fails() {
        let f = check_embedding(&spec("-z"), &borel(), &sl2_bc(), 3).unwrap();
        assert!(f.iter().any(|x| x.status == Status::Fail));
    }
}
