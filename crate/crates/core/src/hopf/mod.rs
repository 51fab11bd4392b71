//! Hopf structure on PBW presentations: coproduct, counit and antipode
//! axioms, R-matrices, twist maps, contractions and subalgebra embeddings.

mod contraction;
mod embedding;
mod rmatrix;
mod twist;

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::Expr;
use crate::ncalg::{
    verify_jacobi, Algebra, AlgebraError, EngineLimits, Evaluator, Multiplier, NCElement, RelationTable,
    TensorElement, TensorKey, Word,
};
use crate::qseries::SeriesScalar;
use crate::report::Finding;

pub use contraction::{check_diagram, contract, contract_presentation, ContractionSpec, Scaling};
pub use embedding::{check_embedding, EmbeddingSpec};
pub use rmatrix::{build_rmatrix, check_rmatrix, RMatrixSpec};
pub use twist::{check_equivalent_twists, check_grouplike_powers, check_twist, TwistMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopfError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no coproduct given for generator `{0}`")]
    MissingCoproduct(String),
    #[error("antipode cannot be solved: no triangular order among {0}")]
    NoTriangularOrder(String),
    #[error("presentation `{0}` has no R-matrix")]
    MissingRMatrixSpec(String),
    #[error("contraction diverges in {subject} at eps^{degree}")]
    DivergentContraction { subject: String, degree: i32 },
    #[error("{0}")]
    Invalid(String),
}

/// An algebra together with its coproduct table and optional R-matrix.
pub struct HopfPresentation {
    pub id: String,
    pub algebra: Algebra,
    /// Coproduct expression for each generator, as `tensor(..)` sums.
    pub coproducts: BTreeMap<String, Expr>,
    pub rmatrix: Option<RMatrixSpec>,
}

impl std::fmt::Debug for HopfPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HopfPresentation").field("id", &self.id).finish()
    }
}

impl HopfPresentation {
    pub fn new(
        id: &str,
        table: RelationTable,
        coproducts: BTreeMap<String, Expr>,
        rmatrix: Option<RMatrixSpec>,
        limits: EngineLimits,
    ) -> Result<Self, HopfError> {
        let algebra = Algebra::new(table, limits)?;
        for g in algebra.names() {
            if !coproducts.contains_key(g) {
                return Err(HopfError::MissingCoproduct(g.clone()));
            }
        }
        for (g, e) in &coproducts {
            if algebra.table().index_of(g).is_none() {
                return Err(HopfError::Algebra(AlgebraError::UnknownGenerator(g.clone())));
            }
            for s in e.symbols() {
                if algebra.table().index_of(&s).is_none() && s != algebra.parameter() {
                    return Err(HopfError::Algebra(AlgebraError::UnknownGenerator(s)));
                }
            }
        }
        Ok(HopfPresentation {
            id: id.to_string(),
            algebra,
            coproducts,
            rmatrix,
        })
    }

    pub fn names(&self) -> &[String] {
        self.algebra.names()
    }

    pub fn parameter(&self) -> &str {
        self.algebra.parameter()
    }

    pub fn render(&self, e: &NCElement) -> String {
        e.render(self.names(), self.parameter())
    }

    pub fn render_tensor(&self, t: &TensorElement) -> String {
        t.render(self.names(), self.parameter())
    }

    /// Δ of one generator at the given order.
    pub fn coproduct(&self, g: &str, order: usize) -> Result<TensorElement, HopfError> {
        let e = self
            .coproducts
            .get(g)
            .ok_or_else(|| HopfError::MissingCoproduct(g.to_string()))?;
        Ok(Evaluator::new(&self.algebra).eval_tensor(e, 2, order)?)
    }

    /// Δ extended multiplicatively to an expression over the generators.
    pub fn delta_expr(&self, e: &Expr, order: usize) -> Result<TensorElement, HopfError> {
        Ok(crate::ncalg::tensor_extend(&self.algebra, &self.coproducts, e, 2, order)?)
    }

    pub fn coproduct_images(&self, order: usize) -> Result<CoproductCache<'_>, HopfError> {
        let gens = self
            .names()
            .iter()
            .map(|g| self.coproduct(g, order))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoproductCache {
            alg: &self.algebra,
            order,
            gens,
            words: Mutex::new(HashMap::new()),
        })
    }
}

/// Δ on PBW words, memoised.
pub struct CoproductCache<'a> {
    alg: &'a Algebra,
    order: usize,
    gens: Vec<TensorElement>,
    words: Mutex<HashMap<Word, TensorElement>>,
}

impl CoproductCache<'_> {
    pub fn word(&self, w: &[u8]) -> Result<TensorElement, HopfError> {
        if w.is_empty() {
            return Ok(TensorElement::one(2, self.order));
        }
        if w.len() == 1 {
            return Ok(self.gens[w[0] as usize].clone());
        }
        if let Some(hit) = self.words.lock().unwrap().get(w) {
            return Ok(hit.clone());
        }
        let head = self.word(&w[..w.len() - 1])?;
        let last = &self.gens[w[w.len() - 1] as usize];
        let out = self.alg.tensor_mul(&head, last)?;
        self.words.lock().unwrap().insert(Word::from_slice(w), out.clone());
        Ok(out)
    }

    pub fn element(&self, e: &NCElement) -> Result<TensorElement, HopfError> {
        let mut out = TensorElement::zero(2, self.order);
        for (w, c) in e.terms() {
            out.add_assign(&self.word(w)?.scale(c));
        }
        Ok(out)
    }

    pub fn generator(&self, i: usize) -> &TensorElement {
        &self.gens[i]
    }
}

/// Σ c · Π images[letter], the algebra map fixed by generator images.
pub fn map_element(
    target: &dyn Multiplier,
    images: &[NCElement],
    e: &NCElement,
) -> Result<NCElement, AlgebraError> {
    let order = e.order();
    let mut cache: HashMap<Word, NCElement> = HashMap::new();
    let mut out = NCElement::zero(order);
    for (w, c) in e.terms() {
        let img = word_image(target, images, w, order, &mut cache)?;
        out.add_assign(&img.scale(c));
    }
    Ok(out)
}

fn word_image(
    target: &dyn Multiplier,
    images: &[NCElement],
    w: &[u8],
    order: usize,
    cache: &mut HashMap<Word, NCElement>,
) -> Result<NCElement, AlgebraError> {
    if w.is_empty() {
        return Ok(NCElement::one(order));
    }
    if let Some(hit) = cache.get(w) {
        return Ok(hit.clone());
    }
    let head = word_image(target, images, &w[..w.len() - 1], order, cache)?;
    let out = crate::ncalg::mul_elements(target, &head, &images[w[w.len() - 1] as usize])?;
    cache.insert(Word::from_slice(w), out.clone());
    Ok(out)
}

/// Slot-wise application of an algebra map to a tensor.
pub fn map_tensor(
    target: &dyn Multiplier,
    images: &[NCElement],
    t: &TensorElement,
) -> Result<TensorElement, AlgebraError> {
    let order = t.order();
    let mut out = TensorElement::zero(t.arity(), order);
    let mut cache: HashMap<Word, NCElement> = HashMap::new();
    for (key, c) in t.terms() {
        let slots = key
            .iter()
            .map(|w| word_image(target, images, w, order, &mut cache))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&NCElement> = slots.iter().collect();
        out.add_assign(&TensorElement::from_factors(&refs).scale(c));
    }
    Ok(out)
}

fn residual_of(p: &HopfPresentation, e: &NCElement) -> Option<String> {
    (!e.is_zero()).then(|| p.render(e))
}

fn tensor_residual(p: &HopfPresentation, t: &TensorElement) -> Option<String> {
    (!t.is_zero()).then(|| p.render_tensor(t))
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

pub fn check_jacobi(p: &HopfPresentation, order: usize) -> Result<Vec<Finding>, HopfError> {
    let failures = verify_jacobi(&p.algebra, order)?;
    if failures.is_empty() {
        return Ok(vec![Finding::pass("jacobi", "all triples")]);
    }
    Ok(failures
        .into_iter()
        .map(|f| Finding::fail("jacobi", f.triple.join(","), p.render(&f.residual)))
        .collect())
}

/// Δ([a,b]) = [Δa, Δb] for every generator pair.
pub fn check_coproduct_hom(p: &HopfPresentation, order: usize) -> Result<Vec<Finding>, HopfError> {
    let cache = p.coproduct_images(order)?;
    let names = p.names();
    pairs(names.len())
        .into_par_iter()
        .map(|(i, j)| {
            let rhs = p.algebra.table().bracket_expr(&names[i], &names[j]);
            let lhs = p.delta_expr(&rhs, order)?;
            let (a, b) = (cache.generator(i), cache.generator(j));
            let br = p.algebra.tensor_mul(a, b)?.sub(&p.algebra.tensor_mul(b, a)?);
            Ok(Finding::from_residual(
                "coproduct_hom",
                format!("{},{}", names[i], names[j]),
                tensor_residual(p, &lhs.sub(&br)),
            ))
        })
        .collect()
}

/// Replaces slot `slot` of each term by Δ of its word.
fn expand_slot(cache: &CoproductCache<'_>, t: &TensorElement, slot: usize) -> Result<TensorElement, HopfError> {
    let mut out = TensorElement::zero(t.arity() + 1, t.order());
    for (key, c) in t.terms() {
        let d = cache.word(&key[slot])?;
        for (dk, dc) in d.terms() {
            let mut nk: TensorKey = TensorKey::new();
            for (s, w) in key.iter().enumerate() {
                if s == slot {
                    nk.push(dk[0].clone());
                    nk.push(dk[1].clone());
                } else {
                    nk.push(w.clone());
                }
            }
            out.add_term(nk, c * dc);
        }
    }
    Ok(out)
}

/// (Δ⊗id)Δ = (id⊗Δ)Δ on every generator.
pub fn check_coassoc(p: &HopfPresentation, order: usize) -> Result<Vec<Finding>, HopfError> {
    let cache = p.coproduct_images(order)?;
    p.names()
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let d = cache.generator(i);
            let left = expand_slot(&cache, d, 0)?;
            let right = expand_slot(&cache, d, 1)?;
            Ok(Finding::from_residual("coassoc", g.clone(), tensor_residual(p, &left.sub(&right))))
        })
        .collect()
}

fn counit_slot(t: &TensorElement, keep: usize) -> NCElement {
    let drop = 1 - keep;
    let mut out = NCElement::zero(t.order());
    for (k, c) in t.terms() {
        if k[drop].is_empty() {
            out.add_term(k[keep].clone(), c.clone());
        }
    }
    out
}

/// Counit fixed to 0 on generators: checks (ε⊗id)Δ = id = (id⊗ε)Δ and
/// that ε annihilates every bracket.
pub fn check_counit(p: &HopfPresentation, order: usize) -> Result<Vec<Finding>, HopfError> {
    let cache = p.coproduct_images(order)?;
    let names = p.names();
    let mut out = Vec::new();
    for (i, g) in names.iter().enumerate() {
        let d = cache.generator(i);
        let x = NCElement::generator(i as u8, order);
        for (keep, label) in [(1, "counit_left"), (0, "counit_right")] {
            let r = counit_slot(d, keep).sub(&x);
            out.push(Finding::from_residual(label, g.clone(), residual_of(p, &r)));
        }
    }
    for (i, j) in pairs(names.len()) {
        let a = NCElement::generator(i as u8, order);
        let b = NCElement::generator(j as u8, order);
        let c = p.algebra.commutator(&a, &b)?.constant_part();
        let res = (!c.is_zero()).then(|| c.render(p.parameter()));
        out.push(Finding::from_residual(
            "counit_bracket",
            format!("{},{}", names[i], names[j]),
            res,
        ));
    }
    Ok(out)
}

/// Antipode values S(g) for each generator, solved from m(S⊗id)Δ(g) = 0.
#[derive(Debug, Clone)]
pub struct Antipode {
    pub images: Vec<NCElement>,
}

impl Antipode {
    /// S on an arbitrary element, extended as an anti-homomorphism.
    pub fn apply(&self, alg: &Algebra, e: &NCElement) -> Result<NCElement, AlgebraError> {
        let mut out = NCElement::zero(e.order());
        for (w, c) in e.terms() {
            let mut acc = NCElement::one(e.order());
            for &g in w.iter().rev() {
                acc = alg.mul(&acc, &self.images[g as usize])?;
            }
            out.add_assign(&acc.scale(c));
        }
        Ok(out)
    }
}

pub fn solve_antipode(p: &HopfPresentation, order: usize) -> Result<Antipode, HopfError> {
    let cache = p.coproduct_images(order)?;
    let n = p.names().len();
    let mut solved: Vec<Option<NCElement>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let mut progress = false;
        let mut next = Vec::new();
        for &i in &remaining {
            let d = cache.generator(i);
            let own: Word = smallvec::smallvec![i as u8];
            let ready = d.terms().keys().all(|k| {
                k[0] == own || k[0].iter().all(|&g| g as usize != i && solved[g as usize].is_some())
            });
            if !ready {
                next.push(i);
                continue;
            }
            let mut g_x = NCElement::zero(order);
            let mut rest = NCElement::zero(order);
            for (k, c) in d.terms() {
                if k[0] == own {
                    g_x.add_term(k[1].clone(), c.clone());
                    continue;
                }
                let mut s_a = NCElement::one(order);
                for &g in k[0].iter().rev() {
                    s_a = p.algebra.mul(&s_a, solved[g as usize].as_ref().unwrap())?;
                }
                let b = NCElement::monomial(k[1].clone(), c.clone());
                rest.add_assign(&p.algebra.mul(&s_a, &b)?);
            }
            if g_x.constant_part().constant_term() == &num::Zero::zero() {
                return Err(HopfError::NoTriangularOrder(p.names()[i].clone()));
            }
            let inv = crate::ncalg::inverse_of(&p.algebra, &g_x)?;
            solved[i] = Some(p.algebra.mul(&rest, &inv)?.neg());
            progress = true;
        }
        if !progress {
            let stuck: Vec<String> = next.iter().map(|&i| p.names()[i].clone()).collect();
            return Err(HopfError::NoTriangularOrder(stuck.join(", ")));
        }
        remaining = next;
    }
    Ok(Antipode {
        images: solved.into_iter().map(Option::unwrap).collect(),
    })
}

/// Both antipode axioms on generators and compatibility of S with the
/// brackets, S([a,b]) = [S(b), S(a)].
pub fn check_antipode(p: &HopfPresentation, order: usize) -> Result<(Antipode, Vec<Finding>), HopfError> {
    let s = solve_antipode(p, order)?;
    let cache = p.coproduct_images(order)?;
    let names = p.names();
    let mut out = Vec::new();
    for (i, g) in names.iter().enumerate() {
        let d = cache.generator(i);
        let mut left = NCElement::zero(order);
        let mut right = NCElement::zero(order);
        for (k, c) in d.terms() {
            let a = s.apply(&p.algebra, &NCElement::monomial(k[0].clone(), SeriesScalar::one(order)))?;
            let b = NCElement::monomial(k[1].clone(), c.clone());
            left.add_assign(&p.algebra.mul(&a, &b)?);
            let a = NCElement::monomial(k[0].clone(), c.clone());
            let b = s.apply(&p.algebra, &NCElement::monomial(k[1].clone(), SeriesScalar::one(order)))?;
            right.add_assign(&p.algebra.mul(&a, &b)?);
        }
        out.push(Finding::from_residual("antipode_left", g.clone(), residual_of(p, &left)));
        out.push(Finding::from_residual("antipode_right", g.clone(), residual_of(p, &right)));
    }
    for (i, j) in pairs(names.len()) {
        let a = NCElement::generator(i as u8, order);
        let b = NCElement::generator(j as u8, order);
        let lhs = s.apply(&p.algebra, &p.algebra.commutator(&a, &b)?)?;
        let (sa, sb) = (&s.images[i], &s.images[j]);
        let rhs = p.algebra.commutator(sb, sa)?;
        out.push(Finding::from_residual(
            "antipode_bracket",
            format!("{},{}", names[i], names[j]),
            residual_of(p, &lhs.sub(&rhs)),
        ));
    }
    Ok((s, out))
}

/// Jacobi, coproduct homomorphism, coassociativity, counit and antipode.
pub fn hopf_axioms(p: &HopfPresentation, order: usize) -> Result<Vec<Finding>, HopfError> {
    let mut out = check_jacobi(p, order)?;
    out.extend(check_coproduct_hom(p, order)?);
    out.extend(check_coassoc(p, order)?);
    out.extend(check_counit(p, order)?);
    match check_antipode(p, order) {
        Ok((_, f)) => out.extend(f),
        Err(e) => out.push(Finding::fail("antipode_solve", p.id.clone(), e.to_string())),
    }
    Ok(out)
}

/// z → 0 projection of every bracket compared with a classical table under
/// a generator rename.
pub fn check_classical_limit(
    deformed: &HopfPresentation,
    classical: &HopfPresentation,
    rename: &BTreeMap<String, String>,
) -> Result<Vec<Finding>, HopfError> {
    let images = deformed
        .names()
        .iter()
        .map(|g| {
            let t = rename.get(g).ok_or_else(|| AlgebraError::UnmappedGenerator(g.clone()))?;
            classical.algebra.generator(t, 0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let names = deformed.names();
    let mut out = Vec::new();
    for (i, j) in pairs(names.len()) {
        let a = NCElement::generator(i as u8, 0);
        let b = NCElement::generator(j as u8, 0);
        let projected = deformed.algebra.commutator(&a, &b)?;
        let mapped = map_element(&classical.algebra, &images, &projected)?;
        let expected = classical.algebra.commutator(&images[i], &images[j])?;
        out.push(Finding::from_residual(
            "classical_limit",
            format!("{},{}", names[i], names[j]),
            residual_of(classical, &mapped.sub(&expected)),
        ));
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::expr::parse;
    use crate::ncalg::Relation;

    pub fn presentation(
        id: &str,
        gens: &[&str],
        param: &str,
        brackets: &[(&str, &str, &str)],
        coproducts: &[(&str, &str)],
    ) -> HopfPresentation {
        let table = RelationTable {
            name: id.into(),
            generators: gens.iter().map(|s| s.to_string()).collect(),
            parameter: param.into(),
            relations: brackets
                .iter()
                .map(|(a, b, r)| Relation {
                    left: a.to_string(),
                    right: b.to_string(),
                    rhs: parse(r).unwrap(),
                })
                .collect(),
        };
        let cop = coproducts
            .iter()
            .map(|(g, e)| (g.to_string(), parse(e).unwrap()))
            .collect();
        HopfPresentation::new(id, table, cop, None, EngineLimits::default()).unwrap()
    }

    pub fn sl2_bc() -> HopfPresentation {
        presentation(
            "bc",
            &["Jm", "J3", "Jp"],
            "z",
            &[
                ("J3", "Jp", "(exp(2*z*Jp) - 1)/z"),
                ("J3", "Jm", "-2*Jm + z*J3^2"),
                ("Jp", "Jm", "J3"),
            ],
            &[
                ("Jp", "tensor(1, Jp) + tensor(Jp, 1)"),
                ("J3", "tensor(1, J3) + tensor(J3, exp(2*z*Jp))"),
                ("Jm", "tensor(1, Jm) + tensor(Jm, exp(2*z*Jp))"),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use crate::expr::parse;
    use crate::report::Status;

    fn all_pass(f: &[Finding]) -> bool {
        f.iter().all(|x| x.status == Status::Pass)
    }

    #[test]
    fn sl2_passes_axioms() {
        let p = sl2_bc();
        let f = hopf_axioms(&p, 3).unwrap();
        assert!(all_pass(&f), "{f:#?}");
    }

    #[test]
    fn corrupted_coproduct_fails_on_pair() {
        let mut p = sl2_bc();
        p.coproducts
            .insert("J3".into(), parse("tensor(1, J3) + tensor(J3, exp(z*Jp))").unwrap());
        let f = check_coproduct_hom(&p, 2).unwrap();
        let bad: Vec<_> = f.iter().filter(|x| x.status == Status::Fail).collect();
        assert!(bad.iter().any(|x| x.subject == "J3,Jp"));
    }

    #[test]
    fn antipode_values() {
        let p = sl2_bc();
        let s = solve_antipode(&p, 3).unwrap();
        let jp = p.algebra.generator("Jp", 3).unwrap();
        assert_eq!(s.images[2], jp.neg());
        let want = p.algebra.eval_element(&parse("-J3*exp(-2*z*Jp)").unwrap(), 3).unwrap();
        assert_eq!(s.images[1], want);
    }

    #[test]
    fn primitive_coassociativity_terms() {
        let p = sl2_bc();
        let cache = p.coproduct_images(2).unwrap();
        let left = expand_slot(&cache, cache.generator(2), 0).unwrap();
        assert_eq!(left.len(), 3);
    }

    #[test]
    fn non_triangular_coproduct_is_reported() {
        let p = presentation(
            "loop",
            &["A", "B"],
            "z",
            &[],
            &[
                ("A", "tensor(1, A) + tensor(A, 1) + z*tensor(B, B)"),
                ("B", "tensor(1, B) + tensor(B, 1) + z*tensor(A, A)"),
            ],
        );
        assert!(matches!(solve_antipode(&p, 2), Err(HopfError::NoTriangularOrder(_))));
    }
}
