use std::collections::BTreeMap;

use num::{One, Zero};

use crate::ncalg::{NCElement, TensorElement, TensorKey, Word};
use crate::qseries::{eps_limit, EpsSeriesScalar, Rational, SeriesError, SeriesScalar};
use crate::report::Finding;

use super::rmatrix::build_rmatrix;
use super::twist::{transport, TwistMap};
use super::{residual_of, tensor_residual, HopfError, HopfPresentation};

/// `new = factor · ε^eps_power · old`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    pub new: String,
    pub old: String,
    pub factor: Rational,
    pub eps_power: i32,
}

/// A singular change of basis followed by ε → 0. The old deformation
/// parameter is `parameter_factor · ε^parameter_eps_power · new parameter`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionSpec {
    pub id: String,
    pub scalings: Vec<Scaling>,
    pub parameter_factor: Rational,
    pub parameter_eps_power: i32,
}

/// Brackets, coproducts and (if present) ℛ of the contracted algebra,
/// expressed on the target generators but not yet normal-ordered there.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub brackets: BTreeMap<(String, String), NCElement>,
    pub coproducts: BTreeMap<String, TensorElement>,
    pub rmatrix: Option<TensorElement>,
}

struct Rewriter {
    /// For each old generator index: new index in the target, inverse
    /// factor, ε-power.
    letters: Vec<(u8, Rational, i32)>,
    pfactor: Rational,
    ppower: i32,
    order: usize,
}

impl Rewriter {
    fn new(
        spec: &ContractionSpec,
        source: &HopfPresentation,
        target_names: &[String],
        order: usize,
    ) -> Result<Self, HopfError> {
        let mut letters = Vec::new();
        for g in source.names() {
            let s = spec
                .scalings
                .iter()
                .find(|s| &s.old == g)
                .ok_or_else(|| HopfError::Invalid(format!("{}: no scaling for `{g}`", spec.id)))?;
            let idx = target_names
                .iter()
                .position(|t| t == &s.new)
                .ok_or_else(|| HopfError::Invalid(format!("{}: `{}` is not a target generator", spec.id, s.new)))?;
            if s.factor.is_zero() {
                return Err(HopfError::Invalid(format!("{}: zero scaling for `{g}`", spec.id)));
            }
            letters.push((idx as u8, s.factor.recip(), s.eps_power));
        }
        if spec.parameter_factor.is_zero() {
            return Err(HopfError::Invalid(format!("{}: parameter rule is not invertible", spec.id)));
        }
        Ok(Rewriter {
            letters,
            pfactor: spec.parameter_factor.clone(),
            ppower: spec.parameter_eps_power,
            order,
        })
    }

    /// Old word → (new word, rational factor, ε-power).
    fn word(&self, w: &[u8]) -> (Word, Rational, i32) {
        let mut nw = Word::new();
        let mut f = Rational::one();
        let mut p = 0;
        for &g in w {
            let (i, inv, e) = &self.letters[g as usize];
            nw.push(*i);
            f *= inv;
            p -= e;
        }
        (nw, f, p)
    }

    /// c(z_old) with z_old = f ε^q z, times `pre ε^e0`.
    fn coeff(&self, c: &SeriesScalar, pre: &Rational, e0: i32) -> EpsSeriesScalar {
        let mut out = EpsSeriesScalar::zero(self.order);
        let mut fk = pre.clone();
        for k in 0..=self.order {
            let ck = c.coeff(k);
            if !ck.is_zero() {
                let s = SeriesScalar::monomial(ck * &fk, k, self.order);
                out.add_assign(&EpsSeriesScalar::from_series(s, e0 + self.ppower * k as i32));
            }
            fk *= &self.pfactor;
        }
        out
    }

    fn element(&self, e: &NCElement, pre: &Rational, e0: i32, subject: &str) -> Result<NCElement, HopfError> {
        let mut acc: BTreeMap<Word, EpsSeriesScalar> = BTreeMap::new();
        for (w, c) in e.terms() {
            let (nw, f, p) = self.word(w);
            let term = self.coeff(c, &(pre * f), e0 + p);
            acc.entry(nw).or_insert_with(|| EpsSeriesScalar::zero(self.order)).add_assign(&term);
        }
        let mut out = NCElement::zero(self.order);
        for (w, s) in acc {
            out.add_term(w, limit(&s, subject)?);
        }
        Ok(out)
    }

    fn tensor(&self, t: &TensorElement, pre: &Rational, e0: i32, subject: &str) -> Result<TensorElement, HopfError> {
        let mut acc: BTreeMap<TensorKey, EpsSeriesScalar> = BTreeMap::new();
        for (key, c) in t.terms() {
            let mut nk = TensorKey::new();
            let mut f = pre.clone();
            let mut p = e0;
            for w in key {
                let (nw, wf, wp) = self.word(w);
                nk.push(nw);
                f *= wf;
                p += wp;
            }
            let term = self.coeff(c, &f, p);
            acc.entry(nk).or_insert_with(|| EpsSeriesScalar::zero(self.order)).add_assign(&term);
        }
        let mut out = TensorElement::zero(t.arity(), self.order);
        for (k, s) in acc {
            out.add_term(k, limit(&s, subject)?);
        }
        Ok(out)
    }
}

fn limit(s: &EpsSeriesScalar, subject: &str) -> Result<SeriesScalar, HopfError> {
    eps_limit(s).map_err(|e| match e {
        SeriesError::DivergentContraction { degree } => HopfError::DivergentContraction {
            subject: subject.to_string(),
            degree,
        },
        other => HopfError::Algebra(other.into()),
    })
}

/// Rewrites every bracket and coproduct of `source` in the new generators
/// and takes ε → 0.
pub fn contract(
    spec: &ContractionSpec,
    source: &HopfPresentation,
    target_names: &[String],
    order: usize,
) -> Result<Contracted, HopfError> {
    let rw = Rewriter::new(spec, source, target_names, order)?;
    let names = source.names();
    let scale_of = |g: &str| {
        let s = spec.scalings.iter().find(|s| s.old == g).unwrap();
        (s.factor.clone(), s.eps_power)
    };
    let mut brackets = BTreeMap::new();
    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let a = NCElement::generator(i as u8, order);
            let b = NCElement::generator(j as u8, order);
            let br = source.algebra.commutator(&a, &b)?;
            let (fa, pa) = scale_of(&names[i]);
            let (fb, pb) = scale_of(&names[j]);
            let subject = format!("[{},{}]", names[i], names[j]);
            let new = rw.element(&br, &(fa * fb), pa + pb, &subject)?;
            let (ni, nj) = (rw.letters[i].0 as usize, rw.letters[j].0 as usize);
            brackets.insert((target_names[ni].clone(), target_names[nj].clone()), new);
        }
    }
    let mut coproducts = BTreeMap::new();
    for (i, g) in names.iter().enumerate() {
        let d = source.coproduct(g, order)?;
        let (f, p) = scale_of(g);
        let new = rw.tensor(&d, &f, p, &format!("Delta({g})"))?;
        coproducts.insert(target_names[rw.letters[i].0 as usize].clone(), new);
    }
    let rmatrix = match &source.rmatrix {
        Some(_) => Some(rw.tensor(&build_rmatrix(source, order)?, &Rational::one(), 0, "R")?),
        None => None,
    };
    Ok(Contracted {
        brackets,
        coproducts,
        rmatrix,
    })
}

/// Contracts `source` and compares the limit with the `target` presentation.
pub fn contract_presentation(
    spec: &ContractionSpec,
    source: &HopfPresentation,
    target: &HopfPresentation,
    order: usize,
) -> Result<Vec<Finding>, HopfError> {
    let c = contract(spec, source, target.names(), order)?;
    let alg = &target.algebra;
    let mut out = Vec::new();
    for ((a, b), e) in &c.brackets {
        let got = alg.normal_order(e)?;
        let want = alg.commutator(&alg.generator(a, order)?, &alg.generator(b, order)?)?;
        out.push(Finding::from_residual(
            "contraction_bracket",
            format!("{a},{b}"),
            residual_of(target, &got.sub(&want)),
        ));
    }
    for (g, t) in &c.coproducts {
        let got = normal_order_tensor(target, t)?;
        let want = target.coproduct(g, order)?;
        out.push(Finding::from_residual(
            "contraction_coproduct",
            g.clone(),
            tensor_residual(target, &got.sub(&want)),
        ));
    }
    if let (Some(r), Some(_)) = (&c.rmatrix, &target.rmatrix) {
        let got = normal_order_tensor(target, r)?;
        let want = build_rmatrix(target, order)?;
        out.push(Finding::from_residual(
            "contraction_rmatrix",
            target.id.clone(),
            tensor_residual(target, &got.sub(&want)),
        ));
    }
    Ok(out)
}

/// The two routes around the square formed by a contraction and a twist:
/// contracting the twisted algebra must give the same brackets and
/// coproducts as twisting the contracted one.
pub fn check_diagram(
    twisted_contraction: &ContractionSpec,
    twisted_source: &HopfPresentation,
    map: &TwistMap,
    contracted: &HopfPresentation,
    target: &HopfPresentation,
    order: usize,
) -> Result<Vec<Finding>, HopfError> {
    let names = target.names();
    let a = contract(twisted_contraction, twisted_source, names, order)?;
    let b = transport(map, contracted, target, order)?;
    let alg = &target.algebra;
    let mut out = Vec::new();
    let mut k = 0;
    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let (x, y) = (names[i].clone(), names[j].clone());
            let route_a = match (a.brackets.get(&(x.clone(), y.clone())), a.brackets.get(&(y.clone(), x.clone()))) {
                (Some(e), _) => alg.normal_order(e)?,
                (None, Some(e)) => alg.normal_order(e)?.neg(),
                (None, None) => return Err(HopfError::Invalid(format!("contraction lost the pair {x},{y}"))),
            };
            out.push(Finding::from_residual(
                "diagram_bracket",
                format!("{x},{y}"),
                residual_of(target, &route_a.sub(&b.brackets[k])),
            ));
            k += 1;
        }
    }
    for (i, g) in names.iter().enumerate() {
        let route_a = normal_order_tensor(target, &a.coproducts[g])?;
        out.push(Finding::from_residual(
            "diagram_coproduct",
            g.clone(),
            tensor_residual(target, &route_a.sub(&b.coproducts[i])),
        ));
    }
    Ok(out)
}

fn normal_order_tensor(p: &HopfPresentation, t: &TensorElement) -> Result<TensorElement, HopfError> {
    let order = t.order();
    let mut out = TensorElement::zero(t.arity(), order);
    for (k, c) in t.terms() {
        let slots = k
            .iter()
            .map(|w| p.algebra.normal_order(&NCElement::monomial(w.clone(), SeriesScalar::one(order))))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&NCElement> = slots.iter().collect();
        out.add_assign(&TensorElement::from_factors(&refs).scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::*;
    use crate::qseries::{int, rat};
    use crate::report::Status;

    fn poincare() -> HopfPresentation {
        presentation(
            "db",
            &["Pm", "K", "Pp"],
            "z",
            &[("K", "Pp", "(exp(z*Pp) - 1)/z"), ("K", "Pm", "-Pm")],
            &[
                ("Pp", "tensor(1, Pp) + tensor(Pp, 1)"),
                ("Pm", "tensor(1, Pm) + tensor(Pm, exp(z*Pp))"),
                ("K", "tensor(1, K) + tensor(K, exp(z*Pp))"),
            ],
        )
    }

    fn da(pp_power: i32) -> ContractionSpec {
        let s = |new: &str, old: &str, f, p| Scaling {
            new: new.into(),
            old: old.into(),
            factor: f,
            eps_power: p,
        };
        ContractionSpec {
            id: "da".into(),
            scalings: vec![
                s("Pp", "Jp", int(1), pp_power),
                s("Pm", "Jm", int(1), 1),
                s("K", "J3", rat(1, 2), 0),
            ],
            parameter_factor: rat(1, 2),
            parameter_eps_power: 1,
        }
    }

    #[test]
    fn sl2_contracts_to_poincare() {
        let f = contract_presentation(&da(1), &sl2_bc(), &poincare(), 4).unwrap();
        assert!(f.iter().all(|x| x.status == Status::Pass), "{f:#?}");
        assert_eq!(f.len(), 6);
    }

    #[test]
    fn wrong_power_diverges() {
        let err = contract(&da(2), &sl2_bc(), poincare().names(), 3).unwrap_err();
        assert!(matches!(err, HopfError::DivergentContraction { degree, .. } if degree < 0));
    }
}
