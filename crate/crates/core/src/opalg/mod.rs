//! Difference-differential operators on functions of `(x, t)` and the
//! realization, Casimir and symmetry checks built on them.

mod coeff;
pub mod erratum;
mod operator;
mod realize;

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

pub use coeff::Coeff;
pub use operator::{OpKey, Operator, Poly, Steps};
pub use realize::{derive, realize, realize_def, Context, Param, Realized};

use crate::catalog::{Catalog, CatalogError, RealizationDef};
use crate::expr::Expr;
use crate::ncalg::{Algebra, AlgebraError, EngineLimits};
use crate::qseries::{render_rational, Rational};
use crate::report::Finding;
use erratum::{fold, search, Perturbation};

#[derive(Debug, Error)]
pub enum OpError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is not an integer shift power")]
    UnresolvedExponential(String),
    #[error("`{0}` is not invertible")]
    NotInvertible(String),
    #[error("no operator for generator `{0}`")]
    Unrealized(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Lattice step and mass at which identities are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub step: Rational,
    pub m: Rational,
}

/// Monomial degree of the action spot checks.
pub const SPOT_DEGREE: u32 = 10;
const LIMIT_DEGREE: u32 = 8;
const ORACLE_DEGREE: u32 = 6;
const EXTRAPOLATION_POINTS: i64 = 14;

pub fn monomials(max: u32) -> impl Iterator<Item = Poly> {
    (0..=max).flat_map(move |a| (0..=max - a).map(move |b| Poly::monomial(a, b)))
}

/// Action of `e` on `f`, composing operator actions right to left without
/// forming operator products.
pub fn apply_expr(ctx: &Context, e: &Expr, f: &Poly) -> Result<Poly, OpError> {
    Ok(match e {
        Expr::Num(c) => f.scale(&Coeff::constant(c.clone())),
        Expr::Add(a, b) => apply_expr(ctx, a, f)?.plus(&apply_expr(ctx, b, f)?),
        Expr::Sub(a, b) => apply_expr(ctx, a, f)?.minus(&apply_expr(ctx, b, f)?),
        Expr::Neg(a) => apply_expr(ctx, a, f)?.scale(&Coeff::constant(-Rational::one())),
        Expr::Mul(a, b) => apply_expr(ctx, a, &apply_expr(ctx, b, f)?)?,
        Expr::Div(a, b) => {
            let inv = ctx
                .eval(b)?
                .as_scalar()
                .and_then(|c| c.inverse())
                .ok_or_else(|| OpError::NotInvertible(b.to_string()))?;
            apply_expr(ctx, a, f)?.scale(&inv)
        }
        Expr::Pow(a, k) if k.is_integer() && *k >= Rational::zero() => {
            let mut g = f.clone();
            let mut n = k.to_integer();
            while n > 0.into() {
                g = apply_expr(ctx, a, &g)?;
                n -= 1;
            }
            g
        }
        Expr::Sym(_) | Expr::Pow(..) | Expr::Call(..) => ctx.eval(e)?.apply(f),
    })
}

fn describe(ctx: &Context) -> String {
    let v = |p: &Param| match p {
        Param::Formal => "formal".to_string(),
        Param::Value(r) => render_rational(r),
    };
    match ctx.lattice {
        crate::catalog::Lattice::None => format!("m={}", v(&ctx.mass)),
        _ => format!("{}={}, m={}", ctx.step_name(), v(&ctx.step), v(&ctx.mass)),
    }
}

/// The realization evaluated symbolically and at every sample.
struct Evaluated {
    formal: Realized,
    sampled: Vec<Realized>,
}

impl Evaluated {
    fn new(
        catalog: &Catalog,
        id: &str,
        def: &RealizationDef,
        ops: &BTreeMap<String, Expr>,
        samples: &[Sample],
    ) -> Result<Self, OpError> {
        let formal = realize_def(catalog, id, def, ops, Param::Formal, Param::Formal)?;
        let sampled = samples
            .iter()
            .map(|s| realize_def(catalog, id, def, ops, Param::Value(s.step.clone()), Param::Value(s.m.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Evaluated { formal, sampled })
    }

    fn all(&self) -> impl Iterator<Item = &Realized> {
        std::iter::once(&self.formal).chain(&self.sampled)
    }
}

/// Result of checking one identity `X = 0`.
struct Outcome {
    residual: Option<String>,
    /// Canonical form and direct action disagree on some monomial.
    disagreement: Option<String>,
}

/// Checks `canon(r) = 0` symbolically and at every sample, and compares the
/// canonical residual against the direct action `act` on monomials at the
/// first sample.
fn check_identity(
    ev: &Evaluated,
    canon: impl Fn(&Realized) -> Result<Operator, OpError>,
    act: impl Fn(&Realized, &Poly) -> Result<Poly, OpError>,
) -> Result<Outcome, OpError> {
    let mut out = Outcome {
        residual: None,
        disagreement: None,
    };
    for (k, r) in ev.all().enumerate() {
        let res = canon(r)?;
        if !res.is_zero() && out.residual.is_none() {
            out.residual = Some(format!("{} [{}]", r.render(&res), describe(&r.ctx)));
        }
        if k == 1 {
            for f in monomials(SPOT_DEGREE) {
                let a = res.apply(&f);
                let b = act(r, &f)?;
                if a != b {
                    out.disagreement = Some(format!(
                        "on {}: canonical {} vs action {} [{}]",
                        f.render(r.ctx.step_name()),
                        a.render(r.ctx.step_name()),
                        b.render(r.ctx.step_name()),
                        describe(&r.ctx)
                    ));
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn vanishes(ev: &Evaluated, canon: impl Fn(&Realized) -> Result<Operator, OpError>) -> bool {
    ev.all().all(|r| canon(r).is_ok_and(|x| x.is_zero()))
}

fn bracket_residual(r: &Realized, a: &str, b: &str, rhs: &Expr) -> Result<Operator, OpError> {
    Ok(r.op(a).commutator(r.op(b)).sub(&r.eval(rhs)?))
}

fn bracket_action(r: &Realized, a: &str, b: &str, rhs: &Expr, f: &Poly) -> Result<Poly, OpError> {
    let (oa, ob) = (r.op(a), r.op(b));
    let lhs = oa.apply(&ob.apply(f)).minus(&ob.apply(&oa.apply(f)));
    Ok(lhs.minus(&apply_expr(&r.ctx, rhs, f)?))
}

fn erratum_note(p: Option<Perturbation>) -> String {
    match p {
        Some(p) => p.describe(),
        None => format!(
            "no single-literal change with denominator at most {} removes the residual",
            erratum::DENOMINATOR_BOUND
        ),
    }
}

fn pairs(gens: &[String]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Brackets of the realized generators against the presentation's table,
/// the image under `derived_from`, the cross-check against abstract normal
/// ordering, and the continuum limit.
pub fn realization_suite(catalog: &Catalog, id: &str, samples: &[Sample], order: usize) -> Result<Vec<Finding>, OpError> {
    let def = catalog.realization(id)?;
    let pres = catalog.presentation(&def.presentation)?;
    let table = pres.table(&def.presentation);
    let ev = Evaluated::new(catalog, id, def, &def.operators, samples)?;
    let mut out = Vec::new();
    let mut failing = Vec::new();
    for (a, b) in pairs(&pres.generators) {
        let rhs = table.bracket_expr(&a, &b);
        let subject = format!("{a},{b}");
        let o = check_identity(
            &ev,
            |r| bracket_residual(r, &a, &b, &rhs),
            |r, f| bracket_action(r, &a, &b, &rhs, f),
        )?;
        if let Some(d) = o.disagreement {
            out.push(Finding::fail("realization_routes", subject.clone(), d));
        }
        match o.residual {
            None => out.push(Finding::pass("realization_bracket", subject)),
            Some(res) => failing.push((a, b, rhs, subject, res)),
        }
    }
    if !failing.is_empty() {
        let mut involved: Vec<&String> = failing.iter().flat_map(|f| [&f.0, &f.1]).collect();
        involved.sort();
        involved.dedup();
        let targets: Vec<(String, Expr)> = involved
            .iter()
            .map(|g| (format!("{id} operator {g}"), fold(&def.operators[*g])))
            .collect();
        let all_pairs = pairs(&pres.generators);
        let fix = search(&targets, |t, e| {
            let mut ops = def.operators.clone();
            ops.insert(involved[t].clone(), e.clone());
            let Ok(first) = Evaluated::new(catalog, id, def, &ops, &samples[..1]) else {
                return false;
            };
            let quick = failing.iter().all(|(a, b, rhs, ..)| vanishes(&first, |r| bracket_residual(r, a, b, rhs)));
            quick
                && Evaluated::new(catalog, id, def, &ops, samples).is_ok_and(|full| {
                    all_pairs.iter().all(|(a, b)| {
                        let rhs = table.bracket_expr(a, b);
                        vanishes(&full, |r| bracket_residual(r, a, b, &rhs))
                    })
                })
        });
        let note = erratum_note(fix);
        for (.., subject, res) in failing {
            out.push(Finding::erratum("realization_bracket", subject, res).with_note(note.clone()));
        }
    }
    out.extend(derived(catalog, id, def, &ev)?);
    out.extend(oracle(def, pres.table(&def.presentation), &ev.formal, order)?);
    if let Some(s) = samples.first() {
        out.extend(continuum(catalog, id, def, &ev.formal, s)?);
    }
    Ok(out)
}

fn derived(catalog: &Catalog, id: &str, def: &RealizationDef, ev: &Evaluated) -> Result<Vec<Finding>, OpError> {
    let Some(d) = &def.derived_from else {
        return Ok(Vec::new());
    };
    let images = derive(catalog, id, Param::Formal, Param::Formal)?.unwrap_or_default();
    let mut out = Vec::new();
    for (g, img) in &images {
        let printed = ev.formal.op(g);
        let diff = printed.sub(img);
        let subject = format!("{g} via {}", d.map);
        if diff.is_zero() {
            out.push(Finding::pass("derived_operator", subject));
            continue;
        }
        let targets = vec![(format!("{id} operator {g}"), fold(&def.operators[g]))];
        let fix = search(&targets, |_, e| ev.formal.ctx.eval(e).is_ok_and(|op| op == *img));
        out.push(
            Finding::erratum("derived_operator", subject, ev.formal.render(&diff)).with_note(erratum_note(fix)),
        );
    }
    Ok(out)
}

/// Realized bracket right-hand sides against the abstract normal form of
/// the same right-hand side, realized word by word, modulo `step^order`.
fn oracle(
    def: &RealizationDef,
    table: crate::ncalg::RelationTable,
    formal: &Realized,
    order: usize,
) -> Result<Vec<Finding>, OpError> {
    let alg = Algebra::new(table, EngineLimits::default())?;
    let names = alg.names().to_vec();
    let n = order as i32;
    let cut = |p: &Poly| p.map_coeffs(|c| c.truncate_h(n));
    let mut out = Vec::new();
    for (a, b) in pairs(&names) {
        let rhs = alg.table().bracket_expr(&a, &b);
        let nf = alg.eval_element(&rhs, order)?;
        let direct = formal.eval(&rhs)?;
        let mut residual = None;
        'mono: for f in monomials(ORACLE_DEGREE) {
            let mut abstract_side = Poly::default();
            for (w, c) in nf.terms() {
                let mut g = f.clone();
                for &i in w.iter().rev() {
                    g = formal.op(&names[i as usize]).apply(&g);
                }
                if g.terms.values().any(|c| c.min_h_power().is_some_and(|k| k < 0)) {
                    residual = Some(format!("word {:?} has a pole in the step", w.as_slice()));
                    break 'mono;
                }
                let series = (0..order).fold(Coeff::zero(), |acc, k| {
                    &acc + &Coeff::monomial(k as i32, 0, c.coeff(k))
                });
                abstract_side = abstract_side.plus(&g.scale(&series));
            }
            let d = cut(&direct.apply(&f)).minus(&cut(&abstract_side));
            if !d.is_zero() {
                residual = Some(format!("on {}: {}", f.render("h"), d.render(formal.ctx.step_name())));
                break;
            }
        }
        let _ = def;
        out.push(Finding::from_residual("realization_oracle", format!("{a},{b}"), residual));
    }
    Ok(out)
}

/// Value at `h = 0` of the polynomial through `(h_i, y_i)`.
fn extrapolate(points: &[(Rational, Rational)]) -> Rational {
    let mut p: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
    let n = p.len();
    for width in 1..n {
        for i in 0..n - width {
            let (hi, hj) = (&points[i].0, &points[i + width].0);
            p[i] = (hi * &p[i + 1] - hj * &p[i]) / (hi - hj);
        }
    }
    p[0].clone()
}

fn limit_of(samples: &[(Rational, Poly)], count: usize) -> Option<Poly> {
    let mut keys: Vec<(u32, u32)> = samples[..count].iter().flat_map(|(_, p)| p.terms.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    let mut out = Poly::default();
    for k in keys {
        let pts = samples[..count]
            .iter()
            .map(|(h, p)| Some((h.clone(), p.terms.get(&k).map_or(Some(Rational::zero()), |c| c.as_constant())?)))
            .collect::<Option<Vec<_>>>()?;
        out.add(k.0, k.1, Coeff::constant(extrapolate(&pts)));
    }
    Some(out)
}

/// The `h^0` part of `op` equals `want` on every test monomial.
fn limit_matches(op: &Operator, want: &Operator) -> bool {
    monomials(LIMIT_DEGREE).all(|f| {
        let y = op.apply(&f);
        !y.terms.values().any(|c| c.min_h_power().is_some_and(|k| k < 0)) && y.map_coeffs(|c| c.h_part(0)) == want.apply(&f)
    })
}

/// Degree-zero part in the step against the reference realization, once
/// by formal expansion and once by exact extrapolation from `h = 1/i`.
/// A printed operator with the wrong limit goes through the erratum search.
fn continuum(
    catalog: &Catalog,
    id: &str,
    def: &RealizationDef,
    formal: &Realized,
    s: &Sample,
) -> Result<Vec<Finding>, OpError> {
    let Some(c) = &def.continuum else {
        return Ok(Vec::new());
    };
    let reference = realize(catalog, &c.reference, Param::Formal, Param::Formal)?;
    let ref_sample = realize(catalog, &c.reference, Param::Value(Rational::zero()), Param::Value(s.m.clone()))?;
    let specialised: Vec<(Rational, Context)> = (1..=EXTRAPOLATION_POINTS + 1)
        .map(|i| {
            let h = Rational::new(1.into(), i.into());
            let ctx = formal.ctx.specialise(&h, &s.m);
            (h, ctx)
        })
        .collect();
    let mut out = Vec::new();
    for g in &formal.generators {
        let rg = c.rename.get(g).unwrap_or(g);
        let mut residual = None;
        for f in monomials(LIMIT_DEGREE) {
            let y = formal.op(g).apply(&f);
            if y.terms.values().any(|c| c.min_h_power().is_some_and(|k| k < 0)) {
                residual = Some(format!("pole in the step on {}", f.render("h")));
                break;
            }
            let want = reference.op(rg).apply(&f);
            let formal_limit = y.map_coeffs(|c| c.h_part(0));
            if formal_limit != want {
                residual = Some(format!(
                    "formal limit on {}: {} vs {}",
                    f.render("h"),
                    formal_limit.render("h"),
                    want.render("h")
                ));
                break;
            }
            let values: Vec<(Rational, Poly)> = specialised
                .iter()
                .map(|(h, ctx)| (h.clone(), ctx.bindings[g].apply(&f)))
                .collect();
            let k = EXTRAPOLATION_POINTS as usize;
            let (l1, l2) = (limit_of(&values, k), limit_of(&values, k + 1));
            let want = ref_sample.op(rg).apply(&f);
            if l1.is_none() || l1 != l2 || l1.as_ref() != Some(&want) {
                residual = Some(format!("extrapolated limit on {} disagrees", f.render("h")));
                break;
            }
        }
        let subject = format!("{g}->{rg}");
        match residual {
            Some(r) if r.starts_with("formal limit") && def.operators.contains_key(g) => {
                let want = reference.op(rg);
                let targets = vec![(format!("{id} operator {g}"), fold(&def.operators[g]))];
                let fix = search(&targets, |_, e| formal.ctx.eval(e).is_ok_and(|op| limit_matches(&op, want)));
                out.push(Finding::erratum("continuum_limit", subject, r).with_note(erratum_note(fix)));
            }
            r => out.push(Finding::from_residual("continuum_limit", subject, r)),
        }
    }
    Ok(out)
}

/// Each listed realization of the Casimir against its printed operator.
pub fn casimir_suite(catalog: &Catalog, id: &str, samples: &[Sample]) -> Result<Vec<Finding>, OpError> {
    let c = catalog.casimir(id)?;
    let mut out = Vec::new();
    for (real_id, expected) in &c.realized {
        let def = catalog.realization(real_id)?;
        let ev = Evaluated::new(catalog, real_id, def, &def.operators, samples)?;
        let o = check_identity(
            &ev,
            |r| Ok(r.eval(&c.expr)?.sub(&r.ctx.eval(expected)?)),
            |r, f| Ok(apply_expr(&r.ctx, &c.expr, f)?.minus(&apply_expr(&r.ctx, expected, f)?)),
        )?;
        if let Some(d) = o.disagreement {
            out.push(Finding::fail("casimir_routes", real_id.clone(), d));
        }
        out.push(match o.residual {
            None => Finding::pass("casimir", real_id.clone()),
            Some(res) => {
                let targets = vec![(format!("{id} realized under {real_id}"), fold(expected))];
                let fix = search(&targets, |_, e| {
                    vanishes(&ev, |r| Ok(r.eval(&c.expr)?.sub(&r.ctx.eval(e)?)))
                });
                Finding::erratum("casimir", real_id.clone(), res).with_note(erratum_note(fix))
            }
        });
    }
    Ok(out)
}

/// `[E, O] - Λ_O E = 0` for every generator `O` of the table's
/// realization, with `E` the realized Casimir.
pub fn symmetry_suite(catalog: &Catalog, id: &str, samples: &[Sample]) -> Result<Vec<Finding>, OpError> {
    let s = catalog.symmetry(id)?;
    let cas = catalog.casimir(&s.casimir)?;
    let def = catalog.realization(&s.realization)?;
    let ev = Evaluated::new(catalog, &s.realization, def, &def.operators, samples)?;
    let mut out = Vec::new();
    let canon = |r: &Realized, g: &str, lambda: &Expr| -> Result<Operator, OpError> {
        let e = r.eval(&cas.expr)?;
        Ok(e.commutator(r.op(g)).sub(&r.ctx.eval(lambda)?.mul(&e)))
    };
    for g in &ev.formal.generators {
        let Some(lambda) = s.lambdas.get(g) else {
            out.push(Finding::fail("symmetry", g.clone(), "no entry in the table"));
            continue;
        };
        let o = check_identity(
            &ev,
            |r| canon(r, g, lambda),
            |r, f| {
                let ef = apply_expr(&r.ctx, &cas.expr, f)?;
                let eof = apply_expr(&r.ctx, &cas.expr, &r.op(g).apply(f))?;
                Ok(eof.minus(&r.op(g).apply(&ef)).minus(&apply_expr(&r.ctx, lambda, &ef)?))
            },
        )?;
        if let Some(d) = o.disagreement {
            out.push(Finding::fail("symmetry_routes", g.clone(), d));
        }
        out.push(match o.residual {
            None => Finding::pass("symmetry", g.clone()),
            Some(res) => {
                let targets = vec![(format!("{id} entry {g}"), fold(lambda))];
                let fix = search(&targets, |_, e| vanishes(&ev, |r| canon(r, g, e)));
                Finding::erratum("symmetry", g.clone(), res).with_note(erratum_note(fix))
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    fn corrupted(id: &str, from: &str, to: &str) -> Catalog {
        let cat = Catalog::shipped().unwrap();
        let file = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("catalog/{id}.toml"));
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.contains(from));
        cat.with_document(&file, &text.replacen(from, to, 1)).unwrap()
    }

    fn samples() -> Vec<Sample> {
        [(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(1, 1)), (rat(1, 5), rat(3, 2))]
            .into_iter()
            .map(|(step, m)| Sample { step, m })
            .collect()
    }

    #[test]
    fn corrupted_constant_is_flagged_with_its_fix() {
        let cat = corrupted("real_gd", "- 1/4*t*(1 - 3", "- 1/2*t*(1 - 3");
        let f = realization_suite(&cat, "real_gd", &samples(), 2).unwrap();
        let bad: Vec<_> = f.iter().filter(|x| x.status == crate::report::Status::ErratumSuspected).collect();
        assert!(!bad.is_empty());
        let note = bad[0].note.as_deref().unwrap();
        assert!(note.contains("operator C replace 1/2 by 1/4"), "{note}");
        assert!(bad[0].residual.is_some());
    }

    #[test]
    fn corrupted_lambda_is_flagged() {
        let cat = corrupted("sym_lc", "2*t*Tt^-1", "3*t*Tt^-1");
        let f = symmetry_suite(&cat, "sym_lc", &samples()).unwrap();
        let bad: Vec<_> = f.iter().filter(|x| x.status == crate::report::Status::ErratumSuspected).collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].note.as_deref().unwrap().contains("replace 3 by 2"));
    }

    #[test]
    fn extrapolation_is_exact_on_polynomials() {
        let pts: Vec<_> = (1..6)
            .map(|i| {
                let h = rat(1, i);
                let y = rat(3, 1) + &h * rat(2, 1) - &h * &h;
                (h, y)
            })
            .collect();
        assert_eq!(extrapolate(&pts), rat(3, 1));
    }
}
