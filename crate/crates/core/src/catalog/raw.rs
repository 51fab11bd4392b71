//! TOML layer: span-carrying serde structs and their conversion to typed
//! definitions.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::expr::{parse_with_macros, Expr};
use crate::hopf::{ContractionSpec, EmbeddingSpec, RMatrixSpec, Scaling, TwistMap};
use crate::ncalg::{EngineLimits, Relation};
use crate::qseries::{parse_rational, render_rational};

use super::*;

pub const ENV_CATALOG: &str = "TWISTVERIFY_CATALOG";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc<D> {
    id: String,
    kind: Kind,
    paper_label: String,
    source_text: String,
    definition: D,
}

#[derive(Deserialize)]
struct Probe {
    id: String,
    kind: Kind,
}

type Pairs = Vec<Spanned<Vec<String>>>;

fn sp<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPresentation {
    parameter: String,
    generators: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    macros: BTreeMap<String, Spanned<String>>,
    brackets: Pairs,
    coproducts: Pairs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grouplike: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rmatrix: Option<RawRMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classical_limit: Option<RawClassicalLimit>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRMatrix {
    factors: Vec<Spanned<String>>,
    borel: Vec<String>,
    classical: Spanned<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassicalLimit {
    target: String,
    rename: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTwist {
    source: String,
    target: String,
    assignments: Pairs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse: Option<Pairs>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    new: String,
    old: String,
    factor: String,
    eps_power: i32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameterRule {
    factor: String,
    eps_power: i32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContraction {
    source: String,
    target: String,
    parameter: RawParameterRule,
    scalings: Vec<Spanned<RawScaling>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedding {
    sub: String,
    big: String,
    parameter: Spanned<String>,
    images: Pairs,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContinuum {
    reference: String,
    #[serde(default)]
    rename: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDerivation {
    map: String,
    realization: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRealization {
    presentation: String,
    lattice: Lattice,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    macros: BTreeMap<String, Spanned<String>>,
    operators: Pairs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    continuum: Option<RawContinuum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derived_from: Option<RawDerivation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCasimir {
    presentation: String,
    expr: Spanned<String>,
    #[serde(default)]
    realized: Pairs,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymmetry {
    realization: String,
    casimir: String,
    lambdas: Pairs,
}

/// Reads `id` and `kind` only.
pub(super) fn probe(file: &Path, text: &str) -> Result<(String, Kind), CatalogError> {
    let p: Probe = toml::from_str(text).map_err(|e| toml_error(file, text, &e))?;
    Ok((p.id, p.kind))
}

fn toml_error(file: &Path, text: &str, e: &toml::de::Error) -> CatalogError {
    CatalogError::ValidationFailed {
        file: file.to_path_buf(),
        line: e.span().map(|s| line_at(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parsing context for one document.
struct Ctx<'a> {
    file: &'a Path,
    text: &'a str,
    lines: BTreeMap<String, usize>,
}

impl Ctx<'_> {
    fn line<T>(&self, s: &Spanned<T>) -> usize {
        line_at(self.text, s.span().start)
    }

    fn fail(&self, line: usize, message: impl Into<String>) -> CatalogError {
        CatalogError::ValidationFailed {
            file: self.file.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn mark(&mut self, item: String, line: usize) {
        self.lines.entry(item).or_insert(line);
    }

    fn expr(
        &mut self,
        item: String,
        s: &Spanned<String>,
        macros: &BTreeMap<String, Expr>,
        allowed: &BTreeSet<String>,
    ) -> Result<Expr, CatalogError> {
        let line = self.line(s);
        self.expr_at(item, s.get_ref(), line, macros, allowed)
    }

    fn expr_at(
        &mut self,
        item: String,
        src: &str,
        line: usize,
        macros: &BTreeMap<String, Expr>,
        allowed: &BTreeSet<String>,
    ) -> Result<Expr, CatalogError> {
        let e = parse_with_macros(src, macros).map_err(|err| self.fail(line, format!("{item}: {err}")))?;
        if let Some(bad) = e.symbols().into_iter().find(|s| !allowed.contains(s)) {
            return Err(self.fail(line, format!("{item}: unknown symbol `{bad}`")));
        }
        self.mark(item, line);
        Ok(e)
    }

    fn pair<'s>(&self, p: &'s Spanned<Vec<String>>, n: usize, what: &str) -> Result<&'s [String], CatalogError> {
        let v = p.get_ref();
        if v.len() != n {
            return Err(self.fail(self.line(p), format!("{what} must have {n} entries, found {}", v.len())));
        }
        Ok(v)
    }

    fn macros(
        &mut self,
        raw: &BTreeMap<String, Spanned<String>>,
        base: BTreeMap<String, Expr>,
        allowed: &BTreeSet<String>,
    ) -> Result<BTreeMap<String, Expr>, CatalogError> {
        let mut all = base;
        let mut own = BTreeMap::new();
        for (k, v) in raw {
            let e = self.expr(format!("macro {k}"), v, &all, allowed)?;
            all.insert(k.clone(), e.clone());
            own.insert(k.clone(), e);
        }
        Ok(own)
    }
}

fn doc<D: DeserializeOwned>(file: &Path, text: &str) -> Result<RawDoc<D>, CatalogError> {
    toml::from_str(text).map_err(|e| toml_error(file, text, &e))
}

fn set(items: impl IntoIterator<Item = impl Into<String>>) -> BTreeSet<String> {
    items.into_iter().map(Into::into).collect()
}

pub(super) fn parse_entry(file: &Path, text: &str, cat: &Catalog) -> Result<CatalogEntry, CatalogError> {
    let (_, kind) = probe(file, text)?;
    let mut cx = Ctx {
        file,
        text,
        lines: BTreeMap::new(),
    };
    macro_rules! go {
        ($raw:ty, $f:ident, $variant:ident) => {{
            let d: RawDoc<$raw> = doc(file, text)?;
            let def = $f(&mut cx, &d.id, &d.definition, cat)?;
            (d.id, d.paper_label, d.source_text, Definition::$variant(def))
        }};
    }
    let (id, paper_label, source_text, definition) = match kind {
        Kind::Presentation => go!(RawPresentation, presentation, Presentation),
        Kind::Twist => go!(RawTwist, twist, Twist),
        Kind::Contraction => go!(RawContraction, contraction, Contraction),
        Kind::Embedding => go!(RawEmbedding, embedding, Embedding),
        Kind::Realization => go!(RawRealization, realization, Realization),
        Kind::Casimir => go!(RawCasimir, casimir, Casimir),
        Kind::SymmetryTable => go!(RawSymmetry, symmetry, SymmetryTable),
    };
    Ok(CatalogEntry {
        id,
        kind,
        paper_label,
        source_text,
        definition,
        file: file.to_path_buf(),
        lines: cx.lines,
    })
}

fn presentation(cx: &mut Ctx, id: &str, r: &RawPresentation, _: &Catalog) -> Result<PresentationDef, CatalogError> {
    let gens = set(&r.generators);
    let mut allowed = gens.clone();
    allowed.insert(r.parameter.clone());
    let macros = cx.macros(&r.macros, BTreeMap::new(), &allowed)?;

    let mut brackets = Vec::new();
    for b in &r.brackets {
        let v = cx.pair(b, 3, "bracket")?;
        for g in &v[..2] {
            if !gens.contains(g) {
                return Err(cx.fail(cx.line(b), format!("bracket of unknown generator `{g}`")));
            }
        }
        let line = cx.line(b);
        let rhs = cx.expr_at(format!("bracket {},{}", v[0], v[1]), &v[2], line, &macros, &allowed)?;
        brackets.push(Relation {
            left: v[0].clone(),
            right: v[1].clone(),
            rhs,
        });
    }

    let mut coproducts = BTreeMap::new();
    for c in &r.coproducts {
        let v = cx.pair(c, 2, "coproduct")?;
        let line = cx.line(c);
        if !gens.contains(&v[0]) {
            return Err(cx.fail(line, format!("coproduct of unknown generator `{}`", v[0])));
        }
        let e = cx.expr_at(format!("coproduct {}", v[0]), &v[1], line, &macros, &allowed)?;
        if coproducts.insert(v[0].clone(), e).is_some() {
            return Err(cx.fail(line, format!("coproduct of `{}` given twice", v[0])));
        }
    }

    let grouplike = match &r.grouplike {
        Some(s) => Some(cx.expr("grouplike".into(), s, &macros, &allowed)?),
        None => None,
    };

    let rmatrix = match &r.rmatrix {
        Some(rm) => {
            let mut factors = Vec::new();
            for (i, f) in rm.factors.iter().enumerate() {
                factors.push(cx.expr(format!("rmatrix factor {i}"), f, &macros, &allowed)?);
            }
            if let Some(g) = rm.borel.iter().find(|g| !gens.contains(*g)) {
                return Err(cx.fail(cx.line(&rm.classical), format!("unknown Borel generator `{g}`")));
            }
            Some(RMatrixSpec {
                factors,
                borel: rm.borel.clone(),
                classical: cx.expr("rmatrix classical".into(), &rm.classical, &macros, &allowed)?,
            })
        }
        None => None,
    };

    let classical_limit = r.classical_limit.as_ref().map(|c| ClassicalLimit {
        target: c.target.clone(),
        rename: c.rename.clone(),
    });

    let def = PresentationDef {
        parameter: r.parameter.clone(),
        generators: r.generators.clone(),
        macros,
        brackets,
        coproducts,
        grouplike,
        rmatrix,
        classical_limit,
    };
    def.build(id, EngineLimits::default())
        .map_err(|e| cx.fail(1, format!("{id}: {e}")))?;
    Ok(def)
}

fn twist(cx: &mut Ctx, id: &str, r: &RawTwist, cat: &Catalog) -> Result<TwistDef, CatalogError> {
    let src = cat.presentation(&r.source).map_err(|_| cx.fail(1, format!("unknown source `{}`", r.source)))?;
    let tgt = cat.presentation(&r.target).map_err(|_| cx.fail(1, format!("unknown target `{}`", r.target)))?;
    let src_syms = presentation_symbols(src);
    let mut both = src_syms.clone();
    both.extend(presentation_symbols(tgt));
    let mut both_macros = src.macros.clone();
    both_macros.extend(tgt.macros.clone());

    let assignments = bindings(cx, "assignment", &r.assignments, &src.macros, &src_syms, &tgt.generators)?;
    let inverse = match &r.inverse {
        Some(inv) => Some(bindings(cx, "inverse", inv, &both_macros, &both, &src.generators)?),
        None => None,
    };
    Ok(TwistDef {
        source: r.source.clone(),
        target: r.target.clone(),
        map: TwistMap {
            id: id.to_string(),
            assignments,
            inverse,
        },
    })
}

/// `[[generator, expression], ...]` covering exactly `cover`.
fn bindings(
    cx: &mut Ctx,
    what: &str,
    raw: &Pairs,
    macros: &BTreeMap<String, Expr>,
    allowed: &BTreeSet<String>,
    cover: &[String],
) -> Result<BTreeMap<String, Expr>, CatalogError> {
    let mut out = BTreeMap::new();
    for p in raw {
        let v = cx.pair(p, 2, what)?;
        let line = cx.line(p);
        if !cover.contains(&v[0]) {
            return Err(cx.fail(line, format!("{what} for unexpected generator `{}`", v[0])));
        }
        let e = cx.expr_at(format!("{what} {}", v[0]), &v[1], line, macros, allowed)?;
        if out.insert(v[0].clone(), e).is_some() {
            return Err(cx.fail(line, format!("{what} for `{}` given twice", v[0])));
        }
    }
    if let Some(g) = cover.iter().find(|g| !out.contains_key(*g)) {
        let line = raw.first().map(|p| cx.line(p)).unwrap_or(1);
        return Err(cx.fail(line, format!("no {what} for generator `{g}`")));
    }
    Ok(out)
}

fn contraction(cx: &mut Ctx, id: &str, r: &RawContraction, cat: &Catalog) -> Result<ContractionDef, CatalogError> {
    let src = cat.presentation(&r.source).map_err(|_| cx.fail(1, format!("unknown source `{}`", r.source)))?;
    let tgt = cat.presentation(&r.target).map_err(|_| cx.fail(1, format!("unknown target `{}`", r.target)))?;
    let rational = |cx: &Ctx, s: &str, line| parse_rational(s).map_err(|e| cx.fail(line, format!("`{s}`: {e}")));
    let mut scalings = Vec::new();
    for s in &r.scalings {
        let line = cx.line(s);
        let v = s.get_ref();
        if !src.generators.contains(&v.old) || !tgt.generators.contains(&v.new) {
            return Err(cx.fail(line, format!("scaling `{}` <- `{}` names unknown generators", v.new, v.old)));
        }
        cx.mark(format!("scaling {}", v.new), line);
        scalings.push(Scaling {
            new: v.new.clone(),
            old: v.old.clone(),
            factor: rational(cx, &v.factor, line)?,
            eps_power: v.eps_power,
        });
    }
    for g in &src.generators {
        if !scalings.iter().any(|s| &s.old == g) {
            return Err(cx.fail(1, format!("no scaling for `{g}`")));
        }
    }
    Ok(ContractionDef {
        source: r.source.clone(),
        target: r.target.clone(),
        spec: ContractionSpec {
            id: id.to_string(),
            scalings,
            parameter_factor: rational(cx, &r.parameter.factor, 1)?,
            parameter_eps_power: r.parameter.eps_power,
        },
    })
}

fn embedding(cx: &mut Ctx, id: &str, r: &RawEmbedding, cat: &Catalog) -> Result<EmbeddingDef, CatalogError> {
    let sub = cat.presentation(&r.sub).map_err(|_| cx.fail(1, format!("unknown sub `{}`", r.sub)))?;
    let big = cat.presentation(&r.big).map_err(|_| cx.fail(1, format!("unknown big `{}`", r.big)))?;
    let allowed = presentation_symbols(big);
    let images = bindings(cx, "image", &r.images, &big.macros, &allowed, &sub.generators)?;
    let parameter = cx.expr("parameter".into(), &r.parameter, &BTreeMap::new(), &set([big.parameter.clone()]))?;
    Ok(EmbeddingDef {
        sub: r.sub.clone(),
        big: r.big.clone(),
        spec: EmbeddingSpec {
            id: id.to_string(),
            images,
            parameter,
        },
    })
}

fn realization(cx: &mut Ctx, _: &str, r: &RawRealization, cat: &Catalog) -> Result<RealizationDef, CatalogError> {
    let p = cat
        .presentation(&r.presentation)
        .map_err(|_| cx.fail(1, format!("unknown presentation `{}`", r.presentation)))?;
    let allowed = set(OPERATOR_SYMBOLS);
    let macros = cx.macros(&r.macros, BTreeMap::new(), &allowed)?;
    let mut all = operator_macros();
    all.extend(macros.clone());
    let operators = bindings(cx, "operator", &r.operators, &all, &allowed, &p.generators)?;
    Ok(RealizationDef {
        presentation: r.presentation.clone(),
        lattice: r.lattice,
        macros,
        operators,
        continuum: r.continuum.as_ref().map(|c| Continuum {
            reference: c.reference.clone(),
            rename: c.rename.clone(),
        }),
        derived_from: r.derived_from.as_ref().map(|d| Derivation {
            map: d.map.clone(),
            realization: d.realization.clone(),
        }),
    })
}

fn casimir(cx: &mut Ctx, _: &str, r: &RawCasimir, cat: &Catalog) -> Result<CasimirDef, CatalogError> {
    let p = cat
        .presentation(&r.presentation)
        .map_err(|_| cx.fail(1, format!("unknown presentation `{}`", r.presentation)))?;
    let expr = cx.expr("expr".into(), &r.expr, &p.macros, &presentation_symbols(p))?;
    let names: Vec<String> = cat.list(Some(Kind::Realization)).into_iter().map(String::from).collect();
    let mut realized = BTreeMap::new();
    for v in &r.realized {
        let pair = cx.pair(v, 2, "realized")?;
        let line = cx.line(v);
        if !names.contains(&pair[0]) {
            return Err(cx.fail(line, format!("unknown realization `{}`", pair[0])));
        }
        let e = cx.expr_at(
            format!("realized {}", pair[0]),
            &pair[1],
            line,
            &operator_macros(),
            &set(OPERATOR_SYMBOLS),
        )?;
        realized.insert(pair[0].clone(), e);
    }
    Ok(CasimirDef {
        presentation: r.presentation.clone(),
        expr,
        realized,
    })
}

fn symmetry(cx: &mut Ctx, _: &str, r: &RawSymmetry, cat: &Catalog) -> Result<SymmetryDef, CatalogError> {
    let real = cat
        .realization(&r.realization)
        .map_err(|_| cx.fail(1, format!("unknown realization `{}`", r.realization)))?;
    cat.casimir(&r.casimir)
        .map_err(|_| cx.fail(1, format!("unknown casimir `{}`", r.casimir)))?;
    let gens: Vec<String> = real.operators.keys().cloned().collect();
    let mut macros = operator_macros();
    macros.extend(real.macros.clone());
    let lambdas = bindings(cx, "lambda", &r.lambdas, &macros, &set(OPERATOR_SYMBOLS), &gens)?;
    Ok(SymmetryDef {
        realization: r.realization.clone(),
        casimir: r.casimir.clone(),
        lambdas,
    })
}

/// Cross-entry references that cannot be checked while parsing in phase
/// order.
pub(super) fn check_references(e: &CatalogEntry, cat: &Catalog) -> Result<(), CatalogError> {
    let fail = |message: String| CatalogError::ValidationFailed {
        file: e.file.clone(),
        line: 1,
        message,
    };
    match &e.definition {
        Definition::Presentation(p) => {
            if let Some(c) = &p.classical_limit {
                let t = cat
                    .presentation(&c.target)
                    .map_err(|_| fail(format!("classical limit target `{}` is not a presentation", c.target)))?;
                for g in &p.generators {
                    match c.rename.get(g) {
                        Some(n) if t.generators.contains(n) => {}
                        _ => return Err(fail(format!("classical limit rename of `{g}` missing or unknown"))),
                    }
                }
            }
        }
        Definition::Realization(r) => {
            if let Some(c) = &r.continuum {
                let reference = cat
                    .realization(&c.reference)
                    .map_err(|_| fail(format!("continuum reference `{}` is not a realization", c.reference)))?;
                for g in r.operators.keys() {
                    let n = c.rename.get(g).unwrap_or(g);
                    if !reference.operators.contains_key(n) {
                        return Err(fail(format!("continuum reference lacks `{n}`")));
                    }
                }
            }
            if let Some(d) = &r.derived_from {
                let t = cat
                    .twist(&d.map)
                    .map_err(|_| fail(format!("`{}` is not a twist map", d.map)))?;
                let src = cat
                    .realization(&d.realization)
                    .map_err(|_| fail(format!("`{}` is not a realization", d.realization)))?;
                if t.source != src.presentation || t.target != r.presentation {
                    return Err(fail(format!(
                        "map `{}` goes {} -> {}, not {} -> {}",
                        d.map, t.source, t.target, src.presentation, r.presentation
                    )));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn pairs(m: &BTreeMap<String, Expr>) -> Pairs {
    m.iter().map(|(k, v)| sp(vec![k.clone(), v.to_string()])).collect()
}

fn strings(m: &BTreeMap<String, Expr>) -> BTreeMap<String, Spanned<String>> {
    m.iter().map(|(k, v)| (k.clone(), sp(v.to_string()))).collect()
}

pub(super) fn serialize(e: &CatalogEntry) -> String {
    fn out<D: Serialize>(e: &CatalogEntry, definition: D) -> String {
        toml::to_string(&RawDoc {
            id: e.id.clone(),
            kind: e.kind,
            paper_label: e.paper_label.clone(),
            source_text: e.source_text.clone(),
            definition,
        })
        .expect("catalog entries serialize")
    }
    match &e.definition {
        Definition::Presentation(p) => out(
            e,
            RawPresentation {
                parameter: p.parameter.clone(),
                generators: p.generators.clone(),
                macros: strings(&p.macros),
                brackets: p
                    .brackets
                    .iter()
                    .map(|r| sp(vec![r.left.clone(), r.right.clone(), r.rhs.to_string()]))
                    .collect(),
                coproducts: pairs(&p.coproducts),
                grouplike: p.grouplike.as_ref().map(|g| sp(g.to_string())),
                rmatrix: p.rmatrix.as_ref().map(|r| RawRMatrix {
                    factors: r.factors.iter().map(|f| sp(f.to_string())).collect(),
                    borel: r.borel.clone(),
                    classical: sp(r.classical.to_string()),
                }),
                classical_limit: p.classical_limit.as_ref().map(|c| RawClassicalLimit {
                    target: c.target.clone(),
                    rename: c.rename.clone(),
                }),
            },
        ),
        Definition::Twist(t) => out(
            e,
            RawTwist {
                source: t.source.clone(),
                target: t.target.clone(),
                assignments: pairs(&t.map.assignments),
                inverse: t.map.inverse.as_ref().map(pairs),
            },
        ),
        Definition::Contraction(c) => out(
            e,
            RawContraction {
                source: c.source.clone(),
                target: c.target.clone(),
                parameter: RawParameterRule {
                    factor: render_rational(&c.spec.parameter_factor),
                    eps_power: c.spec.parameter_eps_power,
                },
                scalings: c
                    .spec
                    .scalings
                    .iter()
                    .map(|s| {
                        sp(RawScaling {
                            new: s.new.clone(),
                            old: s.old.clone(),
                            factor: render_rational(&s.factor),
                            eps_power: s.eps_power,
                        })
                    })
                    .collect(),
            },
        ),
        Definition::Embedding(m) => out(
            e,
            RawEmbedding {
                sub: m.sub.clone(),
                big: m.big.clone(),
                parameter: sp(m.spec.parameter.to_string()),
                images: pairs(&m.spec.images),
            },
        ),
        Definition::Realization(r) => out(
            e,
            RawRealization {
                presentation: r.presentation.clone(),
                lattice: r.lattice,
                macros: strings(&r.macros),
                operators: pairs(&r.operators),
                continuum: r.continuum.as_ref().map(|c| RawContinuum {
                    reference: c.reference.clone(),
                    rename: c.rename.clone(),
                }),
                derived_from: r.derived_from.as_ref().map(|d| RawDerivation {
                    map: d.map.clone(),
                    realization: d.realization.clone(),
                }),
            },
        ),
        Definition::Casimir(c) => out(
            e,
            RawCasimir {
                presentation: c.presentation.clone(),
                expr: sp(c.expr.to_string()),
                realized: pairs(&c.realized),
            },
        ),
        Definition::SymmetryTable(s) => out(
            e,
            RawSymmetry {
                realization: s.realization.clone(),
                casimir: s.casimir.clone(),
                lambdas: pairs(&s.lambdas),
            },
        ),
    }
}
