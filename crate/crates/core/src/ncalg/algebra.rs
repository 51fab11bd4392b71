use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::expr::Expr;
use crate::qseries::SeriesScalar;

use super::element::{concat, is_ordered, NCElement, TensorElement, Word};
use super::eval::{Evaluator, FreeAlgebra, Multiplier, Value};
use super::AlgebraError;

pub const DEFAULT_FUEL: usize = 1_000_000;
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// One commutation relation `[left, right] = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub left: String,
    pub right: String,
    pub rhs: Expr,
}

/// Ordered generator list plus commutation relations; pairs not listed
/// commute.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationTable {
    pub name: String,
    pub generators: Vec<String>,
    pub parameter: String,
    pub relations: Vec<Relation>,
}

impl RelationTable {
    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.generators.iter().position(|g| g == name).map(|i| i as u8)
    }

    /// RHS of `[a, b]` as an expression, using antisymmetry when only
    /// `[b, a]` is listed.
    pub fn bracket_expr(&self, a: &str, b: &str) -> Expr {
        for r in &self.relations {
            if r.left == a && r.right == b {
                return r.rhs.clone();
            }
            if r.left == b && r.right == a {
                return Expr::Neg(Box::new(r.rhs.clone()));
            }
        }
        Expr::Num(num::Zero::zero())
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.generators.is_empty() || self.generators.len() > 64 {
            return Err(AlgebraError::Invalid(format!(
                "{}: generator count {} out of range",
                self.name,
                self.generators.len()
            )));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].contains(g) {
                return Err(AlgebraError::Invalid(format!("{}: duplicate generator {g}", self.name)));
            }
            if g == &self.parameter {
                return Err(AlgebraError::Invalid(format!(
                    "{}: generator {g} shadows the parameter",
                    self.name
                )));
            }
        }
        let mut seen = BTreeMap::new();
        for r in &self.relations {
            let (Some(a), Some(b)) = (self.index_of(&r.left), self.index_of(&r.right)) else {
                return Err(AlgebraError::UnknownGenerator(format!("{} / {}", r.left, r.right)));
            };
            if a == b {
                return Err(AlgebraError::Invalid(format!("{}: self-bracket of {}", self.name, r.left)));
            }
            if seen.insert((a.min(b), a.max(b)), ()).is_some() {
                return Err(AlgebraError::Invalid(format!(
                    "{}: pair ({}, {}) listed twice",
                    self.name, r.left, r.right
                )));
            }
            for s in r.rhs.symbols() {
                if self.index_of(&s).is_none() && s != self.parameter {
                    return Err(AlgebraError::UnknownGenerator(s));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineLimits {
    pub fuel: usize,
    pub degree_cap: usize,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            fuel: DEFAULT_FUEL,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

/// Swap rules at one truncation order: for a descending pair `(b, a)`,
/// `b a = a b + rule[(b, a)]`, with the correction as a raw word sum.
type SwapRules = HashMap<(u8, u8), Vec<(Word, SeriesScalar)>>;

/// A presentation made executable: PBW rewriting with memoised normal forms.
pub struct Algebra {
    table: RelationTable,
    limits: EngineLimits,
    rules: RwLock<BTreeMap<usize, Arc<SwapRules>>>,
    memo: RwLock<HashMap<(Word, usize), NCElement>>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra").field("name", &self.table.name).finish()
    }
}

impl Algebra {
    pub fn new(table: RelationTable, limits: EngineLimits) -> Result<Self, AlgebraError> {
        table.validate()?;
        Ok(Algebra {
            table,
            limits,
            rules: RwLock::new(BTreeMap::new()),
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn table(&self) -> &RelationTable {
        &self.table
    }

    pub fn names(&self) -> &[String] {
        &self.table.generators
    }

    pub fn parameter(&self) -> &str {
        &self.table.parameter
    }

    pub fn limits(&self) -> EngineLimits {
        self.limits
    }

    pub fn generator(&self, name: &str, order: usize) -> Result<NCElement, AlgebraError> {
        let i = self
            .table
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
        Ok(NCElement::generator(i, order))
    }

    fn rules_at(&self, order: usize) -> Result<Arc<SwapRules>, AlgebraError> {
        if let Some(r) = self.rules.read().unwrap().get(&order) {
            return Ok(r.clone());
        }
        let free = FreeAlgebra::new(&self.table.generators, &self.table.parameter, self.limits.degree_cap);
        let ev = Evaluator::new(&free);
        let mut rules = SwapRules::new();
        let n = self.table.generators.len();
        for hi in 0..n {
            for lo in 0..hi {
                let expr = self.table.bracket_expr(&self.table.generators[hi], &self.table.generators[lo]);
                if expr.is_zero() {
                    continue;
                }
                let rhs = match ev.eval(&expr, order)? {
                    Value::Scalar(s) => NCElement::scalar(s),
                    Value::Elem(e) => e,
                    Value::Tensor(_) => {
                        return Err(AlgebraError::TypeMismatch("tensor in a commutation relation".into()))
                    }
                };
                let terms: Vec<(Word, SeriesScalar)> = rhs.into_terms().into_iter().collect();
                if !terms.is_empty() {
                    rules.insert((hi as u8, lo as u8), terms);
                }
            }
        }
        let rules = Arc::new(rules);
        self.rules.write().unwrap().insert(order, rules.clone());
        Ok(rules)
    }

    /// Normal form of a single word, exact at `order`.
    pub fn normal_form_word(&self, word: &[u8], order: usize) -> Result<NCElement, AlgebraError> {
        let mut fuel = self.limits.fuel;
        self.nf(word, order, &mut fuel)
    }

    fn nf(&self, word: &[u8], order: usize, fuel: &mut usize) -> Result<NCElement, AlgebraError> {
        if word.len() > self.limits.degree_cap {
            return Err(AlgebraError::DegreeCapExceeded {
                degree: word.len(),
                cap: self.limits.degree_cap,
            });
        }
        if is_ordered(word) {
            return Ok(NCElement::monomial(Word::from_slice(word), SeriesScalar::one(order)));
        }
        let key = (Word::from_slice(word), order);
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        if *fuel == 0 {
            return Err(AlgebraError::FuelExhausted {
                limit: self.limits.fuel,
            });
        }
        *fuel -= 1;
        let i = word.windows(2).position(|p| p[0] > p[1]).unwrap();
        let (hi, lo) = (word[i], word[i + 1]);
        let mut swapped = Word::from_slice(word);
        swapped.swap(i, i + 1);
        let mut out = self.nf(&swapped, order, fuel)?;
        let rules = self.rules_at(order)?;
        if let Some(rule) = rules.get(&(hi, lo)) {
            for (w, c) in rule {
                let Some(v) = c.valuation() else { continue };
                if v > order {
                    continue;
                }
                let mut nw = Word::with_capacity(word.len() + w.len());
                nw.extend_from_slice(&word[..i]);
                nw.extend_from_slice(w);
                nw.extend_from_slice(&word[i + 2..]);
                let sub = self.nf(&nw, order - v, fuel)?;
                for (sw, sc) in sub.terms() {
                    out.add_term(sw.clone(), c.mul_padded(sc));
                }
            }
        }
        self.memo.write().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// PBW normal form of an arbitrary (raw) element.
    pub fn normal_order(&self, e: &NCElement) -> Result<NCElement, AlgebraError> {
        let order = e.order();
        let mut out = NCElement::zero(order);
        for (w, c) in e.terms() {
            let Some(v) = c.valuation() else { continue };
            let sub = self.normal_form_word(w, order - v)?;
            for (sw, sc) in sub.terms() {
                out.add_term(sw.clone(), c.mul_padded(sc));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, a: &NCElement, b: &NCElement) -> Result<NCElement, AlgebraError> {
        mul_with(self, a, b)
    }

    pub fn commutator(&self, a: &NCElement, b: &NCElement) -> Result<NCElement, AlgebraError> {
        Ok(self.mul(a, b)?.sub(&self.mul(b, a)?))
    }

    pub fn tensor_mul(&self, a: &TensorElement, b: &TensorElement) -> Result<TensorElement, AlgebraError> {
        tensor_mul_with(self, a, b)
    }

    /// `(1 + n)^{-1}` for nilpotent `n`.
    pub fn invert_one_plus(&self, n: &NCElement) -> Result<NCElement, AlgebraError> {
        let one = NCElement::one(n.order());
        super::eval::inverse_element(self, &one.add(n))
    }

    pub fn exp_element(&self, x: &NCElement) -> Result<NCElement, AlgebraError> {
        super::eval::exp_element(self, x)
    }

    pub fn log_one_plus(&self, n: &NCElement) -> Result<NCElement, AlgebraError> {
        let one = NCElement::one(n.order());
        super::eval::log_element(self, &one.add(n))
    }

    /// Evaluates an expression over the generators and parameter in the
    /// quotient algebra.
    pub fn eval_element(&self, e: &Expr, order: usize) -> Result<NCElement, AlgebraError> {
        Evaluator::new(self).eval(e, order)?.into_element()
    }
}

impl Multiplier for Algebra {
    fn names(&self) -> &[String] {
        &self.table.generators
    }

    fn parameter(&self) -> &str {
        &self.table.parameter
    }

    fn mul_words(&self, a: &[u8], b: &[u8], order: usize) -> Result<NCElement, AlgebraError> {
        self.normal_form_word(&concat(a, b), order)
    }
}

pub(crate) fn mul_with(m: &dyn Multiplier, a: &NCElement, b: &NCElement) -> Result<NCElement, AlgebraError> {
    let order = a.order();
    let mut out = NCElement::zero(order);
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            let c = ca * cb;
            let Some(v) = c.valuation() else { continue };
            let prod = m.mul_words(wa, wb, order - v)?;
            for (w, pc) in prod.terms() {
                out.add_term(w.clone(), c.mul_padded(pc));
            }
        }
    }
    Ok(out)
}

pub(crate) fn tensor_mul_with(
    m: &dyn Multiplier,
    a: &TensorElement,
    b: &TensorElement,
) -> Result<TensorElement, AlgebraError> {
    if a.arity() != b.arity() {
        return Err(AlgebraError::ArityMismatch {
            left: a.arity(),
            right: b.arity(),
        });
    }
    let order = a.order();
    let mut out = TensorElement::zero(a.arity(), order);
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            let c = ca * cb;
            let Some(v) = c.valuation() else { continue };
            let prec = order - v;
            let mut acc = TensorElement::one(0, prec);
            for (wa, wb) in ka.iter().zip(kb.iter()) {
                let slot = m.mul_words(wa, wb, prec)?;
                let mut next = TensorElement::zero(acc.arity() + 1, prec);
                for (k, x) in acc.terms() {
                    for (w, y) in slot.terms() {
                        let mut key = k.clone();
                        key.push(w.clone());
                        next.add_term(key, x * y);
                    }
                }
                acc = next;
            }
            for (k, x) in acc.terms() {
                out.add_term(k.clone(), c.mul_padded(x));
            }
        }
    }
    Ok(out)
}
