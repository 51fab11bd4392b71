use std::collections::BTreeMap;

use num::{One, Zero};
use smallvec::SmallVec;

use crate::qseries::{join_terms, render_rational, Rational, SeriesScalar};

/// Generator word; entries are PBW ranks.
pub type Word = SmallVec<[u8; 12]>;

pub fn is_ordered(w: &[u8]) -> bool {
    w.windows(2).all(|p| p[0] <= p[1])
}

pub fn concat(a: &[u8], b: &[u8]) -> Word {
    let mut w = Word::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

/// Renders a word with runs collapsed to powers, e.g. `J3*Jp^2`.
pub fn render_word(w: &[u8], names: &[String]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let name = &names[w[i] as usize];
        if j - i == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{name}^{}", j - i));
        }
        i = j;
    }
    parts.join("*")
}

pub(crate) fn render_coeff_times(c: &SeriesScalar, param: &str, body: &str) -> String {
    let nonzero: Vec<(usize, &Rational)> =
        c.coeffs().iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
    if nonzero.len() == 1 {
        let (k, r) = nonzero[0];
        let mono = match (k, body) {
            (0, "1") => String::new(),
            (0, b) => b.to_string(),
            (1, "1") => param.to_string(),
            (1, b) => format!("{param}*{b}"),
            (k, "1") => format!("{param}^{k}"),
            (k, b) => format!("{param}^{k}*{b}"),
        };
        if mono.is_empty() {
            return render_rational(r);
        }
        return crate::qseries::render_term(r, &mono);
    }
    if body == "1" {
        format!("({})", c.render(param))
    } else {
        format!("({})*{body}", c.render(param))
    }
}

/// Linear combination of words with series coefficients, all at one
/// truncation order. Within an algebra the words are PBW-ordered; the same
/// type also carries raw free-algebra sums before rewriting.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NCElement {
    order: usize,
    terms: BTreeMap<Word, SeriesScalar>,
}

impl NCElement {
    pub fn zero(order: usize) -> Self {
        NCElement {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(order: usize) -> Self {
        Self::scalar(SeriesScalar::one(order))
    }

    pub fn scalar(s: SeriesScalar) -> Self {
        let order = s.order();
        let mut e = Self::zero(order);
        e.add_term(Word::new(), s);
        e
    }

    pub fn monomial(word: Word, coeff: SeriesScalar) -> Self {
        let mut e = Self::zero(coeff.order());
        e.add_term(word, coeff);
        e
    }

    pub fn generator(index: u8, order: usize) -> Self {
        Self::monomial(smallvec::smallvec![index], SeriesScalar::one(order))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Word, SeriesScalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, SeriesScalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u8]) -> SeriesScalar {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| SeriesScalar::zero(self.order))
    }

    /// Coefficient of the empty word.
    pub fn constant_part(&self) -> SeriesScalar {
        self.coeff(&[])
    }

    pub fn add_term(&mut self, w: Word, c: SeriesScalar) {
        debug_assert_eq!(c.order(), self.order);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }

    pub fn neg(&self) -> Self {
        NCElement {
            order: self.order,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &SeriesScalar) -> Self {
        let mut out = Self::zero(self.order);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.order);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.scale(r));
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::zero(order);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.truncate(order));
        }
        out
    }

    /// Raises the recorded order without adding information; see
    /// `SeriesScalar::mul_padded`.
    pub fn pad(&self, order: usize) -> Self {
        let mut out = Self::zero(order);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.resize(order));
        }
        out
    }

    /// Substitutes `t -> c t` in every coefficient.
    pub fn rescale_parameter(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.order);
        for (w, s) in &self.terms {
            out.add_term(w.clone(), s.rescale_parameter(c));
        }
        out
    }

    /// Minimum valuation over all coefficients (None for zero).
    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(SeriesScalar::valuation).min()
    }

    /// Maximum valuation over the non-constant words; used to decide whether
    /// `self - constant` is nilpotent.
    pub fn nonconstant_min_valuation(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter(|(w, _)| !w.is_empty())
            .filter_map(|(_, c)| c.valuation())
            .min()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(|w| is_ordered(w))
    }

    /// Coefficient of `param^k` as a rational-coefficient map over words.
    pub fn degree_part(&self, k: usize) -> BTreeMap<Word, Rational> {
        self.terms
            .iter()
            .filter_map(|(w, c)| {
                let x = c.coeff(k);
                (!x.is_zero()).then(|| (w.clone(), x))
            })
            .collect()
    }

    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> Self {
        let mut out = Self::zero(self.order);
        for (w, c) in &self.terms {
            out.add_term(f(w), c.clone());
        }
        out
    }

    pub fn render(&self, names: &[String], param: &str) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| render_coeff_times(c, param, &render_word(w, names)))
            .collect();
        join_terms(&parts)
    }
}

impl std::fmt::Debug for NCElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..=u8::MAX).map(|i| format!("g{i}")).collect();
        write!(f, "NCElement[{}; O({})]", self.render(&names, "z"), self.order + 1)
    }
}

pub type TensorKey = SmallVec<[Word; 3]>;

/// Element of the 2- or 3-fold tensor power of an algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    arity: usize,
    order: usize,
    terms: BTreeMap<TensorKey, SeriesScalar>,
}

impl TensorElement {
    pub fn zero(arity: usize, order: usize) -> Self {
        TensorElement {
            arity,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize, order: usize) -> Self {
        let mut t = Self::zero(arity, order);
        t.add_term((0..arity).map(|_| Word::new()).collect(), SeriesScalar::one(order));
        t
    }

    /// `a_1 ⊗ ... ⊗ a_k`.
    pub fn from_factors(factors: &[&NCElement]) -> Self {
        let order = factors[0].order();
        let mut acc = Self::one(0, order);
        for f in factors {
            let mut next = Self::zero(acc.arity + 1, order);
            for (k, c) in &acc.terms {
                for (w, d) in f.terms() {
                    let mut key = k.clone();
                    key.push(w.clone());
                    next.add_term(key, c * d);
                }
            }
            acc = next;
        }
        acc
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<TensorKey, SeriesScalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: TensorKey, c: SeriesScalar) {
        debug_assert_eq!(key.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.arity, other.arity);
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale_rational(&-Rational::one())
    }

    pub fn scale(&self, s: &SeriesScalar) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale(r));
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::zero(self.arity, order);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.truncate(order));
        }
        out
    }

    pub fn pad(&self, order: usize) -> Self {
        let mut out = Self::zero(self.arity, order);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.resize(order));
        }
        out
    }

    pub fn rescale_parameter(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (k, s) in &self.terms {
            out.add_term(k.clone(), s.rescale_parameter(c));
        }
        out
    }

    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(SeriesScalar::valuation).min()
    }

    /// Permutes tensor slots: slot `i` of the result is slot `perm[i]` of
    /// the input. Used for the opposite coproduct and the legs of R.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(perm.len(), self.order);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&i| k[i].clone()).collect(), c.clone());
        }
        out
    }

    /// Places the legs of a 2-tensor into slots `(i, j)` of a 3-tensor.
    pub fn embed_legs(&self, i: usize, j: usize) -> Self {
        assert_eq!(self.arity, 2);
        let mut out = Self::zero(3, self.order);
        for (k, c) in &self.terms {
            let mut key: TensorKey = (0..3).map(|_| Word::new()).collect();
            key[i] = k[0].clone();
            key[j] = k[1].clone();
            out.add_term(key, c.clone());
        }
        out
    }

    pub fn swap(&self) -> Self {
        self.permute(&[1, 0])
    }

    pub fn degree_part(&self, k: usize) -> BTreeMap<TensorKey, Rational> {
        self.terms
            .iter()
            .filter_map(|(key, c)| {
                let x = c.coeff(k);
                (!x.is_zero()).then(|| (key.clone(), x))
            })
            .collect()
    }

    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (k, c) in &self.terms {
            out.add_term(k.iter().map(&f).collect(), c.clone());
        }
        out
    }

    pub fn render(&self, names: &[String], param: &str) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k.iter().map(|w| render_word(w, names)).collect();
                render_coeff_times(c, param, &format!("tensor({})", slots.join(", ")))
            })
            .collect();
        join_terms(&parts)
    }
}

impl std::fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..=u8::MAX).map(|i| format!("g{i}")).collect();
        write!(f, "TensorElement[{}; O({})]", self.render(&names, "z"), self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{int, rat};
    use smallvec::smallvec;

    #[test]
    fn terms_cancel() {
        let mut e = NCElement::generator(1, 2);
        e.add_term(smallvec![1], SeriesScalar::constant(int(-1), 2));
        assert!(e.is_zero());
    }

    #[test]
    fn rendering() {
        let names: Vec<String> = ["Jm", "J3", "Jp"].iter().map(|s| s.to_string()).collect();
        let mut e = NCElement::zero(2);
        e.add_term(smallvec![1, 2], SeriesScalar::one(2));
        e.add_term(smallvec![2, 2], SeriesScalar::monomial(int(-2), 1, 2));
        e.add_term(smallvec![2, 2, 2], SeriesScalar::monomial(rat(-4, 3), 2, 2));
        assert_eq!(e.render(&names, "z"), "J3*Jp - 2*z*Jp^2 - 4/3*z^2*Jp^3");
    }

    #[test]
    fn leg_placement() {
        let a = NCElement::generator(0, 1);
        let b = NCElement::generator(1, 1);
        let t = TensorElement::from_factors(&[&a, &b]);
        let t13 = t.embed_legs(0, 2);
        let key: TensorKey = smallvec![smallvec![0], Word::new(), smallvec![1]];
        assert!(t13.terms().contains_key(&key));
        assert_eq!(t.swap().swap(), t);
    }
}
