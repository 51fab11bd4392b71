use std::collections::BTreeMap;

use num::{One, Zero};

use super::coeff::Coeff;
use crate::qseries::Rational;

/// Exponents of the canonical monomial `x^a t^b Tx^r Tt^s dx^p dt^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OpKey {
    pub a: u32,
    pub b: u32,
    pub r: i32,
    pub s: i32,
    pub p: u32,
    pub q: u32,
}

/// Lattice steps entering `Tx·x = (x + σ)·Tx` and `Tt·t = (t + τ)·Tt`.
/// A zero step means the direction is continuous.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Steps {
    pub x: Coeff,
    pub t: Coeff,
}

/// Difference-differential operator in canonical form: multiplications
/// left, shifts in the middle, derivatives right.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    steps: Steps,
    terms: BTreeMap<OpKey, Coeff>,
}

/// Polynomial in `x, t` with [`Coeff`] coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    pub terms: BTreeMap<(u32, u32), Coeff>,
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut c = Rational::one();
    for i in 0..k {
        c = c * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    c
}

fn falling(n: u32, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * Rational::from_integer((n - i).into()))
}

/// `(x^a T^r ∂^p)(x^c T^s ∂^q)` in one variable with shift step `step`.
fn mul_1d(l: (u32, i32, u32), r: (u32, i32, u32), step: &Coeff) -> Vec<((u32, i32, u32), Coeff)> {
    let (a, sh, p) = l;
    let (c, sh2, q) = r;
    let mut out = Vec::new();
    let shift = step.scale(&Rational::from_integer(sh.into()));
    for k in 0..=p.min(c) {
        let c1 = binomial(p, k) * falling(c, k);
        let rest = c - k;
        for j in 0..=rest {
            if sh == 0 && j != rest {
                continue;
            }
            let coeff = shift.pow(rest - j).scale(&(c1.clone() * binomial(rest, j)));
            if !coeff.is_zero() {
                out.push(((a + j, sh + sh2, p - k + q), coeff));
            }
        }
    }
    out
}

impl Operator {
    pub fn zero(steps: &Steps) -> Self {
        Operator {
            steps: steps.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(steps: &Steps, c: Coeff) -> Self {
        Operator::monomial(steps, OpKey::default(), c)
    }

    pub fn one(steps: &Steps) -> Self {
        Operator::scalar(steps, Coeff::one())
    }

    pub fn monomial(steps: &Steps, key: OpKey, c: Coeff) -> Self {
        let mut out = Operator::zero(steps);
        out.add_term(key, c);
        out
    }

    pub fn steps(&self) -> &Steps {
        &self.steps
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpKey, &Coeff)> {
        self.terms.iter()
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

    pub fn single_term(&self) -> Option<(OpKey, &Coeff)> {
        (self.terms.len() == 1).then(|| {
            let (k, c) = self.terms.iter().next().unwrap();
            (*k, c)
        })
    }

    /// The coefficient when the operator is a pure multiplication by a
    /// constant of the coefficient ring.
    pub fn as_scalar(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&OpKey::default()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, key: OpKey, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Operator {
        self.scale(&Coeff::constant(-Rational::one()))
    }

    pub fn scale(&self, c: &Coeff) -> Operator {
        let mut out = Operator::zero(&self.steps);
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        let mut out = Operator::zero(&self.steps);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c = c1 * c2;
                let xs = mul_1d((k1.a, k1.r, k1.p), (k2.a, k2.r, k2.p), &self.steps.x);
                let ts = mul_1d((k1.b, k1.s, k1.q), (k2.b, k2.s, k2.q), &self.steps.t);
                for ((a, r, p), cx) in &xs {
                    let cx = &c * cx;
                    for ((b, s, q), ct) in &ts {
                        out.add_term(
                            OpKey {
                                a: *a,
                                b: *b,
                                r: *r,
                                s: *s,
                                p: *p,
                                q: *q,
                            },
                            &cx * ct,
                        );
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Operator {
        (0..e).fold(Operator::one(&self.steps), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self.mul(other).sub(&other.mul(self))
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, steps: &Steps, f: impl Fn(&Coeff) -> Coeff) -> Operator {
        let mut out = Operator::zero(steps);
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    /// Acts on a polynomial: shifts evaluate at `x + rσ`, `t + sτ`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::default();
        for (k, c) in &self.terms {
            for (&(a, b), fc) in &f.terms {
                if k.p > a || k.q > b {
                    continue;
                }
                let base = (fc * c).scale(&(falling(a, k.p) * falling(b, k.q)));
                let (a, b) = (a - k.p, b - k.q);
                let xs = shift_powers(a, k.r, &self.steps.x);
                let ts = shift_powers(b, k.s, &self.steps.t);
                for (i, cx) in &xs {
                    let cx = &base * cx;
                    for (j, ct) in &ts {
                        out.add(k.a + i, k.b + j, &cx * ct);
                    }
                }
            }
        }
        out
    }

    pub fn render(&self, step: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut factors = Vec::new();
                let coeff = c.render(step);
                let bare = *k == OpKey::default();
                if bare || coeff != "1" {
                    factors.push(if c.terms().count() > 1 { format!("({coeff})") } else { coeff });
                }
                let mut push = |name: &str, e: i64| match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                };
                push("x", k.a.into());
                push("t", k.b.into());
                push("Tx", k.r.into());
                push("Tt", k.s.into());
                push("dx", k.p.into());
                push("dt", k.q.into());
                factors.join("*")
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// `(x + r·step)^a` expanded in powers of `x`.
fn shift_powers(a: u32, r: i32, step: &Coeff) -> Vec<(u32, Coeff)> {
    if r == 0 {
        return vec![(a, Coeff::one())];
    }
    let shift = step.scale(&Rational::from_integer(r.into()));
    (0..=a)
        .map(|j| (j, shift.pow(a - j).scale(&binomial(a, j))))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

impl Poly {
    pub fn monomial(a: u32, b: u32) -> Poly {
        let mut p = Poly::default();
        p.add(a, b, Coeff::one());
        p
    }

    pub fn add(&mut self, a: u32, b: u32, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add(a, b, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add(a, b, -c);
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        let mut out = Poly::default();
        for (&(a, b), v) in &self.terms {
            out.add(a, b, v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Poly {
        let mut out = Poly::default();
        for (&(a, b), v) in &self.terms {
            out.add(a, b, f(v));
        }
        out
    }

    /// Evaluates at a point once every coefficient is a rational constant.
    pub fn eval(&self, x: &Rational, t: &Rational) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (&(a, b), c) in &self.terms {
            acc += c.as_constant()? * num::pow(x.clone(), a as usize) * num::pow(t.clone(), b as usize);
        }
        Some(acc)
    }

    pub fn render(&self, step: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let power = |v: &str, e: u32| match e {
            0 => None,
            1 => Some(v.to_string()),
            e => Some(format!("{v}^{e}")),
        };
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                let mono: Vec<String> = [power("x", a), power("t", b)].into_iter().flatten().collect();
                let coeff = c.render(step);
                match (coeff.as_str(), mono.is_empty()) {
                    (_, true) => coeff,
                    ("1", false) => mono.join("*"),
                    _ if c.terms().count() > 1 => format!("({coeff})*{}", mono.join("*")),
                    _ => format!("{coeff}*{}", mono.join("*")),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    fn steps() -> Steps {
        Steps {
            x: Coeff::h(),
            t: Coeff::zero(),
        }
    }

    fn x(s: &Steps) -> Operator {
        Operator::monomial(s, OpKey { a: 1, ..OpKey::default() }, Coeff::one())
    }

    fn dx(s: &Steps) -> Operator {
        Operator::monomial(s, OpKey { p: 1, ..OpKey::default() }, Coeff::one())
    }

    fn tx(s: &Steps, r: i32) -> Operator {
        Operator::monomial(s, OpKey { r, ..OpKey::default() }, Coeff::one())
    }

    #[test]
    fn heisenberg() {
        let s = steps();
        assert_eq!(dx(&s).commutator(&x(&s)), Operator::one(&s));
    }

    #[test]
    fn shift_moves_past_coordinate() {
        let s = steps();
        let c = tx(&s, 1).commutator(&x(&s));
        assert_eq!(c, tx(&s, 1).scale(&Coeff::h()));
    }

    #[test]
    fn difference_squared() {
        let s = steps();
        let delta = tx(&s, 1).sub(&Operator::one(&s)).scale(&Coeff::h().inverse().unwrap());
        let sq = delta.mul(&delta);
        let want = tx(&s, 2)
            .sub(&tx(&s, 1).scale(&Coeff::constant(rat(2, 1))))
            .add(&Operator::one(&s))
            .scale(&Coeff::h().pow(2).inverse().unwrap());
        assert_eq!(sq, want);
    }

    #[test]
    fn difference_on_square() {
        let s = Steps {
            x: Coeff::constant(rat(1, 2)),
            t: Coeff::zero(),
        };
        let delta = tx(&s, 1).sub(&Operator::one(&s)).scale(&Coeff::constant(rat(2, 1)));
        let got = delta.apply(&Poly::monomial(2, 0));
        let mut want = Poly::monomial(1, 0).scale(&Coeff::constant(rat(2, 1)));
        want.add(0, 0, Coeff::constant(rat(1, 2)));
        assert_eq!(got, want);
    }

    #[test]
    fn shifts_compose_with_inverse() {
        let s = steps();
        assert_eq!(tx(&s, 1).mul(&tx(&s, -1)), Operator::one(&s));
    }
}
