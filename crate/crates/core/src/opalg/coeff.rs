use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use crate::qseries::{render_rational, Rational};

/// Laurent polynomial in the lattice step `h` whose coefficients are
/// polynomials in the mass `m`, both with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Coeff {
    /// (power of h, power of m) → coefficient; no zero entries.
    terms: BTreeMap<(i32, u32), Rational>,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::default()
    }

    pub fn one() -> Self {
        Coeff::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Coeff::monomial(0, 0, c)
    }

    pub fn monomial(h: i32, m: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((h, m), c);
        }
        Coeff { terms }
    }

    /// The formal step.
    pub fn h() -> Self {
        Coeff::monomial(1, 0, Rational::one())
    }

    /// The formal mass.
    pub fn m() -> Self {
        Coeff::monomial(0, 1, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, key: (i32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Coeff::zero();
        }
        Coeff {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Coeff::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Inverse of a single term `c·h^k` with no `m` dependence.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(h, m), c) = self.terms.iter().next().unwrap();
        (m == 0).then(|| Coeff::monomial(-h, 0, c.recip()))
    }

    /// Coefficient of `h^k`, as a polynomial in `m`.
    pub fn h_part(&self, k: i32) -> Coeff {
        Coeff {
            terms: self
                .terms
                .iter()
                .filter(|((h, _), _)| *h == k)
                .map(|((_, m), c)| ((0, *m), c.clone()))
                .collect(),
        }
    }

    pub fn min_h_power(&self) -> Option<i32> {
        self.terms.keys().map(|(h, _)| *h).min()
    }

    /// Drops every term with `h` power `≥ n`.
    pub fn truncate_h(&self, n: i32) -> Coeff {
        Coeff {
            terms: self.terms.iter().filter(|((h, _), _)| *h < n).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Substitutes rational values for `h` and/or `m`.
    pub fn substitute(&self, h: Option<&Rational>, m: Option<&Rational>) -> Coeff {
        let mut out = Coeff::zero();
        for (&(hp, mp), c) in &self.terms {
            let mut c = c.clone();
            let mut key = (hp, mp);
            if let Some(h) = h {
                c *= pow_i(h, hp);
                key.0 = 0;
            }
            if let Some(m) = m {
                c *= pow_i(m, mp as i32);
                key.1 = 0;
            }
            out.add_term(key, c);
        }
        out
    }

    pub fn render(&self, step: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (&(h, m), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (h == 0 && m == 0) {
                factors.push(render_rational(&mag));
            }
            if h != 0 {
                factors.push(if h == 1 { step.to_string() } else { format!("{step}^{h}") });
            }
            if m != 0 {
                factors.push(if m == 1 { "m".to_string() } else { format!("m^{m}") });
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

fn pow_i(x: &Rational, e: i32) -> Rational {
    let p = num::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("h"))
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for ((h1, m1), a) in &self.terms {
            for ((h2, m2), b) in &rhs.terms {
                out.add_term((h1 + h2, m1 + m2), a * b);
            }
        }
        out
    }
}
