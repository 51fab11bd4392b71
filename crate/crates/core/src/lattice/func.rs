use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, ToPrimitive, Zero};

use super::LatticeError;
use crate::opalg::Operator;
use crate::qseries::Rational;

/// Field of sample values: exact rationals or binary floats.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(r: &Rational) -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().unwrap_or(f64::INFINITY).abs()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Common exponential factor `χ(x, t)` of a closed form, described by its
/// shift ratios and logarithmic derivatives. A missing entry is not
/// representable in the field.
#[derive(Debug, Clone, PartialEq)]
pub struct Character<F> {
    /// `χ(x + σ, t) / χ(x, t)`.
    pub gx: Option<F>,
    /// `∂x χ / χ`.
    pub alpha: Option<F>,
    /// `χ(x, t + τ) / χ(x, t)`.
    pub gt: Option<F>,
    /// `∂t χ / χ`.
    pub beta: Option<F>,
}

impl<F: Scalar> Character<F> {
    pub fn trivial() -> Self {
        Character {
            gx: Some(F::one()),
            alpha: Some(F::zero()),
            gt: Some(F::one()),
            beta: Some(F::zero()),
        }
    }
}

/// `p(x, t)·χ(x, t)` with `p` a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly<F> {
    pub poly: BTreeMap<(u32, u32), F>,
    pub chi: Character<F>,
}

fn binomial<F: Scalar>(n: u32, k: u32) -> F {
    let mut c = F::one();
    for i in 0..k {
        c = c * F::from_rational(&Rational::new((n - i).into(), (i + 1).into()));
    }
    c
}

fn powi<F: Scalar>(x: &F, e: i32) -> F {
    let mut p = F::one();
    for _ in 0..e.unsigned_abs() {
        p = p * x.clone();
    }
    if e < 0 {
        F::one() / p
    } else {
        p
    }
}

impl<F: Scalar> ExpPoly<F> {
    pub fn new(chi: Character<F>) -> Self {
        ExpPoly {
            poly: BTreeMap::new(),
            chi,
        }
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: F) {
        if c.is_zero() {
            return;
        }
        let slot = self.poly.entry((a, b)).or_insert_with(F::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.poly.remove(&(a, b));
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), c) in &other.poly {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = ExpPoly::new(self.chi.clone());
        for (&(a, b), v) in &self.poly {
            out.add_term(a, b, v.clone() * c.clone());
        }
        out
    }

    pub fn times_monomial(&self, a: u32, b: u32) -> Self {
        let mut out = ExpPoly::new(self.chi.clone());
        for (&(i, j), v) in &self.poly {
            out.add_term(i + a, j + b, v.clone());
        }
        out
    }

    /// `f(x + r·step, t)` (or in `t` when `in_t`).
    pub fn shift(&self, r: i32, step: &F, in_t: bool) -> Result<Self, LatticeError> {
        if r == 0 {
            return Ok(self.clone());
        }
        let g = if in_t { &self.chi.gt } else { &self.chi.gx };
        let g = g.as_ref().ok_or(LatticeError::MissingDerivative(if in_t { "Tt" } else { "Tx" }))?;
        let factor = powi(g, r);
        let d = step.clone() * F::from_rational(&Rational::from_integer(r.into()));
        let mut out = ExpPoly::new(self.chi.clone());
        for (&(a, b), c) in &self.poly {
            let n = if in_t { b } else { a };
            for j in 0..=n {
                let coeff = c.clone() * binomial::<F>(n, j) * powi(&d, (n - j) as i32) * factor.clone();
                if in_t {
                    out.add_term(a, j, coeff);
                } else {
                    out.add_term(j, b, coeff);
                }
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, in_t: bool) -> Result<Self, LatticeError> {
        let eig = if in_t { &self.chi.beta } else { &self.chi.alpha };
        let eig = eig.as_ref().ok_or(LatticeError::MissingDerivative(if in_t { "dt" } else { "dx" }))?;
        let mut out = self.scale(eig);
        for (&(a, b), c) in &self.poly {
            let n = if in_t { b } else { a };
            if n == 0 {
                continue;
            }
            let c = c.clone() * F::from_rational(&Rational::from_integer(n.into()));
            if in_t {
                out.add_term(a, b - 1, c);
            } else {
                out.add_term(a - 1, b, c);
            }
        }
        Ok(out)
    }

    /// Applies a canonical operator whose coefficients are bound constants.
    pub fn apply(&self, op: &Operator) -> Result<Self, LatticeError> {
        let step = |c: &crate::opalg::Coeff| c.as_constant().map(|r| F::from_rational(&r)).unwrap_or_else(F::zero);
        let (sx, st) = (step(&op.steps().x), step(&op.steps().t));
        let mut out = ExpPoly::new(self.chi.clone());
        for (k, c) in op.terms() {
            let c = c.as_constant().ok_or(LatticeError::Unbound)?;
            let mut g = self.clone();
            for _ in 0..k.q {
                g = g.derivative(true)?;
            }
            for _ in 0..k.p {
                g = g.derivative(false)?;
            }
            g = g.shift(k.s, &st, true)?.shift(k.r, &sx, false)?;
            out = out.plus(&g.times_monomial(k.a, k.b).scale(&F::from_rational(&c)));
        }
        Ok(out)
    }

    /// The polynomial factor at a point.
    pub fn poly_at(&self, x: &F, t: &F) -> F {
        let mut acc = F::zero();
        for (&(a, b), c) in &self.poly {
            acc = acc + c.clone() * powi(x, a as i32) * powi(t, b as i32);
        }
        acc
    }
}

impl ExpPoly<f64> {
    /// Full value `p(x, t)·exp(αx + βt)`.
    pub fn value(&self, x: f64, t: f64) -> f64 {
        let a = self.chi.alpha.unwrap_or(0.0);
        let b = self.chi.beta.unwrap_or(0.0);
        self.poly_at(&x, &t) * (a * x + b * t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    #[test]
    fn shift_then_back_is_identity() {
        let mut f: ExpPoly<Rational> = ExpPoly::new(Character {
            gx: Some(rat(3, 2)),
            ..Character::trivial()
        });
        f.add_term(3, 1, rat(2, 1));
        f.add_term(0, 0, rat(-1, 3));
        let s = rat(1, 10);
        let g = f.shift(1, &s, false).unwrap().shift(-1, &s, false).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn missing_derivative_is_reported() {
        let f: ExpPoly<Rational> = ExpPoly::new(Character {
            alpha: None,
            ..Character::trivial()
        });
        assert!(matches!(f.derivative(false), Err(LatticeError::MissingDerivative("dx"))));
    }
}
