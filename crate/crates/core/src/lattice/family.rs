use num::{One, ToPrimitive, Zero};

use super::func::{Character, ExpPoly, Scalar};
use super::{Equation, LatticeParams};
use crate::qseries::{rat, render_rational, Rational};

/// Closed-form solutions of the two semi-discrete equations.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `(1 + σk)^{x/σ} e^{k²t/2m}`, solving the space-lattice equation.
    Geometric { k: Rational },
    /// `e^{kx} (1 + τk²/2m)^{t/τ}`, solving the time-lattice equation.
    Exponential { k: Rational },
    /// `Σ_j (t/2m)^j / j! · Δx^{2j} x^n`.
    HeatPolynomial { degree: u32 },
    /// `Σ_j C(t/τ, j) (τ/2m)^j · ∂x^{2j} x^n`.
    TimeHeatPolynomial { degree: u32 },
    Constant,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Geometric { k } => format!("geometric(k={})", render_rational(k)),
            Family::Exponential { k } => format!("exponential(k={})", render_rational(k)),
            Family::HeatPolynomial { degree } => format!("heat_polynomial({degree})"),
            Family::TimeHeatPolynomial { degree } => format!("time_heat_polynomial({degree})"),
            Family::Constant => "constant".into(),
        }
    }

    pub fn equation(&self) -> Option<Equation> {
        match self {
            Family::Geometric { .. } | Family::HeatPolynomial { .. } => Some(Equation::SpaceLattice),
            Family::Exponential { .. } | Family::TimeHeatPolynomial { .. } => Some(Equation::TimeLattice),
            Family::Constant => None,
        }
    }

    /// Default families for `eq`.
    pub fn for_equation(eq: Equation) -> Vec<Family> {
        let ks = [rat(1, 1), rat(1, 2), rat(-1, 3)];
        let mut out: Vec<Family> = match eq {
            Equation::SpaceLattice => ks.into_iter().map(|k| Family::Geometric { k }).collect(),
            Equation::TimeLattice => ks.into_iter().map(|k| Family::Exponential { k }).collect(),
        };
        for degree in [3, 4] {
            out.push(match eq {
                Equation::SpaceLattice => Family::HeatPolynomial { degree },
                Equation::TimeLattice => Family::TimeHeatPolynomial { degree },
            });
        }
        out.push(Family::Constant);
        out
    }

    /// Exact closed form; exponential factors that are not rational are
    /// left out of the character.
    pub fn exact(&self, p: &LatticeParams) -> ExpPoly<Rational> {
        let (s, tau, m) = (&p.grid.sigma, &p.grid.tau, &p.m);
        match self {
            Family::Geometric { k } => ExpPoly {
                poly: [((0, 0), Rational::one())].into(),
                chi: Character {
                    gx: Some(Rational::one() + s * k),
                    alpha: None,
                    gt: None,
                    beta: Some(k * k / (rat(2, 1) * m)),
                },
            },
            Family::Exponential { k } => ExpPoly {
                poly: [((0, 0), Rational::one())].into(),
                chi: Character {
                    gx: None,
                    alpha: Some(k.clone()),
                    gt: Some(Rational::one() + tau * k * k / (rat(2, 1) * m)),
                    beta: None,
                },
            },
            Family::HeatPolynomial { degree } => heat_polynomial(*degree, s, m),
            Family::TimeHeatPolynomial { degree } => time_heat_polynomial(*degree, tau, m),
            Family::Constant => ExpPoly {
                poly: [((0, 0), Rational::one())].into(),
                chi: Character::trivial(),
            },
        }
    }

    /// Float closed form with the full character.
    pub fn float(&self, p: &LatticeParams) -> ExpPoly<f64> {
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let (s, tau, m) = (f(&p.grid.sigma), f(&p.grid.tau), f(&p.m));
        let exact = self.exact(p);
        let poly = exact.poly.iter().map(|(k, v)| (*k, f(v))).collect();
        let chi = match self {
            Family::Geometric { k } => {
                let k = f(k);
                let beta = k * k / (2.0 * m);
                Character {
                    gx: Some(1.0 + s * k),
                    alpha: Some((1.0 + s * k).ln() / s),
                    gt: Some((beta * tau).exp()),
                    beta: Some(beta),
                }
            }
            Family::Exponential { k } => {
                let k = f(k);
                let g = 1.0 + tau * k * k / (2.0 * m);
                Character {
                    gx: Some((k * s).exp()),
                    alpha: Some(k),
                    gt: Some(g),
                    beta: Some(g.ln() / tau),
                }
            }
            _ => Character::trivial(),
        };
        ExpPoly { poly, chi }
    }
}

/// Forward difference `(f(x+σ) − f(x))/σ` of a polynomial in `x` only.
fn forward_difference(f: &ExpPoly<Rational>, sigma: &Rational) -> ExpPoly<Rational> {
    let shifted = f.shift(1, sigma, false).expect("trivial character");
    shifted.plus(&f.scale(&-Rational::one())).scale(&sigma.recip())
}

fn heat_polynomial(n: u32, sigma: &Rational, m: &Rational) -> ExpPoly<Rational> {
    let mut term = ExpPoly::new(Character::trivial());
    term.add_term(n, 0, Rational::one());
    let mut out = ExpPoly::new(Character::trivial());
    let mut j = 0u32;
    while !term.poly.is_empty() {
        let weight = num::pow(rat(1, 1) / (rat(2, 1) * m), j as usize) / factorial(j);
        out = out.plus(&term.times_monomial(0, j).scale(&weight));
        term = forward_difference(&forward_difference(&term, sigma), sigma);
        j += 1;
    }
    out
}

fn time_heat_polynomial(n: u32, tau: &Rational, m: &Rational) -> ExpPoly<Rational> {
    let mut out = ExpPoly::new(Character::trivial());
    // C(t/τ, j) as a polynomial in t.
    let mut binom = ExpPoly::new(Character::trivial());
    binom.add_term(0, 0, Rational::one());
    for j in 0..=n / 2 {
        let deriv = falling(n, 2 * j);
        let weight = num::pow(tau / (rat(2, 1) * m), j as usize) * deriv;
        let mut term = binom.clone();
        term.poly = term.poly.into_iter().map(|((_, b), c)| ((n - 2 * j, b), c * &weight)).collect();
        out = out.plus(&term);
        // C(u, j+1) = C(u, j)·(u − j)/(j + 1) with u = t/τ.
        let mut next = ExpPoly::new(Character::trivial());
        for (&(_, b), c) in &binom.poly {
            let scale = Rational::from_integer((j + 1).into()).recip();
            next.add_term(0, b + 1, c * tau.recip() * &scale);
            next.add_term(0, b, -c * Rational::from_integer(j.into()) * &scale);
        }
        binom = next;
    }
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * Rational::from_integer(i.into()))
}

fn falling(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    (0..k).fold(Rational::one(), |acc, i| acc * Rational::from_integer((n - i).into()))
}

/// Applies the equation's operator to a closed form, symbolically.
pub fn apply_equation<F: Scalar>(
    eq: Equation,
    f: &ExpPoly<F>,
    p: &LatticeParams,
) -> Result<ExpPoly<F>, super::LatticeError> {
    let two_m = F::from_rational(&(rat(2, 1) * &p.m));
    match eq {
        Equation::SpaceLattice => {
            let s = F::from_rational(&p.grid.sigma);
            let d = |g: &ExpPoly<F>| -> Result<ExpPoly<F>, super::LatticeError> {
                Ok(g.shift(1, &s, false)?.plus(&g.scale(&-F::one())).scale(&(F::one() / s.clone())))
            };
            Ok(d(&d(f)?)?.plus(&f.derivative(true)?.scale(&-two_m)))
        }
        Equation::TimeLattice => {
            let tau = F::from_rational(&p.grid.tau);
            let dt = f
                .shift(1, &tau, true)?
                .plus(&f.scale(&-F::one()))
                .scale(&(F::one() / tau.clone()));
            Ok(f.derivative(false)?.derivative(false)?.plus(&dt.scale(&-two_m)))
        }
    }
}
