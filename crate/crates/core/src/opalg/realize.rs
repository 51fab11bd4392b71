use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::operator::{OpKey, Operator, Steps};
use super::OpError;
use crate::catalog::{Catalog, Lattice, RealizationDef};
use crate::expr::{Expr, Func};
use crate::qseries::Rational;

/// A formal symbol or a bound rational value.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Formal,
    Value(Rational),
}

impl Param {
    fn coeff(&self, formal: Coeff) -> Coeff {
        match self {
            Param::Formal => formal,
            Param::Value(v) => Coeff::constant(v.clone()),
        }
    }
}

/// Evaluates expressions over `x, t, dx, dt, Tx, Tt, m` and the lattice
/// step, with optional generator images.
#[derive(Debug, Clone)]
pub struct Context {
    pub lattice: Lattice,
    pub steps: Steps,
    pub step: Param,
    pub mass: Param,
    pub bindings: BTreeMap<String, Operator>,
}

impl Context {
    pub fn new(lattice: Lattice, step: Param, mass: Param) -> Self {
        let h = step.coeff(Coeff::h());
        let steps = match lattice {
            Lattice::Space => Steps { x: h, t: Coeff::zero() },
            Lattice::Time => Steps { x: Coeff::zero(), t: h },
            Lattice::None => Steps::default(),
        };
        Context {
            lattice,
            steps,
            step,
            mass,
            bindings: BTreeMap::new(),
        }
    }

    /// Name of the step symbol: `sigma` on a space lattice, `tau` in time.
    pub fn step_name(&self) -> &'static str {
        match self.lattice {
            Lattice::Space => "sigma",
            Lattice::Time => "tau",
            Lattice::None => "h",
        }
    }

    fn key(&self, key: OpKey) -> Operator {
        Operator::monomial(&self.steps, key, Coeff::one())
    }

    pub fn scalar(&self, c: Coeff) -> Operator {
        Operator::scalar(&self.steps, c)
    }

    pub fn eval(&self, e: &Expr) -> Result<Operator, OpError> {
        Ok(match e {
            Expr::Num(r) => self.scalar(Coeff::constant(r.clone())),
            Expr::Sym(s) => self.symbol(s)?,
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Expr::Div(a, b) => {
                let d = self.eval(b)?;
                let inv = d
                    .as_scalar()
                    .and_then(|c| c.inverse())
                    .ok_or_else(|| OpError::NotInvertible(b.to_string()))?;
                self.eval(a)?.scale(&inv)
            }
            Expr::Pow(a, k) => {
                if !k.is_integer() {
                    return Err(OpError::NotInvertible(e.to_string()));
                }
                let base = self.eval(a)?;
                let n = k.to_integer();
                let n32: i32 = (&n).try_into().map_err(|_| OpError::NotInvertible(e.to_string()))?;
                if n32 >= 0 {
                    base.pow(n32 as u32)
                } else {
                    invert_monomial(&base)
                        .ok_or_else(|| OpError::NotInvertible(a.to_string()))?
                        .pow(n32.unsigned_abs())
                }
            }
            Expr::Call(f, args) => {
                let arg = self.eval(&args[0])?;
                let shift = |sign: i32| -> Result<Operator, OpError> {
                    let (key, n) = self.shift_of(&arg).ok_or_else(|| OpError::UnresolvedExponential(e.to_string()))?;
                    Ok(self.key(OpKey {
                        r: key.r * sign * n,
                        s: key.s * sign * n,
                        ..OpKey::default()
                    }))
                };
                let half = Coeff::constant(Rational::new(1.into(), 2.into()));
                match f {
                    Func::Exp => shift(1)?,
                    Func::Sinh => shift(1)?.sub(&shift(-1)?).scale(&half),
                    Func::Cosh => shift(1)?.add(&shift(-1)?).scale(&half),
                    Func::Log | Func::Tensor => return Err(OpError::UnresolvedExponential(e.to_string())),
                }
            }
        })
    }

    /// Recognises `c·σ·dx` (or `c·τ·dt`) with integer `c`, so that its
    /// exponential is `Tx^c`. Returns the unit shift and `c`.
    fn shift_of(&self, arg: &Operator) -> Option<(OpKey, i32)> {
        if arg.is_zero() {
            return Some((OpKey::default(), 0));
        }
        let (key, c) = arg.single_term()?;
        let (unit, step) = match key {
            OpKey { p: 1, a: 0, b: 0, r: 0, s: 0, q: 0 } => (OpKey { r: 1, ..OpKey::default() }, &self.steps.x),
            OpKey { q: 1, a: 0, b: 0, r: 0, s: 0, p: 0 } => (OpKey { s: 1, ..OpKey::default() }, &self.steps.t),
            _ => return None,
        };
        let n = (c * &step.inverse()?).as_constant()?;
        if !n.is_integer() {
            return None;
        }
        Some((unit, n.to_integer().try_into().ok()?))
    }

    fn symbol(&self, s: &str) -> Result<Operator, OpError> {
        if let Some(op) = self.bindings.get(s) {
            return Ok(op.clone());
        }
        let k = |key: OpKey| Ok(self.key(key));
        let d = OpKey::default();
        match s {
            "x" => k(OpKey { a: 1, ..d }),
            "t" => k(OpKey { b: 1, ..d }),
            "dx" => k(OpKey { p: 1, ..d }),
            "dt" => k(OpKey { q: 1, ..d }),
            "Tx" if self.lattice == Lattice::Space => k(OpKey { r: 1, ..d }),
            "Tt" if self.lattice == Lattice::Time => k(OpKey { s: 1, ..d }),
            "m" => Ok(self.scalar(self.mass.coeff(Coeff::m()))),
            "sigma" if self.lattice == Lattice::Space => Ok(self.scalar(self.steps.x.clone())),
            "tau" if self.lattice == Lattice::Time => Ok(self.scalar(self.steps.t.clone())),
            _ => Err(OpError::UnknownSymbol(s.to_string())),
        }
    }

    /// Same context with `m` and the step bound to rationals.
    pub fn specialise(&self, step: &Rational, m: &Rational) -> Context {
        let mut out = Context::new(self.lattice, Param::Value(step.clone()), Param::Value(m.clone()));
        let (h, mv) = (self.step == Param::Formal, self.mass == Param::Formal);
        let f = |c: &Coeff| c.substitute(h.then_some(step), mv.then_some(m));
        out.bindings = self
            .bindings
            .iter()
            .map(|(g, op)| (g.clone(), op.map_coeffs(&out.steps, f)))
            .collect();
        out
    }
}

/// Inverse of `c·Tx^r·Tt^s`.
fn invert_monomial(op: &Operator) -> Option<Operator> {
    let (key, c) = op.single_term()?;
    if key.a != 0 || key.b != 0 || key.p != 0 || key.q != 0 {
        return None;
    }
    Some(Operator::monomial(
        op.steps(),
        OpKey {
            r: -key.r,
            s: -key.s,
            ..OpKey::default()
        },
        c.inverse()?,
    ))
}

/// A realization evaluated in a context: one operator per generator.
#[derive(Debug, Clone)]
pub struct Realized {
    pub id: String,
    pub presentation: String,
    pub generators: Vec<String>,
    pub ctx: Context,
}

impl Realized {
    pub fn op(&self, g: &str) -> &Operator {
        &self.ctx.bindings[g]
    }

    /// Evaluates an abstract expression in the generators, with the
    /// deformation parameter read as the lattice step.
    pub fn eval(&self, e: &Expr) -> Result<Operator, OpError> {
        self.ctx.eval(e)
    }

    pub fn render(&self, op: &Operator) -> String {
        op.render(self.ctx.step_name())
    }
}

pub fn realize(catalog: &Catalog, id: &str, step: Param, mass: Param) -> Result<Realized, OpError> {
    let def = catalog.realization(id)?;
    realize_def(catalog, id, def, &def.operators, step, mass)
}

/// Realizes `def` with `operators` standing in for the printed ones.
pub fn realize_def(
    catalog: &Catalog,
    id: &str,
    def: &RealizationDef,
    operators: &BTreeMap<String, Expr>,
    step: Param,
    mass: Param,
) -> Result<Realized, OpError> {
    let pres = catalog.presentation(&def.presentation)?;
    let mut ctx = Context::new(def.lattice, step, mass);
    let mut ops = BTreeMap::new();
    for g in &pres.generators {
        let e = operators.get(g).ok_or_else(|| OpError::Unrealized(g.clone()))?;
        ops.insert(g.clone(), ctx.eval(e)?);
    }
    ctx.bindings = ops;
    Ok(Realized {
        id: id.to_string(),
        presentation: def.presentation.clone(),
        generators: pres.generators.clone(),
        ctx,
    })
}

/// Images of the source realization's operators under the twist map named
/// in `derived_from`.
pub fn derive(catalog: &Catalog, id: &str, step: Param, mass: Param) -> Result<Option<BTreeMap<String, Operator>>, OpError> {
    let def = catalog.realization(id)?;
    let Some(d) = &def.derived_from else {
        return Ok(None);
    };
    let src = realize(catalog, &d.realization, step, mass)?;
    let map = catalog.twist(&d.map)?;
    let mut out = BTreeMap::new();
    for (g, e) in &map.map.assignments {
        out.insert(g.clone(), src.eval(e)?);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::opalg::operator::Poly;
    use crate::qseries::rat;

    fn op(ctx: &Context, s: &str) -> Operator {
        ctx.eval(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn exponentials_become_shifts() {
        let ctx = Context::new(Lattice::Space, Param::Formal, Param::Formal);
        assert_eq!(op(&ctx, "exp(-2*sigma*dx)"), op(&ctx, "Tx^-2"));
        assert_eq!(op(&ctx, "sinh(sigma*dx)"), op(&ctx, "(Tx - Tx^-1)/2"));
        assert!(matches!(
            ctx.eval(&parse("exp(sigma*dx/2)").unwrap()),
            Err(OpError::UnresolvedExponential(_))
        ));
        assert!(matches!(ctx.eval(&parse("Tt").unwrap()), Err(OpError::UnknownSymbol(_))));
    }

    #[test]
    fn bound_step_resolves_exponentials() {
        let ctx = Context::new(Lattice::Time, Param::Value(rat(1, 3)), Param::Value(rat(1, 2)));
        assert_eq!(op(&ctx, "exp(-tau*dt)"), op(&ctx, "Tt^-1"));
        assert_eq!(op(&ctx, "m*tau"), ctx.scalar(Coeff::constant(rat(1, 6))));
    }

    #[test]
    fn commutator_of_shift_and_coordinate() {
        let ctx = Context::new(Lattice::Space, Param::Formal, Param::Formal);
        let c = op(&ctx, "Tx").commutator(&op(&ctx, "x"));
        assert_eq!(c, op(&ctx, "sigma*Tx"));
    }

    #[test]
    fn shipped_dilation_on_xt() {
        let cat = Catalog::shipped().unwrap();
        let r = realize(&cat, "real_hf", Param::Value(rat(1, 2)), Param::Value(rat(1, 1))).unwrap();
        let got = r.op("cD").apply(&Poly::monomial(1, 1));
        assert_eq!(got, Poly::monomial(1, 1).scale(&Coeff::constant(rat(7, 2))));
        assert!(r.op("cP").apply(&Poly::monomial(0, 0)).is_zero());
    }
}
