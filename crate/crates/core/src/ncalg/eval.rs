//! Evaluation of expression trees into series scalars, algebra elements and
//! tensor elements at a requested truncation order.
//!
//! Division by a scalar of valuation `v` evaluates the numerator at order
//! `order + v` before shifting down, so results stay exact at the requested
//! order without a global precision guard.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num::{One, Zero};

use crate::expr::{Expr, Func};
use crate::qseries::{int, rat, Rational, SeriesScalar};

use super::algebra::{mul_with, tensor_mul_with};
use super::element::{concat, NCElement, TensorElement, Word};
use super::AlgebraError;

/// Product of words in some algebra (free or PBW quotient).
pub trait Multiplier: Sync {
    fn names(&self) -> &[String];
    fn parameter(&self) -> &str;
    fn mul_words(&self, a: &[u8], b: &[u8], order: usize) -> Result<NCElement, AlgebraError>;

    fn index_of(&self, name: &str) -> Option<u8> {
        self.names().iter().position(|g| g == name).map(|i| i as u8)
    }
}

/// Free associative algebra: products are concatenations.
pub struct FreeAlgebra<'a> {
    names: &'a [String],
    parameter: &'a str,
    degree_cap: usize,
}

impl<'a> FreeAlgebra<'a> {
    pub fn new(names: &'a [String], parameter: &'a str, degree_cap: usize) -> Self {
        FreeAlgebra {
            names,
            parameter,
            degree_cap,
        }
    }
}

impl Multiplier for FreeAlgebra<'_> {
    fn names(&self) -> &[String] {
        self.names
    }

    fn parameter(&self) -> &str {
        self.parameter
    }

    fn mul_words(&self, a: &[u8], b: &[u8], order: usize) -> Result<NCElement, AlgebraError> {
        let w: Word = concat(a, b);
        if w.len() > self.degree_cap {
            return Err(AlgebraError::DegreeCapExceeded {
                degree: w.len(),
                cap: self.degree_cap,
            });
        }
        Ok(NCElement::monomial(w, SeriesScalar::one(order)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(SeriesScalar),
    Elem(NCElement),
    Tensor(TensorElement),
}

impl Value {
    pub fn order(&self) -> usize {
        match self {
            Value::Scalar(s) => s.order(),
            Value::Elem(e) => e.order(),
            Value::Tensor(t) => t.order(),
        }
    }

    pub fn into_element(self) -> Result<NCElement, AlgebraError> {
        match self {
            Value::Scalar(s) => Ok(NCElement::scalar(s)),
            Value::Elem(e) => Ok(e),
            Value::Tensor(_) => Err(AlgebraError::TypeMismatch("expected an element, got a tensor".into())),
        }
    }

    pub fn into_tensor(self, arity: usize) -> Result<TensorElement, AlgebraError> {
        match self {
            Value::Scalar(s) => Ok(TensorElement::one(arity, s.order()).scale(&s)),
            Value::Elem(_) => Err(AlgebraError::TypeMismatch("expected a tensor, got an element".into())),
            Value::Tensor(t) if t.arity() == arity => Ok(t),
            Value::Tensor(t) => Err(AlgebraError::ArityMismatch {
                left: t.arity(),
                right: arity,
            }),
        }
    }

    fn truncate(&self, order: usize) -> Value {
        match self {
            Value::Scalar(s) => Value::Scalar(s.truncate(order)),
            Value::Elem(e) => Value::Elem(e.truncate(order)),
            Value::Tensor(t) => Value::Tensor(t.truncate(order)),
        }
    }

    fn scale(&self, s: &SeriesScalar) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(x * s),
            Value::Elem(e) => Value::Elem(e.scale(s)),
            Value::Tensor(t) => Value::Tensor(t.scale(s)),
        }
    }

    fn neg(&self) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(-x),
            Value::Elem(e) => Value::Elem(e.neg()),
            Value::Tensor(t) => Value::Tensor(t.neg()),
        }
    }

    fn min_valuation(&self) -> Option<usize> {
        match self {
            Value::Scalar(s) => s.valuation(),
            Value::Elem(e) => e.valuation(),
            Value::Tensor(t) => t.valuation(),
        }
    }
}

fn add_values(a: Value, b: Value) -> Result<Value, AlgebraError> {
    Ok(match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
        (Value::Scalar(x), Value::Elem(e)) | (Value::Elem(e), Value::Scalar(x)) => {
            Value::Elem(e.add(&NCElement::scalar(x)))
        }
        (Value::Elem(x), Value::Elem(y)) => Value::Elem(x.add(&y)),
        (Value::Scalar(x), Value::Tensor(t)) | (Value::Tensor(t), Value::Scalar(x)) => {
            let one = TensorElement::one(t.arity(), x.order()).scale(&x);
            Value::Tensor(t.add(&one))
        }
        (Value::Tensor(x), Value::Tensor(y)) => {
            if x.arity() != y.arity() {
                return Err(AlgebraError::ArityMismatch {
                    left: x.arity(),
                    right: y.arity(),
                });
            }
            Value::Tensor(x.add(&y))
        }
        _ => return Err(AlgebraError::TypeMismatch("cannot add an element to a tensor".into())),
    })
}

pub(crate) fn mul_values(m: &dyn Multiplier, a: &Value, b: &Value) -> Result<Value, AlgebraError> {
    Ok(match (a, b) {
        (Value::Scalar(x), v) | (v, Value::Scalar(x)) => v.scale(x),
        (Value::Elem(x), Value::Elem(y)) => Value::Elem(mul_with(m, x, y)?),
        (Value::Tensor(x), Value::Tensor(y)) => Value::Tensor(tensor_mul_with(m, x, y)?),
        _ => return Err(AlgebraError::TypeMismatch("cannot multiply an element by a tensor".into())),
    })
}

fn one_like(v: &Value) -> Value {
    match v {
        Value::Scalar(s) => Value::Scalar(SeriesScalar::one(s.order())),
        Value::Elem(e) => Value::Elem(NCElement::one(e.order())),
        Value::Tensor(t) => Value::Tensor(TensorElement::one(t.arity(), t.order())),
    }
}

/// Splits `v = u + n` with `u` the scalar (unit-word) part.
fn split_unit(v: &Value) -> (SeriesScalar, Value) {
    match v {
        Value::Scalar(s) => (s.clone(), Value::Scalar(SeriesScalar::zero(s.order()))),
        Value::Elem(e) => {
            let u = e.constant_part();
            (u.clone(), Value::Elem(e.sub(&NCElement::scalar(u))))
        }
        Value::Tensor(t) => {
            let key: super::element::TensorKey = (0..t.arity()).map(|_| Word::new()).collect();
            let u = t.terms().get(&key).cloned().unwrap_or_else(|| SeriesScalar::zero(t.order()));
            let unit = TensorElement::one(t.arity(), t.order()).scale(&u);
            (u, Value::Tensor(t.sub(&unit)))
        }
    }
}

fn require_nilpotent(n: &Value) -> Result<(), AlgebraError> {
    match n.min_valuation() {
        None => Ok(()),
        Some(v) if v >= 1 => Ok(()),
        _ => Err(AlgebraError::NonNilpotentArgument),
    }
}

fn power_series(
    m: &dyn Multiplier,
    x: &Value,
    coeffs: impl Fn(usize) -> Rational,
) -> Result<Value, AlgebraError> {
    let order = x.order();
    let mut acc = one_like(x).scale(&SeriesScalar::constant(coeffs(0), order));
    let mut power = one_like(x);
    for k in 1..=order {
        power = mul_values(m, &power, x)?;
        let c = coeffs(k);
        if !c.is_zero() {
            acc = add_values(acc, power.scale(&SeriesScalar::constant(c, order)))?;
        }
    }
    Ok(acc)
}

fn exp_value(m: &dyn Multiplier, x: &Value) -> Result<Value, AlgebraError> {
    require_nilpotent(x)?;
    power_series(m, x, |k| {
        let mut f = Rational::one();
        for i in 2..=k {
            f /= int(i as i64);
        }
        f
    })
}

fn inverse_value(m: &dyn Multiplier, b: &Value) -> Result<Value, AlgebraError> {
    let (u, n) = split_unit(b);
    let uinv = u.inverse().map_err(AlgebraError::Series)?;
    require_nilpotent(&n)?;
    let x = n.scale(&uinv);
    // (u + n)^{-1} = u^{-1} (1 + x)^{-1}
    let geo = power_series(m, &x, |k| if k % 2 == 0 { int(1) } else { int(-1) })?;
    Ok(geo.scale(&uinv))
}

fn log_value(m: &dyn Multiplier, b: &Value) -> Result<Value, AlgebraError> {
    let (u, n) = split_unit(b);
    if !u.constant_term().is_one() {
        return Err(AlgebraError::NonNilpotentArgument);
    }
    require_nilpotent(&n)?;
    let log_u = u.log().map_err(AlgebraError::Series)?;
    let uinv = u.inverse().map_err(AlgebraError::Series)?;
    let x = n.scale(&uinv);
    let series = power_series(m, &x, |k| {
        if k == 0 {
            Rational::zero()
        } else if k % 2 == 1 {
            rat(1, k as i64)
        } else {
            rat(-1, k as i64)
        }
    })?;
    add_values(series, Value::Scalar(log_u))
}

fn pow_value(m: &dyn Multiplier, b: &Value, e: &Rational) -> Result<Value, AlgebraError> {
    if e.is_integer() {
        let k: i64 = e
            .to_integer()
            .try_into()
            .map_err(|_| AlgebraError::Invalid("exponent too large".into()))?;
        let base = if k < 0 { inverse_value(m, b)? } else { b.clone() };
        let mut acc = one_like(b);
        for _ in 0..k.unsigned_abs() {
            acc = mul_values(m, &acc, &base)?;
        }
        return Ok(acc);
    }
    let (u, n) = split_unit(b);
    if !u.constant_term().is_one() {
        return Err(AlgebraError::NonNilpotentArgument);
    }
    require_nilpotent(&n)?;
    let uinv = u.inverse().map_err(AlgebraError::Series)?;
    let x = n.scale(&uinv);
    let mut binom = vec![Rational::one()];
    for k in 1..=b.order() {
        let prev = binom[k - 1].clone();
        binom.push(prev * (e - int(k as i64 - 1)) / int(k as i64));
    }
    let series = power_series(m, &x, |k| binom[k].clone())?;
    let upow = u.pow_rational(e).map_err(AlgebraError::Series)?;
    Ok(series.scale(&upow))
}

pub(crate) fn exp_element(m: &dyn Multiplier, x: &NCElement) -> Result<NCElement, AlgebraError> {
    exp_value(m, &Value::Elem(x.clone()))?.into_element()
}

pub(crate) fn inverse_element(m: &dyn Multiplier, b: &NCElement) -> Result<NCElement, AlgebraError> {
    inverse_value(m, &Value::Elem(b.clone()))?.into_element()
}

pub(crate) fn log_element(m: &dyn Multiplier, b: &NCElement) -> Result<NCElement, AlgebraError> {
    log_value(m, &Value::Elem(b.clone()))?.into_element()
}

pub fn exp_tensor(m: &dyn Multiplier, x: &TensorElement) -> Result<TensorElement, AlgebraError> {
    exp_value(m, &Value::Tensor(x.clone()))?.into_tensor(x.arity())
}

const MAX_BINDING_DEPTH: usize = 32;

/// Evaluates expressions in one algebra. Symbols resolve to bindings first
/// (images of other generators, parameter identifications), then to the
/// algebra's generators and parameter.
pub struct Evaluator<'a> {
    alg: &'a dyn Multiplier,
    bindings: BTreeMap<String, Expr>,
    recursive: bool,
    cache: Mutex<HashMap<(String, usize), Value>>,
    depth: Mutex<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(alg: &'a dyn Multiplier) -> Self {
        Evaluator {
            alg,
            bindings: BTreeMap::new(),
            recursive: true,
            cache: Mutex::new(HashMap::new()),
            depth: Mutex::new(0),
        }
    }

    pub fn with_bindings(alg: &'a dyn Multiplier, bindings: BTreeMap<String, Expr>) -> Self {
        let mut ev = Self::new(alg);
        ev.bindings = bindings;
        ev
    }

    /// Bindings whose bodies are read over the plain generators (no nested
    /// lookups), as for a coproduct table or an embedding.
    pub fn with_images(alg: &'a dyn Multiplier, images: BTreeMap<String, Expr>) -> Self {
        let mut ev = Self::with_bindings(alg, images);
        ev.recursive = false;
        ev
    }

    pub fn bind(&mut self, symbol: &str, e: Expr) {
        self.bindings.insert(symbol.to_string(), e);
        self.cache.lock().unwrap().clear();
    }

    pub fn multiplier(&self) -> &dyn Multiplier {
        self.alg
    }

    pub fn eval_element(&self, e: &Expr, order: usize) -> Result<NCElement, AlgebraError> {
        self.eval(e, order)?.into_element()
    }

    pub fn eval_tensor(&self, e: &Expr, arity: usize, order: usize) -> Result<TensorElement, AlgebraError> {
        self.eval(e, order)?.into_tensor(arity)
    }

    pub fn eval(&self, e: &Expr, order: usize) -> Result<Value, AlgebraError> {
        match e {
            Expr::Num(r) => Ok(Value::Scalar(SeriesScalar::constant(r.clone(), order))),
            Expr::Sym(s) => self.symbol(s, order),
            Expr::Add(a, b) => add_values(self.eval(a, order)?, self.eval(b, order)?),
            Expr::Sub(a, b) => add_values(self.eval(a, order)?, self.eval(b, order)?.neg()),
            Expr::Neg(a) => Ok(self.eval(a, order)?.neg()),
            Expr::Mul(a, b) => {
                if let Some((num, den)) = self.hoist_denominators(e, order)? {
                    return self.divide(&num, &den, order);
                }
                let x = self.eval(a, order)?;
                let y = self.eval(b, order)?;
                mul_values(self.alg, &x, &y)
            }
            Expr::Div(a, b) => self.divide(a, b, order),
            Expr::Pow(a, k) => {
                let base = self.eval(a, order)?;
                pow_value(self.alg, &base, k)
            }
            Expr::Call(f, args) => match f {
                Func::Exp => exp_value(self.alg, &self.eval(&args[0], order)?),
                Func::Sinh | Func::Cosh => {
                    let x = self.eval(&args[0], order)?;
                    let p = exp_value(self.alg, &x)?;
                    let q = exp_value(self.alg, &x.neg())?;
                    let half = SeriesScalar::constant(rat(1, 2), order);
                    let combined = if *f == Func::Sinh {
                        add_values(p, q.neg())?
                    } else {
                        add_values(p, q)?
                    };
                    Ok(combined.scale(&half))
                }
                Func::Log => log_value(self.alg, &self.eval(&args[0], order)?),
                Func::Tensor => {
                    let slots = args
                        .iter()
                        .map(|a| self.eval(a, order)?.into_element())
                        .collect::<Result<Vec<_>, _>>()?;
                    let refs: Vec<&NCElement> = slots.iter().collect();
                    Ok(Value::Tensor(TensorElement::from_factors(&refs)))
                }
            },
        }
    }

    fn symbol(&self, s: &str, order: usize) -> Result<Value, AlgebraError> {
        if let Some(bound) = self.bindings.get(s) {
            let key = (s.to_string(), order);
            if let Some(v) = self.cache.lock().unwrap().get(&key) {
                return Ok(v.clone());
            }
            {
                let mut d = self.depth.lock().unwrap();
                if *d >= MAX_BINDING_DEPTH {
                    return Err(AlgebraError::BindingCycle(s.to_string()));
                }
                *d += 1;
            }
            let v = if self.recursive {
                self.eval(bound, order)
            } else {
                Evaluator::new(self.alg).eval(bound, order)
            };
            *self.depth.lock().unwrap() -= 1;
            let v = v?;
            self.cache.lock().unwrap().insert(key, v.clone());
            return Ok(v);
        }
        if let Some(i) = self.alg.index_of(s) {
            return Ok(Value::Elem(NCElement::generator(i, order)));
        }
        if s == self.alg.parameter() {
            return Ok(Value::Scalar(SeriesScalar::monomial(Rational::one(), 1, order)));
        }
        Err(AlgebraError::UnknownGenerator(s.to_string()))
    }

    /// Rewrites a product containing factors `p/q`, with `q` a scalar of
    /// positive valuation, as a single quotient so that `2/z*(exp(z*X) - 1)`
    /// divides the whole product rather than the constant.
    fn hoist_denominators(&self, e: &Expr, order: usize) -> Result<Option<(Expr, Expr)>, AlgebraError> {
        let mut factors = Vec::new();
        flatten_product(e, &mut factors);
        let mut num = Vec::new();
        let mut den = Vec::new();
        for f in factors {
            if let Expr::Div(p, q) = f {
                if let Value::Scalar(d) = self.eval(q, order + 1)? {
                    if d.valuation().is_some_and(|v| v > 0) {
                        num.push((**p).clone());
                        den.push((**q).clone());
                        continue;
                    }
                }
            }
            num.push(f.clone());
        }
        if den.is_empty() {
            return Ok(None);
        }
        let product = |v: Vec<Expr>| v.into_iter().reduce(|a, b| Expr::Mul(Box::new(a), Box::new(b))).unwrap();
        Ok(Some((product(num), product(den))))
    }

    fn divide(&self, a: &Expr, b: &Expr, order: usize) -> Result<Value, AlgebraError> {
        let probe = self.eval(b, order + 1)?;
        match probe {
            Value::Scalar(d) => {
                let v = d
                    .valuation()
                    .ok_or(AlgebraError::Series(crate::qseries::SeriesError::NotAUnit))?;
                if v == 0 {
                    let inv = d.truncate(order).inverse().map_err(AlgebraError::Series)?;
                    return Ok(self.eval(a, order)?.scale(&inv));
                }
                let d = if v == 1 { d } else { self.eval(b, order + v)?.into_scalar()? };
                let unit = d.shift_down(v).map_err(AlgebraError::Series)?.inverse().map_err(AlgebraError::Series)?;
                let num = self.eval(a, order + v)?;
                Ok(shift_value(&num, v)?.scale(&unit))
            }
            other => {
                let inv = inverse_value(self.alg, &other.truncate(order))?;
                let num = self.eval(a, order)?;
                mul_values(self.alg, &num, &inv)
            }
        }
    }
}

impl Value {
    fn into_scalar(self) -> Result<SeriesScalar, AlgebraError> {
        match self {
            Value::Scalar(s) => Ok(s),
            _ => Err(AlgebraError::TypeMismatch("expected a scalar".into())),
        }
    }
}

fn flatten_product<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match e {
        Expr::Mul(a, b) => {
            flatten_product(a, out);
            flatten_product(b, out);
        }
        _ => out.push(e),
    }
}

fn shift_value(v: &Value, power: usize) -> Result<Value, AlgebraError> {
    let err = |e| AlgebraError::Series(e);
    Ok(match v {
        Value::Scalar(s) => Value::Scalar(s.shift_down(power).map_err(err)?),
        Value::Elem(e) => {
            let mut out = NCElement::zero(e.order() - power);
            for (w, c) in e.terms() {
                out.add_term(w.clone(), c.shift_down(power).map_err(err)?);
            }
            Value::Elem(out)
        }
        Value::Tensor(t) => {
            let mut out = TensorElement::zero(t.arity(), t.order() - power);
            for (k, c) in t.terms() {
                out.add_term(k.clone(), c.shift_down(power).map_err(err)?);
            }
            Value::Tensor(out)
        }
    })
}
