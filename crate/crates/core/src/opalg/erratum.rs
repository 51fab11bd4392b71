//! Single-literal perturbation search for printed data that fails a check.

use std::collections::BTreeSet;

use num::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::expr::Expr;
use crate::qseries::{render_rational, Rational};

pub const DENOMINATOR_BOUND: i64 = 8;

/// Replacing the `index`-th literal of the expression labelled `label`
/// by `new` makes the failing check pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub label: String,
    pub index: usize,
    pub old: Rational,
    pub new: Rational,
}

impl Perturbation {
    pub fn describe(&self) -> String {
        format!(
            "suspected erratum, not applied: in {} replace {} by {}",
            self.label,
            render_rational(&self.old),
            render_rational(&self.new)
        )
    }
}

/// Merges numeric subtrees so that `-1/4*t` carries the single literal
/// `-1/4`.
pub fn fold(e: &Expr) -> Expr {
    use Expr::*;
    let b = |x: Expr| Box::new(x);
    match e {
        Num(_) | Sym(_) => e.clone(),
        Add(x, y) => Add(b(fold(x)), b(fold(y))),
        Sub(x, y) => Sub(b(fold(x)), b(fold(y))),
        Mul(x, y) => match (fold(x), fold(y)) {
            (Num(p), Num(q)) => Num(p * q),
            (Num(p), Mul(u, v)) if matches!(*u, Num(_)) => {
                let Num(q) = *u else { unreachable!() };
                Mul(b(Num(p * q)), v)
            }
            (x, y) => Mul(b(x), b(y)),
        },
        Div(x, y) => match (fold(x), fold(y)) {
            (Num(p), Num(q)) if !q.is_zero() => Num(p / q),
            (Mul(u, v), Num(q)) if matches!(*u, Num(_)) && !q.is_zero() => {
                let Num(p) = *u else { unreachable!() };
                Mul(b(Num(p / q)), v)
            }
            (x, y) => Div(b(x), b(y)),
        },
        Neg(x) => match fold(x) {
            Num(p) => Num(-p),
            Mul(u, v) if matches!(*u, Num(_)) => {
                let Num(p) = *u else { unreachable!() };
                Mul(b(Num(-p)), v)
            }
            x => Mul(b(Num(-Rational::from_integer(1.into()))), b(x)),
        },
        Pow(x, k) => Pow(b(fold(x)), k.clone()),
        Call(f, args) => Call(*f, args.iter().map(fold).collect()),
    }
}

/// Numeric literals in preorder.
pub fn literals(e: &Expr) -> Vec<Rational> {
    let mut out = Vec::new();
    walk(e, &mut |r| out.push(r.clone()));
    out
}

fn walk(e: &Expr, f: &mut impl FnMut(&Rational)) {
    use Expr::*;
    match e {
        Num(r) => f(r),
        Sym(_) => {}
        Add(x, y) | Sub(x, y) | Mul(x, y) | Div(x, y) => {
            walk(x, f);
            walk(y, f);
        }
        Neg(x) | Pow(x, _) => walk(x, f),
        Call(_, args) => args.iter().for_each(|a| walk(a, f)),
    }
}

/// Replaces the `index`-th literal in preorder.
pub fn replace(e: &Expr, index: usize, new: &Rational) -> Expr {
    let mut seen = 0;
    rebuild(e, index, new, &mut seen)
}

fn rebuild(e: &Expr, index: usize, new: &Rational, seen: &mut usize) -> Expr {
    use Expr::*;
    let mut go = |x: &Expr| Box::new(rebuild(x, index, new, seen));
    match e {
        Num(r) => {
            let hit = *seen == index;
            *seen += 1;
            Num(if hit { new.clone() } else { r.clone() })
        }
        Sym(_) => e.clone(),
        Add(x, y) => {
            let x = go(x);
            Add(x, go(y))
        }
        Sub(x, y) => {
            let x = go(x);
            Sub(x, go(y))
        }
        Mul(x, y) => {
            let x = go(x);
            Mul(x, go(y))
        }
        Div(x, y) => {
            let x = go(x);
            Div(x, go(y))
        }
        Neg(x) => Neg(go(x)),
        Pow(x, k) => Pow(go(x), k.clone()),
        Call(f, args) => Call(*f, args.iter().map(|a| *go(a)).collect()),
    }
}

/// Rationals with denominator at most [`DENOMINATOR_BOUND`] near `old`,
/// nearest first.
fn candidates(old: &Rational) -> Vec<Rational> {
    let bound = (old.abs().to_f64().unwrap_or(0.0) * 2.0).max(4.0).ceil() as i64;
    let mut set = BTreeSet::new();
    for q in 1..=DENOMINATOR_BOUND {
        for p in -bound * q..=bound * q {
            let v = Rational::new(p.into(), q.into());
            if &v != old {
                set.insert(v);
            }
        }
    }
    let mut out: Vec<Rational> = set.into_iter().collect();
    out.sort_by(|a, b| {
        let (da, db) = ((a - old).abs(), (b - old).abs());
        da.cmp(&db).then(a.denom().cmp(b.denom())).then(a.cmp(b))
    });
    out
}

/// Smallest single-literal change to one of `targets` accepted by `accept`,
/// which receives the target index and the modified expression. Targets
/// should already be [`fold`]ed.
pub fn search(targets: &[(String, Expr)], accept: impl Fn(usize, &Expr) -> bool + Sync) -> Option<Perturbation> {
    let mut trials = Vec::new();
    for (t, (_, e)) in targets.iter().enumerate() {
        for (i, old) in literals(e).into_iter().enumerate() {
            for new in candidates(&old) {
                trials.push((t, i, old.clone(), new));
            }
        }
    }
    trials.sort_by(|a, b| {
        let (da, db) = ((&a.3 - &a.2).abs(), (&b.3 - &b.2).abs());
        da.cmp(&db).then(a.3.denom().cmp(b.3.denom())).then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    trials
        .par_iter()
        .find_first(|(t, i, _, new)| accept(*t, &replace(&targets[*t].1, *i, new)))
        .map(|(t, i, old, new)| Perturbation {
            label: targets[*t].0.clone(),
            index: *i,
            old: old.clone(),
            new: new.clone(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::qseries::rat;

    #[test]
    fn folding_merges_signs_and_fractions() {
        let e = fold(&parse("-1/4*t + 3*(2 + x)").unwrap());
        assert_eq!(literals(&e), vec![rat(-1, 4), rat(3, 1), rat(2, 1)]);
    }

    #[test]
    fn finds_the_nearest_fix() {
        let target = fold(&parse("-1/2*x").unwrap());
        let want = parse("-1/4*x").unwrap();
        let got = search(&[("K".into(), target)], |_, e| fold(e) == fold(&want)).unwrap();
        assert_eq!((got.old, got.new), (rat(-1, 2), rat(-1, 4)));
    }

    #[test]
    fn gives_up_outside_the_bound() {
        let target = fold(&parse("2*x").unwrap());
        assert!(search(&[("K".into(), target)], |_, e| literals(e) == vec![rat(1, 9)]).is_none());
    }
}
