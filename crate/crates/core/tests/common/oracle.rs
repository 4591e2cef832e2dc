//! Reference semantics kept apart from the library: a de Bruijn
//! representation, its own free-variable computation, and a naive full
//! normaliser that unfolds every global definition.

use std::collections::{BTreeSet, HashMap};

use pi_check::surface::{Decl, ModuleAST};
use pi_check::syntax::{Epsilon, Name, Pattern, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum D {
    Bound(usize),
    Free(Name),
    Type,
    TrustMe,
    TyUnit,
    LitUnit,
    Refl,
    Lam(Epsilon, Box<D>),
    App(Box<D>, Epsilon, Box<D>),
    Pi(Epsilon, Box<D>, Box<D>),
    Ann(Box<D>, Box<D>),
    Sigma(Box<D>, Box<D>),
    Prod(Box<D>, Box<D>),
    /// Binds two: the first component is index 1, the second index 0.
    LetPair(Box<D>, Box<D>),
    Let(Box<D>, Box<D>),
    Eq(Box<D>, Box<D>),
    Subst(Box<D>, Box<D>),
    Contra(Box<D>),
    TyCon(String, Vec<(Epsilon, D)>),
    DataCon(String, Vec<(Epsilon, D)>),
    /// A pattern with `n` variables binds them left to right, so the last
    /// one is index 0.
    Case(Box<D>, Vec<(P, D)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum P {
    Var,
    Con(String, Vec<(P, Epsilon)>),
}

impl P {
    fn arity(&self) -> usize {
        match self {
            P::Var => 1,
            P::Con(_, ps) => ps.iter().map(|(p, _)| p.arity()).sum(),
        }
    }
}

/// Convert to de Bruijn form. `Pos` is always dropped; `Ann` is dropped
/// unless `keep_ann`.
pub fn to_db(t: &Term, keep_ann: bool) -> D {
    Conv { scope: Vec::new(), keep_ann }.go(t)
}

struct Conv {
    scope: Vec<Name>,
    keep_ann: bool,
}

impl Conv {
    fn under(&mut self, names: &[Name], t: &Term) -> D {
        self.scope.extend(names.iter().cloned());
        let d = self.go(t);
        self.scope.truncate(self.scope.len() - names.len());
        d
    }

    fn args(&mut self, args: &[pi_check::syntax::Arg]) -> Vec<(Epsilon, D)> {
        args.iter().map(|a| (a.eps, self.go(&a.term))).collect()
    }

    fn go(&mut self, t: &Term) -> D {
        use Term::*;
        let b = Box::new;
        match t {
            Var(x) => match self.scope.iter().rposition(|y| y == x) {
                Some(i) => D::Bound(self.scope.len() - 1 - i),
                None => D::Free(x.clone()),
            },
            Type => D::Type,
            TrustMe => D::TrustMe,
            TyUnit => D::TyUnit,
            LitUnit => D::LitUnit,
            Refl => D::Refl,
            Pos(_, a) => self.go(a),
            Ann(a, ty) => {
                if self.keep_ann {
                    D::Ann(b(self.go(a)), b(self.go(ty)))
                } else {
                    self.go(a)
                }
            }
            Lam(e, bd) => D::Lam(*e, b(self.under(&[bd.name.clone()], &bd.body))),
            App(f, a) => D::App(b(self.go(f)), a.eps, b(self.go(&a.term))),
            Pi(e, a, bd) => D::Pi(*e, b(self.go(a)), b(self.under(&[bd.name.clone()], &bd.body))),
            TySigma(a, bd) => D::Sigma(b(self.go(a)), b(self.under(&[bd.name.clone()], &bd.body))),
            Prod(x, y) => D::Prod(b(self.go(x)), b(self.go(y))),
            LetPair(a, bd) => {
                let s = self.go(a);
                D::LetPair(b(s), b(self.under(&[bd.first.clone(), bd.second.clone()], &bd.body)))
            }
            Let(a, bd) => D::Let(b(self.go(a)), b(self.under(&[bd.name.clone()], &bd.body))),
            TyEq(x, y) => D::Eq(b(self.go(x)), b(self.go(y))),
            Subst(x, y) => D::Subst(b(self.go(x)), b(self.go(y))),
            Contra(a) => D::Contra(b(self.go(a))),
            TyCon(k, args) => D::TyCon(k.to_string(), self.args(args)),
            DataCon(k, args) => D::DataCon(k.to_string(), self.args(args)),
            Case(s, ms) => {
                let s = self.go(s);
                let bs = ms
                    .iter()
                    .map(|m| (pat(&m.pattern), self.under(&m.pattern.vars(), &m.body)))
                    .collect();
                D::Case(b(s), bs)
            }
        }
    }
}

fn pat(p: &Pattern) -> P {
    match p {
        Pattern::Var(_) => P::Var,
        Pattern::Con(k, ps) => P::Con(k.to_string(), ps.iter().map(|(p, e)| (pat(p), *e)).collect()),
    }
}

/// Free variables, computed from the de Bruijn form.
pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(&to_db(t, true), &mut out);
    out
}

fn collect_free(d: &D, out: &mut BTreeSet<Name>) {
    each_child(d, &mut |c, _| collect_free(c, out));
    if let D::Free(x) = d {
        out.insert(x.clone());
    }
}

/// Visit immediate children with the number of binders each sits under.
fn each_child(d: &D, f: &mut impl FnMut(&D, usize)) {
    match d {
        D::Bound(_) | D::Free(_) | D::Type | D::TrustMe | D::TyUnit | D::LitUnit | D::Refl => {}
        D::Lam(_, b) => f(b, 1),
        D::App(x, _, y) | D::Ann(x, y) | D::Prod(x, y) | D::Eq(x, y) | D::Subst(x, y) => {
            f(x, 0);
            f(y, 0);
        }
        D::Pi(_, a, b) | D::Sigma(a, b) | D::Let(a, b) => {
            f(a, 0);
            f(b, 1);
        }
        D::LetPair(a, b) => {
            f(a, 0);
            f(b, 2);
        }
        D::Contra(a) => f(a, 0),
        D::TyCon(_, args) | D::DataCon(_, args) => {
            for (_, a) in args {
                f(a, 0);
            }
        }
        D::Case(s, bs) => {
            f(s, 0);
            for (p, b) in bs {
                f(b, p.arity());
            }
        }
    }
}

/// Rebuild `d` with `leaf` applied to every `Bound` index, given the number
/// of binders passed so far.
fn map_bound(d: &D, depth: usize, leaf: &impl Fn(usize, usize) -> D) -> D {
    use D::*;
    let b = Box::new;
    let m = |x: &D, k: usize| map_bound(x, depth + k, leaf);
    let args = |a: &[(Epsilon, D)]| a.iter().map(|(e, x)| (*e, m(x, 0))).collect();
    match d {
        Bound(i) => leaf(*i, depth),
        Free(_) | Type | TrustMe | TyUnit | LitUnit | Refl => d.clone(),
        Lam(e, x) => Lam(*e, b(m(x, 1))),
        App(x, e, y) => App(b(m(x, 0)), *e, b(m(y, 0))),
        Pi(e, x, y) => Pi(*e, b(m(x, 0)), b(m(y, 1))),
        Ann(x, y) => Ann(b(m(x, 0)), b(m(y, 0))),
        Sigma(x, y) => Sigma(b(m(x, 0)), b(m(y, 1))),
        Prod(x, y) => Prod(b(m(x, 0)), b(m(y, 0))),
        LetPair(x, y) => LetPair(b(m(x, 0)), b(m(y, 2))),
        Let(x, y) => Let(b(m(x, 0)), b(m(y, 1))),
        Eq(x, y) => Eq(b(m(x, 0)), b(m(y, 0))),
        Subst(x, y) => Subst(b(m(x, 0)), b(m(y, 0))),
        Contra(x) => Contra(b(m(x, 0))),
        TyCon(k, a) => TyCon(k.clone(), args(a)),
        DataCon(k, a) => DataCon(k.clone(), args(a)),
        Case(s, bs) => Case(b(m(s, 0)), bs.iter().map(|(p, x)| (p.clone(), m(x, p.arity()))).collect()),
    }
}

fn shift(d: &D, by: usize) -> D {
    if by == 0 {
        return d.clone();
    }
    map_bound(d, 0, &|i, depth| if i < depth { D::Bound(i) } else { D::Bound(i + by) })
}

/// Replace the outermost `vals.len()` bound indices of `body`: index `k`
/// becomes `vals[k]`.
fn inst(body: &D, vals: &[D]) -> D {
    let n = vals.len();
    map_bound(body, 0, &|i, depth| {
        if i < depth {
            D::Bound(i)
        } else if i - depth < n {
            shift(&vals[i - depth], depth)
        } else {
            D::Bound(i - n)
        }
    })
}

/// Global definitions the normaliser may unfold.
#[derive(Clone, Debug, Default)]
pub struct Globals(HashMap<Name, D>);

impl Globals {
    pub fn from_modules<'a>(ms: impl IntoIterator<Item = &'a ModuleAST>) -> Globals {
        let mut g = HashMap::new();
        for m in ms {
            for d in &m.decls {
                if let Decl::Def { name, term, .. } = d {
                    g.insert(name.clone(), to_db(term, false));
                }
            }
        }
        Globals(g)
    }

    pub fn whnf(&self, d: &D) -> D {
        let mut d = d.clone();
        loop {
            match d {
                D::Free(ref x) if self.0.contains_key(x) => d = self.0[x].clone(),
                D::App(f, e, a) => match self.whnf(&f) {
                    D::Lam(_, body) => d = inst(&body, &[*a]),
                    f => return D::App(Box::new(f), e, a),
                },
                D::Ann(a, _) => d = *a,
                D::Let(a, body) => d = inst(&body, &[*a]),
                D::LetPair(p, body) => match self.whnf(&p) {
                    D::Prod(x, y) => d = inst(&body, &[*y, *x]),
                    p => return D::LetPair(Box::new(p), body),
                },
                D::Case(s, bs) => {
                    let s = self.whnf(&s);
                    match self.select(&s, &bs) {
                        Some((vals, body)) => d = inst(&body, &vals),
                        None => return D::Case(Box::new(s), bs),
                    }
                }
                D::Subst(a, pf) => match self.whnf(&pf) {
                    D::Refl => d = *a,
                    pf => return D::Subst(a, Box::new(pf)),
                },
                other => return other,
            }
        }
    }

    /// The first branch whose pattern matches, unless an earlier pattern is
    /// stuck on a neutral subterm.
    fn select(&self, s: &D, bs: &[(P, D)]) -> Option<(Vec<D>, D)> {
        for (p, body) in bs {
            let mut vals = Vec::new();
            match self.matches(p, s, &mut vals) {
                Some(true) => {
                    vals.reverse();
                    return Some((vals, body.clone()));
                }
                Some(false) => continue,
                None => return None,
            }
        }
        None
    }

    /// Some(true) on a match (pushing values left to right), Some(false) on
    /// a clash, None when stuck.
    fn matches(&self, p: &P, d: &D, vals: &mut Vec<D>) -> Option<bool> {
        match p {
            P::Var => {
                vals.push(d.clone());
                Some(true)
            }
            P::Con(k, ps) => match self.whnf(d) {
                D::DataCon(k2, args) => {
                    if *k != k2 || args.len() != ps.len() {
                        return Some(false);
                    }
                    for ((p, _), (_, a)) in ps.iter().zip(&args) {
                        match self.matches(p, a, vals)? {
                            true => {}
                            false => return Some(false),
                        }
                    }
                    Some(true)
                }
                _ => None,
            },
        }
    }

    /// Full normal form. Only terminates on strongly-normalising input.
    pub fn nf(&self, d: &D) -> D {
        use D::*;
        let b = Box::new;
        let args = |a: &[(Epsilon, D)]| a.iter().map(|(e, x)| (*e, self.nf(x))).collect();
        match self.whnf(d) {
            Lam(e, x) => Lam(e, b(self.nf(&x))),
            App(f, e, a) => App(b(self.nf(&f)), e, b(self.nf(&a))),
            Pi(e, x, y) => Pi(e, b(self.nf(&x)), b(self.nf(&y))),
            Sigma(x, y) => Sigma(b(self.nf(&x)), b(self.nf(&y))),
            Prod(x, y) => Prod(b(self.nf(&x)), b(self.nf(&y))),
            LetPair(x, y) => LetPair(b(self.nf(&x)), b(self.nf(&y))),
            Eq(x, y) => Eq(b(self.nf(&x)), b(self.nf(&y))),
            Subst(x, y) => Subst(b(self.nf(&x)), b(self.nf(&y))),
            Contra(x) => Contra(b(self.nf(&x))),
            TyCon(k, a) => TyCon(k, args(&a)),
            DataCon(k, a) => DataCon(k, args(&a)),
            Case(s, bs) => Case(b(self.nf(&s)), bs.iter().map(|(p, x)| (p.clone(), self.nf(x))).collect()),
            other => other,
        }
    }

    /// Do `a` and `b` have alpha-equivalent normal forms?
    pub fn convertible(&self, a: &Term, b: &Term) -> bool {
        self.nf(&to_db(a, false)) == self.nf(&to_db(b, false))
    }
}
