//! Capture-avoiding simultaneous substitution.

use std::collections::BTreeSet;
use std::rc::Rc;

use super::alpha::fv;
use super::{fresh, Arg, Bind, Bind2, Match, Name, Term};

/// A simultaneous substitution that renames binders which would capture a
/// free variable of one of its replacement terms.
#[derive(Clone, Debug)]
pub struct Substitution {
    pairs: Vec<(Name, Term)>,
    avoid: Rc<BTreeSet<Name>>,
}

impl Substitution {
    pub fn new(pairs: Vec<(Name, Term)>) -> Substitution {
        let mut avoid = BTreeSet::new();
        for (_, t) in &pairs {
            avoid.extend(fv(t));
        }
        Substitution { pairs, avoid: Rc::new(avoid) }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn lookup(&self, x: &Name) -> Option<&Term> {
        self.pairs.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    /// Move the substitution under a binder for `x`. Returns the name the
    /// binder should use from now on (a fresh one if `x` would capture).
    pub fn bind(&mut self, x: &Name) -> Name {
        self.pairs.retain(|(y, _)| y != x);
        if !self.pairs.is_empty() && self.avoid.contains(x) {
            let y = fresh(x);
            self.pairs.push((x.clone(), Term::Var(y.clone())));
            y
        } else {
            x.clone()
        }
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.pairs.is_empty() {
            return t.clone();
        }
        use Term::*;
        match t {
            Var(x) => self.lookup(x).cloned().unwrap_or_else(|| t.clone()),
            Type | TrustMe | TyUnit | LitUnit | Refl => t.clone(),
            Pos(p, a) => Pos(p.clone(), self.boxed(a)),
            Lam(e, b) => Lam(*e, self.apply_bind(b)),
            App(f, a) => App(self.boxed(f), Box::new(self.apply_arg(a))),
            Pi(e, a, b) => Pi(*e, self.boxed(a), self.apply_bind(b)),
            Ann(a, b) => Ann(self.boxed(a), self.boxed(b)),
            TySigma(a, b) => TySigma(self.boxed(a), self.apply_bind(b)),
            Prod(a, b) => Prod(self.boxed(a), self.boxed(b)),
            LetPair(a, b) => {
                let mut inner = self.clone();
                let first = inner.bind(&b.first);
                let second = inner.bind(&b.second);
                LetPair(self.boxed(a), Bind2 { first, second, body: Box::new(inner.apply(&b.body)) })
            }
            Let(a, b) => Let(self.boxed(a), self.apply_bind(b)),
            TyEq(a, b) => TyEq(self.boxed(a), self.boxed(b)),
            Subst(a, b) => Subst(self.boxed(a), self.boxed(b)),
            Contra(a) => Contra(self.boxed(a)),
            TyCon(k, args) => TyCon(k.clone(), args.iter().map(|a| self.apply_arg(a)).collect()),
            DataCon(k, args) => DataCon(k.clone(), args.iter().map(|a| self.apply_arg(a)).collect()),
            Case(s, ms) => Case(self.boxed(s), ms.iter().map(|m| self.apply_match(m)).collect()),
        }
    }

    fn boxed(&self, t: &Term) -> Box<Term> {
        Box::new(self.apply(t))
    }

    fn apply_arg(&self, a: &Arg) -> Arg {
        Arg { eps: a.eps, term: self.apply(&a.term) }
    }

    fn apply_bind(&self, b: &Bind) -> Bind {
        let mut inner = self.clone();
        let name = inner.bind(&b.name);
        Bind { name, body: Box::new(inner.apply(&b.body)) }
    }

    fn apply_match(&self, m: &Match) -> Match {
        let mut inner = self.clone();
        let pattern = m.pattern.rename(&mut |x| inner.bind(x));
        Match { pattern, body: inner.apply(&m.body) }
    }
}

/// `b[a/x]`.
pub fn subst(x: &Name, a: &Term, b: &Term) -> Term {
    Substitution::new(vec![(x.clone(), a.clone())]).apply(b)
}

/// Simultaneous substitution of every pair.
pub fn subst_many(pairs: &[(Name, Term)], b: &Term) -> Term {
    Substitution::new(pairs.to_vec()).apply(b)
}

/// Open two binders with one shared fresh name.
pub fn unbind2(b1: &Bind, b2: &Bind) -> (Name, Term, Term) {
    let x = fresh(&b1.name);
    let v = Term::Var(x.clone());
    let t1 = b1.instantiate(&v);
    let t2 = b2.instantiate(&v);
    (x, t1, t2)
}
