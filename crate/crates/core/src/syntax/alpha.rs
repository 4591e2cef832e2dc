//! Alpha-equivalence, free variables and wrapper stripping.

use std::collections::BTreeSet;

use super::{Arg, Bind, Match, Name, Pattern, Term};

/// Remove every `Pos` and `Ann` wrapper, everywhere in the term.
pub fn strip(t: &Term) -> Term {
    use Term::*;
    match t {
        Pos(_, a) | Ann(a, _) => strip(a),
        Type | Var(_) | TrustMe | TyUnit | LitUnit | Refl => t.clone(),
        Lam(e, b) => Lam(*e, strip_bind(b)),
        App(f, a) => App(Box::new(strip(f)), Box::new(strip_arg(a))),
        Pi(e, a, b) => Pi(*e, Box::new(strip(a)), strip_bind(b)),
        TySigma(a, b) => TySigma(Box::new(strip(a)), strip_bind(b)),
        Prod(a, b) => Prod(Box::new(strip(a)), Box::new(strip(b))),
        LetPair(a, b) => LetPair(
            Box::new(strip(a)),
            super::Bind2 { first: b.first.clone(), second: b.second.clone(), body: Box::new(strip(&b.body)) },
        ),
        Let(a, b) => Let(Box::new(strip(a)), strip_bind(b)),
        TyEq(a, b) => TyEq(Box::new(strip(a)), Box::new(strip(b))),
        Subst(a, b) => Subst(Box::new(strip(a)), Box::new(strip(b))),
        Contra(a) => Contra(Box::new(strip(a))),
        TyCon(k, args) => TyCon(k.clone(), args.iter().map(strip_arg).collect()),
        DataCon(k, args) => DataCon(k.clone(), args.iter().map(strip_arg).collect()),
        Case(s, ms) => Case(
            Box::new(strip(s)),
            ms.iter()
                .map(|m| Match { pattern: m.pattern.clone(), body: strip(&m.body) })
                .collect(),
        ),
    }
}

fn strip_bind(b: &Bind) -> Bind {
    Bind { name: b.name.clone(), body: Box::new(strip(&b.body)) }
}

fn strip_arg(a: &Arg) -> Arg {
    Arg { eps: a.eps, term: strip(&a.term) }
}

fn unwrap(mut t: &Term) -> &Term {
    while let Term::Pos(_, a) | Term::Ann(a, _) = t {
        t = a;
    }
    t
}

/// Alpha-equivalence, ignoring `Pos` and `Ann`.
pub fn aeq(a: &Term, b: &Term) -> bool {
    Alpha::default().eq(a, b)
}

/// Parallel stacks of binders currently open on each side.
#[derive(Default)]
struct Alpha {
    left: Vec<Name>,
    right: Vec<Name>,
}

impl Alpha {
    fn var(&self, x: &Name, y: &Name) -> bool {
        let i = self.left.iter().rposition(|n| n == x);
        let j = self.right.iter().rposition(|n| n == y);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn under(&mut self, x: &Name, y: &Name, a: &Term, b: &Term) -> bool {
        self.left.push(x.clone());
        self.right.push(y.clone());
        let r = self.eq(a, b);
        self.left.pop();
        self.right.pop();
        r
    }

    fn bind(&mut self, a: &Bind, b: &Bind) -> bool {
        self.under(&a.name, &b.name, &a.body, &b.body)
    }

    fn args(&mut self, a: &[Arg], b: &[Arg]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| x.eps == y.eps && self.eq(&x.term, &y.term))
    }

    fn eq(&mut self, a: &Term, b: &Term) -> bool {
        use Term::*;
        match (unwrap(a), unwrap(b)) {
            (Type, Type) | (TrustMe, TrustMe) | (TyUnit, TyUnit) | (LitUnit, LitUnit) | (Refl, Refl) => true,
            (Var(x), Var(y)) => self.var(x, y),
            (Lam(e1, b1), Lam(e2, b2)) => e1 == e2 && self.bind(b1, b2),
            (App(f1, a1), App(f2, a2)) => {
                a1.eps == a2.eps && self.eq(f1, f2) && self.eq(&a1.term, &a2.term)
            }
            (Pi(e1, a1, b1), Pi(e2, a2, b2)) => e1 == e2 && self.eq(a1, a2) && self.bind(b1, b2),
            (TySigma(a1, b1), TySigma(a2, b2)) => self.eq(a1, a2) && self.bind(b1, b2),
            (Prod(a1, b1), Prod(a2, b2))
            | (TyEq(a1, b1), TyEq(a2, b2))
            | (Subst(a1, b1), Subst(a2, b2)) => self.eq(a1, a2) && self.eq(b1, b2),
            (LetPair(s1, b1), LetPair(s2, b2)) => {
                if !self.eq(s1, s2) {
                    return false;
                }
                self.left.push(b1.first.clone());
                self.left.push(b1.second.clone());
                self.right.push(b2.first.clone());
                self.right.push(b2.second.clone());
                let r = self.eq(&b1.body, &b2.body);
                self.left.truncate(self.left.len() - 2);
                self.right.truncate(self.right.len() - 2);
                r
            }
            (Let(a1, b1), Let(a2, b2)) => self.eq(a1, a2) && self.bind(b1, b2),
            (Contra(a1), Contra(a2)) => self.eq(a1, a2),
            (TyCon(k1, a1), TyCon(k2, a2)) | (DataCon(k1, a1), DataCon(k2, a2)) => {
                k1 == k2 && self.args(a1, a2)
            }
            (Case(s1, m1), Case(s2, m2)) => {
                self.eq(s1, s2)
                    && m1.len() == m2.len()
                    && m1.iter().zip(m2).all(|(x, y)| self.branch(x, y))
            }
            _ => false,
        }
    }

    fn branch(&mut self, a: &Match, b: &Match) -> bool {
        let mut pairs = Vec::new();
        if !same_shape(&a.pattern, &b.pattern, &mut pairs) {
            return false;
        }
        let n = pairs.len();
        for (x, y) in pairs {
            self.left.push(x);
            self.right.push(y);
        }
        let r = self.eq(&a.body, &b.body);
        self.left.truncate(self.left.len() - n);
        self.right.truncate(self.right.len() - n);
        r
    }
}

/// Do two patterns have the same constructor skeleton? Collects the pairing
/// of their variables.
pub fn same_shape(a: &Pattern, b: &Pattern, pairs: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Pattern::Var(x), Pattern::Var(y)) => {
            pairs.push((x.clone(), y.clone()));
            true
        }
        (Pattern::Con(k1, a1), Pattern::Con(k2, a2)) => {
            k1 == k2
                && a1.len() == a2.len()
                && a1
                    .iter()
                    .zip(a2)
                    .all(|((p, e1), (q, e2))| e1 == e2 && same_shape(p, q, pairs))
        }
        _ => false,
    }
}

/// Free variables of a term.
pub fn fv(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect(t, &mut Vec::new(), &mut out);
    out
}

fn collect(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    use Term::*;
    let under = |names: &[Name], body: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>| {
        bound.extend(names.iter().cloned());
        collect(body, bound, out);
        bound.truncate(bound.len() - names.len());
    };
    match t {
        Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Type | TrustMe | TyUnit | LitUnit | Refl => {}
        Pos(_, a) | Contra(a) => collect(a, bound, out),
        Lam(_, b) => under(std::slice::from_ref(&b.name), &b.body, bound, out),
        App(f, a) => {
            collect(f, bound, out);
            collect(&a.term, bound, out);
        }
        Pi(_, a, b) | TySigma(a, b) | Let(a, b) => {
            collect(a, bound, out);
            under(std::slice::from_ref(&b.name), &b.body, bound, out);
        }
        Ann(a, b) | Prod(a, b) | TyEq(a, b) | Subst(a, b) => {
            collect(a, bound, out);
            collect(b, bound, out);
        }
        LetPair(a, b) => {
            collect(a, bound, out);
            under(&[b.first.clone(), b.second.clone()], &b.body, bound, out);
        }
        TyCon(_, args) | DataCon(_, args) => {
            for a in args {
                collect(&a.term, bound, out);
            }
        }
        Case(s, ms) => {
            collect(s, bound, out);
            for m in ms {
                under(&m.pattern.vars(), &m.body, bound, out);
            }
        }
    }
}

/// Does `x` occur free in `t`?
pub fn occurs_free(x: &Name, t: &Term) -> bool {
    use Term::*;
    match t {
        Var(y) => x == y,
        Type | TrustMe | TyUnit | LitUnit | Refl => false,
        Pos(_, a) | Contra(a) => occurs_free(x, a),
        Lam(_, b) => b.name != *x && occurs_free(x, &b.body),
        App(f, a) => occurs_free(x, f) || occurs_free(x, &a.term),
        Pi(_, a, b) | TySigma(a, b) | Let(a, b) => {
            occurs_free(x, a) || (b.name != *x && occurs_free(x, &b.body))
        }
        Ann(a, b) | Prod(a, b) | TyEq(a, b) | Subst(a, b) => occurs_free(x, a) || occurs_free(x, b),
        LetPair(a, b) => {
            occurs_free(x, a) || (b.first != *x && b.second != *x && occurs_free(x, &b.body))
        }
        TyCon(_, args) | DataCon(_, args) => args.iter().any(|a| occurs_free(x, &a.term)),
        Case(s, ms) => {
            occurs_free(x, s)
                || ms.iter().any(|m| !m.pattern.vars().contains(x) && occurs_free(x, &m.body))
        }
    }
}
