//! Weak-head normalization, definitional equality and first-order
//! unification of pattern images.

use std::collections::HashSet;

use crate::env::{CheckError, Context, Entry, ErrorClass};
use crate::syntax::{
    aeq, fresh, occurs_free, same_shape, subst, subst_many, unbind2, Arg, ConName, Epsilon, Match, Name, Pattern, Term,
};

type Result<T> = std::result::Result<T, CheckError>;

/// Reduce to weak-head normal form, unfolding definitions.
pub fn whnf(ctx: &Context, t: &Term) -> Result<Term> {
    reduce(ctx, t.clone(), true)
}

/// Like [`whnf`], but leaves a defined variable at the head folded.
pub fn whnf_core(ctx: &Context, t: &Term) -> Result<Term> {
    reduce(ctx, t.clone(), false)
}

enum Matched {
    Yes,
    No,
    Stuck,
}

fn reduce(ctx: &Context, t: Term, unfold_head: bool) -> Result<Term> {
    // Arguments waiting for the head to become a lambda; innermost last.
    let mut spine: Vec<Arg> = Vec::new();
    let mut head = t;
    loop {
        head = match head {
            Term::Pos(_, a) | Term::Ann(a, _) => *a,
            Term::App(f, a) => {
                // Source positions on arguments would otherwise pile up,
                // one layer per unfolding of a recursive definition.
                let mut a = *a;
                while let Term::Pos(_, inner) = a.term {
                    a.term = *inner;
                }
                spine.push(a);
                *f
            }
            Term::Lam(eps, b) if !spine.is_empty() => {
                let a = spine.pop().expect("nonempty spine");
                if a.eps != eps {
                    spine.push(a);
                    head = Term::Lam(eps, b);
                    break;
                }
                ctx.tick()?;
                b.instantiate(&a.term)
            }
            Term::Var(x) => {
                if unfold_head && ctx.unfold_definitions() {
                    if let Some(d) = ctx.lookup_def(&x) {
                        ctx.tick()?;
                        head = d.clone();
                        continue;
                    }
                }
                head = Term::Var(x);
                break;
            }
            Term::Let(a, b) => {
                ctx.tick()?;
                b.instantiate(&a)
            }
            Term::LetPair(a, b) => {
                let s = whnf(ctx, &a)?;
                if let Term::Prod(x, y) = s {
                    ctx.tick()?;
                    b.instantiate(&x, &y)
                } else {
                    head = Term::LetPair(Box::new(s), b);
                    break;
                }
            }
            Term::Case(s, ms) => {
                let s = whnf(ctx, &s)?;
                match select(ctx, &s, &ms)? {
                    Some(body) => {
                        ctx.tick()?;
                        body
                    }
                    None => {
                        head = Term::Case(Box::new(s), ms);
                        break;
                    }
                }
            }
            Term::Subst(a, pf) => {
                let p = whnf(ctx, &pf)?;
                if matches!(p, Term::Refl) {
                    ctx.tick()?;
                    *a
                } else {
                    head = Term::Subst(a, Box::new(p));
                    break;
                }
            }
            other => {
                head = other;
                break;
            }
        };
    }
    while let Some(a) = spine.pop() {
        head = Term::App(Box::new(head), Box::new(a));
    }
    Ok(head)
}

/// Pick the first branch matching a (weak-head normal) scrutinee.
fn select(ctx: &Context, scrut: &Term, ms: &[Match]) -> Result<Option<Term>> {
    for m in ms {
        let mut binds = Vec::new();
        match match_pattern(ctx, &m.pattern, scrut, &mut binds)? {
            Matched::Yes => return Ok(Some(subst_many(&binds, &m.body))),
            Matched::No => continue,
            Matched::Stuck => return Ok(None),
        }
    }
    Ok(None)
}

fn match_pattern(ctx: &Context, p: &Pattern, t: &Term, binds: &mut Vec<(Name, Term)>) -> Result<Matched> {
    match p {
        Pattern::Var(x) => {
            binds.push((x.clone(), t.clone()));
            Ok(Matched::Yes)
        }
        Pattern::Con(k, ps) => {
            let t = whnf(ctx, t)?;
            match &t {
                Term::DataCon(k2, args) if k2 == k && args.len() == ps.len() => {
                    for ((q, _), a) in ps.iter().zip(args) {
                        match match_pattern(ctx, q, &a.term, binds)? {
                            Matched::Yes => {}
                            other => return Ok(other),
                        }
                    }
                    Ok(Matched::Yes)
                }
                Term::DataCon(..) => Ok(Matched::No),
                _ => Ok(Matched::Stuck),
            }
        }
    }
}

/// Head variable of an application spine, if it has a definition.
fn defined_head<'a>(ctx: &Context, t: &'a Term) -> Option<(&'a Name, Vec<&'a Arg>)> {
    let mut args = Vec::new();
    let mut h = t;
    while let Term::App(f, a) = h {
        args.push(&**a);
        h = f;
    }
    match h {
        Term::Var(x) if ctx.unfold_definitions() && ctx.lookup_def(x).is_some() => {
            args.reverse();
            Some((x, args))
        }
        _ => None,
    }
}

fn mismatch(ctx: &Context, expected: &Term, found: &Term) -> CheckError {
    ctx.err(
        ErrorClass::TypeMismatch,
        vec!["Expected".into(), expected.into(), "but found".into(), found.into()],
    )
}

/// Definitional equality. Succeeds or reports the first pair of differing
/// weak-head forms.
pub fn equate(ctx: &Context, a: &Term, b: &Term) -> Result<()> {
    if aeq(a, b) {
        return Ok(());
    }
    let a = whnf_core(ctx, a)?;
    let b = whnf_core(ctx, b)?;
    if let (Some((f, xs)), Some((g, ys))) = (defined_head(ctx, &a), defined_head(ctx, &b)) {
        if f == g && xs.len() == ys.len() {
            match equate_args(ctx, &xs, &ys) {
                Ok(()) => return Ok(()),
                Err(e) if e.class == ErrorClass::StepLimit => return Err(e),
                Err(_) => {}
            }
        }
    }
    let a = whnf(ctx, &a)?;
    let b = whnf(ctx, &b)?;
    equate_whnf(ctx, &a, &b)
}

fn equate_args(ctx: &Context, xs: &[&Arg], ys: &[&Arg]) -> Result<()> {
    for (x, y) in xs.iter().zip(ys) {
        if x.eps != y.eps {
            return Err(ctx.err(ErrorClass::TypeMismatch, vec!["Argument relevance differs".into()]));
        }
        if x.eps == Epsilon::Rel {
            equate(ctx, &x.term, &y.term)?;
        }
    }
    Ok(())
}

fn equate_whnf(ctx: &Context, a: &Term, b: &Term) -> Result<()> {
    use Term::*;
    match (a, b) {
        (Type, Type) | (TyUnit, TyUnit) | (LitUnit, LitUnit) | (Refl, Refl) | (TrustMe, TrustMe) => Ok(()),
        (Var(x), Var(y)) if x == y => Ok(()),
        (Lam(e1, b1), Lam(e2, b2)) if e1 == e2 => {
            let (_, t1, t2) = unbind2(b1, b2);
            equate(ctx, &t1, &t2)
        }
        (App(f1, a1), App(f2, a2)) => {
            if a1.eps != a2.eps {
                return Err(mismatch(ctx, b, a));
            }
            equate(ctx, f1, f2)?;
            equate_args(ctx, &[&**a1], &[&**a2])
        }
        (Pi(e1, d1, b1), Pi(e2, d2, b2)) if e1 == e2 => {
            equate(ctx, d1, d2)?;
            let (_, t1, t2) = unbind2(b1, b2);
            equate(ctx, &t1, &t2)
        }
        (TySigma(d1, b1), TySigma(d2, b2)) => {
            equate(ctx, d1, d2)?;
            let (_, t1, t2) = unbind2(b1, b2);
            equate(ctx, &t1, &t2)
        }
        (Prod(a1, b1), Prod(a2, b2)) | (TyEq(a1, b1), TyEq(a2, b2)) | (Subst(a1, b1), Subst(a2, b2)) => {
            equate(ctx, a1, a2)?;
            equate(ctx, b1, b2)
        }
        (Contra(p1), Contra(p2)) => equate(ctx, p1, p2),
        (TyCon(k1, xs), TyCon(k2, ys)) | (DataCon(k1, xs), DataCon(k2, ys))
            if k1 == k2 && xs.len() == ys.len() =>
        {
            let xs: Vec<&Arg> = xs.iter().collect();
            let ys: Vec<&Arg> = ys.iter().collect();
            equate_args(ctx, &xs, &ys)
        }
        (LetPair(s1, b1), LetPair(s2, b2)) => {
            equate(ctx, s1, s2)?;
            let x = Term::Var(fresh(&b1.first));
            let y = Term::Var(fresh(&b1.second));
            equate(ctx, &b1.instantiate(&x, &y), &b2.instantiate(&x, &y))
        }
        (Case(s1, m1), Case(s2, m2)) if m1.len() == m2.len() => {
            equate(ctx, s1, s2)?;
            for (x, y) in m1.iter().zip(m2) {
                let mut pairs = Vec::new();
                if !same_shape(&x.pattern, &y.pattern, &mut pairs) {
                    return Err(mismatch(ctx, b, a));
                }
                let mut left = Vec::new();
                let mut right = Vec::new();
                for (p, q) in pairs {
                    let v = Term::Var(fresh(&p));
                    left.push((p, v.clone()));
                    right.push((q, v));
                }
                equate(ctx, &subst_many(&left, &x.body), &subst_many(&right, &y.body))?;
            }
            Ok(())
        }
        _ => Err(mismatch(ctx, b, a)),
    }
}

/// View a type as a function type.
pub fn ensure_pi(ctx: &Context, ty: &Term) -> Result<(Epsilon, Name, Term, Term)> {
    match whnf(ctx, ty)? {
        Term::Pi(eps, dom, b) => Ok((eps, b.name, *dom, *b.body)),
        other => Err(ctx.err(ErrorClass::NotAFunction, vec!["Expected a function type but found".into(), other.into()])),
    }
}

/// View a type as an applied type constructor.
pub fn ensure_tcon(ctx: &Context, ty: &Term) -> Result<(ConName, Vec<Arg>)> {
    match whnf(ctx, ty)? {
        Term::TyCon(k, args) => Ok((k, args)),
        other => Err(ctx.err(ErrorClass::NotATyCon, vec!["Expected a data type but found".into(), other.into()])),
    }
}

/// View a type as an equality `a = b`.
pub fn ensure_eq(ctx: &Context, ty: &Term) -> Result<(Term, Term)> {
    match whnf(ctx, ty)? {
        Term::TyEq(a, b) => Ok((*a, *b)),
        other => Err(ctx.err(
            ErrorClass::NotEqualityType,
            vec!["Expected an equality type but found".into(), other.into()],
        )),
    }
}

/// Match `a` against `b`, returning definitions for the variables that must
/// be refined for the two to agree. Variables in `flexible`, and local
/// variables of the context without a definition, may be defined.
pub fn unify(ctx: &Context, flexible: &HashSet<Name>, a: &Term, b: &Term) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    unify_into(ctx, flexible, a, b, &mut out)?;
    Ok(out
        .into_iter()
        .map(|(x, t)| Entry::Def { name: x, term: t })
        .collect())
}

fn apply_defs(defs: &[(Name, Term)], t: &Term) -> Term {
    defs.iter().fold(t.clone(), |t, (x, d)| subst(x, d, &t))
}

fn is_rigid(t: &Term) -> bool {
    use Term::*;
    matches!(
        t,
        Type | Pi(..) | TyCon(..) | DataCon(..) | TySigma(..) | TyUnit | LitUnit | Prod(..) | TyEq(..) | Refl | Lam(..)
    )
}

fn unify_into(
    ctx: &Context,
    flexible: &HashSet<Name>,
    a: &Term,
    b: &Term,
    out: &mut Vec<(Name, Term)>,
) -> Result<()> {
    let a = whnf(ctx, &apply_defs(out, a))?;
    let b = whnf(ctx, &apply_defs(out, b))?;
    if aeq(&a, &b) {
        return Ok(());
    }
    let definable = |x: &Name| flexible.contains(x) || ctx.is_definable(x);
    let fail = |a: &Term, b: &Term| {
        ctx.err(
            ErrorClass::UnificationFailure,
            vec!["Cannot unify".into(), a.into(), "with".into(), b.into()],
        )
    };
    match (&a, &b) {
        (Term::Var(x), t) | (t, Term::Var(x)) if definable(x) => {
            if occurs_free(x, t) {
                return Err(fail(&a, &b));
            }
            out.push((x.clone(), t.clone()));
            Ok(())
        }
        (Term::DataCon(k1, xs), Term::DataCon(k2, ys)) | (Term::TyCon(k1, xs), Term::TyCon(k2, ys)) => {
            if k1 != k2 || xs.len() != ys.len() {
                return Err(fail(&a, &b));
            }
            for (x, y) in xs.iter().zip(ys) {
                if x.eps == Epsilon::Rel && y.eps == Epsilon::Rel {
                    unify_into(ctx, flexible, &x.term, &y.term, out)?;
                } else {
                    // Irrelevant arguments never distinguish values, so a
                    // clash here is not a contradiction.
                    let mark = out.len();
                    if unify_into(ctx, flexible, &x.term, &y.term, out).is_err() {
                        out.truncate(mark);
                    }
                }
            }
            Ok(())
        }
        (Term::Prod(a1, b1), Term::Prod(a2, b2)) => {
            unify_into(ctx, flexible, a1, a2, out)?;
            unify_into(ctx, flexible, b1, b2, out)
        }
        (x, y) if is_rigid(x) && is_rigid(y) => {
            if std::mem::discriminant(x) == std::mem::discriminant(y) {
                Ok(())
            } else {
                Err(fail(&a, &b))
            }
        }
        _ => Ok(()),
    }
}
