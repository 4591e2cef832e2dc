//! Property bodies shared by the proptest suite and the acceptance runner.

use std::cell::RefCell;
use std::collections::HashSet;

use pi_check::env::{Context, Entry, ErrorClass};
use pi_check::equal::{equate, whnf};
use pi_check::surface::{parse_term, pretty_term};
use pi_check::syntax::{
    aeq, fresh, fv, strip, subst, Arg, Bind, Bind2, Epsilon, Match, Name, Pattern, TeleEntry, Term,
};
use pi_check::typecheck::{check_type, declare_pat};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen::{Ty, TypedGen};
use super::oracle::{free_vars, to_db};
use super::{free_entries, tele_entry, Loaded};

pub type PropResult = Result<(), TestCaseError>;

/// Rename every binder to a fresh name, independently of the library's
/// substitution.
pub fn rename_binders(t: &Term) -> Term {
    fn go(t: &Term, env: &mut Vec<(Name, Name)>) -> Term {
        use Term::*;
        let look = |env: &Vec<(Name, Name)>, x: &Name| {
            env.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone())
        };
        let under = |names: &[Name], body: &Term, env: &mut Vec<(Name, Name)>| -> (Vec<Name>, Term) {
            let new: Vec<Name> = names.iter().map(fresh).collect();
            env.extend(names.iter().cloned().zip(new.iter().cloned()));
            let b = go(body, env);
            env.truncate(env.len() - names.len());
            (new, b)
        };
        let args = |a: &[Arg], env: &mut Vec<(Name, Name)>| -> Vec<Arg> {
            a.iter().map(|a| Arg::new(a.eps, go(&a.term, env))).collect()
        };
        match t {
            Var(x) => Var(look(env, x)),
            Type | TrustMe | TyUnit | LitUnit | Refl => t.clone(),
            Pos(p, a) => Pos(p.clone(), Box::new(go(a, env))),
            Ann(a, b) => Ann(Box::new(go(a, env)), Box::new(go(b, env))),
            Lam(e, b) => {
                let (n, body) = under(std::slice::from_ref(&b.name), &b.body, env);
                Lam(*e, Bind::new(n[0].clone(), body))
            }
            App(f, a) => App(Box::new(go(f, env)), Box::new(Arg::new(a.eps, go(&a.term, env)))),
            Pi(e, a, b) => {
                let a = go(a, env);
                let (n, body) = under(std::slice::from_ref(&b.name), &b.body, env);
                Pi(*e, Box::new(a), Bind::new(n[0].clone(), body))
            }
            TySigma(a, b) => {
                let a = go(a, env);
                let (n, body) = under(std::slice::from_ref(&b.name), &b.body, env);
                TySigma(Box::new(a), Bind::new(n[0].clone(), body))
            }
            Let(a, b) => {
                let a = go(a, env);
                let (n, body) = under(std::slice::from_ref(&b.name), &b.body, env);
                Let(Box::new(a), Bind::new(n[0].clone(), body))
            }
            LetPair(a, b) => {
                let a = go(a, env);
                let (n, body) = under(&[b.first.clone(), b.second.clone()], &b.body, env);
                LetPair(Box::new(a), Bind2::new(n[0].clone(), n[1].clone(), body))
            }
            Prod(a, b) => Prod(Box::new(go(a, env)), Box::new(go(b, env))),
            TyEq(a, b) => TyEq(Box::new(go(a, env)), Box::new(go(b, env))),
            Subst(a, b) => Subst(Box::new(go(a, env)), Box::new(go(b, env))),
            Contra(a) => Contra(Box::new(go(a, env))),
            TyCon(k, a) => TyCon(k.clone(), args(a, env)),
            DataCon(k, a) => DataCon(k.clone(), args(a, env)),
            Case(s, ms) => {
                let s = go(s, env);
                let ms = ms
                    .iter()
                    .map(|m| {
                        let vars = m.pattern.vars();
                        let (new, body) = under(&vars, &m.body, env);
                        let mut it = new.into_iter();
                        let pattern = m.pattern.rename(&mut |_| it.next().expect("one name per variable"));
                        Match { pattern, body }
                    })
                    .collect();
                Case(Box::new(s), ms)
            }
        }
    }
    go(t, &mut Vec::new())
}

pub fn aeq_laws(t: &Term, u: &Term) -> PropResult {
    prop_assert!(aeq(t, t));
    prop_assert_eq!(aeq(t, u), aeq(u, t));
    // Agreement with the de Bruijn reading.
    prop_assert_eq!(aeq(t, u), to_db(t, false) == to_db(u, false));
    let t2 = rename_binders(t);
    let t3 = rename_binders(&t2);
    prop_assert!(aeq(t, &t2), "renaming binders changed the term: {:?}", t);
    prop_assert!(aeq(&t2, &t3) && aeq(t, &t3));
    prop_assert_eq!(to_db(t, true), to_db(&t2, true));
    Ok(())
}

pub fn strip_law(t: &Term) -> PropResult {
    let s = strip(t);
    prop_assert!(aeq(&s, t));
    prop_assert_eq!(to_db(&s, true), to_db(t, false));
    Ok(())
}

pub fn subst_laws(x: &Name, y: &Name, a1: &Term, a2: &Term, b: &Term) -> PropResult {
    prop_assert!(aeq(&subst(x, &Term::Var(x.clone()), b), b));
    let fvb = free_vars(b);
    if !fvb.contains(x) {
        prop_assert!(aeq(&subst(x, a1, b), b));
    }
    // Library and oracle agree on free variables.
    prop_assert_eq!(fv(b), fvb.clone());
    let r = subst(x, a1, b);
    let allowed: HashSet<Name> =
        fvb.iter().filter(|n| *n != x).cloned().chain(free_vars(a1)).collect();
    for n in free_vars(&r) {
        prop_assert!(allowed.contains(&n), "{n:?} escaped from subst");
    }
    if x != y && !free_vars(a2).contains(x) {
        let lhs = subst(y, a2, &subst(x, a1, b));
        let rhs = subst(x, &subst(y, a2, a1), &subst(y, a2, b));
        prop_assert!(aeq(&lhs, &rhs), "substitutions do not commute");
    }
    Ok(())
}

pub fn unbind_law(eps: Epsilon, x: &Name, body: &Term) -> PropResult {
    let b = Bind::new(x.clone(), body.clone());
    let (x2, body2) = b.unbind();
    prop_assert!(x2.uid() != 0 && x2.hint() == x.hint());
    prop_assert!(aeq(&Term::Lam(eps, Bind::new(x2, body2)), &Term::Lam(eps, b)));
    Ok(())
}

/// On redex-free terms, definitional equality of two lambdas coincides
/// with alpha-equivalence.
pub fn equate_matches_aeq_on_normal(x: &Name, t1: &Term, y: &Name, t2: &Term) -> PropResult {
    let ctx = Context::new();
    let l1 = Term::lam(Epsilon::Rel, x.clone(), t1.clone());
    let l2 = Term::lam(Epsilon::Rel, y.clone(), t2.clone());
    prop_assert_eq!(equate(&ctx, &l1, &l2).is_ok(), aeq(&l1, &l2));
    Ok(())
}

pub fn pretty_round_trip(t: &Term) -> PropResult {
    let mut names = pi_check::surface::ConstructorNames::default();
    for k in ["Bool", "Nat", "Vec"] {
        names.tycons.insert(k.to_string());
    }
    for k in ["True", "False", "Zero", "Succ", "Nil", "Cons"] {
        names.dcons.insert(k.to_string());
    }
    let text = pretty_term(t);
    let back = parse_term(&text, &names).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(to_db(&back, true), to_db(t, true), "printed as {}", text);
    Ok(())
}

thread_local! {
    static PRELUDE: Loaded = Loaded::prelude();
    static WITH_VEC: RefCell<Option<Loaded>> = const { RefCell::new(None) };
}

/// A clone of the prelude context with the typed generator's free variables
/// in scope.
fn prelude_ctx() -> (Context, super::oracle::Globals) {
    PRELUDE.with(|l| {
        let mut ctx = l.ctx.clone();
        ctx.set_step_limit(Some(1_000_000));
        (ctx, l.globals())
    })
}

pub fn typed_pair(seed: u64, depth: u32) -> (Term, Term, Ty) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TypedGen::new(&mut rng).pair(depth)
}

/// whnf idempotence, reflexivity, whnf-preservation, symmetry and scoping.
pub fn reduction_laws(seed: u64) -> PropResult {
    let (a, b, ty) = typed_pair(seed, 6);
    let (mut ctx, _) = prelude_ctx();
    ctx.extend(free_entries(), |ctx| {
        let before = ctx.len();
        check_type(ctx, &a, &ty.term()).map_err(|e| TestCaseError::fail(e.render()))?;
        prop_assert_eq!(ctx.len(), before);
        let w = whnf(ctx, &a).map_err(|e| TestCaseError::fail(e.render()))?;
        let w2 = whnf(ctx, &w).map_err(|e| TestCaseError::fail(e.render()))?;
        prop_assert!(aeq(&w, &w2), "whnf not idempotent on {}", pretty_term(&a));
        prop_assert!(equate(ctx, &a, &a).is_ok());
        prop_assert!(equate(ctx, &a, &w).is_ok());
        prop_assert_eq!(equate(ctx, &a, &b).is_ok(), equate(ctx, &b, &a).is_ok());
        Ok(())
    })
}

/// Definitional equality agrees with comparing full normal forms.
pub fn oracle_agreement(seed: u64) -> PropResult {
    let (a, b, ty) = typed_pair(seed, 6);
    let (mut ctx, globals) = prelude_ctx();
    ctx.extend(free_entries(), |ctx| {
        for t in [&a, &b] {
            check_type(ctx, t, &ty.term()).map_err(|e| TestCaseError::fail(e.render()))?;
        }
        let got = match equate(ctx, &a, &b) {
            Ok(()) => true,
            Err(e) if e.class == ErrorClass::StepLimit => return Err(TestCaseError::fail(e.render())),
            Err(_) => false,
        };
        let want = globals.convertible(&a, &b);
        prop_assert_eq!(got, want, "{}  vs  {}", pretty_term(&a), pretty_term(&b));
        Ok(())
    })
}

/// Irrelevant arguments never matter to equality.
pub fn irrelevant_blindness(seed: u64) -> PropResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = TypedGen::new(&mut rng);
    let a = g.closed(Ty::Nat, 4);
    let b = g.closed(Ty::Nat, 4);
    let (ctx, _) = prelude_ctx();
    let p = Name::new("p");
    let nat = Term::tycon("Nat", vec![]);
    let p_ty = Term::pi(Epsilon::Irr, Name::new("x"), nat.clone(), nat);
    let mut ctx = ctx;
    ctx.extend([Entry::sig(p.clone(), p_ty)], |ctx| {
        let pa = Term::app(Term::Var(p.clone()), Epsilon::Irr, a);
        let pb = Term::app(Term::Var(p.clone()), Epsilon::Irr, b);
        prop_assert!(equate(ctx, &pa, &pb).is_ok());
        Ok(())
    })
}

/// Resurrecting twice is the same as resurrecting once.
pub fn resurrect_idempotent(entries: &[(usize, Epsilon)]) -> PropResult {
    let mut ctx = Context::new();
    let names: Vec<Name> = (0..4).map(|i| Name::new(["a", "b", "c", "d"][i])).collect();
    let es: Vec<Entry> = entries
        .iter()
        .map(|(i, e)| Entry::Sig { name: names[*i % 4].clone(), eps: *e, ty: Term::Type })
        .collect();
    ctx.extend(es, |ctx| {
        let r1 = ctx.resurrect();
        let r2 = r1.resurrect();
        for n in &names {
            let l1 = r1.lookup_ty(n).ok().map(|(e, t)| (e, to_db(&t, true)));
            let l2 = r2.lookup_ty(n).ok().map(|(e, t)| (e, to_db(&t, true)));
            prop_assert_eq!(&l1, &l2);
            if let Some((e, _)) = l1 {
                prop_assert_eq!(e, Epsilon::Rel);
            }
        }
        Ok(())
    })
}

/// Declaring a constructor pattern and checking its image against the
/// scrutinee type always succeeds, unless the constructor is impossible.
pub fn declare_pat_round_trip(seed: u64) -> PropResult {
    WITH_VEC.with(|cell| {
        let mut slot = cell.borrow_mut();
        let l = slot.get_or_insert_with(|| Loaded::with(&["Vec.pi"]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Name::new("n");
        let index = if rng.gen_bool(0.3) { Term::Var(n.clone()) } else { Term::nat(rng.gen_range(0..4)) };
        let bool_ty = Term::tycon("Bool", vec![]);
        let ty = match rng.gen_range(0..4) {
            0 => Term::tycon("Nat", vec![]),
            1 => bool_ty.clone(),
            2 => Term::tycon("Vec", vec![Arg::rel(bool_ty), Arg::rel(index)]),
            _ => Term::tycon("Fin", vec![Arg::rel(index)]),
        };
        let Term::TyCon(tname, _) = &ty else { unreachable!() };
        let data = l.ctx.lookup_tcon(tname).expect("declared");
        let con = &data.constructors[rng.gen_range(0..data.constructors.len())];
        let mut k = 0;
        let subs: Vec<(Pattern, Epsilon)> = con
            .tele
            .0
            .iter()
            .filter_map(|e| match e {
                TeleEntry::Sig { eps, .. } => {
                    k += 1;
                    Some((Pattern::Var(Name::new(&format!("q{k}"))), *eps))
                }
                TeleEntry::Def { .. } => None,
            })
            .collect();
        let pat = Pattern::Con(con.name.clone(), subs);
        let pat = Match { pattern: pat, body: Term::Type }.unbind().0;
        let mut ctx = l.ctx.clone();
        ctx.extend([Entry::sig(n.clone(), Term::tycon("Nat", vec![]))], |ctx| {
            let before = ctx.len();
            match declare_pat(ctx, &pat, Epsilon::Rel, &ty) {
                Ok((delta, image)) => {
                    prop_assert_eq!(ctx.len(), before);
                    prop_assert!(aeq(&image, &pat.to_term()));
                    let entries: Vec<Entry> = delta.0.iter().map(tele_entry).collect();
                    ctx.extend(entries, |ctx| check_type(ctx, &image, &ty))
                        .map_err(|e| TestCaseError::fail(format!("{}\n{}", pretty_term(&image), e.render())))?;
                    Ok(())
                }
                Err(e) if e.class == ErrorClass::UnificationFailure => Ok(()),
                Err(e) => Err(TestCaseError::fail(e.render())),
            }
        })
    })
}

pub fn arb_entries() -> impl Strategy<Value = Vec<(usize, Epsilon)>> {
    prop::collection::vec((0usize..4, super::gen::arb_eps()), 0..8)
}
