//! Bidirectional type checking.
//!
//! Everything goes through [`tc_term`]: with `expected = None` it infers a
//! type, otherwise it checks against the (weak-head normal) expected type.

use std::collections::HashSet;

use crate::env::{CheckError, Context, Entry, ErrorClass};
use crate::equal::{ensure_eq, ensure_pi, equate, unify, whnf};
use crate::syntax::{fv, subst, unbind2, Arg, Epsilon, Name, Term};

mod module;
mod pattern;
mod telescope;

pub use module::{check_data, check_module};
pub use pattern::{declare_pat, exhaustivity_check};
pub use telescope::{do_subst, subst_tele, tc_arg_tele, tc_telescope};

pub type Result<T> = std::result::Result<T, CheckError>;

/// Infer the type of `t`.
pub fn infer_type(ctx: &mut Context, t: &Term) -> Result<Term> {
    let ty = tc_term(ctx, t, None)?;
    if ctx.regularity_due() && !matches!(ty.unpos(), Term::Type) {
        ctx.with_regularity_paused(|ctx| tc_type(ctx, &ty)).map_err(|e| {
            e.with_context("Regularity check failed for the inferred type", &ty)
                .with_context("of the term", t)
        })?;
    }
    Ok(ty)
}

/// Check `t` against `ty`.
pub fn check_type(ctx: &mut Context, t: &Term, ty: &Term) -> Result<()> {
    let ty = whnf(ctx, ty)?;
    tc_term(ctx, t, Some(&ty)).map(|_| ())
}

/// Check that `t` is a type. Types live in an irrelevant position, so
/// irrelevant variables may be mentioned.
pub fn tc_type(ctx: &mut Context, t: &Term) -> Result<()> {
    ctx.with_resurrected(|ctx| check_type(ctx, t, &Term::Type))
}

pub fn check_stage(ctx: &Context, x: &Name, eps: Epsilon) -> Result<()> {
    match eps {
        Epsilon::Rel => Ok(()),
        Epsilon::Irr => Err(ctx.err(
            ErrorClass::IrrelevantUse,
            vec![format!("Cannot access irrelevant variable {x} in a relevant position").into()],
        )),
    }
}

fn check_arg(ctx: &mut Context, a: &Arg, ty: &Term) -> Result<()> {
    match a.eps {
        Epsilon::Rel => check_type(ctx, &a.term, ty),
        Epsilon::Irr => ctx.with_resurrected(|ctx| check_type(ctx, &a.term, ty)),
    }
}

fn needs_annotation(ctx: &Context, what: &str) -> CheckError {
    ctx.err(ErrorClass::TypeMismatch, vec![format!("Cannot infer the type of {what}; add a type annotation").into()])
}

/// The single checking/inference dispatcher.
pub fn tc_term(ctx: &mut Context, t: &Term, expected: Option<&Term>) -> Result<Term> {
    use Term::*;
    match (t, expected) {
        (Pos(p, a), _) => {
            let p = p.clone();
            ctx.with_pos(&p, |ctx| tc_term(ctx, a, expected)).map_err(|e| e.in_expression(a))
        }

        (Var(x), None) => {
            let (eps, ty) = ctx.lookup_ty(x)?;
            check_stage(ctx, x, eps)?;
            Ok(ty)
        }

        (Type, None) => Ok(Type),

        (Pi(_, dom, b), None) => {
            tc_type(ctx, dom)?;
            let (x, cod) = b.unbind();
            ctx.extend([Entry::sig(x, (**dom).clone())], |ctx| tc_type(ctx, &cod))?;
            Ok(Type)
        }

        (Lam(eps, b), Some(Pi(eps2, dom, pb))) => {
            if eps != eps2 {
                return Err(ctx.err(
                    ErrorClass::TypeMismatch,
                    vec![format!("Lambda binder is {} but the function type expects {}", show_eps(*eps), show_eps(*eps2)).into()],
                ));
            }
            let (x, body, cod) = unbind2(b, pb);
            let entry = Entry::Sig { name: x, eps: *eps, ty: (**dom).clone() };
            ctx.extend([entry], |ctx| check_type(ctx, &body, &cod))?;
            Ok(expected.unwrap().clone())
        }
        (Lam(..), Some(ty)) => Err(ctx.err(
            ErrorClass::TypeMismatch,
            vec!["Lambda expression should have a function type, not".into(), ty.into()],
        )),
        (Lam(..), None) => Err(needs_annotation(ctx, "a lambda expression")),

        (App(f, a), None) => {
            let fty = infer_type(ctx, f)?;
            let (eps, x, dom, cod) = ensure_pi(ctx, &fty)?;
            if eps != a.eps {
                return Err(ctx.err(
                    ErrorClass::TypeMismatch,
                    vec![format!("Function expects {} argument but was given {} one", show_eps(eps), show_eps(a.eps)).into()],
                ));
            }
            check_arg(ctx, a, &dom)?;
            Ok(subst(&x, &a.term, &cod))
        }

        (Ann(a, ty), None) => {
            tc_type(ctx, ty)?;
            check_type(ctx, a, ty)?;
            Ok((**ty).clone())
        }

        (TrustMe, Some(ty)) => {
            ctx.warn(vec!["TRUSTME accepted at type".into(), ty.into()]);
            Ok(ty.clone())
        }
        (TrustMe, None) => Err(needs_annotation(ctx, "TRUSTME")),

        (TyUnit, None) => Ok(Type),
        (LitUnit, None) => Ok(TyUnit),

        (TySigma(a, b), None) => {
            tc_type(ctx, a)?;
            let (x, body) = b.unbind();
            ctx.extend([Entry::sig(x, (**a).clone())], |ctx| tc_type(ctx, &body))?;
            Ok(Type)
        }

        (Prod(a, b), Some(TySigma(ty_a, sb))) => {
            check_type(ctx, a, ty_a)?;
            check_type(ctx, b, &sb.instantiate(a))?;
            Ok(expected.unwrap().clone())
        }
        (Prod(..), Some(ty)) => Err(ctx.err(
            ErrorClass::TypeMismatch,
            vec!["A pair should have a Sigma type, not".into(), ty.into()],
        )),
        (Prod(..), None) => Err(needs_annotation(ctx, "a pair")),

        (LetPair(p, b), _) => tc_letpair(ctx, p, b, expected),

        (Let(a, b), _) => {
            let ty_a = infer_type(ctx, a)?;
            let (x, body) = b.unbind();
            let entries = [Entry::sig(x.clone(), ty_a), Entry::def(x.clone(), (**a).clone())];
            ctx.extend(entries, |ctx| match expected {
                Some(ty) => check_type(ctx, &body, ty).map(|_| ty.clone()),
                None => infer_type(ctx, &body).map(|ty_b| subst(&x, a, &ty_b)),
            })
        }

        (TyEq(a, b), None) => {
            match infer_type(ctx, a) {
                Ok(ty) => check_type(ctx, b, &ty)?,
                Err(e) if e.class == ErrorClass::StepLimit => return Err(e),
                Err(_) => {
                    let ty = infer_type(ctx, b)?;
                    check_type(ctx, a, &ty)?;
                }
            }
            Ok(Type)
        }

        (Refl, Some(TyEq(a, b))) => {
            equate(ctx, a, b)?;
            Ok(expected.unwrap().clone())
        }
        (Refl, Some(ty)) => Err(ctx.err(
            ErrorClass::NotEqualityType,
            vec!["Refl should have an equality type, not".into(), ty.into()],
        )),
        (Refl, None) => Err(needs_annotation(ctx, "Refl")),

        (Subst(a, pf), Some(ty)) => tc_subst(ctx, a, pf, ty),
        (Subst(..), None) => Err(needs_annotation(ctx, "a subst expression")),

        (Contra(pf), Some(ty)) => {
            let pty = infer_type(ctx, pf)?;
            let (a, b) = ensure_eq(ctx, &pty)?;
            let a = whnf(ctx, &a)?;
            let b = whnf(ctx, &b)?;
            match (&a, &b) {
                (DataCon(k1, _), DataCon(k2, _)) if k1 != k2 => Ok(ty.clone()),
                _ => Err(ctx.err(
                    ErrorClass::NoContradiction,
                    vec!["Cannot derive a contradiction from the equality".into(), a.into(), "=".into(), b.into()],
                )),
            }
        }
        (Contra(..), None) => Err(needs_annotation(ctx, "a contra expression")),

        (TyCon(k, args), None) => {
            let Some(data) = ctx.lookup_tcon(k) else {
                return Err(ctx.err(ErrorClass::NotInScope, vec![format!("Unknown type constructor {k}").into()]));
            };
            tc_arg_tele(ctx, args, &data.params)?;
            Ok(Type)
        }

        (DataCon(k, args), Some(ty @ TyCon(tname, params))) => {
            let data = ctx.lookup_tcon(tname).ok_or_else(|| {
                ctx.err(ErrorClass::NotInScope, vec![format!("Unknown type constructor {tname}").into()])
            })?;
            let Some(con) = data.constructor(k) else {
                return Err(ctx.err(
                    ErrorClass::UnknownConstructor,
                    vec![format!("{k} is not a constructor of {tname}").into()],
                ));
            };
            let sigs = data.params.sig_names();
            if sigs.len() != params.len() {
                return Err(ctx.err(ErrorClass::BadConstructorArity, vec![format!("Wrong number of parameters for {tname}").into()]));
            }
            let init: Vec<(Name, Term)> = sigs.into_iter().zip(params.iter().map(|a| a.term.clone())).collect();
            telescope::tc_arg_tele_with(ctx, init, args, &con.tele)?;
            Ok(ty.clone())
        }
        (DataCon(k, args), None) => {
            let owners = ctx.datatypes_with_constructor(k);
            match owners.as_slice() {
                [] => Err(ctx.err(ErrorClass::UnknownConstructor, vec![format!("Unknown data constructor {k}").into()])),
                [data] if data.params.is_empty() => {
                    let con = data.constructor(k).expect("owner declares constructor");
                    tc_arg_tele(ctx, args, &con.tele)?;
                    Ok(TyCon(data.tycon.clone(), vec![]))
                }
                [data] => Err(ctx.err(
                    ErrorClass::TypeMismatch,
                    vec![format!(
                        "Cannot infer the parameters of {}; data constructor {k} needs a type annotation",
                        data.tycon
                    )
                    .into()],
                )),
                _ => Err(ctx.err(
                    ErrorClass::AmbiguousConstructor,
                    vec![format!(
                        "Data constructor {k} belongs to several types ({}); add a type annotation",
                        owners.iter().map(|d| d.tycon.to_string()).collect::<Vec<_>>().join(", ")
                    )
                    .into()],
                )),
            }
        }

        (Case(s, ms), _) => pattern::tc_case(ctx, s, ms, expected),

        (_, Some(ty)) => {
            let inferred = infer_type(ctx, t)?;
            equate(ctx, &inferred, ty)?;
            Ok(ty.clone())
        }
    }
}

fn show_eps(e: Epsilon) -> &'static str {
    match e {
        Epsilon::Rel => "a relevant",
        Epsilon::Irr => "an irrelevant",
    }
}

fn tc_letpair(ctx: &mut Context, p: &Term, b: &crate::syntax::Bind2, expected: Option<&Term>) -> Result<Term> {
    let pty = infer_type(ctx, p)?;
    let Term::TySigma(ty_a, sb) = whnf(ctx, &pty)? else {
        return Err(ctx.err(
            ErrorClass::TypeMismatch,
            vec!["Scrutinee of let-pair should have a Sigma type, not".into(), pty.into()],
        ));
    };
    let (x, y, body) = b.unbind();
    let ty_b = sb.instantiate(&Term::Var(x.clone()));
    let mut entries = vec![Entry::sig(x.clone(), *ty_a), Entry::sig(y.clone(), ty_b)];
    if let Term::Var(z) = whnf(ctx, p)? {
        if ctx.is_definable(&z) {
            let pair = Term::Prod(Box::new(Term::Var(x.clone())), Box::new(Term::Var(y.clone())));
            entries.push(Entry::def(z, pair));
        }
    }
    ctx.extend(entries, |ctx| match expected {
        Some(ty) => check_type(ctx, &body, ty).map(|_| ty.clone()),
        None => {
            let ty = infer_type(ctx, &body)?;
            let vars = fv(&ty);
            if vars.contains(&x) || vars.contains(&y) {
                return Err(ctx.err(
                    ErrorClass::EscapingVariable,
                    vec!["The type of a let-pair body mentions the bound components:".into(), ty.into()],
                ));
            }
            Ok(ty)
        }
    })
}

fn tc_subst(ctx: &mut Context, a: &Term, pf: &Term, ty: &Term) -> Result<Term> {
    let pty = infer_type(ctx, pf)?;
    let (m, n) = ensure_eq(ctx, &pty)?;
    let none = HashSet::new();
    let mut defs = unify(ctx, &none, &m, &n).map_err(|e| {
        if e.class == ErrorClass::StepLimit {
            return e;
        }
        ctx.err(
            ErrorClass::UnificationFailure,
            vec!["Cannot use the equality".into(), pty.clone().into(), "for refinement".into()],
        )
    })?;
    if defs.is_empty() && equate(ctx, &m, &n).is_err() {
        return Err(ctx.err(
            ErrorClass::UnificationFailure,
            vec![
                "subst needs a variable on one side of the equality".into(),
                pty.clone().into(),
                "; bind one side with let first".into(),
            ],
        ));
    }
    if let Ok(more) = unify(ctx, &none, pf, &Term::Refl) {
        defs.extend(more);
    }
    ctx.extend(defs, |ctx| check_type(ctx, a, ty))?;
    Ok(ty.clone())
}
