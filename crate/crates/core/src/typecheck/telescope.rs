//! Telescopes: checking argument lists against them and substituting
//! through them.

use std::collections::HashSet;

use super::{check_type, tc_type, Result};
use crate::env::{Context, Entry, ErrorClass};
use crate::equal::{equate, unify, whnf};
use crate::syntax::{Arg, Name, Substitution, TeleEntry, Telescope, Term};

/// Check `args` against `tele`.
pub fn tc_arg_tele(ctx: &mut Context, args: &[Arg], tele: &Telescope) -> Result<()> {
    tc_arg_tele_with(ctx, Vec::new(), args, tele)
}

/// Check `args` against `tele`, whose free variables are first replaced by
/// `init` (the datatype parameters, for a constructor telescope).
pub(crate) fn tc_arg_tele_with(
    ctx: &mut Context,
    init: Vec<(Name, Term)>,
    args: &[Arg],
    tele: &Telescope,
) -> Result<()> {
    let mut ss = init;
    let mut rest = args.iter();
    for entry in &tele.0 {
        match entry {
            TeleEntry::Sig { name, eps, ty } => {
                let Some(arg) = rest.next() else {
                    return Err(ctx.err(ErrorClass::BadConstructorArity, vec!["Too few arguments".into()]));
                };
                if arg.eps != *eps {
                    let class = if *eps == crate::syntax::Epsilon::Irr {
                        ErrorClass::TypeMismatch
                    } else {
                        ErrorClass::IrrelevantUse
                    };
                    return Err(ctx.err(
                        class,
                        vec!["Argument".into(), (&arg.term).into(), "has the wrong relevance".into()],
                    ));
                }
                let ty = crate::syntax::subst_many(&ss, ty);
                match eps {
                    crate::syntax::Epsilon::Rel => check_type(ctx, &arg.term, &ty)?,
                    crate::syntax::Epsilon::Irr => ctx.with_resurrected(|ctx| check_type(ctx, &arg.term, &ty))?,
                }
                ss.push((name.clone(), arg.term.clone()));
            }
            TeleEntry::Def { name, term } => {
                let lhs = crate::syntax::subst_many(&ss, &Term::Var(name.clone()));
                let rhs = crate::syntax::subst_many(&ss, term);
                equate(ctx, &lhs, &rhs).map_err(|e| {
                    let eq = Term::TyEq(Box::new(lhs.clone()), Box::new(rhs.clone()));
                    e.with_context("When checking the constraint", eq)
                })?;
            }
        }
    }
    if rest.next().is_some() {
        return Err(ctx.err(ErrorClass::BadConstructorArity, vec!["Too many arguments".into()]));
    }
    Ok(())
}

/// Push a substitution through a telescope. A constraint `x = b` whose `x`
/// gets replaced is re-solved by unification: it may vanish, turn into
/// definitions of other variables, or fail.
pub fn do_subst(ctx: &Context, pairs: &[(Name, Term)], tele: &Telescope) -> Result<Telescope> {
    do_subst_flex(ctx, pairs, tele, &HashSet::new())
}

pub(crate) fn do_subst_flex(
    ctx: &Context,
    pairs: &[(Name, Term)],
    tele: &Telescope,
    extra_flexible: &HashSet<Name>,
) -> Result<Telescope> {
    let mut flexible: HashSet<Name> = extra_flexible.clone();
    flexible.extend(tele.sig_names());
    let mut s = Substitution::new(pairs.to_vec());
    let mut out = Vec::with_capacity(tele.len());
    for entry in &tele.0 {
        match entry {
            TeleEntry::Sig { name, eps, ty } => {
                let ty = whnf(ctx, &s.apply(ty))?;
                let name2 = s.bind(name);
                flexible.insert(name2.clone());
                out.push(TeleEntry::Sig { name: name2, eps: *eps, ty });
            }
            TeleEntry::Def { name, term } => {
                let rhs = s.apply(term);
                let substituted = pairs.iter().any(|(x, _)| x == name);
                match s.apply(&Term::Var(name.clone())) {
                    Term::Var(y) if !substituted => out.push(TeleEntry::Def { name: y, term: rhs }),
                    lhs => {
                        for e in unify(ctx, &flexible, &lhs, &rhs)? {
                            if let Entry::Def { name, term } = e {
                                out.push(TeleEntry::Def { name, term });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Telescope(out))
}

/// Instantiate a constructor telescope with actual datatype parameters.
pub fn subst_tele(ctx: &Context, params_tele: &Telescope, params: &[Arg], con_tele: &Telescope) -> Result<Telescope> {
    let names = params_tele.sig_names();
    if names.len() != params.len() {
        return Err(ctx.err(
            ErrorClass::BadConstructorArity,
            vec![format!("Expected {} parameters but got {}", names.len(), params.len()).into()],
        ));
    }
    let pairs: Vec<(Name, Term)> = names.into_iter().zip(params.iter().map(|a| a.term.clone())).collect();
    do_subst(ctx, &pairs, con_tele)
}

/// Check a telescope as found in a datatype declaration, then run `f` with
/// it in scope.
pub fn tc_telescope<R>(
    ctx: &mut Context,
    tele: &Telescope,
    f: impl FnOnce(&mut Context) -> Result<R>,
) -> Result<R> {
    let mark = ctx.len();
    let r = (|| {
        for entry in &tele.0 {
            match entry {
                TeleEntry::Sig { name, eps, ty } => {
                    tc_type(ctx, ty)?;
                    ctx.push_local(Entry::Sig { name: name.clone(), eps: *eps, ty: ty.clone() });
                }
                TeleEntry::Def { name, term } => {
                    let (_, ty) = ctx.lookup_ty(name)?;
                    if !ctx.is_definable(name) {
                        return Err(ctx.err(
                            ErrorClass::NotInScope,
                            vec![format!("Constraint on {name}, which is not a parameter or earlier argument").into()],
                        ));
                    }
                    ctx.with_resurrected(|ctx| check_type(ctx, term, &ty))?;
                    ctx.push_local(Entry::def(name.clone(), term.clone()));
                }
            }
        }
        f(ctx)
    })();
    ctx.truncate(mark);
    r
}
