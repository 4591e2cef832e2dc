//! Dependent pattern matching: pattern declaration, case checking and
//! coverage.

use std::collections::HashSet;
use std::fmt;

use super::telescope::{do_subst_flex, subst_tele};
use super::{check_type, infer_type, needs_annotation, Result};
use crate::env::{Context, Entry, ErrorClass};
use crate::equal::{ensure_tcon, equate, unify, whnf};
use crate::syntax::{fresh, fv, Arg, ConName, Epsilon, Match, Name, Pattern, TeleEntry, Telescope, Term};

fn tele_entry(e: &TeleEntry) -> Entry {
    match e {
        TeleEntry::Sig { name, eps, ty } => Entry::Sig { name: name.clone(), eps: *eps, ty: ty.clone() },
        TeleEntry::Def { name, term } => Entry::Def { name: name.clone(), term: term.clone() },
    }
}

/// The bindings a pattern introduces when matched at type `ty`, and the
/// pattern read back as a term.
pub fn declare_pat(ctx: &mut Context, pat: &Pattern, eps: Epsilon, ty: &Term) -> Result<(Telescope, Term)> {
    match pat {
        Pattern::Var(x) => Ok((
            Telescope(vec![TeleEntry::Sig { name: x.clone(), eps, ty: ty.clone() }]),
            Term::Var(x.clone()),
        )),
        Pattern::Con(k, subs) => {
            if eps == Epsilon::Irr {
                return Err(ctx.err(
                    ErrorClass::IrrelevantUse,
                    vec![format!("Cannot match constructor {k} against an irrelevant argument").into()],
                ));
            }
            let (tname, params) = ensure_tcon(ctx, ty)?;
            let data = ctx
                .lookup_tcon(&tname)
                .ok_or_else(|| ctx.err(ErrorClass::NotInScope, vec![format!("Unknown type constructor {tname}").into()]))?;
            let Some(con) = data.constructor(k) else {
                return Err(ctx.err(
                    ErrorClass::UnknownConstructor,
                    vec![format!("{k} is not a constructor of {tname}").into()],
                ));
            };
            let tele = subst_tele(ctx, &data.params, &params, &con.tele.freshen())?;
            let mark = ctx.len();
            let r = declare_pats(ctx, k, subs, tele);
            ctx.truncate(mark);
            r
        }
    }
}

fn declare_pats(
    ctx: &mut Context,
    k: &ConName,
    subs: &[(Pattern, Epsilon)],
    tele: Telescope,
) -> Result<(Telescope, Term)> {
    let mut out = Vec::new();
    let mut args = Vec::new();
    let mut subs = subs.iter();
    let mut rest = tele.0;
    while !rest.is_empty() {
        match rest.remove(0) {
            TeleEntry::Def { name, term } => {
                let e = TeleEntry::Def { name, term };
                ctx.push_local(tele_entry(&e));
                out.push(e);
            }
            TeleEntry::Sig { name, eps, ty } => {
                let Some((p, pe)) = subs.next() else {
                    return Err(ctx.err(
                        ErrorClass::BadConstructorArity,
                        vec![format!("Too few arguments in pattern for {k}").into()],
                    ));
                };
                if *pe != eps {
                    return Err(ctx.err(
                        ErrorClass::TypeMismatch,
                        vec![format!("Pattern argument of {k} has the wrong relevance").into()],
                    ));
                }
                let (delta, image) = declare_pat(ctx, p, eps, &ty)?;
                for e in delta.0 {
                    ctx.push_local(tele_entry(&e));
                    out.push(e);
                }
                args.push(Arg::new(eps, image.clone()));
                rest = do_subst_flex(ctx, &[(name, image)], &Telescope(rest), &HashSet::new())?.0;
            }
        }
    }
    if subs.next().is_some() {
        return Err(ctx.err(
            ErrorClass::BadConstructorArity,
            vec![format!("Too many arguments in pattern for {k}").into()],
        ));
    }
    Ok((Telescope(out), Term::DataCon(k.clone(), args)))
}

pub(crate) fn tc_case(ctx: &mut Context, s: &Term, ms: &[Match], expected: Option<&Term>) -> Result<Term> {
    let sty = infer_type(ctx, s)?;
    let sty = whnf(ctx, &sty)?;
    let s_whnf = whnf(ctx, s)?;
    let scrut_var = match &s_whnf {
        Term::Var(z) if ctx.is_definable(z) => Some(z.clone()),
        _ => None,
    };
    let mut inferred: Option<Term> = None;
    let mut patterns = Vec::new();
    for m in ms {
        let (pat, body) = m.unbind();
        patterns.push(pat.clone());
        let mark = ctx.len();
        let r = (|| -> Result<Option<Term>> {
            let (delta, image) = declare_pat(ctx, &pat, Epsilon::Rel, &sty)?;
            for e in &delta.0 {
                ctx.push_local(tele_entry(e));
            }
            match expected {
                Some(ty) => {
                    let mut flexible: HashSet<Name> = pat.vars().into_iter().collect();
                    flexible.extend(scrut_var.clone());
                    // A clash means this branch can never be taken, e.g.
                    // `if True then a else b`: no refinement, but the body
                    // must still check.
                    let defs = match unify(ctx, &flexible, &s_whnf, &image) {
                        Ok(defs) => defs,
                        Err(e) if e.class == ErrorClass::StepLimit => return Err(e),
                        Err(_) => Vec::new(),
                    };
                    for d in defs {
                        ctx.push_local(d);
                    }
                    check_type(ctx, &body, ty)?;
                    Ok(None)
                }
                None => {
                    let ty = infer_type(ctx, &body)?;
                    let vars = fv(&ty);
                    if pat.vars().iter().any(|x| vars.contains(x)) {
                        return Err(ctx.err(
                            ErrorClass::EscapingVariable,
                            vec!["The type of this branch mentions its pattern variables:".into(), ty.into()],
                        ));
                    }
                    Ok(Some(ty))
                }
            }
        })();
        ctx.truncate(mark);
        if let Some(ty) = r? {
            match &inferred {
                Some(prev) => equate(ctx, &ty, prev)?,
                None => inferred = Some(ty),
            }
        }
    }
    exhaustivity_check(ctx, &sty, &patterns)?;
    match expected {
        Some(ty) => Ok(ty.clone()),
        None => inferred.ok_or_else(|| needs_annotation(ctx, "a case with no branches")),
    }
}

/// A value shape not covered by any pattern.
#[derive(Clone, Debug)]
enum Witness {
    Wild,
    Con(ConName, Vec<(Witness, Epsilon)>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Wild => f.write_str("_"),
            Witness::Con(k, args) => {
                write!(f, "{k}")?;
                for (w, eps) in args {
                    match (eps, w) {
                        (Epsilon::Irr, w) => write!(f, " [{w}]")?,
                        (Epsilon::Rel, w @ Witness::Con(_, a)) if !a.is_empty() => write!(f, " ({w})")?,
                        (Epsilon::Rel, w) => write!(f, " {w}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

const MAX_WITNESSES: usize = 8;

/// Every constructor of the scrutinee type must be matched by some pattern
/// unless its index constraints make it impossible.
pub fn exhaustivity_check(ctx: &mut Context, scrut_ty: &Term, patterns: &[Pattern]) -> Result<()> {
    if patterns.iter().any(|p| matches!(p, Pattern::Var(_))) {
        return Ok(());
    }
    let x = fresh(&Name::new("scrut"));
    let cols = vec![TeleEntry::Sig { name: x, eps: Epsilon::Rel, ty: scrut_ty.clone() }];
    let rows = patterns.iter().map(|p| vec![p.clone()]).collect();
    let mark = ctx.len();
    let r = uncovered(ctx, cols, rows);
    ctx.truncate(mark);
    let missing = r?;
    if missing.is_empty() {
        return Ok(());
    }
    let shown: Vec<String> = missing.iter().map(|w| w[0].to_string()).collect();
    Err(ctx.err(
        ErrorClass::NonExhaustive,
        vec![format!("Missing case for {}", shown.join(", ")).into()],
    ))
}

fn sig_count(cols: &[TeleEntry]) -> usize {
    cols.iter().filter(|e| matches!(e, TeleEntry::Sig { .. })).count()
}

/// Is every constructor of `ty` ruled out by its index constraints? Only
/// one level is inspected, so a constructor with an empty field still counts
/// as possible.
fn uninhabited(ctx: &Context, x: &Name, ty: &Term, cols: &[TeleEntry]) -> Result<bool> {
    let Term::TyCon(tname, params) = whnf(ctx, ty)? else {
        return Ok(false);
    };
    let Some(data) = ctx.lookup_tcon(&tname) else {
        return Ok(false);
    };
    for con in &data.constructors {
        let con_tele = match subst_tele(ctx, &data.params, &params, &con.tele.freshen()) {
            Ok(t) => t,
            Err(e) if e.class == ErrorClass::UnificationFailure => continue,
            Err(e) => return Err(e),
        };
        let image = constructor_image(&con.name, &con_tele);
        let vars: HashSet<Name> = con_tele.sig_names().into_iter().collect();
        match do_subst_flex(ctx, &[(x.clone(), image)], &Telescope(cols.to_vec()), &vars) {
            Ok(_) => return Ok(false),
            Err(e) if e.class == ErrorClass::UnificationFailure => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// The constructor applied to the variables of its telescope.
fn constructor_image(k: &ConName, tele: &Telescope) -> Term {
    let args = tele
        .0
        .iter()
        .filter_map(|e| match e {
            TeleEntry::Sig { name, eps, .. } => Some(Arg::new(*eps, Term::Var(name.clone()))),
            TeleEntry::Def { .. } => None,
        })
        .collect();
    Term::DataCon(k.clone(), args)
}

/// Rows of patterns against columns described by a telescope; returns the
/// uncovered value vectors.
fn uncovered(ctx: &mut Context, mut cols: Vec<TeleEntry>, rows: Vec<Vec<Pattern>>) -> Result<Vec<Vec<Witness>>> {
    while let Some(TeleEntry::Def { .. }) = cols.first() {
        let e = cols.remove(0);
        ctx.push_local(tele_entry(&e));
    }
    if cols.is_empty() {
        return Ok(if rows.is_empty() { vec![vec![]] } else { vec![] });
    }
    let TeleEntry::Sig { name: x, eps, ty } = cols.remove(0) else { unreachable!() };
    if rows.is_empty() {
        if uninhabited(ctx, &x, &ty, &cols)? {
            return Ok(vec![]);
        }
        return Ok(vec![vec![Witness::Wild; 1 + sig_count(&cols)]]);
    }
    if rows.iter().all(|r| matches!(r[0], Pattern::Var(_))) {
        ctx.push_local(Entry::Sig { name: x, eps, ty });
        let rows = rows.into_iter().map(|r| r[1..].to_vec()).collect();
        let ws = uncovered(ctx, cols, rows)?;
        return Ok(ws
            .into_iter()
            .map(|w| std::iter::once(Witness::Wild).chain(w).collect())
            .collect());
    }
    let (tname, params) = ensure_tcon(ctx, &ty)?;
    let data = ctx
        .lookup_tcon(&tname)
        .ok_or_else(|| ctx.err(ErrorClass::NotInScope, vec![format!("Unknown type constructor {tname}").into()]))?;
    let mut missing = Vec::new();
    for con in &data.constructors {
        let con_tele = match subst_tele(ctx, &data.params, &params, &con.tele.freshen()) {
            Ok(t) => t,
            Err(e) if e.class == ErrorClass::UnificationFailure => continue,
            Err(e) => return Err(e),
        };
        let con_vars: HashSet<Name> = con_tele.sig_names().into_iter().collect();
        let arg_eps: Vec<Epsilon> = con_tele
            .0
            .iter()
            .filter_map(|e| match e {
                TeleEntry::Sig { eps, .. } => Some(*eps),
                TeleEntry::Def { .. } => None,
            })
            .collect();
        let arity = arg_eps.len();
        let image = constructor_image(&con.name, &con_tele);
        let rest = match do_subst_flex(ctx, &[(x.clone(), image)], &Telescope(cols.clone()), &con_vars) {
            Ok(t) => t.0,
            Err(e) if e.class == ErrorClass::UnificationFailure => continue,
            Err(e) => return Err(e),
        };
        let spec_rows: Vec<Vec<Pattern>> = rows
            .iter()
            .filter_map(|r| match &r[0] {
                Pattern::Con(k, subs) if *k == con.name && subs.len() == arity => {
                    Some(subs.iter().map(|(p, _)| p.clone()).chain(r[1..].iter().cloned()).collect())
                }
                Pattern::Con(..) => None,
                Pattern::Var(_) => Some(
                    std::iter::repeat_with(|| Pattern::Var(fresh(&Name::new("_"))))
                        .take(arity)
                        .chain(r[1..].iter().cloned())
                        .collect(),
                ),
            })
            .collect();
        let mut new_cols = con_tele.0;
        new_cols.extend(rest);
        let mark = ctx.len();
        let ws = uncovered(ctx, new_cols, spec_rows);
        ctx.truncate(mark);
        for w in ws? {
            let (head, tail) = w.split_at(arity);
            let head = head.iter().cloned().zip(arg_eps.iter().copied()).collect();
            let mut v = vec![Witness::Con(con.name.clone(), head)];
            v.extend(tail.iter().cloned());
            missing.push(v);
        }
        if missing.len() >= MAX_WITNESSES {
            break;
        }
    }
    Ok(missing)
}
