//! Checking whole modules, one declaration at a time.

use std::collections::HashSet;
use std::sync::Arc;

use super::telescope::tc_telescope;
use super::{check_type, infer_type, tc_type, Result};
use crate::env::{Context, DataDef, Entry, ErrorClass};
use crate::surface::{DataDecl, Decl, ModuleAST};
use crate::syntax::Name;

/// Check every declaration of `m`, adding it to `ctx`. The reduction budget
/// is reset before each declaration.
pub fn check_module(ctx: &mut Context, m: &ModuleAST) -> Result<()> {
    for d in &m.decls {
        ctx.reset_budget();
        check_decl(ctx, d)?;
    }
    Ok(())
}

fn duplicate(ctx: &Context, what: &str) -> super::CheckError {
    ctx.err(ErrorClass::TypeMismatch, vec![format!("Duplicate declaration of {what}").into()])
}

fn has_global_sig(ctx: &Context, x: &Name) -> bool {
    ctx.is_global(x) && ctx.lookup_ty(x).is_ok()
}

fn check_decl(ctx: &mut Context, d: &Decl) -> Result<()> {
    match d {
        Decl::TypeSig { name, ty, pos } => ctx.with_pos(pos, |ctx| {
            if has_global_sig(ctx, name) {
                return Err(duplicate(ctx, &format!("the type of {name}")));
            }
            tc_type(ctx, ty).map_err(|e| e.with_context("When checking the type signature of", name.to_string()))?;
            ctx.push_global(Entry::sig(name.clone(), ty.clone()));
            Ok(())
        }),
        Decl::Def { name, term, pos } => ctx.with_pos(pos, |ctx| {
            if ctx.is_global(name) && ctx.lookup_def(name).is_some() {
                return Err(duplicate(ctx, &format!("the definition of {name}")));
            }
            if has_global_sig(ctx, name) {
                let (_, ty) = ctx.lookup_ty(name)?;
                check_type(ctx, term, &ty).map_err(|e| {
                    e.with_context("When checking the term", term).with_context("against the signature", &ty)
                })?;
            } else {
                let ty = infer_type(ctx, term).map_err(|e| e.with_context("When inferring the type of", term))?;
                ctx.push_global(Entry::sig(name.clone(), ty));
            }
            ctx.push_global(Entry::def(name.clone(), term.clone()));
            Ok(())
        }),
        Decl::Data(d) => check_data(ctx, d),
    }
}

/// Check a datatype declaration: parameters, then each constructor's
/// telescope with the type itself (but none of its constructors) in scope.
pub fn check_data(ctx: &mut Context, d: &DataDecl) -> Result<()> {
    ctx.with_pos(&d.pos, |ctx| {
        if ctx.lookup_tcon(&d.name).is_some() {
            return Err(duplicate(ctx, &format!("the datatype {}", d.name)));
        }
        let mut seen = HashSet::new();
        for c in &d.constructors {
            if !seen.insert(c.name.clone()) {
                return Err(duplicate(ctx, &format!("the data constructor {} in {}", c.name, d.name)));
            }
        }
        tc_telescope(ctx, &d.params, |_| Ok(()))
            .map_err(|e| e.with_context("When checking the parameters of", d.name.to_string()))?;
        ctx.push_global(Entry::Data(Arc::new(DataDef {
            tycon: d.name.clone(),
            params: d.params.clone(),
            constructors: Vec::new(),
        })));
        tc_telescope(ctx, &d.params, |ctx| {
            for c in &d.constructors {
                tc_telescope(ctx, &c.tele, |_| Ok(()))
                    .map_err(|e| e.with_context("When checking the data constructor", c.name.to_string()))?;
            }
            Ok(())
        })?;
        ctx.push_global(Entry::Data(Arc::new(DataDef {
            tycon: d.name.clone(),
            params: d.params.clone(),
            constructors: d.constructors.clone(),
        })));
        Ok(())
    })
}
