//! Concrete syntax: module AST, parser and pretty printer.

use std::collections::BTreeSet;

use crate::syntax::{ConName, Name, SourcePos, Telescope, Term};

pub mod lexer;
mod parser;
mod pretty;

pub use parser::{parse_header, parse_module, parse_term, ModuleHeader};
pub use pretty::{pretty_decl, pretty_module, pretty_term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: ParseError\n  {message}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleAST {
    pub name: Option<String>,
    pub imports: Vec<(String, SourcePos)>,
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    TypeSig { name: Name, ty: Term, pos: SourcePos },
    Def { name: Name, term: Term, pos: SourcePos },
    Data(DataDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataDecl {
    pub name: ConName,
    pub params: Telescope,
    pub constructors: Vec<ConstructorDef>,
    pub pos: SourcePos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDef {
    pub name: ConName,
    pub tele: Telescope,
}

/// Which identifiers the parser should read as type or data constructors.
#[derive(Clone, Debug, Default)]
pub struct ConstructorNames {
    pub tycons: BTreeSet<String>,
    pub dcons: BTreeSet<String>,
}

impl ConstructorNames {
    pub fn extend_from(&mut self, m: &ModuleAST) {
        for d in &m.decls {
            if let Decl::Data(data) = d {
                self.tycons.insert(data.name.to_string());
                for c in &data.constructors {
                    self.dcons.insert(c.name.to_string());
                }
            }
        }
    }
}
