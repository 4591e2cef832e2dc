//! A small dependently-typed core language: syntax, parser, definitional
//! equality and a bidirectional type checker, plus a batch driver.

pub mod driver;
pub mod env;
pub mod equal;
pub mod surface;
pub mod syntax;
pub mod typecheck;
