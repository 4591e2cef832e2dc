//! Recursive-descent parser with an indentation-sensitive layout rule.
//!
//! Layout: every block (top-level declarations, case branches) has a
//! reference column. A token that starts a line at or left of the innermost
//! reference column cannot continue the current expression.

use std::collections::HashSet;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{ConstructorDef, ConstructorNames, DataDecl, Decl, ModuleAST, ParseError};
use crate::syntax::{
    Arg, Bind, Bind2, ConName, Epsilon, Match, Name, Pattern, SourcePos, TeleEntry, Telescope, Term,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleHeader {
    pub name: Option<String>,
    pub imports: Vec<(String, SourcePos)>,
}

/// Read only the `module`/`import` lines at the top of a file.
pub fn parse_header(text: &str, file: &str) -> Result<ModuleHeader, ParseError> {
    let mut p = Parser::new(text, file, ConstructorNames::default())?;
    p.header()
}

pub fn parse_module(text: &str, file: &str, names: &ConstructorNames) -> Result<ModuleAST, ParseError> {
    let mut p = Parser::new(text, file, names.clone())?;
    p.module()
}

/// Parse a single expression.
pub fn parse_term(text: &str, names: &ConstructorNames) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, "<term>", names.clone())?;
    let t = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

/// Which kind of constructor an atom turned out to be.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Head {
    None,
    TyCon,
    DataCon,
}

struct Atom {
    term: Term,
    /// `(x : A)`, which becomes a binder if an arrow follows.
    binder: Option<(Name, Term)>,
    head: Head,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    file: Arc<str>,
    layout: Vec<u32>,
    names: ConstructorNames,
}

impl Parser {
    fn new(text: &str, file: &str, names: ConstructorNames) -> Result<Parser, ParseError> {
        let file: Arc<str> = Arc::from(file);
        let toks = tokenize(text, &file)?;
        Ok(Parser { toks, i: 0, file, layout: Vec::new(), names })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_tok(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn layout_col(&self) -> u32 {
        self.layout.last().copied().unwrap_or(0)
    }

    /// The next token cannot continue the current construct.
    fn blocked(&self) -> bool {
        let t = self.peek();
        t.tok == Tok::Eof || (t.first && t.col <= self.layout_col())
    }

    fn at(&self, tok: &Tok) -> bool {
        !self.blocked() && self.peek().tok == *tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn pos(&self) -> SourcePos {
        let t = self.peek();
        SourcePos { file: self.file.clone(), line: t.line, column: t.col }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek().tok.describe()),
        }
    }

    /// Closing tokens are accepted regardless of layout.
    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !self.blocked() => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn dotted(&mut self) -> Result<String, ParseError> {
        let mut s = self.ident()?;
        while self.peek().tok == Tok::Dot && matches!(self.peek_tok(1), Tok::Ident(_)) {
            self.bump();
            s.push('.');
            s.push_str(&self.ident()?);
        }
        Ok(s)
    }

    // ---- modules ---------------------------------------------------------

    fn header(&mut self) -> Result<ModuleHeader, ParseError> {
        let mut h = ModuleHeader::default();
        if self.peek().tok == Tok::Module {
            self.bump();
            h.name = Some(self.dotted()?);
            self.expect(Tok::Where)?;
        }
        while self.peek().tok == Tok::Import {
            self.bump();
            let pos = self.pos();
            h.imports.push((self.dotted()?, pos));
        }
        Ok(h)
    }

    fn module(&mut self) -> Result<ModuleAST, ParseError> {
        let header = self.header()?;
        let mut decls = Vec::new();
        let col = self.peek().col;
        self.layout.push(col);
        while self.peek().tok != Tok::Eof {
            let t = self.peek();
            if !(t.first && t.col == col) {
                return Err(self.unexpected("a new declaration at the start of a line"));
            }
            decls.push(self.decl()?);
        }
        self.layout.pop();
        Ok(ModuleAST { name: header.name, imports: header.imports, decls })
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let pos = self.pos();
        match self.peek().tok.clone() {
            Tok::Data => self.data_decl().map(Decl::Data),
            Tok::Ident(x) => {
                self.bump();
                let name = Name::new(&x);
                if self.at(&Tok::Colon) {
                    self.bump();
                    let ty = self.expr()?;
                    Ok(Decl::TypeSig { name, ty, pos })
                } else if self.at(&Tok::Equals) {
                    self.bump();
                    let term = self.expr()?;
                    Ok(Decl::Def { name, term, pos })
                } else {
                    Err(self.unexpected("`:` or `=`"))
                }
            }
            _ => Err(self.unexpected("a declaration")),
        }
    }

    fn data_decl(&mut self) -> Result<DataDecl, ParseError> {
        let pos = self.pos();
        self.expect(Tok::Data)?;
        let name = self.ident()?;
        self.names.tycons.insert(name.clone());
        let mut params = Vec::new();
        while self.at(&Tok::LParen) {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            self.expect(Tok::RParen)?;
            params.push(TeleEntry::Sig { name: Name::new(&x), eps: Epsilon::Rel, ty });
        }
        self.expect(Tok::Colon)?;
        self.expect(Tok::Type)?;
        if self.at(&Tok::Where) {
            self.bump();
        }
        let mut constructors = Vec::new();
        if self.at(&Tok::LBrace) {
            self.bump();
            self.layout.push(0);
            if self.peek().tok != Tok::RBrace {
                loop {
                    constructors.push(self.constructor()?);
                    if self.peek().tok == Tok::Semi {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.layout.pop();
            self.expect(Tok::RBrace)?;
        } else {
            // Constructors begin at any identifier that starts a line inside
            // the declaration's block.
            while matches!(self.peek().tok, Tok::Ident(_)) && !self.blocked() {
                if !constructors.is_empty() && !self.peek().first {
                    return Err(self.unexpected("a constructor on a new line"));
                }
                constructors.push(self.constructor()?);
            }
        }
        Ok(DataDecl { name: Arc::from(name.as_str()), params: Telescope(params), constructors, pos })
    }

    fn constructor(&mut self) -> Result<ConstructorDef, ParseError> {
        let name = self.ident()?;
        self.names.dcons.insert(name.clone());
        let mut tele = Vec::new();
        if self.at(&Tok::Of) {
            self.bump();
            loop {
                if self.at(&Tok::LParen) {
                    self.bump();
                    let (x, ty) = self.tele_sig()?;
                    self.expect(Tok::RParen)?;
                    tele.push(TeleEntry::Sig { name: x, eps: Epsilon::Rel, ty });
                } else if self.at(&Tok::LBrack) {
                    self.bump();
                    if let (Tok::Ident(x), Tok::Equals) = (self.peek_tok(0).clone(), self.peek_tok(1)) {
                        self.bump();
                        self.bump();
                        let term = self.expr()?;
                        tele.push(TeleEntry::Def { name: Name::new(&x), term });
                    } else {
                        let (x, ty) = self.tele_sig()?;
                        tele.push(TeleEntry::Sig { name: x, eps: Epsilon::Irr, ty });
                    }
                    self.expect(Tok::RBrack)?;
                } else {
                    break;
                }
            }
            if tele.is_empty() {
                return Err(self.unexpected("a constructor argument `(..)` or `[..]`"));
            }
        }
        Ok(ConstructorDef { name: Arc::from(name.as_str()), tele: Telescope(tele) })
    }

    /// `x : A` or just `A` inside telescope brackets.
    fn tele_sig(&mut self) -> Result<(Name, Term), ParseError> {
        if let (Tok::Ident(x), Tok::Colon) = (self.peek_tok(0).clone(), self.peek_tok(1)) {
            self.bump();
            self.bump();
            Ok((Name::new(&x), self.expr()?))
        } else {
            Ok((Name::new("_"), self.expr()?))
        }
    }

    // ---- expressions -----------------------------------------------------

    fn expr(&mut self) -> Result<Term, ParseError> {
        if self.blocked() {
            return Err(self.unexpected("an expression"));
        }
        let pos = self.pos();
        let t = match self.peek().tok {
            Tok::Backslash => self.lambda()?,
            Tok::Let => self.let_expr()?,
            Tok::If => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let a = self.expr()?;
                self.expect(Tok::Else)?;
                let b = self.expr()?;
                if_term(c, a, b)
            }
            Tok::Case => self.case_expr()?,
            Tok::Subst => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::By)?;
                let b = self.expr()?;
                Term::Subst(Box::new(a), Box::new(b))
            }
            Tok::Contra => {
                self.bump();
                Term::Contra(Box::new(self.expr()?))
            }
            Tok::LBrack => {
                self.bump();
                let (x, dom) = self.tele_sig()?;
                self.expect(Tok::RBrack)?;
                self.expect(Tok::Arrow)?;
                let cod = self.expr()?;
                Term::pi(Epsilon::Irr, x, dom, cod)
            }
            _ => self.arrow_expr()?,
        };
        Ok(wrap(pos, t))
    }

    fn arrow_expr(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        let lhs = self.app_expr()?;
        let (lhs, binder) = if self.at(&Tok::Equals) {
            self.bump();
            let rhs = self.app_expr()?;
            (wrap(pos.clone(), Term::TyEq(Box::new(lhs.term), Box::new(rhs.term))), None)
        } else {
            (lhs.term, lhs.binder)
        };
        if !self.at(&Tok::Arrow) {
            return Ok(lhs);
        }
        self.bump();
        let cod = self.expr()?;
        Ok(match binder {
            Some((x, dom)) => Term::pi(Epsilon::Rel, x, dom, cod),
            None => Term::pi(Epsilon::Rel, Name::new("_"), lhs, cod),
        })
    }

    fn starts_atom(&self) -> bool {
        !self.blocked()
            && matches!(
                self.peek().tok,
                Tok::Ident(_) | Tok::Num(_) | Tok::Type | Tok::Unit | Tok::Refl | Tok::TrustMe | Tok::LParen | Tok::LBrace
            )
    }

    fn app_expr(&mut self) -> Result<Atom, ParseError> {
        let pos = self.pos();
        let head = self.atom()?;
        let mut args = Vec::new();
        loop {
            if self.at(&Tok::LBrack) {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::RBrack)?;
                args.push(Arg::irr(a));
            } else if self.starts_atom() {
                args.push(Arg::rel(self.atom()?.term));
            } else {
                break;
            }
        }
        if args.is_empty() {
            return Ok(head);
        }
        let term = match (head.head, head.term.unpos()) {
            (Head::TyCon, Term::TyCon(k, _)) => {
                if args.iter().any(|a| a.eps == Epsilon::Irr) {
                    return Err(ParseError {
                        pos,
                        message: format!("type constructor `{k}` cannot take irrelevant arguments"),
                    });
                }
                Term::TyCon(k.clone(), args)
            }
            (Head::DataCon, Term::DataCon(k, _)) => Term::DataCon(k.clone(), args),
            _ => Term::apps(head.term, args),
        };
        Ok(Atom { term: wrap(pos, term), binder: None, head: Head::None })
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pos = self.pos();
        if self.blocked() {
            return Err(self.unexpected("an expression"));
        }
        let plain = |term| Atom { term, binder: None, head: Head::None };
        let tok = self.peek().tok.clone();
        let atom = match tok {
            Tok::Ident(s) => {
                self.bump();
                if s == "_" {
                    return Err(ParseError { pos, message: "`_` cannot be used as an expression".into() });
                }
                if self.names.tycons.contains(&s) {
                    Atom { term: Term::tycon(&s, vec![]), binder: None, head: Head::TyCon }
                } else if self.names.dcons.contains(&s) {
                    Atom { term: Term::datacon(&s, vec![]), binder: None, head: Head::DataCon }
                } else {
                    plain(Term::Var(Name::new(&s)))
                }
            }
            Tok::Num(n) => {
                self.bump();
                plain(Term::nat(n))
            }
            Tok::Type => {
                self.bump();
                plain(Term::Type)
            }
            Tok::Unit => {
                self.bump();
                plain(Term::TyUnit)
            }
            Tok::Refl => {
                self.bump();
                plain(Term::Refl)
            }
            Tok::TrustMe => {
                self.bump();
                plain(Term::TrustMe)
            }
            Tok::LParen => {
                self.bump();
                if self.peek().tok == Tok::RParen {
                    self.bump();
                    plain(Term::LitUnit)
                } else if let (Tok::Ident(x), Tok::Colon) = (self.peek_tok(0).clone(), self.peek_tok(1)) {
                    if self.is_constructor(&x) {
                        self.paren_rest()?
                    } else {
                        let xpos = self.pos();
                        self.bump();
                        self.bump();
                        let ty = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let name = Name::new(&x);
                        Atom {
                            term: Term::ann(wrap(xpos, Term::Var(name.clone())), ty.clone()),
                            binder: Some((name, ty)),
                            head: Head::None,
                        }
                    }
                } else {
                    self.paren_rest()?
                }
            }
            Tok::LBrace => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let a = self.expr()?;
                self.expect(Tok::Bar)?;
                let b = self.expr()?;
                self.expect(Tok::RBrace)?;
                plain(Term::TySigma(Box::new(a), Bind::new(Name::new(&x), b)))
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(Atom { term: wrap(pos, atom.term), ..atom })
    }

    fn is_constructor(&self, s: &str) -> bool {
        self.names.tycons.contains(s) || self.names.dcons.contains(s)
    }

    /// After `(`: `e)`, `e : A)` or `e, b)`.
    fn paren_rest(&mut self) -> Result<Atom, ParseError> {
        let e = self.expr()?;
        let term = match self.peek().tok {
            Tok::Colon => {
                self.bump();
                let ty = self.expr()?;
                Term::ann(e, ty)
            }
            Tok::Comma => {
                self.bump();
                let b = self.expr()?;
                Term::Prod(Box::new(e), Box::new(b))
            }
            _ => e,
        };
        self.expect(Tok::RParen)?;
        Ok(Atom { term, binder: None, head: Head::None })
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Backslash)?;
        let mut params = Vec::new();
        loop {
            if self.at(&Tok::LBrack) {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::RBrack)?;
                params.push((Epsilon::Irr, Name::new(&x)));
            } else if matches!(self.peek().tok, Tok::Ident(_)) {
                let x = self.ident()?;
                params.push((Epsilon::Rel, Name::new(&x)));
            } else {
                break;
            }
        }
        if params.is_empty() {
            return Err(self.unexpected("a lambda parameter"));
        }
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        Ok(params.into_iter().rev().fold(body, |b, (eps, x)| Term::lam(eps, x, b)))
    }

    fn let_expr(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Let)?;
        if self.at(&Tok::LParen) {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Comma)?;
            let y = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Equals)?;
            let a = self.expr()?;
            self.expect(Tok::In)?;
            let b = self.expr()?;
            Ok(Term::LetPair(Box::new(a), Bind2::new(Name::new(&x), Name::new(&y), b)))
        } else {
            let x = self.ident()?;
            self.expect(Tok::Equals)?;
            let a = self.expr()?;
            self.expect(Tok::In)?;
            let b = self.expr()?;
            Ok(Term::Let(Box::new(a), Bind::new(Name::new(&x), b)))
        }
    }

    fn case_expr(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Case)?;
        let scrut = self.expr()?;
        self.expect(Tok::Of)?;
        let mut branches = Vec::new();
        if self.at(&Tok::LBrace) {
            self.bump();
            self.layout.push(0);
            if self.peek().tok != Tok::RBrace {
                loop {
                    branches.push(self.branch()?);
                    if self.peek().tok == Tok::Semi {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.layout.pop();
            self.expect(Tok::RBrace)?;
        } else if !self.blocked() && matches!(self.peek().tok, Tok::Ident(_) | Tok::LParen | Tok::Num(_)) {
            let col = self.peek().col;
            self.layout.push(col);
            loop {
                branches.push(self.branch()?);
                let t = self.peek();
                if !(t.tok != Tok::Eof && t.first && t.col == col) {
                    break;
                }
            }
            self.layout.pop();
        }
        Ok(Term::Case(Box::new(scrut), branches))
    }

    fn branch(&mut self) -> Result<Match, ParseError> {
        let pos = self.pos();
        let pattern = self.pattern()?;
        let mut seen = HashSet::new();
        for v in pattern.vars() {
            if !v.is_wildcard() && !seen.insert(v.clone()) {
                return Err(ParseError { pos, message: format!("variable `{v}` bound twice in pattern") });
            }
        }
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        Ok(Match { pattern, body })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        if let Tok::Ident(s) = self.peek().tok.clone() {
            if self.names.dcons.contains(&s) {
                self.bump();
                let mut args = Vec::new();
                loop {
                    if self.at(&Tok::LBrack) {
                        self.bump();
                        let p = self.pattern()?;
                        self.expect(Tok::RBrack)?;
                        args.push((p, Epsilon::Irr));
                    } else if !self.blocked()
                        && matches!(self.peek().tok, Tok::Ident(_) | Tok::LParen | Tok::Num(_))
                    {
                        args.push((self.pattern_atom()?, Epsilon::Rel));
                    } else {
                        break;
                    }
                }
                return Ok(Pattern::Con(Arc::from(s.as_str()), args));
            }
        }
        self.pattern_atom()
    }

    fn pattern_atom(&mut self) -> Result<Pattern, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                if self.names.dcons.contains(&s) {
                    Ok(Pattern::Con(Arc::from(s.as_str()), vec![]))
                } else {
                    Ok(Pattern::Var(Name::new(&s)))
                }
            }
            Tok::Num(n) => {
                self.bump();
                let mut p = Pattern::Con(Arc::from("Zero"), vec![]);
                for _ in 0..n {
                    p = Pattern::Con(Arc::from("Succ"), vec![(p, Epsilon::Rel)]);
                }
                Ok(p)
            }
            Tok::LParen => {
                self.bump();
                let p = self.pattern()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            _ => Err(self.unexpected("a pattern")),
        }
    }
}

fn wrap(pos: SourcePos, t: Term) -> Term {
    match t {
        Term::Pos(ref p, _) if *p == pos => t,
        t => Term::Pos(pos, Box::new(t)),
    }
}

/// `if c then a else b` is a two-branch case over `Bool`.
pub(crate) fn if_term(c: Term, a: Term, b: Term) -> Term {
    let con = |k: &str| Pattern::Con(ConName::from(k), vec![]);
    Term::Case(
        Box::new(c),
        vec![Match { pattern: con("True"), body: a }, Match { pattern: con("False"), body: b }],
    )
}
