//! Abstract syntax: names, terms, binders, patterns and telescopes.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

mod alpha;
mod subst;

pub use alpha::{aeq, fv, occurs_free, same_shape, strip};
pub use subst::{subst, subst_many, unbind2, Substitution};

/// Name of a type or data constructor.
pub type ConName = Arc<str>;

/// A variable name: the source spelling plus a disambiguating id.
///
/// Names straight out of the parser carry uid 0. Opening a binder always
/// produces a name with a uid that has never been issued before.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    hint: Arc<str>,
    uid: u64,
}

impl Name {
    pub fn new(hint: &str) -> Name {
        Name { hint: Arc::from(hint), uid: 0 }
    }

    pub fn with_uid(hint: &str, uid: u64) -> Name {
        Name { hint: Arc::from(hint), uid }
    }

    pub fn hint(&self) -> &str {
        &self.hint
    }

    pub fn uid(&self) -> u64 {
        self.uid
    }

    /// True for the `_` placeholder the parser uses for anonymous binders.
    pub fn is_wildcard(&self) -> bool {
        &*self.hint == "_"
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.uid == 0 {
            write!(f, "{}", self.hint)
        } else {
            write!(f, "{}#{}", self.hint, self.uid)
        }
    }
}

/// Just the hint, as the user wrote it.
impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hint)
    }
}

/// Issues uids. Each supply starts at 1 and never repeats itself.
#[derive(Debug)]
pub struct NameSupply {
    next: AtomicU64,
}

impl NameSupply {
    pub const fn new() -> NameSupply {
        NameSupply { next: AtomicU64::new(1) }
    }

    pub fn fresh(&self, name: &Name) -> Name {
        let uid = self.next.fetch_add(1, Ordering::Relaxed);
        Name { hint: name.hint.clone(), uid }
    }
}

impl Default for NameSupply {
    fn default() -> Self {
        NameSupply::new()
    }
}

static SUPPLY: NameSupply = NameSupply::new();

/// A fresh copy of `name` from the process-wide supply.
pub fn fresh(name: &Name) -> Name {
    SUPPLY.fresh(name)
}

/// Relevance tag on binders, arguments and context entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Epsilon {
    #[default]
    Rel,
    Irr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourcePos {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Type,
    Var(Name),
    Lam(Epsilon, Bind),
    App(Box<Term>, Box<Arg>),
    Pi(Epsilon, Box<Term>, Bind),
    Ann(Box<Term>, Box<Term>),
    Pos(SourcePos, Box<Term>),
    TrustMe,
    TyUnit,
    LitUnit,
    TySigma(Box<Term>, Bind),
    Prod(Box<Term>, Box<Term>),
    LetPair(Box<Term>, Bind2),
    Let(Box<Term>, Bind),
    TyEq(Box<Term>, Box<Term>),
    Refl,
    Subst(Box<Term>, Box<Term>),
    Contra(Box<Term>),
    TyCon(ConName, Vec<Arg>),
    DataCon(ConName, Vec<Arg>),
    Case(Box<Term>, Vec<Match>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub eps: Epsilon,
    pub term: Term,
}

impl Arg {
    pub fn new(eps: Epsilon, term: Term) -> Arg {
        Arg { eps, term }
    }

    pub fn rel(term: Term) -> Arg {
        Arg { eps: Epsilon::Rel, term }
    }

    pub fn irr(term: Term) -> Arg {
        Arg { eps: Epsilon::Irr, term }
    }
}

/// One bound name scoped over a body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bind {
    pub name: Name,
    pub body: Box<Term>,
}

/// Two bound names scoped over a body (used by `let (x, y) = ...`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bind2 {
    pub first: Name,
    pub second: Name,
    pub body: Box<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Var(Name),
    Con(ConName, Vec<(Pattern, Epsilon)>),
}

/// A case branch. The pattern's variables are bound in `body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub pattern: Pattern,
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TeleEntry {
    Sig { name: Name, eps: Epsilon, ty: Term },
    Def { name: Name, term: Term },
}

/// Ordered bindings where each entry scopes over the ones after it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Telescope(pub Vec<TeleEntry>);

impl Bind {
    pub fn new(name: Name, body: Term) -> Bind {
        Bind { name, body: Box::new(body) }
    }

    /// Open the binder with a fresh name.
    pub fn unbind(&self) -> (Name, Term) {
        let x = fresh(&self.name);
        let body = subst(&self.name, &Term::Var(x.clone()), &self.body);
        (x, body)
    }

    /// Substitute `arg` for the bound variable.
    pub fn instantiate(&self, arg: &Term) -> Term {
        subst(&self.name, arg, &self.body)
    }
}

impl Bind2 {
    pub fn new(first: Name, second: Name, body: Term) -> Bind2 {
        Bind2 { first, second, body: Box::new(body) }
    }

    pub fn unbind(&self) -> (Name, Name, Term) {
        let x = fresh(&self.first);
        let y = fresh(&self.second);
        let body = self.instantiate(&Term::Var(x.clone()), &Term::Var(y.clone()));
        (x, y, body)
    }

    pub fn instantiate(&self, a: &Term, b: &Term) -> Term {
        subst_many(
            &[(self.first.clone(), a.clone()), (self.second.clone(), b.clone())],
            &self.body,
        )
    }
}

impl Pattern {
    /// Variables bound by the pattern, left to right.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Con(_, args) => {
                for (p, _) in args {
                    p.collect_vars(out);
                }
            }
        }
    }

    /// Rename pattern variables through `f`.
    pub fn rename(&self, f: &mut impl FnMut(&Name) -> Name) -> Pattern {
        match self {
            Pattern::Var(x) => Pattern::Var(f(x)),
            Pattern::Con(k, args) => Pattern::Con(
                k.clone(),
                args.iter().map(|(p, e)| (p.rename(f), *e)).collect(),
            ),
        }
    }

    /// The pattern read back as a term.
    pub fn to_term(&self) -> Term {
        match self {
            Pattern::Var(x) => Term::Var(x.clone()),
            Pattern::Con(k, args) => Term::DataCon(
                k.clone(),
                args.iter().map(|(p, e)| Arg::new(*e, p.to_term())).collect(),
            ),
        }
    }
}

impl Match {
    /// Open the branch, giving every pattern variable a fresh name.
    pub fn unbind(&self) -> (Pattern, Term) {
        let mut pairs = Vec::new();
        let pattern = self.pattern.rename(&mut |x| {
            let y = fresh(x);
            pairs.push((x.clone(), Term::Var(y.clone())));
            y
        });
        (pattern, subst_many(&pairs, &self.body))
    }
}

impl Telescope {
    pub fn empty() -> Telescope {
        Telescope(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Names bound by `Sig` entries, in order.
    pub fn sig_names(&self) -> Vec<Name> {
        self.0
            .iter()
            .filter_map(|e| match e {
                TeleEntry::Sig { name, .. } => Some(name.clone()),
                TeleEntry::Def { .. } => None,
            })
            .collect()
    }

    /// Capture-avoiding substitution through the telescope. Binders shadow
    /// the substitution for the entries that follow them.
    pub fn substitute(&self, pairs: &[(Name, Term)]) -> Telescope {
        let mut s = Substitution::new(pairs.to_vec());
        let mut out = Vec::with_capacity(self.0.len());
        for entry in &self.0 {
            match entry {
                TeleEntry::Sig { name, eps, ty } => {
                    let ty = s.apply(ty);
                    let name = s.bind(name);
                    out.push(TeleEntry::Sig { name, eps: *eps, ty });
                }
                TeleEntry::Def { name, term } => {
                    let name = match s.apply(&Term::Var(name.clone())) {
                        Term::Var(y) => y,
                        _ => name.clone(),
                    };
                    out.push(TeleEntry::Def { name, term: s.apply(term) });
                }
            }
        }
        Telescope(out)
    }

    /// Rename every `Sig` binder to a fresh name.
    pub fn freshen(&self) -> Telescope {
        let mut pairs: Vec<(Name, Term)> = Vec::new();
        let mut out = Vec::with_capacity(self.0.len());
        for entry in &self.0 {
            match entry {
                TeleEntry::Sig { name, eps, ty } => {
                    let ty = subst_many(&pairs, ty);
                    let y = fresh(name);
                    pairs.push((name.clone(), Term::Var(y.clone())));
                    out.push(TeleEntry::Sig { name: y, eps: *eps, ty });
                }
                TeleEntry::Def { name, term } => {
                    let name = match subst_many(&pairs, &Term::Var(name.clone())) {
                        Term::Var(y) => y,
                        _ => name.clone(),
                    };
                    out.push(TeleEntry::Def { name, term: subst_many(&pairs, term) });
                }
            }
        }
        Telescope(out)
    }
}

// Small constructors, mostly for tests and the parser.
impl Term {
    pub fn var(hint: &str) -> Term {
        Term::Var(Name::new(hint))
    }

    pub fn lam(eps: Epsilon, x: Name, body: Term) -> Term {
        Term::Lam(eps, Bind::new(x, body))
    }

    pub fn pi(eps: Epsilon, x: Name, dom: Term, cod: Term) -> Term {
        Term::Pi(eps, Box::new(dom), Bind::new(x, cod))
    }

    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi(Epsilon::Rel, Name::new("_"), dom, cod)
    }

    pub fn app(f: Term, eps: Epsilon, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(Arg::new(eps, a)))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Arg>) -> Term {
        args.into_iter()
            .fold(f, |f, a| Term::App(Box::new(f), Box::new(a)))
    }

    pub fn ann(a: Term, ty: Term) -> Term {
        Term::Ann(Box::new(a), Box::new(ty))
    }

    pub fn tycon(name: &str, args: Vec<Arg>) -> Term {
        Term::TyCon(Arc::from(name), args)
    }

    pub fn datacon(name: &str, args: Vec<Arg>) -> Term {
        Term::DataCon(Arc::from(name), args)
    }

    /// `Succ (... (Succ Zero))`.
    pub fn nat(n: u64) -> Term {
        let mut t = Term::datacon("Zero", vec![]);
        for _ in 0..n {
            t = Term::datacon("Succ", vec![Arg::rel(t)]);
        }
        t
    }

    /// Drop any `Pos` wrappers at the root.
    pub fn unpos(&self) -> &Term {
        let mut t = self;
        while let Term::Pos(_, inner) = t {
            t = inner;
        }
        t
    }
}
