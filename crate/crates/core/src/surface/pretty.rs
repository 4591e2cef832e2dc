//! Pretty printer. Output re-parses to an alpha-equivalent term.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::lexer::KEYWORDS;
use super::{DataDecl, Decl, ModuleAST};
use crate::syntax::{fv, occurs_free, Arg, Epsilon, Name, Pattern, TeleEntry, Telescope, Term};

// Precedence levels.
const EXPR: u8 = 0;
const EQ: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

pub fn pretty_term(t: &Term) -> String {
    Printer::new(fv(t)).term(t, EXPR, 0)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_term(self))
    }
}

pub fn pretty_decl(d: &Decl) -> String {
    match d {
        Decl::TypeSig { name, ty, .. } => {
            format!("{} : {}", name.hint(), Printer::new(fv(ty)).term(ty, EXPR, 0))
        }
        Decl::Def { name, term, .. } => {
            format!("{} = {}", name.hint(), Printer::new(fv(term)).term(term, EXPR, 0))
        }
        Decl::Data(d) => pretty_data(d),
    }
}

pub fn pretty_module(m: &ModuleAST) -> String {
    let mut out = String::new();
    if let Some(name) = &m.name {
        out.push_str(&format!("module {name} where\n"));
    }
    for (imp, _) in &m.imports {
        out.push_str(&format!("import {imp}\n"));
    }
    if !out.is_empty() {
        out.push('\n');
    }
    let decls: Vec<String> = m.decls.iter().map(pretty_decl).collect();
    out.push_str(&decls.join("\n\n"));
    out.push('\n');
    out
}

fn pretty_data(d: &DataDecl) -> String {
    // Free names of each constructor telescope, read in binding order
    // after the parameters.
    let params: Vec<&Name> = d.params.0.iter().filter_map(sig_name).collect();
    let mut free = BTreeSet::new();
    for tele in std::iter::once(&d.params).chain(d.constructors.iter().map(|c| &c.tele)) {
        let mut bound: Vec<&Name> = params.clone();
        for e in &tele.0 {
            let names = match e {
                TeleEntry::Sig { ty, .. } => fv(ty),
                TeleEntry::Def { name, term } => {
                    let mut n = fv(term);
                    n.insert(name.clone());
                    n
                }
            };
            free.extend(names.into_iter().filter(|n| !bound.contains(&n)));
            if let Some(x) = sig_name(e) {
                bound.push(x);
            }
        }
    }
    let mut p = Printer::new(free);
    let mut out = format!("data {}", d.name);
    let mark = p.scope.len();
    for e in &d.params.0 {
        if let TeleEntry::Sig { name, ty, .. } = e {
            let ty = p.term(ty, EXPR, 0);
            let x = p.bind(name, true);
            out.push_str(&format!(" ({x} : {ty})"));
        }
    }
    out.push_str(" : Type where");
    if d.constructors.is_empty() {
        out.push_str(" {}");
    }
    for c in &d.constructors {
        out.push_str(&format!("\n  {}", c.name));
        if !c.tele.is_empty() {
            out.push_str(" of ");
            out.push_str(&p.telescope(&c.tele));
        }
    }
    p.scope.truncate(mark);
    out
}

fn sig_name(e: &TeleEntry) -> Option<&Name> {
    match e {
        TeleEntry::Sig { name, .. } => Some(name),
        TeleEntry::Def { .. } => None,
    }
}

struct Printer {
    /// Display strings of bound names currently in scope, innermost last.
    scope: Vec<(Name, String)>,
    free: BTreeMap<Name, String>,
}

impl Printer {
    fn new(free_names: BTreeSet<Name>) -> Printer {
        let mut by_hint: BTreeMap<&str, usize> = BTreeMap::new();
        for n in &free_names {
            *by_hint.entry(n.hint()).or_default() += 1;
        }
        let free = free_names
            .iter()
            .map(|n| {
                let s = if by_hint[n.hint()] == 1 || n.uid() == 0 {
                    n.hint().to_string()
                } else {
                    format!("{}_{}", n.hint(), n.uid())
                };
                (n.clone(), s)
            })
            .collect();
        Printer { scope: Vec::new(), free }
    }

    fn var(&self, x: &Name) -> String {
        if let Some((_, s)) = self.scope.iter().rev().find(|(n, _)| n == x) {
            return s.clone();
        }
        self.free.get(x).cloned().unwrap_or_else(|| x.hint().to_string())
    }

    fn taken(&self, s: &str) -> bool {
        KEYWORDS.contains(&s)
            || self.scope.iter().any(|(_, d)| d == s)
            || self.free.values().any(|d| d == s)
    }

    /// Choose a display string for a binder and bring it into scope.
    fn bind(&mut self, x: &Name, used: bool) -> String {
        let s = if x.is_wildcard() && !used {
            "_".to_string()
        } else {
            let base = if x.is_wildcard() { "x" } else { x.hint() };
            let mut s = base.to_string();
            let mut k = 0;
            while self.taken(&s) {
                k += 1;
                s = format!("{base}{k}");
            }
            s
        };
        self.scope.push((x.clone(), s.clone()));
        s
    }

    fn paren(s: String, needed: bool) -> String {
        if needed {
            format!("({s})")
        } else {
            s
        }
    }

    fn term(&mut self, t: &Term, prec: u8, indent: usize) -> String {
        use Term::*;
        match t {
            Pos(_, a) => self.term(a, prec, indent),
            Type => "Type".into(),
            TyUnit => "Unit".into(),
            LitUnit => "()".into(),
            Refl => "Refl".into(),
            TrustMe => "TRUSTME".into(),
            Var(x) => self.var(x),
            Lam(eps, b) => {
                let mark = self.scope.len();
                let x = self.bind(&b.name, occurs_free(&b.name, &b.body));
                let body = self.term(&b.body, EXPR, indent);
                self.scope.truncate(mark);
                let s = match eps {
                    Epsilon::Rel => format!("\\{x}. {body}"),
                    Epsilon::Irr => format!("\\[{x}]. {body}"),
                };
                Self::paren(s, prec > EXPR)
            }
            App(..) => {
                let mut spine = Vec::new();
                let mut head = t;
                loop {
                    match head {
                        App(f, a) => {
                            spine.push(&**a);
                            head = f;
                        }
                        Pos(_, a) => head = a,
                        _ => break,
                    }
                }
                spine.reverse();
                // A bare constructor head would absorb the arguments.
                let mut s = match head.unpos() {
                    TyCon(..) | DataCon(..) => format!("({})", self.term(head, EXPR, indent)),
                    _ => self.term(head, APP, indent),
                };
                for a in spine {
                    s.push(' ');
                    s.push_str(&self.arg(a, indent));
                }
                Self::paren(s, prec > APP)
            }
            Pi(eps, dom, b) => {
                let dependent = occurs_free(&b.name, &b.body);
                let s = if dependent {
                    let a = self.term(dom, EXPR, indent);
                    let mark = self.scope.len();
                    let x = self.bind(&b.name, true);
                    let body = self.term(&b.body, EXPR, indent);
                    self.scope.truncate(mark);
                    match eps {
                        Epsilon::Rel => format!("({x} : {a}) -> {body}"),
                        Epsilon::Irr => format!("[{x} : {a}] -> {body}"),
                    }
                } else {
                    let body = self.term(&b.body, EXPR, indent);
                    match eps {
                        Epsilon::Rel => {
                            let mut a = self.term(dom, EQ, indent);
                            if matches!(dom.unpos(), Ann(..)) {
                                a = format!("({a})");
                            }
                            format!("{a} -> {body}")
                        }
                        Epsilon::Irr => format!("[{}] -> {body}", self.term(dom, EXPR, indent)),
                    }
                };
                Self::paren(s, prec > EXPR)
            }
            Ann(a, ty) => format!("({} : {})", self.term(a, EXPR, indent), self.term(ty, EXPR, indent)),
            TySigma(a, b) => {
                let a = self.term(a, EXPR, indent);
                let mark = self.scope.len();
                let x = self.bind(&b.name, true);
                let body = self.term(&b.body, EXPR, indent);
                self.scope.truncate(mark);
                format!("{{ {x} : {a} | {body} }}")
            }
            Prod(a, b) => format!("({}, {})", self.term(a, EXPR, indent), self.term(b, EXPR, indent)),
            LetPair(a, b) => {
                let a = self.term(a, EXPR, indent);
                let mark = self.scope.len();
                let x = self.bind(&b.first, occurs_free(&b.first, &b.body));
                let y = self.bind(&b.second, occurs_free(&b.second, &b.body));
                let body = self.term(&b.body, EXPR, indent);
                self.scope.truncate(mark);
                Self::paren(format!("let ({x}, {y}) = {a} in {body}"), prec > EXPR)
            }
            Let(a, b) => {
                let a = self.term(a, EXPR, indent);
                let mark = self.scope.len();
                let x = self.bind(&b.name, true);
                let body = self.term(&b.body, EXPR, indent);
                self.scope.truncate(mark);
                Self::paren(format!("let {x} = {a} in {body}"), prec > EXPR)
            }
            TyEq(a, b) => {
                let s = format!("{} = {}", self.term(a, APP, indent), self.term(b, APP, indent));
                Self::paren(s, prec > EQ)
            }
            Subst(a, b) => {
                let s = format!("subst {} by {}", self.term(a, EQ, indent), self.term(b, EXPR, indent));
                Self::paren(s, prec > EXPR)
            }
            Contra(a) => Self::paren(format!("contra {}", self.term(a, EXPR, indent)), prec > EXPR),
            TyCon(k, args) | DataCon(k, args) => {
                if let Some(n) = numeral(t) {
                    return n.to_string();
                }
                if args.is_empty() {
                    return k.to_string();
                }
                let mut s = k.to_string();
                for a in args {
                    s.push(' ');
                    s.push_str(&self.arg(a, indent));
                }
                Self::paren(s, prec > APP)
            }
            Case(s, ms) => {
                if let [t_branch, f_branch] = &ms[..] {
                    let is = |p: &Pattern, k: &str| matches!(p, Pattern::Con(c, a) if &**c == k && a.is_empty());
                    if is(&t_branch.pattern, "True") && is(&f_branch.pattern, "False") {
                        let out = format!(
                            "if {} then {} else {}",
                            self.term(s, EXPR, indent),
                            self.term(&t_branch.body, EXPR, indent),
                            self.term(&f_branch.body, EXPR, indent)
                        );
                        return Self::paren(out, prec > EXPR);
                    }
                }
                let mut out = format!("case {} of", self.term(s, EQ, indent));
                if ms.is_empty() {
                    out.push_str(" {}");
                }
                let inner = indent + 2;
                for m in ms {
                    let mark = self.scope.len();
                    let pat = self.pattern(&m.pattern, &m.body, false);
                    let body = self.term(&m.body, EXPR, inner);
                    self.scope.truncate(mark);
                    out.push('\n');
                    out.push_str(&" ".repeat(inner));
                    out.push_str(&format!("{pat} -> {body}"));
                }
                Self::paren(out, prec > EXPR)
            }
        }
    }

    fn arg(&mut self, a: &Arg, indent: usize) -> String {
        match a.eps {
            Epsilon::Rel => self.term(&a.term, ATOM, indent),
            Epsilon::Irr => format!("[{}]", self.term(&a.term, EXPR, indent)),
        }
    }

    fn pattern(&mut self, p: &Pattern, body: &Term, nested: bool) -> String {
        match p {
            Pattern::Var(x) => self.bind(x, occurs_free(x, body)),
            Pattern::Con(k, args) => {
                if args.is_empty() {
                    return k.to_string();
                }
                let mut s = k.to_string();
                for (q, eps) in args {
                    s.push(' ');
                    match eps {
                        Epsilon::Rel => s.push_str(&self.pattern(q, body, true)),
                        Epsilon::Irr => s.push_str(&format!("[{}]", self.pattern(q, body, false))),
                    }
                }
                Self::paren(s, nested)
            }
        }
    }

    fn telescope(&mut self, tele: &Telescope) -> String {
        let mut parts = Vec::new();
        for e in &tele.0 {
            match e {
                TeleEntry::Sig { name, eps, ty } => {
                    let ty = self.term(ty, EXPR, 2);
                    let s = if name.is_wildcard() {
                        self.bind(name, false);
                        ty
                    } else {
                        format!("{} : {ty}", self.bind(name, true))
                    };
                    parts.push(match eps {
                        Epsilon::Rel => format!("({s})"),
                        Epsilon::Irr => format!("[{s}]"),
                    });
                }
                TeleEntry::Def { name, term } => {
                    parts.push(format!("[{} = {}]", self.var(name), self.term(term, EXPR, 2)));
                }
            }
        }
        parts.join(" ")
    }
}

/// `Succ (Succ Zero)` as `2`.
fn numeral(t: &Term) -> Option<u64> {
    let mut n = 0;
    let mut t = t;
    loop {
        match t.unpos() {
            Term::DataCon(k, args) if &**k == "Zero" && args.is_empty() => return Some(n),
            Term::DataCon(k, args) if &**k == "Succ" && args.len() == 1 && args[0].eps == Epsilon::Rel => {
                n += 1;
                t = &args[0].term;
            }
            _ => return None,
        }
    }
}
