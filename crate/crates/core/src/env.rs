//! The typing context: signatures, definitions and datatypes in scope, plus
//! error construction, warnings and the reduction budget.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::surface::ConstructorDef;
use crate::syntax::{ConName, Epsilon, Name, SourcePos, Telescope, Term};

#[derive(Clone, Debug)]
pub enum Entry {
    Sig { name: Name, eps: Epsilon, ty: Term },
    Def { name: Name, term: Term },
    Data(Arc<DataDef>),
}

impl Entry {
    pub fn sig(name: Name, ty: Term) -> Entry {
        Entry::Sig { name, eps: Epsilon::Rel, ty }
    }

    /// A binding introduced at an irrelevant binder.
    pub fn demoted(name: Name, ty: Term) -> Entry {
        Entry::Sig { name, eps: Epsilon::Irr, ty }
    }

    pub fn def(name: Name, term: Term) -> Entry {
        Entry::Def { name, term }
    }
}

#[derive(Clone, Debug)]
pub struct DataDef {
    pub tycon: ConName,
    pub params: Telescope,
    pub constructors: Vec<ConstructorDef>,
}

impl DataDef {
    pub fn constructor(&self, k: &str) -> Option<&ConstructorDef> {
        self.constructors.iter().find(|c| &*c.name == k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    NotInScope,
    IrrelevantUse,
    TypeMismatch,
    NotAFunction,
    NotATyCon,
    NotEqualityType,
    NoContradiction,
    NonExhaustive,
    BadConstructorArity,
    UnknownConstructor,
    AmbiguousConstructor,
    EscapingVariable,
    UnificationFailure,
    StepLimit,
    ParseError,
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A piece of an error message.
#[derive(Clone, Debug)]
pub enum Fragment {
    Text(String),
    Term(Term),
}

impl From<&str> for Fragment {
    fn from(s: &str) -> Fragment {
        Fragment::Text(s.to_string())
    }
}

impl From<String> for Fragment {
    fn from(s: String) -> Fragment {
        Fragment::Text(s)
    }
}

impl From<Term> for Fragment {
    fn from(t: Term) -> Fragment {
        Fragment::Term(t)
    }
}

impl From<&Term> for Fragment {
    fn from(t: &Term) -> Fragment {
        Fragment::Term(t.clone())
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::Text(s) => f.write_str(s),
            Fragment::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("{}", self.render())]
pub struct CheckError {
    pub pos: Option<SourcePos>,
    pub class: ErrorClass,
    pub fragments: Vec<Fragment>,
    /// Labelled context lines, outermost last.
    pub trace: Vec<(String, Fragment)>,
    /// Reduction steps used, for `StepLimit`.
    pub steps: Option<u64>,
    expression_noted: bool,
}

fn indent(s: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    s.lines().map(|l| format!("{pad}{l}")).collect::<Vec<_>>().join("\n")
}

impl CheckError {
    pub fn new(pos: Option<SourcePos>, class: ErrorClass, fragments: Vec<Fragment>) -> CheckError {
        CheckError { pos, class, fragments, trace: Vec::new(), steps: None, expression_noted: false }
    }

    pub fn message(&self) -> String {
        self.fragments.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
    }

    /// Record the innermost enclosing expression, once.
    pub fn in_expression(mut self, t: &Term) -> CheckError {
        if !self.expression_noted && self.class != ErrorClass::StepLimit {
            self.expression_noted = true;
            self.trace.push(("In the expression".to_string(), Fragment::Term(t.clone())));
        }
        self
    }

    pub fn with_context(mut self, label: &str, f: impl Into<Fragment>) -> CheckError {
        self.trace.push((label.to_string(), f.into()));
        self
    }

    pub fn render(&self) -> String {
        let loc = match &self.pos {
            Some(p) => p.to_string(),
            None => "<unknown>".to_string(),
        };
        let mut out = format!("{loc}: {}\n{}", self.class, indent(&self.message(), 2));
        for (label, frag) in &self.trace {
            out.push_str(&format!("\n  {label}\n{}", indent(&frag.to_string(), 6)));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub pos: Option<SourcePos>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pos {
            Some(p) => write!(f, "{p}: warning: {}", self.message),
            None => write!(f, "<unknown>: warning: {}", self.message),
        }
    }
}

/// Caps the number of reduction steps (beta, unfolding, case, let).
#[derive(Clone, Debug, Default)]
pub struct StepBudget {
    pub limit: Option<u64>,
    used: Cell<u64>,
}

impl StepBudget {
    pub fn new(limit: Option<u64>) -> StepBudget {
        StepBudget { limit, used: Cell::new(0) }
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }
}

#[derive(Clone, Debug)]
pub struct Context {
    entries: Vec<Entry>,
    /// Entries below this index are module-level.
    globals: usize,
    /// Entries below this index are treated as relevant.
    resurrected_upto: usize,
    global_sigs: HashMap<Name, usize>,
    global_defs: HashMap<Name, usize>,
    datatypes: Vec<Arc<DataDef>>,
    positions: Vec<SourcePos>,
    warnings: RefCell<Vec<Warning>>,
    budget: StepBudget,
    unfold: bool,
    regularity: bool,
    in_regularity: Cell<bool>,
}

impl Default for Context {
    fn default() -> Self {
        Context::new()
    }
}

impl Context {
    pub fn new() -> Context {
        Context {
            entries: Vec::new(),
            globals: 0,
            resurrected_upto: 0,
            global_sigs: HashMap::new(),
            global_defs: HashMap::new(),
            datatypes: Vec::new(),
            positions: Vec::new(),
            warnings: RefCell::new(Vec::new()),
            budget: StepBudget::default(),
            unfold: true,
            regularity: false,
            in_regularity: Cell::new(false),
        }
    }

    pub fn set_step_limit(&mut self, limit: Option<u64>) {
        self.budget = StepBudget::new(limit);
    }

    /// Turn definition unfolding off (a testing aid: equality then only sees
    /// through beta, let and case).
    pub fn set_unfold_definitions(&mut self, on: bool) {
        self.unfold = on;
    }

    pub fn unfold_definitions(&self) -> bool {
        self.unfold
    }

    pub fn set_regularity(&mut self, on: bool) {
        self.regularity = on;
    }

    /// Should an inferred type be checked against `Type` now?
    pub(crate) fn regularity_due(&self) -> bool {
        self.regularity && !self.in_regularity.get()
    }

    pub(crate) fn with_regularity_paused<R>(&mut self, f: impl FnOnce(&mut Context) -> R) -> R {
        self.in_regularity.set(true);
        let r = f(self);
        self.in_regularity.set(false);
        r
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Add a module-level entry.
    pub fn push_global(&mut self, e: Entry) {
        assert_eq!(self.entries.len(), self.globals, "globals are only added at module level");
        let i = self.entries.len();
        match &e {
            Entry::Sig { name, .. } => {
                self.global_sigs.insert(name.clone(), i);
            }
            Entry::Def { name, .. } => {
                self.global_defs.insert(name.clone(), i);
            }
            Entry::Data(d) => {
                if let Some(j) = self.datatypes.iter().position(|x| x.tycon == d.tycon) {
                    self.datatypes[j] = d.clone();
                } else {
                    self.datatypes.push(d.clone());
                }
            }
        }
        self.entries.push(e);
        self.globals += 1;
    }

    pub(crate) fn push_local(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        assert!(len >= self.globals);
        self.entries.truncate(len);
    }

    /// Run `f` with `entries` in scope; they are gone afterwards.
    pub fn extend<R>(&mut self, entries: impl IntoIterator<Item = Entry>, f: impl FnOnce(&mut Context) -> R) -> R {
        let mark = self.entries.len();
        self.entries.extend(entries);
        let r = f(self);
        self.entries.truncate(mark);
        r
    }

    fn locals(&self) -> impl DoubleEndedIterator<Item = (usize, &Entry)> {
        self.entries.iter().enumerate().skip(self.globals)
    }

    fn find_sig(&self, x: &Name) -> Option<(usize, Epsilon, &Term)> {
        for (i, e) in self.locals().rev() {
            if let Entry::Sig { name, eps, ty } = e {
                if name == x {
                    return Some((i, *eps, ty));
                }
            }
        }
        let &i = self.global_sigs.get(x)?;
        match &self.entries[i] {
            Entry::Sig { eps, ty, .. } => Some((i, *eps, ty)),
            _ => None,
        }
    }

    /// Innermost signature for `x`, as seen at the current stage.
    pub fn lookup_ty(&self, x: &Name) -> Result<(Epsilon, Term), CheckError> {
        match self.find_sig(x) {
            Some((i, eps, ty)) => {
                let eps = if i < self.resurrected_upto { Epsilon::Rel } else { eps };
                Ok((eps, ty.clone()))
            }
            None => Err(self.err(ErrorClass::NotInScope, vec![format!("Not in scope: {x}").into()])),
        }
    }

    pub fn lookup_def(&self, x: &Name) -> Option<&Term> {
        for (_, e) in self.locals().rev() {
            if let Entry::Def { name, term } = e {
                if name == x {
                    return Some(term);
                }
            }
        }
        match &self.entries[*self.global_defs.get(x)?] {
            Entry::Def { term, .. } => Some(term),
            _ => None,
        }
    }

    pub fn is_global(&self, x: &Name) -> bool {
        self.global_sigs.contains_key(x) || self.global_defs.contains_key(x)
    }

    /// A local variable without a definition: refinement may define it.
    pub fn is_definable(&self, x: &Name) -> bool {
        let local_sig = self.locals().any(|(_, e)| matches!(e, Entry::Sig { name, .. } if name == x));
        local_sig && self.lookup_def(x).is_none()
    }

    pub fn lookup_tcon(&self, t: &str) -> Option<Arc<DataDef>> {
        self.datatypes.iter().find(|d| &*d.tycon == t).cloned()
    }

    /// Datatypes declaring a constructor named `k`, in declaration order.
    pub fn datatypes_with_constructor(&self, k: &str) -> Vec<Arc<DataDef>> {
        self.datatypes.iter().filter(|d| d.constructor(k).is_some()).cloned().collect()
    }

    pub fn datatypes(&self) -> &[Arc<DataDef>] {
        &self.datatypes
    }

    /// A copy in which every current entry counts as relevant.
    pub fn resurrect(&self) -> Context {
        let mut c = self.clone();
        c.resurrected_upto = c.entries.len();
        c
    }

    pub fn with_resurrected<R>(&mut self, f: impl FnOnce(&mut Context) -> R) -> R {
        let saved = self.resurrected_upto;
        self.resurrected_upto = self.entries.len();
        let r = f(self);
        self.resurrected_upto = saved;
        r
    }

    pub fn with_pos<R>(&mut self, pos: &SourcePos, f: impl FnOnce(&mut Context) -> R) -> R {
        self.positions.push(pos.clone());
        let r = f(self);
        self.positions.pop();
        r
    }

    pub fn current_pos(&self) -> Option<&SourcePos> {
        self.positions.last()
    }

    pub fn err(&self, class: ErrorClass, fragments: Vec<Fragment>) -> CheckError {
        CheckError::new(self.positions.last().cloned(), class, fragments)
    }

    pub fn warn(&self, fragments: Vec<Fragment>) {
        let message = fragments.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ");
        self.warnings.borrow_mut().push(Warning { pos: self.positions.last().cloned(), message });
    }

    pub fn take_warnings(&self) -> Vec<Warning> {
        std::mem::take(&mut *self.warnings.borrow_mut())
    }

    pub fn reset_budget(&self) {
        self.budget.used.set(0);
    }

    pub fn steps_used(&self) -> u64 {
        self.budget.used()
    }

    /// Count one reduction step.
    pub fn tick(&self) -> Result<(), CheckError> {
        let used = self.budget.used.get() + 1;
        self.budget.used.set(used);
        match self.budget.limit {
            Some(limit) if used > limit => {
                let mut e = self.err(
                    ErrorClass::StepLimit,
                    vec![format!("Reduction step limit of {limit} exceeded").into()],
                );
                e.steps = Some(used - 1);
                Err(e)
            }
            _ => Ok(()),
        }
    }
}
