//! Batch driver: resolve imports, load the prelude, parse and check each
//! module once, and render the outcome.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::env::{CheckError, Context};
use crate::surface::{parse_header, parse_module, pretty_module, ConstructorNames, ParseError};
use crate::syntax::SourcePos;
use crate::typecheck::check_module;

/// The bundled prelude: `Bool`, `Nat` and a couple of functions on them.
pub const PRELUDE: &str = include_str!("../prelude/Prelude.pi");

const PRELUDE_NAME: &str = "Prelude";

#[derive(Clone, Debug)]
pub struct DriverConfig {
    /// Directories searched, in order, for `import`ed modules.
    pub search_paths: Vec<PathBuf>,
    pub step_limit: Option<u64>,
    /// Check every inferred type against `Type`.
    pub regularity: bool,
    pub entry_file: PathBuf,
    /// Load the bundled prelude before anything else.
    pub prelude: bool,
    /// Allow definitional equality to unfold definitions.
    pub unfold_definitions: bool,
}

impl DriverConfig {
    pub fn new(entry_file: impl Into<PathBuf>) -> DriverConfig {
        DriverConfig {
            search_paths: Vec::new(),
            step_limit: None,
            regularity: false,
            entry_file: entry_file.into(),
            prelude: true,
            unfold_definitions: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("{}: error: cannot read file: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{pos}: error: cannot find module {name} in the search path")]
    Unresolved { name: String, pos: SourcePos },
    #[error("error: cyclic imports: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Io { .. } | DriverError::Unresolved { .. } | DriverError::Cycle(_) => 2,
            DriverError::Parse(_) | DriverError::Check(_) => 1,
        }
    }
}

/// A source file to be checked.
#[derive(Clone, Debug)]
struct Source {
    file: String,
    text: String,
}

/// Topological loader over the import graph.
struct Loader<'a> {
    config: &'a DriverConfig,
    search_paths: Vec<PathBuf>,
    /// Keyed by canonical file identity; `true` once fully loaded.
    state: HashMap<PathBuf, bool>,
    stack: Vec<String>,
    order: Vec<Source>,
    wants_prelude: bool,
}

impl Loader<'_> {
    fn read(path: &Path) -> Result<String, DriverError> {
        std::fs::read_to_string(path).map_err(|source| DriverError::Io { path: path.to_path_buf(), source })
    }

    fn resolve(&self, name: &str, pos: &SourcePos) -> Result<PathBuf, DriverError> {
        let rel = format!("{}.pi", name.replace('.', "/"));
        self.search_paths
            .iter()
            .map(|d| d.join(&rel))
            .find(|p| p.is_file())
            .ok_or_else(|| DriverError::Unresolved { name: name.to_string(), pos: pos.clone() })
    }

    fn visit(&mut self, path: &Path, label: String) -> Result<(), DriverError> {
        let key = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        match self.state.get(&key) {
            Some(true) => return Ok(()),
            Some(false) => {
                let start = self.stack.iter().position(|l| *l == label).unwrap_or(0);
                let mut cycle = self.stack[start..].to_vec();
                cycle.push(label);
                return Err(DriverError::Cycle(cycle));
            }
            None => {}
        }
        self.state.insert(key.clone(), false);
        self.stack.push(label);
        let text = Self::read(path)?;
        let file = path.display().to_string();
        let header = parse_header(&text, &file)?;
        for (name, pos) in &header.imports {
            if name == PRELUDE_NAME {
                self.wants_prelude = true;
                continue;
            }
            let p = self.resolve(name, pos)?;
            self.visit(&p, name.clone())?;
        }
        self.stack.pop();
        self.state.insert(key, true);
        self.order.push(Source { file, text });
        Ok(())
    }
}

/// Modules to check, in dependency order, plus whether the prelude is needed.
fn load(config: &DriverConfig) -> Result<(bool, Vec<Source>), DriverError> {
    let mut search_paths = config.search_paths.clone();
    if search_paths.is_empty() {
        let dir = config.entry_file.parent().filter(|d| !d.as_os_str().is_empty());
        search_paths.push(dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")));
    }
    let mut loader = Loader {
        config,
        search_paths,
        state: HashMap::new(),
        stack: Vec::new(),
        order: Vec::new(),
        wants_prelude: config.prelude,
    };
    let entry = loader.config.entry_file.clone();
    let label = entry.display().to_string();
    loader.visit(&entry, label)?;
    Ok((loader.wants_prelude, loader.order))
}

fn check_all(config: &DriverConfig, warnings: &mut String) -> Result<String, DriverError> {
    let (prelude, sources) = load(config)?;
    let mut ctx = Context::new();
    ctx.set_step_limit(config.step_limit);
    ctx.set_regularity(config.regularity);
    ctx.set_unfold_definitions(config.unfold_definitions);
    let mut names = ConstructorNames::default();
    let mut flush = |ctx: &Context| {
        for w in ctx.take_warnings() {
            let _ = writeln!(warnings, "{w}");
        }
    };
    if prelude {
        let m = parse_module(PRELUDE, "Prelude.pi", &names)?;
        names.extend_from(&m);
        check_module(&mut ctx, &m)?;
        flush(&ctx);
    }
    let mut last = None;
    for src in &sources {
        let m = parse_module(&src.text, &src.file, &names)?;
        names.extend_from(&m);
        let r = check_module(&mut ctx, &m);
        flush(&ctx);
        r?;
        last = Some(m);
    }
    Ok(last.map(|m| pretty_module(&m)).unwrap_or_default())
}

/// Run one batch check. Exit code 0 on success, 1 for parse or type errors,
/// 2 for unreadable files, unresolved imports and import cycles.
pub fn run(config: &DriverConfig) -> RunOutcome {
    let mut stderr = String::new();
    match check_all(config, &mut stderr) {
        Ok(stdout) => RunOutcome { exit_code: 0, stdout, stderr },
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            RunOutcome { exit_code: e.exit_code(), stdout: String::new(), stderr }
        }
    }
}
