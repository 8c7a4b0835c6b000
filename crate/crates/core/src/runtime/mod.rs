//! Reference interpreter with per-module permission enforcement.
//!
//! Every module sees its default-available names through monitored wrappers
//! built from its own permission set. Field reads, writes, calls and imports
//! through a wrapper are checked one de-reference at a time; values reached
//! through a wrapper are themselves wrapped until the depth budget runs out.

mod builtins;
mod interp;
pub mod value;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lang::{LangError, SourceLocation};
use crate::perm::{FullPermSet, ModPermSet, ObjPath, Right};
use crate::resolve::{Project, ResolveError};

pub use interp::run;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Deny anything the manifest does not grant.
    Enforce,
    /// Allow everything, recording each check.
    Trace,
    /// As `Trace`; used when only a module's top level is executed.
    ImportTime,
    /// No monitors at all.
    Unmonitored,
}

impl RunMode {
    pub fn records(self) -> bool {
        matches!(self, RunMode::Trace | RunMode::ImportTime)
    }
}

#[derive(Debug, Clone)]
pub struct RuntimeConfig {
    pub entry: String,
    pub depth: usize,
    pub mode: RunMode,
    pub manifest: FullPermSet,
    /// Virtual file system contents, path to text.
    pub fs_seed: BTreeMap<String, String>,
    pub argv: Vec<String>,
    pub env: BTreeMap<String, String>,
    /// Upper bound on evaluation steps before the run is aborted.
    pub max_steps: u64,
    pub max_call_depth: usize,
}

pub const DEFAULT_DEPTH: usize = 3;

impl RuntimeConfig {
    pub fn new(entry: impl Into<String>, mode: RunMode) -> Self {
        RuntimeConfig {
            entry: entry.into(),
            depth: DEFAULT_DEPTH,
            mode,
            manifest: FullPermSet::new(),
            fs_seed: BTreeMap::new(),
            argv: Vec::new(),
            env: BTreeMap::new(),
            max_steps: 20_000_000,
            max_call_depth: 400,
        }
    }

    pub fn with_manifest(mut self, manifest: FullPermSet) -> Self {
        self.manifest = manifest;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("AccessControlException: {kind} on `{path}` denied to `{module}` at {location}")]
pub struct AccessControlException {
    pub kind: Right,
    pub module: String,
    pub path: ObjPath,
    pub location: SourceLocation,
    pub stack: Vec<String>,
}

impl AccessControlException {
    /// Multi-line report with the call stack.
    pub fn report(&self) -> String {
        let mut s = format!(
            "AccessControlException\n  kind: {}\n  module: {}\n  path: {}\n  location: {}\n",
            self.kind, self.module, self.path, self.location
        );
        if !self.stack.is_empty() {
            s.push_str("  stack:\n");
            for f in self.stack.iter().rev() {
                s.push_str(&format!("    at {f}\n"));
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Access(Box<AccessControlException>),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("{module}:{}: {source}", source.pos())]
    Parse { module: String, source: LangError },
    #[error("{location}: eval of unparsable text: {source}")]
    Eval { location: SourceLocation, source: LangError },
    #[error("{location}: TypeError: {message}")]
    Type { location: SourceLocation, message: String },
    #[error("{location}: maximum call depth exceeded")]
    StackOverflow { location: SourceLocation },
    #[error("step limit exceeded")]
    StepLimit,
}

impl RuntimeError {
    pub fn as_access(&self) -> Option<&AccessControlException> {
        match self {
            RuntimeError::Access(a) => Some(a),
            _ => None,
        }
    }
}

/// One monitor check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AccessEvent {
    pub module: String,
    pub path: ObjPath,
    pub kind: Right,
    pub location: SourceLocation,
}

#[derive(Serialize)]
struct EventLine<'a> {
    module: &'a str,
    path: String,
    kind: String,
    file: &'a str,
    line: u32,
    col: u32,
}

impl AccessEvent {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&EventLine {
            module: &self.module,
            path: self.path.to_string(),
            kind: self.kind.to_string(),
            file: &self.location.file,
            line: self.location.line,
            col: self.location.column,
        })
        .expect("event serializes")
    }
}

/// Render events as JSON lines.
pub fn trace_log(events: &[AccessEvent]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&e.to_json_line());
        s.push('\n');
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum TraceParseError {
    #[error("line {line}: {message}")]
    Bad { line: usize, message: String },
}

/// Read a JSON-lines trace back into events.
pub fn parse_trace(text: &str) -> Result<Vec<AccessEvent>, TraceParseError> {
    #[derive(serde::Deserialize)]
    struct Line {
        module: String,
        path: String,
        kind: String,
        file: String,
        line: u32,
        col: u32,
    }
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let bad = |message: String| TraceParseError::Bad { line: i + 1, message };
        let r: Line = serde_json::from_str(l).map_err(|e| bad(e.to_string()))?;
        let path = ObjPath::parse(&r.path).map_err(|e| bad(e.to_string()))?;
        let mut chars = r.kind.chars();
        let kind = match (chars.next().and_then(Right::from_letter), chars.next()) {
            (Some(k), None) => k,
            _ => return Err(bad(format!("bad kind `{}`", r.kind))),
        };
        out.push(AccessEvent {
            module: r.module,
            path,
            kind,
            location: SourceLocation::new(&std::sync::Arc::from(r.file.as_str()), crate::lang::Pos::new(r.line, r.col)),
        });
    }
    Ok(out)
}

/// Everything observable about one run.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub error: Option<RuntimeError>,
    pub stdout: String,
    pub events: Vec<AccessEvent>,
    /// Arguments of each `child_process.spawn` call.
    pub spawned: Vec<Vec<String>>,
    pub fs: BTreeMap<String, String>,
    /// Modules evaluated, in load order.
    pub loaded: Vec<String>,
    /// JSON rendering of the entry module's exports (read without checks).
    pub exports: Option<String>,
    /// Wrapped values that were re-monitored for a new holder (the old
    /// wrapper is dropped, never nested).
    pub rewraps: usize,
    pub wrappers_created: usize,
}

impl RunOutcome {
    pub fn access_violation(&self) -> Option<&AccessControlException> {
        self.error.as_ref().and_then(|e| e.as_access())
    }

    /// Permissions exercised by one module, from the recorded events.
    pub fn perms_for(&self, module: &str) -> ModPermSet {
        let mut s = ModPermSet::new();
        for e in self.events.iter().filter(|e| e.module == module) {
            s.grant_right(e.path.clone(), e.kind);
        }
        s
    }

    /// Permissions exercised by every module.
    pub fn observed_perms(&self) -> FullPermSet {
        let mut out = FullPermSet::new();
        for e in &self.events {
            out.entry(&e.module).grant_right(e.path.clone(), e.kind);
        }
        out
    }
}

/// Result of executing one module's top level under the recorder.
#[derive(Debug, Clone)]
pub struct ImportTimeResult {
    pub perms: ModPermSet,
    pub error: Option<RuntimeError>,
}

/// Load `module` (and whatever its top level imports) without calling any of
/// its exports, and turn the checks it performed into permissions.
pub fn import_time_infer(project: &Project, module: &str, depth: usize) -> ImportTimeResult {
    let id = project.canonicalize(module);
    let cfg = RuntimeConfig::new(id.clone(), RunMode::ImportTime).with_depth(depth);
    let out = run(project, &cfg);
    ImportTimeResult {
        perms: out.perms_for(&id),
        error: out.error,
    }
}
