//! Module resolution: maps `require("name")` to canonical module ids and loads
//! module sources. Canonical ids for files under the project root carry the
//! `__CWD__/` prefix; builtin modules are identified by their bare name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::perm::CWD_PREFIX;
use crate::quant::BuiltinCatalog;

pub const MODULE_EXT: &str = ".mjs";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    /// A module provided by the runtime (`fs`, `os`, ...).
    Builtin(String),
    /// A source file, by canonical id.
    File(String),
}

impl Resolved {
    pub fn id(&self) -> &str {
        match self {
            Resolved::Builtin(s) | Resolved::File(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot resolve module `{name}` from `{importer}`")]
pub struct ResolveError {
    pub importer: String,
    pub name: String,
}

#[derive(Debug, Clone)]
enum Backend {
    Memory(BTreeMap<String, String>),
    Disk(PathBuf),
}

/// A set of module sources plus the rules for finding them.
#[derive(Debug, Clone)]
pub struct Project {
    backend: Backend,
    /// Directories (as canonical ids) searched for bare names.
    search_roots: Vec<String>,
}

impl Project {
    /// Modules held in memory, keyed by path relative to the project root
    /// (`"main.mjs"`, `"lib/util.mjs"`).
    pub fn in_memory<K: AsRef<str>, V: Into<String>>(files: impl IntoIterator<Item = (K, V)>) -> Self {
        let files = files
            .into_iter()
            .map(|(k, v)| (format!("{CWD_PREFIX}/{}", normalize(k.as_ref())), v.into()))
            .collect();
        Project {
            backend: Backend::Memory(files),
            search_roots: vec![CWD_PREFIX.to_string()],
        }
    }

    pub fn on_disk(root: impl Into<PathBuf>) -> Self {
        Project {
            backend: Backend::Disk(root.into()),
            search_roots: vec![CWD_PREFIX.to_string()],
        }
    }

    /// Add a directory searched for bare module names, after the project root.
    pub fn with_search_root(mut self, dir: &str) -> Self {
        let id = self.canonicalize(dir);
        if !self.search_roots.contains(&id) {
            self.search_roots.push(id);
        }
        self
    }

    pub fn root_dir(&self) -> Option<&Path> {
        match &self.backend {
            Backend::Disk(p) => Some(p),
            Backend::Memory(_) => None,
        }
    }

    /// Canonical id for a user-supplied path (relative to the project root,
    /// already canonical, or absolute).
    pub fn canonicalize(&self, path: &str) -> String {
        if path == CWD_PREFIX || path.starts_with(&format!("{CWD_PREFIX}/")) {
            return normalize(path);
        }
        if Path::new(path).is_absolute() {
            if let Backend::Disk(root) = &self.backend {
                let root = root.canonicalize().unwrap_or_else(|_| root.clone());
                let abs = Path::new(path).canonicalize().unwrap_or_else(|_| PathBuf::from(path));
                if let Ok(rel) = abs.strip_prefix(&root) {
                    let rel = rel.to_string_lossy().replace('\\', "/");
                    return if rel.is_empty() {
                        CWD_PREFIX.to_string()
                    } else {
                        format!("{CWD_PREFIX}/{rel}")
                    };
                }
            }
            return normalize(path);
        }
        normalize(&format!("{CWD_PREFIX}/{path}"))
    }

    fn exists(&self, id: &str) -> bool {
        match &self.backend {
            Backend::Memory(files) => files.contains_key(id),
            Backend::Disk(_) => self.disk_path(id).is_some_and(|p| p.is_file()),
        }
    }

    fn disk_path(&self, id: &str) -> Option<PathBuf> {
        let Backend::Disk(root) = &self.backend else {
            return None;
        };
        Some(match id.strip_prefix(CWD_PREFIX) {
            Some(rest) => root.join(rest.trim_start_matches('/')),
            None => PathBuf::from(id),
        })
    }

    /// Source text of a module by canonical id.
    pub fn load(&self, id: &str) -> Option<String> {
        match &self.backend {
            Backend::Memory(files) => files.get(id).cloned(),
            Backend::Disk(_) => std::fs::read_to_string(self.disk_path(id)?).ok(),
        }
    }

    /// Resolve `require(name)` issued by the module `importer`.
    pub fn resolve(&self, importer: &str, name: &str) -> Result<Resolved, ResolveError> {
        let err = || ResolveError {
            importer: importer.to_string(),
            name: name.to_string(),
        };
        if BuiltinCatalog::shipped().is_builtin_module(name) {
            return Ok(Resolved::Builtin(name.to_string()));
        }
        let with_ext = |p: String| {
            if p.ends_with(MODULE_EXT) {
                p
            } else {
                format!("{p}{MODULE_EXT}")
            }
        };
        if name.starts_with("./") || name.starts_with("../") {
            let id = normalize(&with_ext(format!("{}/{name}", dirname(importer))));
            return if self.exists(&id) { Ok(Resolved::File(id)) } else { Err(err()) };
        }
        if name.is_empty() || name.starts_with('/') {
            return Err(err());
        }
        for root in &self.search_roots {
            let id = normalize(&with_ext(format!("{root}/{name}")));
            if self.exists(&id) {
                return Ok(Resolved::File(id));
            }
        }
        Err(err())
    }

    /// All module ids held by an in-memory project.
    pub fn memory_ids(&self) -> Vec<String> {
        match &self.backend {
            Backend::Memory(files) => files.keys().cloned().collect(),
            Backend::Disk(_) => Vec::new(),
        }
    }
}

/// Directory part of a canonical id.
pub fn dirname(id: &str) -> String {
    match id.rfind('/') {
        Some(i) => id[..i].to_string(),
        None => String::new(),
    }
}

/// Collapse `.`/`..` segments and duplicate slashes.
pub fn normalize(path: &str) -> String {
    let absolute = path.starts_with('/');
    let mut parts: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                if parts.last().is_some_and(|p| *p != ".." && *p != CWD_PREFIX) {
                    parts.pop();
                } else if !absolute {
                    parts.push("..");
                }
            }
            s => parts.push(s),
        }
    }
    let joined = parts.join("/");
    if absolute {
        format!("/{joined}")
    } else {
        joined
    }
}
