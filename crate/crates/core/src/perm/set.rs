use std::collections::BTreeMap;

use super::path::{match_path, specificity, ObjPath};
use super::{Mode, Right};

/// Permissions of one module: path pattern to mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModPermSet {
    entries: BTreeMap<ObjPath, Mode>,
}

impl ModPermSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add rights to a path, unioning with whatever is already there.
    pub fn grant(&mut self, path: ObjPath, mode: Mode) {
        let slot = self.entries.entry(path).or_default();
        *slot = slot.union(mode);
    }

    pub fn grant_right(&mut self, path: ObjPath, right: Right) {
        self.grant(path, Mode::NONE.with(right));
    }

    /// Replace the mode of a path; an empty mode removes the entry.
    pub fn set(&mut self, path: ObjPath, mode: Mode) {
        if mode.is_empty() {
            self.entries.remove(&path);
        } else {
            self.entries.insert(path, mode);
        }
    }

    /// Insert an entry verbatim, keeping it even if its mode is empty.
    pub(crate) fn insert_raw(&mut self, path: ObjPath, mode: Mode) -> Option<Mode> {
        self.entries.insert(path, mode)
    }

    pub fn get(&self, path: &ObjPath) -> Option<Mode> {
        self.entries.get(path).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ObjPath, &Mode)> {
        self.entries.iter()
    }

    /// Every (path, right) pair, in path order.
    pub fn pairs(&self) -> impl Iterator<Item = (&ObjPath, Right)> {
        self.entries
            .iter()
            .flat_map(|(p, m)| m.rights().collect::<Vec<_>>().into_iter().map(move |r| (p, r)))
    }

    /// Resolve the mode for a concrete path. The most specific matching
    /// pattern wins (exact, then non-leading wildcard, then leading wildcard;
    /// longer before shorter); remaining ties are unioned. No match means no
    /// rights.
    pub fn lookup_mode(&self, concrete: &ObjPath) -> Mode {
        if let Some(m) = self.entries.get(concrete) {
            return *m;
        }
        let mut best: Option<((super::path::Specificity, usize), Mode)> = None;
        for (pat, mode) in &self.entries {
            if !pat.has_wildcard() || !match_path(pat, concrete) {
                continue;
            }
            let key = (specificity(pat), pat.len());
            best = match best {
                Some((k, m)) if k > key => Some((k, m)),
                Some((k, m)) if k == key => Some((k, m.union(*mode))),
                _ => Some((key, *mode)),
            };
        }
        best.map(|(_, m)| m).unwrap_or(Mode::NONE)
    }

    pub fn allows(&self, concrete: &ObjPath, right: Right) -> bool {
        self.lookup_mode(concrete).has(right)
    }

    /// Per-path union of two sets.
    pub fn merge(&self, other: &ModPermSet) -> ModPermSet {
        let mut out = self.clone();
        for (p, m) in &other.entries {
            let slot = out.entries.entry(p.clone()).or_default();
            *slot = slot.union(*m);
        }
        out
    }
}

impl FromIterator<(ObjPath, Mode)> for ModPermSet {
    fn from_iter<T: IntoIterator<Item = (ObjPath, Mode)>>(iter: T) -> Self {
        let mut s = ModPermSet::new();
        for (p, m) in iter {
            s.grant(p, m);
        }
        s
    }
}

/// Permissions for a whole program, keyed by canonical module id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FullPermSet {
    modules: BTreeMap<String, ModPermSet>,
}

impl FullPermSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, module: impl Into<String>, perms: ModPermSet) -> Option<ModPermSet> {
        self.modules.insert(module.into(), perms)
    }

    pub fn get(&self, module: &str) -> Option<&ModPermSet> {
        self.modules.get(module)
    }

    pub fn get_mut(&mut self, module: &str) -> Option<&mut ModPermSet> {
        self.modules.get_mut(module)
    }

    pub fn entry(&mut self, module: &str) -> &mut ModPermSet {
        self.modules.entry(module.to_string()).or_default()
    }

    /// The set for a module, or the empty (deny-all) set.
    pub fn module_or_empty(&self, module: &str) -> ModPermSet {
        self.modules.get(module).cloned().unwrap_or_default()
    }

    pub fn modules(&self) -> impl Iterator<Item = (&String, &ModPermSet)> {
        self.modules.iter()
    }

    pub fn module_ids(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn merge(&self, other: &FullPermSet) -> FullPermSet {
        let mut out = self.clone();
        for (m, s) in &other.modules {
            let merged = out.modules.get(m).map(|x| x.merge(s)).unwrap_or_else(|| s.clone());
            out.modules.insert(m.clone(), merged);
        }
        out
    }

    /// Total number of (module, path, right) pairs.
    pub fn pair_count(&self) -> usize {
        self.modules.values().map(|s| s.pairs().count()).sum()
    }
}
