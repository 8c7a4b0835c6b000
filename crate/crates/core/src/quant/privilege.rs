use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::catalog::{expand_into, BuiltinCatalog, CatalogNode};
use crate::par::Parallelism;
use crate::perm::{FullPermSet, ModPermSet, ObjPath, Right};
use crate::resolve::Project;
use crate::runtime::{run, RunMode, RuntimeConfig};

/// Rights counted by the metric. Import is not a separate countable right.
pub const COUNTED: [Right; 3] = [Right::R, Right::W, Right::X];

pub type PrivilegeSet = BTreeSet<(ObjPath, Right)>;

/// The field tree reachable through one import root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportTree {
    pub root: ObjPath,
    pub children: Vec<CatalogNode>,
}

/// Every path reachable from the catalog roots and the given import roots,
/// down to `depth` field segments, sorted and de-duplicated.
pub fn expand_universe(catalog: &BuiltinCatalog, imports: &[ImportTree], depth: usize) -> Vec<ObjPath> {
    let mut out = catalog.expand(depth);
    for t in imports {
        expand_into(&t.root, &t.children, depth, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

pub fn base_privilege(universe: &[ObjPath]) -> PrivilegeSet {
    universe
        .iter()
        .flat_map(|p| COUNTED.iter().map(move |&r| (p.clone(), r)))
        .collect()
}

pub fn allowed_privilege(perms: &ModPermSet, universe: &[ObjPath]) -> PrivilegeSet {
    let mut out = PrivilegeSet::new();
    for p in universe {
        let mode = perms.lookup_mode(p);
        for r in COUNTED {
            if mode.has(r) {
                out.insert((p.clone(), r));
            }
        }
    }
    out
}

/// Nested tree of an exports value rendered as JSON.
pub fn tree_from_json(v: &serde_json::Value) -> Vec<CatalogNode> {
    match v {
        serde_json::Value::Object(m) => m
            .iter()
            .map(|(k, x)| CatalogNode {
                name: k.clone(),
                children: tree_from_json(x),
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Shape of a module's exports after running its top level.
pub fn export_tree(project: &Project, module: &str, depth: usize) -> Vec<CatalogNode> {
    let cfg = RuntimeConfig::new(module, RunMode::ImportTime).with_depth(depth);
    let out = run(project, &cfg);
    out.exports
        .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).ok())
        .map(|j| tree_from_json(&j))
        .unwrap_or_default()
}

/// Universe of each module: the catalog, every builtin module's tree, and the
/// exports of every other program module.
pub fn program_universes(
    project: &Project,
    modules: &[String],
    catalog: &BuiltinCatalog,
    depth: usize,
    par: Parallelism,
) -> BTreeMap<String, Vec<ObjPath>> {
    let trees = par.map(modules.to_vec(), |m| {
        let children = export_tree(project, &m, depth);
        (m, children)
    });
    let mut imports: Vec<(String, ImportTree)> = catalog
        .roots()
        .iter()
        .filter(|r| r.module)
        .map(|r| {
            (
                r.name.clone(),
                ImportTree {
                    root: ObjPath::import_root(&r.name),
                    children: r.children.clone(),
                },
            )
        })
        .collect();
    for (m, children) in trees {
        imports.push((
            m.clone(),
            ImportTree {
                root: ObjPath::import_root(&m),
                children,
            },
        ));
    }
    let universes = par.map(modules.to_vec(), |m| {
        let own: Vec<ImportTree> = imports.iter().filter(|(id, _)| *id != m).map(|(_, t)| t.clone()).collect();
        let u = expand_universe(catalog, &own, depth);
        (m, u)
    });
    universes.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub base: usize,
    pub allowed: usize,
    /// `base / allowed`; absent when nothing is allowed.
    pub pr: Option<f64>,
}

impl Counts {
    fn new(base: usize, allowed: usize) -> Self {
        Counts {
            base,
            allowed,
            pr: (allowed > 0).then(|| base as f64 / allowed as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrivilegeReport {
    pub catalog_hash: String,
    pub depth: usize,
    pub per_module: BTreeMap<String, Counts>,
    pub program: Counts,
    /// Transitive privilege is not tracked, so ratios are lower bounds.
    pub lower_bound: bool,
}

impl PrivilegeReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("manifest allows nothing in the privilege universe; reduction ratio is undefined")]
pub struct DegenerateError {
    pub report: PrivilegeReport,
}

/// Per-module and program-wide reduction. The program level takes the union
/// of every module's pairs, so a pair shared by two modules counts once.
pub fn privilege_reduction(
    full: &FullPermSet,
    universes: &BTreeMap<String, Vec<ObjPath>>,
    catalog_hash: &str,
    depth: usize,
    par: Parallelism,
) -> Result<PrivilegeReport, DegenerateError> {
    let items: Vec<(&String, &Vec<ObjPath>)> = universes.iter().collect();
    let sets = par.map(items, |(m, u)| {
        let perms = full.module_or_empty(m);
        (m.clone(), base_privilege(u), allowed_privilege(&perms, u))
    });
    let mut per_module = BTreeMap::new();
    let mut all_base = PrivilegeSet::new();
    let mut all_allowed = PrivilegeSet::new();
    for (m, base, allowed) in sets {
        per_module.insert(m, Counts::new(base.len(), allowed.len()));
        all_base.extend(base);
        all_allowed.extend(allowed);
    }
    let report = PrivilegeReport {
        catalog_hash: catalog_hash.to_string(),
        depth,
        per_module,
        program: Counts::new(all_base.len(), all_allowed.len()),
        lower_bound: true,
    };
    if report.program.allowed == 0 {
        return Err(DegenerateError { report });
    }
    Ok(report)
}
