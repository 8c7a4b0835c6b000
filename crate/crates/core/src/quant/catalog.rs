use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::perm::{ObjPath, Segment};

const SHIPPED: &str = include_str!("../../data/catalog.json");

/// Where a default-available name comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootCategory {
    #[serde(rename = "es")]
    Es,
    #[serde(rename = "node")]
    Node,
    #[serde(rename = "lib-local")]
    LibLocal,
    #[serde(rename = "globs")]
    Globs,
    #[serde(rename = "import")]
    Import,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CatalogNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRoot {
    pub name: String,
    pub category: RootCategory,
    /// Also loadable through `require("<name>")`.
    #[serde(default)]
    pub module: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CatalogNode>,
}

#[derive(Debug, Clone, Deserialize)]
struct CatalogFile {
    #[allow(dead_code)]
    version: u32,
    roots: Vec<CatalogRoot>,
}

/// The fixed list of names every module can reach without importing anything,
/// with their static field trees.
#[derive(Debug, Clone)]
pub struct BuiltinCatalog {
    roots: Vec<CatalogRoot>,
    hash: String,
}

impl BuiltinCatalog {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let file: CatalogFile = serde_json::from_str(text)?;
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(BuiltinCatalog {
            roots: file.roots,
            hash,
        })
    }

    /// The catalog compiled into the crate.
    pub fn shipped() -> &'static BuiltinCatalog {
        static CATALOG: OnceLock<BuiltinCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| BuiltinCatalog::from_json(SHIPPED).expect("shipped catalog is valid"))
    }

    pub fn from_roots(roots: Vec<CatalogRoot>) -> Self {
        let text = serde_json::to_string(&roots).expect("catalog serializes");
        BuiltinCatalog {
            hash: hex::encode(Sha256::digest(text.as_bytes())),
            roots,
        }
    }

    pub fn roots(&self) -> &[CatalogRoot] {
        &self.roots
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn root(&self, name: &str) -> Option<&CatalogRoot> {
        self.roots.iter().find(|r| r.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.root(name).is_some()
    }

    pub fn category(&self, name: &str) -> Option<RootCategory> {
        self.root(name).map(|r| r.category)
    }

    pub fn is_builtin_module(&self, name: &str) -> bool {
        self.root(name).is_some_and(|r| r.module)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.roots.iter().map(|r| r.name.as_str())
    }

    /// Every path from each root down to `depth` field segments, in catalog
    /// order (pre-order).
    pub fn expand(&self, depth: usize) -> Vec<ObjPath> {
        let mut out = Vec::new();
        for r in &self.roots {
            let base = ObjPath::root(&r.name);
            expand_into(&base, &r.children, depth, &mut out);
        }
        out
    }

    /// The field tree of a builtin module, as seen through its import root.
    pub fn module_tree(&self, name: &str) -> Option<&[CatalogNode]> {
        self.root(name).filter(|r| r.module).map(|r| r.children.as_slice())
    }
}

pub(crate) fn expand_into(base: &ObjPath, children: &[CatalogNode], depth: usize, out: &mut Vec<ObjPath>) {
    out.push(base.clone());
    if depth == 0 {
        return;
    }
    for c in children {
        let p = base.child(Segment::Name(c.name.clone()));
        expand_into(&p, &c.children, depth - 1, out);
    }
}
