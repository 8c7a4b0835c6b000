use std::fmt;

use indexmap::IndexMap;
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use super::{BadModeLetter, FullPermSet, ModPermSet, Mode, ObjPath, PathError, Segment};
use crate::quant::BuiltinCatalog;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("manifest is not valid JSON: {0}")]
    Json(String),
    #[error("module `{module}` is listed twice")]
    DuplicateModule { module: String },
    #[error("module `{module}`, path `{path}`: {source}")]
    BadPath {
        module: String,
        path: String,
        source: PathError,
    },
    #[error("module `{module}`, path `{path}`: unknown root `{root}`")]
    UnknownRoot {
        module: String,
        path: String,
        root: String,
    },
    #[error("module `{module}`, path `{path}`: {source}")]
    BadMode {
        module: String,
        path: String,
        source: BadModeLetter,
    },
    #[error("module `{module}`, path `{path}`: I is only valid on import roots")]
    ImportOnNonImport { module: String, path: String },
    #[error("module `{module}`: duplicate path `{path}`")]
    DuplicatePath { module: String, path: String },
}

/// A JSON object read as an ordered list of pairs so duplicate keys survive
/// until validation.
struct Pairs<V>(Vec<(String, V)>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Pairs<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PairsVisitor<V>(std::marker::PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairsVisitor<V> {
            type Value = Pairs<V>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Pairs<V>, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, V>()? {
                    out.push((k, v));
                }
                Ok(Pairs(out))
            }
        }
        d.deserialize_map(PairsVisitor(std::marker::PhantomData))
    }
}

/// Parse a manifest, resolving bare root names against the shipped catalog.
pub fn parse_manifest(text: &str) -> Result<FullPermSet, ManifestError> {
    parse_manifest_with(text, BuiltinCatalog::shipped())
}

pub fn parse_manifest_with(text: &str, catalog: &BuiltinCatalog) -> Result<FullPermSet, ManifestError> {
    let modules: Pairs<Pairs<String>> =
        serde_json::from_str(text).map_err(|e| ManifestError::Json(e.to_string()))?;
    let mut out = FullPermSet::new();
    for (module, entries) in modules.0 {
        if out.get(&module).is_some() {
            return Err(ManifestError::DuplicateModule { module });
        }
        let mut set = ModPermSet::new();
        for (path_text, mode_text) in entries.0 {
            let mode: Mode = mode_text.parse().map_err(|source| ManifestError::BadMode {
                module: module.clone(),
                path: path_text.clone(),
                source,
            })?;
            let path = ObjPath::parse(&path_text).map_err(|source| ManifestError::BadPath {
                module: module.clone(),
                path: path_text.clone(),
                source,
            })?;
            if let Segment::Name(root) = path.root_segment() {
                if !catalog.contains(root) {
                    return Err(ManifestError::UnknownRoot {
                        module: module.clone(),
                        path: path_text,
                        root: root.clone(),
                    });
                }
            }
            if mode.i && !path.is_import_rooted() {
                return Err(ManifestError::ImportOnNonImport {
                    module: module.clone(),
                    path: path_text,
                });
            }
            if set.insert_raw(path, mode).is_some() {
                return Err(ManifestError::DuplicatePath {
                    module: module.clone(),
                    path: path_text,
                });
            }
        }
        out.insert(module, set);
    }
    Ok(out)
}

/// Render a manifest deterministically: modules and paths in lexicographic
/// order, modes in R, W, X, I order.
pub fn serialize_manifest(perms: &FullPermSet) -> String {
    let mut doc: IndexMap<&str, IndexMap<String, String>> = IndexMap::new();
    for (module, set) in perms.modules() {
        let mut entries: Vec<(String, String)> = set.iter().map(|(p, m)| (p.to_string(), m.to_string())).collect();
        entries.sort();
        doc.insert(module, entries.into_iter().collect());
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("manifest serializes");
    s.push('\n');
    s
}
