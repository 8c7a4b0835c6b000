//! Permission model: access paths with wildcards, RWXI modes, per-module and
//! whole-program permission sets, and the JSON manifest format.

mod manifest;
mod mode;
mod path;
mod set;

pub use manifest::{parse_manifest, parse_manifest_with, serialize_manifest, ManifestError};
pub use mode::{BadModeLetter, Mode, Right};
pub use path::{match_path, ObjPath, PathError, Segment};
pub use set::{FullPermSet, ModPermSet};

/// Prefix standing for the project root in canonical module paths.
pub const CWD_PREFIX: &str = "__CWD__";
