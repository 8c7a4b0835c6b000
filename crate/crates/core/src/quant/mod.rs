//! Privilege-reduction metric: how many (path, right) pairs a manifest grants
//! out of everything a module could reach by default.

mod catalog;
mod privilege;

pub use catalog::{BuiltinCatalog, CatalogNode, CatalogRoot, RootCategory};
pub use privilege::{
    allowed_privilege, base_privilege, expand_universe, export_tree, privilege_reduction, program_universes, tree_from_json,
    Counts, DegenerateError, ImportTree, PrivilegeReport, PrivilegeSet, COUNTED,
};
