//! May-reach definitions over an acyclic CFG. Keys are local variable names
//! (`x`) and property paths rooted at local variables (`o.f`); a definition of
//! a key kills it and every longer key below it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::cfg::{Cfg, CfgNode};
use crate::lang::{Expr, ExprKind, Pos, Property, SourceLocation, Stmt, StmtKind};

/// One definition of a variable or local property path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefSite {
    pub name: String,
    pub location: SourceLocation,
    pub scope: usize,
}

/// Key to the definitions that may reach a program point.
pub type ReachState = BTreeMap<String, BTreeSet<DefSite>>;

/// A definition generated by a CFG node, with the expression whose value it
/// takes (none for parameters, loop keys and function declarations).
#[derive(Debug, Clone)]
pub struct NodeDef<'a> {
    pub key: String,
    pub pos: Pos,
    pub value: Option<&'a Expr>,
}

#[derive(Debug, Clone, Default)]
pub struct ReachingDefs {
    /// State on entry to each node.
    pub node_in: Vec<ReachState>,
    /// For each local identifier use (name, position): definitions reaching it.
    pub uses: BTreeMap<(String, Pos), BTreeSet<DefSite>>,
}

/// Names declared directly in a function body (parameters, `var`/`let`,
/// function declarations, loop variables), not looking into nested functions.
pub fn declared_names(body: &[Stmt], params: &[String]) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = params.iter().cloned().collect();
    fn go(stmts: &[Stmt], out: &mut BTreeSet<String>) {
        for s in stmts {
            match &s.kind {
                StmtKind::VarDecl { name, .. } => {
                    out.insert(name.clone());
                }
                StmtKind::Function(f) => {
                    if let Some(n) = &f.name {
                        out.insert(n.clone());
                    }
                }
                StmtKind::ForIn { decl: Some(_), var, .. } => {
                    out.insert(var.clone());
                }
                StmtKind::For { init, update, .. } => {
                    go(std::slice::from_ref(init), out);
                    go(std::slice::from_ref(update), out);
                }
                _ => {}
            }
            for b in s.child_blocks() {
                go(b, out);
            }
        }
    }
    go(body, &mut out);
    out
}

/// `o.f.g` as a key, when the chain is static and rooted at an identifier.
pub fn member_key(e: &Expr) -> Option<(String, &str)> {
    match &e.kind {
        ExprKind::Ident(n) => Some((n.clone(), n)),
        ExprKind::Member {
            object,
            property: Property::Static(p),
        } => member_key(object).map(|(k, root)| (format!("{k}.{p}"), root)),
        _ => None,
    }
}

fn object_defs<'a>(key: &str, value: &'a Expr, pos: Pos, out: &mut Vec<NodeDef<'a>>) {
    if let ExprKind::Object(fields) = &value.kind {
        for (name, v) in fields {
            let k = format!("{key}.{name}");
            out.push(NodeDef {
                key: k.clone(),
                pos,
                value: Some(v),
            });
            object_defs(&k, v, pos, out);
        }
    }
}

fn assign_defs<'a>(target: &'a Expr, value: Option<&'a Expr>, declared: &BTreeSet<String>, out: &mut Vec<NodeDef<'a>>) {
    let Some((key, root)) = member_key(target) else {
        return;
    };
    if !declared.contains(root) {
        return;
    }
    let pos = target.pos;
    out.push(NodeDef {
        key: key.clone(),
        pos,
        value,
    });
    if let Some(v) = value {
        object_defs(&key, v, pos, out);
    }
}

/// Definitions generated by one node, in order.
pub fn node_defs<'a>(node: &CfgNode<'a>, declared: &BTreeSet<String>) -> Vec<NodeDef<'a>> {
    let mut out = Vec::new();
    match node {
        CfgNode::Stmt(s) => stmt_defs(s, declared, &mut out),
        CfgNode::ForInHead { var, pos, .. } if declared.contains(*var) => out.push(NodeDef {
            key: var.to_string(),
            pos: *pos,
            value: None,
        }),
        _ => {}
    }
    out
}

fn stmt_defs<'a>(s: &'a Stmt, declared: &BTreeSet<String>, out: &mut Vec<NodeDef<'a>>) {
    match &s.kind {
        StmtKind::VarDecl { name, init, .. } => {
            out.push(NodeDef {
                key: name.clone(),
                pos: s.pos,
                value: Some(init),
            });
            object_defs(name, init, s.pos, out);
        }
        StmtKind::Assign { target, value } => assign_defs(target, Some(value), declared, out),
        StmtKind::Function(f) => {
            if let Some(n) = &f.name {
                out.push(NodeDef {
                    key: n.clone(),
                    pos: s.pos,
                    value: None,
                });
            }
        }
        _ => {}
    }
}

/// Apply one definition: kill the key and everything below it, then add it.
pub fn define(state: &mut ReachState, site: DefSite) {
    let prefix = format!("{}.", site.name);
    state.retain(|k, _| k != &site.name && !k.starts_with(&prefix));
    state.entry(site.name.clone()).or_default().insert(site);
}

/// Union of two states.
pub fn join_into(into: &mut ReachState, other: &ReachState) {
    for (k, v) in other {
        into.entry(k.clone()).or_default().extend(v.iter().cloned());
    }
}

pub fn def_site(def: &NodeDef<'_>, file: &Arc<str>, scope: usize) -> DefSite {
    DefSite {
        name: def.key.clone(),
        location: SourceLocation::new(file, def.pos),
        scope,
    }
}

fn node_exprs<'a>(node: &CfgNode<'a>) -> Vec<&'a Expr> {
    match node {
        CfgNode::Stmt(s) => s.own_exprs(),
        CfgNode::Cond(e) => vec![e],
        CfgNode::ForInHead { object, .. } => vec![object],
        _ => vec![],
    }
}

/// Compute, for every node, the definitions reaching its entry, and for every
/// use of a declared name the definitions reaching that use.
pub fn reaching_definitions(cfg: &Cfg<'_>, declared: &BTreeSet<String>, file: &Arc<str>, scope: usize) -> ReachingDefs {
    let n = cfg.len();
    let mut node_in: Vec<ReachState> = vec![ReachState::new(); n];
    let mut node_out: Vec<ReachState> = vec![ReachState::new(); n];
    let mut uses = BTreeMap::new();
    for v in cfg.topo_order() {
        let mut state = ReachState::new();
        for &p in &cfg.preds[v] {
            join_into(&mut state, &node_out[p]);
        }
        for e in node_exprs(&cfg.nodes[v]) {
            e.walk(&mut |x| {
                if let ExprKind::Ident(name) = &x.kind {
                    if declared.contains(name) {
                        uses.insert(
                            (name.clone(), x.pos),
                            state.get(name).cloned().unwrap_or_default(),
                        );
                    }
                }
            });
        }
        node_in[v] = state.clone();
        for d in node_defs(&cfg.nodes[v], declared) {
            define(&mut state, def_site(&d, file, scope));
        }
        node_out[v] = state;
    }
    ReachingDefs { node_in, uses }
}

#[cfg(test)]
mod tests {
    use super::super::cfg::build_cfg;
    use super::*;
    use crate::lang::parse;

    fn reaching_for(src: &str, name: &str) -> Vec<BTreeSet<DefSite>> {
        let p = parse("t", src).unwrap();
        let cfg = build_cfg(&p.body);
        let declared = declared_names(&p.body, &[]);
        let rd = reaching_definitions(&cfg, &declared, &p.file, 0);
        rd.uses
            .iter()
            .filter(|((n, _), _)| n == name)
            .map(|(_, d)| d.clone())
            .collect()
    }

    #[test]
    fn single_def_reaches_use() {
        let r = reaching_for("let x = 1; use(x);", "x");
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].len(), 1);
        assert_eq!(r[0].iter().next().unwrap().location.line, 1);
    }

    #[test]
    fn both_arms_reach_after_join() {
        let r = reaching_for("var x = 0;\nif (c) { x = 1; } else { x = 2; }\nuse(x);", "x");
        let last = r.last().unwrap();
        assert_eq!(last.len(), 2);
    }

    #[test]
    fn redefinition_kills() {
        let r = reaching_for("let x = 1;\nx = 2;\nuse(x);", "x");
        let last = r.last().unwrap();
        assert_eq!(last.len(), 1);
        assert_eq!(last.iter().next().unwrap().location.line, 2);
    }

    #[test]
    fn whole_object_def_kills_property_defs() {
        let p = parse("t", "let o = {a: 1};\no.b = 2;\no = 3;\nuse(o);").unwrap();
        let cfg = build_cfg(&p.body);
        let declared = declared_names(&p.body, &[]);
        let rd = reaching_definitions(&cfg, &declared, &p.file, 0);
        let before_last = &rd.node_in[cfg.len() - 2];
        assert!(before_last.contains_key("o"));
        assert!(!before_last.contains_key("o.a"));
        assert!(!before_last.contains_key("o.b"));
        let before_reassign = &rd.node_in[3];
        assert!(before_reassign.contains_key("o.a") && before_reassign.contains_key("o.b"));
    }

    #[test]
    fn declared_names_skip_nested_functions() {
        let p = parse("t", "var a = 1; function f(q) { var inner = 2; } for (let k in o) { let b = 1; }").unwrap();
        let d = declared_names(&p.body, &["p".to_string()]);
        let want: BTreeSet<String> = ["a", "f", "k", "b", "p"].iter().map(|s| s.to_string()).collect();
        assert_eq!(d, want);
    }
}
