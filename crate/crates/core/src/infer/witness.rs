//! Independent check that each inferred (path, right) has a witness location
//! whose syntax justifies it. Works from the AST alone, without the dataflow
//! state the inference used.

use std::collections::BTreeSet;

use crate::lang::{Expr, ExprKind, Pos, Program, Property, SourceLocation, Stmt, StmtKind, UnaryOp};
use crate::perm::{ObjPath, Right, Segment};

use super::WitnessMap;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Ident(String),
    Member { prop: String, chain_root: Option<String> },
    DynMember,
    Import(Option<String>),
    Eval,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Read,
    Callee,
    Target,
    DynTargetBase,
}

#[derive(Debug, Clone)]
struct Site {
    pos: Pos,
    shape: Shape,
    role: Role,
}

fn chain_root(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Ident(n) => Some(n.clone()),
        ExprKind::Member { object, .. } => chain_root(object),
        _ => None,
    }
}

fn shape(e: &Expr) -> Shape {
    match &e.kind {
        ExprKind::Ident(n) => Shape::Ident(n.clone()),
        ExprKind::Member {
            object,
            property: Property::Static(p),
        } => Shape::Member {
            prop: p.clone(),
            chain_root: chain_root(object),
        },
        ExprKind::Member { .. } => Shape::DynMember,
        ExprKind::Import { arg } => Shape::Import(match &arg.kind {
            ExprKind::Str(s) => Some(s.clone()),
            _ => None,
        }),
        ExprKind::Eval { .. } => Shape::Eval,
        _ => Shape::Other,
    }
}

struct Collector {
    sites: Vec<Site>,
    declared: BTreeSet<String>,
}

impl Collector {
    fn push(&mut self, e: &Expr, role: Role) {
        self.sites.push(Site {
            pos: e.pos,
            shape: shape(e),
            role,
        });
    }

    fn expr(&mut self, e: &Expr, role: Role) {
        self.push(e, role);
        match &e.kind {
            ExprKind::Member { object, property } => {
                self.expr(object, Role::Read);
                if let Property::Dynamic(k) = property {
                    self.expr(k, Role::Read);
                }
            }
            ExprKind::Call { callee, args } => {
                self.expr(callee, Role::Callee);
                for a in args {
                    self.expr(a, Role::Read);
                }
            }
            ExprKind::Unary {
                op: UnaryOp::Delete,
                operand,
            } => self.target(operand),
            ExprKind::Unary { operand, .. } => self.expr(operand, Role::Read),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs, Role::Read);
                self.expr(rhs, Role::Read);
            }
            ExprKind::Object(fields) => {
                for (_, v) in fields {
                    self.expr(v, Role::Read);
                }
            }
            ExprKind::Import { arg } | ExprKind::Eval { arg } => self.expr(arg, Role::Read),
            ExprKind::Function(f) => {
                self.declared.extend(f.params.iter().cloned());
                self.stmts(&f.body);
            }
            _ => {}
        }
    }

    fn target(&mut self, t: &Expr) {
        self.push(t, Role::Target);
        match &t.kind {
            ExprKind::Member {
                object,
                property: Property::Static(_),
            } => self.expr(object, Role::Read),
            ExprKind::Member {
                object,
                property: Property::Dynamic(k),
            } => {
                self.push(object, Role::DynTargetBase);
                self.expr(object, Role::Read);
                self.expr(k, Role::Read);
            }
            _ => {}
        }
    }

    fn stmts(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { name, init, .. } => {
                self.declared.insert(name.clone());
                self.expr(init, Role::Read);
            }
            StmtKind::Assign { target, value } => {
                self.expr(value, Role::Read);
                self.target(target);
            }
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.expr(e, Role::Read),
            StmtKind::Return(None) => {}
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond, Role::Read);
                self.stmts(then_branch);
                if let Some(e) = else_branch {
                    self.stmts(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, Role::Read);
                self.stmts(body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.stmt(init);
                self.expr(cond, Role::Read);
                self.stmt(update);
                self.stmts(body);
            }
            StmtKind::ForIn {
                decl,
                var,
                var_pos,
                object,
                body,
            } => {
                if decl.is_some() {
                    self.declared.insert(var.clone());
                }
                self.sites.push(Site {
                    pos: *var_pos,
                    shape: Shape::Ident(var.clone()),
                    role: Role::Target,
                });
                self.expr(object, Role::Read);
                self.stmts(body);
            }
            StmtKind::Function(f) => {
                if let Some(n) = &f.name {
                    self.declared.insert(n.clone());
                }
                self.declared.extend(f.params.iter().cloned());
                self.stmts(&f.body);
            }
            StmtKind::Block(b) => self.stmts(b),
        }
    }
}

/// Syntactic facts about one module, indexed for witness checks.
pub struct WitnessValidator {
    file: String,
    sites: Vec<Site>,
    declared: BTreeSet<String>,
}

fn is_global_of(path: &ObjPath, name: &str) -> bool {
    let s = path.segments();
    matches!(s, [Segment::Name(g)] if g == "global")
        || matches!(s, [Segment::Name(g), Segment::Name(n)] if g == "global" && n == name)
}

/// Does the literal in `require("...")` plausibly name this canonical id?
fn literal_names(literal: &str, id: &str) -> bool {
    let stem = |s: &str| {
        let last = s.rsplit('/').next().unwrap_or(s);
        last.strip_suffix(".mjs").unwrap_or(last).to_string()
    };
    stem(literal) == stem(id)
}

impl WitnessValidator {
    pub fn new(program: &Program) -> Self {
        let mut c = Collector {
            sites: Vec::new(),
            declared: BTreeSet::new(),
        };
        c.stmts(&program.body);
        WitnessValidator {
            file: program.file.to_string(),
            sites: c.sites,
            declared: c.declared,
        }
    }

    fn name_ok(&self, name: &str, path: &ObjPath) -> bool {
        self.declared.contains(name) || path.root_name() == Some(name) || is_global_of(path, name)
    }

    fn read_ok(&self, site: &Site, path: &ObjPath) -> bool {
        match &site.shape {
            Shape::Ident(n) => self.name_ok(n, path),
            Shape::Member { prop, chain_root } => {
                path.last_name() == Some(prop.as_str()) || chain_root.as_ref().is_some_and(|r| self.declared.contains(r))
            }
            Shape::Import(_) => {
                self.declared.contains("require") || path.is_import_root() || path.root_name() == Some("require")
            }
            Shape::Eval => self.declared.contains("eval") || path.root_name() == Some("eval"),
            Shape::DynMember | Shape::Other => false,
        }
    }

    /// Whether `loc` justifies `right` on `path`.
    pub fn justifies(&self, path: &ObjPath, right: Right, loc: &SourceLocation) -> bool {
        if *loc.file != *self.file {
            return false;
        }
        let pos = loc.pos();
        self.sites.iter().filter(|s| s.pos == pos).any(|s| match right {
            Right::R => s.role != Role::Target && self.read_ok(s, path) || s.role == Role::Target && self.target_read_ok(s, path),
            Right::X => match s.shape {
                Shape::Import(_) | Shape::Eval => self.read_ok(s, path),
                _ => s.role == Role::Callee && self.read_ok(s, path),
            },
            Right::W => match (&s.role, &s.shape) {
                (Role::Target, Shape::Ident(n)) => !self.declared.contains(n) && self.name_ok(n, path),
                (Role::Target, Shape::Member { prop, .. }) => path.last_name() == Some(prop.as_str()),
                (Role::DynTargetBase, _) => self.read_ok(s, path),
                _ => false,
            },
            Right::I => matches!(&s.shape, Shape::Import(Some(lit))
                if path.is_import_root() && path.import_lib().is_some_and(|id| literal_names(lit, id))),
        })
    }

    /// Writing an undeclared name also reads the object holding it.
    fn target_read_ok(&self, s: &Site, path: &ObjPath) -> bool {
        match &s.shape {
            Shape::Ident(n) => !self.declared.contains(n) && path.segments().len() == 1 && self.name_ok(n, path),
            _ => false,
        }
    }

    /// Entries lacking any justifying witness.
    pub fn unjustified(&self, witnesses: &WitnessMap) -> Vec<(ObjPath, Right)> {
        witnesses
            .iter()
            .filter(|(k, locs)| !locs.iter().any(|l| self.justifies(&k.0, k.1, l)))
            .map(|(k, _)| k.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use std::sync::Arc;

    fn loc(file: &str, line: u32, col: u32) -> SourceLocation {
        SourceLocation::new(&Arc::from(file), Pos::new(line, col))
    }

    #[test]
    fn accepts_and_rejects() {
        let p = parse("a.mjs", "console.log(1);\nx = 2;").unwrap();
        let v = WitnessValidator::new(&p);
        let path = |s: &str| ObjPath::parse(s).unwrap();
        assert!(v.justifies(&path("console"), Right::R, &loc("a.mjs", 1, 1)));
        assert!(v.justifies(&path("console.log"), Right::X, &loc("a.mjs", 1, 9)));
        assert!(!v.justifies(&path("console.log"), Right::W, &loc("a.mjs", 1, 9)));
        assert!(!v.justifies(&path("process.env"), Right::R, &loc("a.mjs", 1, 9)));
        assert!(v.justifies(&path("global.x"), Right::W, &loc("a.mjs", 2, 1)));
        assert!(!v.justifies(&path("console"), Right::R, &loc("b.mjs", 1, 1)));
    }
}
