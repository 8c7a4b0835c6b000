//! Acyclic control-flow graphs over statement lists. Loops are unrolled once:
//! `while (c) { S }` has exactly the shape of `if (c) { S }`.

use crate::lang::{DeclKind, Expr, Function, Pos, Stmt, StmtKind};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum CfgNode<'a> {
    Entry,
    Exit,
    Join,
    /// `var`/`let`, assignment, expression, `return`, or a function
    /// declaration.
    Stmt(&'a Stmt),
    /// Branch condition of `if`/`while`/`for`.
    Cond(&'a Expr),
    /// `for (k in obj)` header: evaluates `obj` and defines `k`.
    ForInHead {
        var: &'a str,
        pos: Pos,
        decl: Option<DeclKind>,
        object: &'a Expr,
    },
}

#[derive(Debug, Clone)]
pub struct Cfg<'a> {
    pub nodes: Vec<CfgNode<'a>>,
    pub succs: Vec<Vec<usize>>,
    pub preds: Vec<Vec<usize>>,
    pub entry: usize,
    pub exit: usize,
}

struct Builder<'a> {
    nodes: Vec<CfgNode<'a>>,
    edges: Vec<(usize, usize)>,
    exit: usize,
}

impl<'a> Builder<'a> {
    fn node(&mut self, n: CfgNode<'a>, preds: &[usize]) -> usize {
        let id = self.nodes.len();
        self.nodes.push(n);
        for &p in preds {
            self.edges.push((p, id));
        }
        id
    }

    /// Lay out `stmts` after `preds`; returns the dangling ends.
    fn seq(&mut self, stmts: &'a [Stmt], mut preds: Vec<usize>) -> Vec<usize> {
        for s in stmts {
            preds = self.stmt(s, preds);
        }
        preds
    }

    fn branch(&mut self, cond: &'a Expr, then: &'a [Stmt], otherwise: Option<&'a [Stmt]>, preds: Vec<usize>) -> Vec<usize> {
        let c = self.node(CfgNode::Cond(cond), &preds);
        let mut ends = self.seq(then, vec![c]);
        match otherwise {
            Some(e) => ends.extend(self.seq(e, vec![c])),
            None => ends.push(c),
        }
        if ends.is_empty() {
            return ends;
        }
        vec![self.node(CfgNode::Join, &ends)]
    }

    fn stmt(&mut self, s: &'a Stmt, preds: Vec<usize>) -> Vec<usize> {
        match &s.kind {
            StmtKind::VarDecl { .. } | StmtKind::Assign { .. } | StmtKind::Expr(_) | StmtKind::Function(_) => {
                vec![self.node(CfgNode::Stmt(s), &preds)]
            }
            StmtKind::Return(_) => {
                let n = self.node(CfgNode::Stmt(s), &preds);
                self.edges.push((n, self.exit));
                vec![]
            }
            StmtKind::Block(b) => self.seq(b, preds),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => self.branch(cond, then_branch, else_branch.as_deref(), preds),
            StmtKind::While { cond, body } => self.branch(cond, body, None, preds),
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let after_init = self.stmt(init, preds);
                let c = self.node(CfgNode::Cond(cond), &after_init);
                let body_end = self.seq(body, vec![c]);
                let mut ends = self.stmt(update, body_end);
                ends.push(c);
                vec![self.node(CfgNode::Join, &ends)]
            }
            StmtKind::ForIn {
                decl,
                var,
                var_pos,
                object,
                body,
            } => {
                let h = self.node(
                    CfgNode::ForInHead {
                        var,
                        pos: *var_pos,
                        decl: *decl,
                        object,
                    },
                    &preds,
                );
                let mut ends = self.seq(body, vec![h]);
                ends.push(h);
                vec![self.node(CfgNode::Join, &ends)]
            }
        }
    }
}

/// Build the CFG of a function body or module top level.
pub fn build_cfg(body: &[Stmt]) -> Cfg<'_> {
    let mut b = Builder {
        nodes: vec![CfgNode::Entry, CfgNode::Exit],
        edges: Vec::new(),
        exit: 1,
    };
    let ends = b.seq(body, vec![0]);
    for e in ends {
        b.edges.push((e, 1));
    }
    prune(b)
}

/// Drop nodes not reachable from the entry (code after `return`) and order
/// the rest topologically.
fn prune(b: Builder<'_>) -> Cfg<'_> {
    let n = b.nodes.len();
    let mut succs = vec![Vec::new(); n];
    for &(f, t) in &b.edges {
        if !succs[f].contains(&t) {
            succs[f].push(t);
        }
    }
    let mut reachable = vec![false; n];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut reachable[v], true) {
            continue;
        }
        stack.extend(succs[v].iter().copied());
    }
    reachable[1] = true;
    // Node ids were assigned so that every edge points forward, except edges
    // into the exit (id 1); placing exit last gives a topological order.
    let mut order: Vec<usize> = (0..n).filter(|&v| reachable[v] && v != 1).collect();
    order.push(1);
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let mut nodes = Vec::with_capacity(order.len());
    let mut new_succs = vec![Vec::new(); order.len()];
    let mut preds = vec![Vec::new(); order.len()];
    for &old in &order {
        nodes.push(b.nodes[old].clone());
        for &t in &succs[old] {
            if reachable[old] && remap[t] != usize::MAX {
                new_succs[remap[old]].push(remap[t]);
                preds[remap[t]].push(remap[old]);
            }
        }
    }
    let exit = order.len() - 1;
    Cfg {
        nodes,
        succs: new_succs,
        preds,
        entry: 0,
        exit,
    }
}

impl<'a> Cfg<'a> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in an order where every predecessor comes first.
    pub fn topo_order(&self) -> impl Iterator<Item = usize> {
        0..self.nodes.len()
    }

    pub fn is_acyclic(&self) -> bool {
        self.succs
            .iter()
            .enumerate()
            .all(|(v, s)| s.iter().all(|&t| t > v))
    }

    /// Function literals and declarations evaluated directly by node `v`.
    pub fn functions_at(&self, v: usize) -> Vec<&'a Arc<Function>> {
        let mut out = Vec::new();
        let mut visit = |e: &'a Expr| {
            e.walk(&mut |x| {
                if let crate::lang::ExprKind::Function(f) = &x.kind {
                    out.push(f);
                }
            })
        };
        match &self.nodes[v] {
            CfgNode::Stmt(s) => {
                if let StmtKind::Function(f) = &s.kind {
                    return vec![f];
                }
                for e in s.own_exprs() {
                    visit(e);
                }
            }
            CfgNode::Cond(e) => visit(e),
            CfgNode::ForInHead { object, .. } => visit(object),
            _ => {}
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn stmt_count(c: &Cfg<'_>) -> usize {
        c.nodes.iter().filter(|n| matches!(n, CfgNode::Stmt(_))).count()
    }

    #[test]
    fn straight_line_is_a_chain() {
        let p = parse("t", "a = 1; b = 2; c = 3;").unwrap();
        let c = build_cfg(&p.body);
        assert_eq!(stmt_count(&c), 3);
        assert_eq!(c.len(), 5);
        for v in 0..c.len() - 1 {
            assert_eq!(c.succs[v], vec![v + 1]);
        }
        assert!(c.is_acyclic());
    }

    #[test]
    fn if_else_is_a_diamond() {
        let p = parse("t", "if (x) { a = 1; } else { b = 2; }").unwrap();
        let c = build_cfg(&p.body);
        let joins: Vec<usize> = (0..c.len()).filter(|&v| matches!(c.nodes[v], CfgNode::Join)).collect();
        assert_eq!(joins.len(), 1);
        assert_eq!(c.preds[joins[0]].len(), 2);
        let cond = (0..c.len()).find(|&v| matches!(c.nodes[v], CfgNode::Cond(_))).unwrap();
        assert_eq!(c.succs[cond].len(), 2);
    }

    #[test]
    fn while_has_the_shape_of_if() {
        let w = parse("t", "while (c) { m.f(); }").unwrap();
        let i = parse("t", "if (c) { m.f(); }").unwrap();
        let (cw, ci) = (build_cfg(&w.body), build_cfg(&i.body));
        assert_eq!(cw.succs, ci.succs);
        assert!(cw.is_acyclic());
    }

    #[test]
    fn code_after_return_is_pruned() {
        let p = parse("t", "return 1; f();").unwrap();
        let c = build_cfg(&p.body);
        assert_eq!(stmt_count(&c), 1);
        assert!(c.preds.iter().skip(1).all(|p| !p.is_empty()));
    }

    #[test]
    fn for_loops_unroll_once() {
        let p = parse("t", "for (let i = 0; i < 3; i = i + 1) { f(i); }").unwrap();
        let c = build_cfg(&p.body);
        assert!(c.is_acyclic());
        assert_eq!(stmt_count(&c), 3);
    }
}
