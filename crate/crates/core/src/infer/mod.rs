//! Flow-sensitive, intra-procedural permission inference.
//!
//! Each function body (and the module top level) gets an acyclic CFG. Walking
//! it in topological order, every definition is mapped to the set of API paths
//! its value may denote, and every reference, call, write and import adds
//! (path, right) pairs to the module's contract together with the source
//! location that justifies them.

pub mod cfg;
pub mod reaching;
pub mod witness;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::lang::{parse, Expr, ExprKind, Function, LangError, Pos, Program, Property, SourceLocation, StmtKind, UnaryOp};
use crate::par::Parallelism;
use crate::perm::{FullPermSet, ModPermSet, Mode, ObjPath, Right};
use crate::quant::BuiltinCatalog;
use crate::resolve::{Project, ResolveError, Resolved};

use cfg::{build_cfg, CfgNode};
use reaching::{declared_names, def_site, member_key, node_defs, reaching_definitions, DefSite, ReachState};

pub type WitnessMap = BTreeMap<(ObjPath, Right), BTreeSet<SourceLocation>>;

/// A problem noticed during analysis that does not stop it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: SourceLocation,
    pub message: String,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum InferError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("{module}:{}: {source}", source.pos())]
    Parse { module: String, source: LangError },
    #[error("cannot read module `{0}`")]
    Load(String),
}

/// Result of analysing one module.
#[derive(Debug, Clone, Default)]
pub struct ModuleInference {
    pub module: String,
    pub perms: ModPermSet,
    pub witnesses: WitnessMap,
    /// Size of the contract after every update, for checking that it only
    /// grows.
    pub history: Vec<usize>,
    pub diagnostics: Vec<Diagnostic>,
    /// Source modules reached through literal imports.
    pub imports: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ProgramInference {
    pub entry: String,
    pub modules: BTreeMap<String, ModuleInference>,
}

impl ProgramInference {
    pub fn perms(&self) -> FullPermSet {
        let mut out = FullPermSet::new();
        for (id, m) in &self.modules {
            out.insert(id.clone(), m.perms.clone());
        }
        out
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.modules.values().flat_map(|m| m.diagnostics.iter())
    }

    /// `{"<module>": {"<path>:<right>": [{"file","line","col"}]}}`
    pub fn witness_json(&self) -> String {
        let mut doc = serde_json::Map::new();
        for (id, m) in &self.modules {
            let mut entries = serde_json::Map::new();
            for ((path, right), locs) in &m.witnesses {
                let list = locs
                    .iter()
                    .map(|l| serde_json::json!({"file": &*l.file, "line": l.line, "col": l.column}))
                    .collect();
                entries.insert(format!("{path}:{right}"), serde_json::Value::Array(list));
            }
            doc.insert(id.clone(), serde_json::Value::Object(entries));
        }
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json");
        s.push('\n');
        s
    }
}

struct Frame {
    scope: usize,
    declared: BTreeSet<String>,
    state: ReachState,
}

struct Analyzer<'a> {
    module: &'a str,
    file: Arc<str>,
    project: &'a Project,
    catalog: &'a BuiltinCatalog,
    contract: WitnessMap,
    history: Vec<usize>,
    def_to_api: BTreeMap<DefSite, BTreeSet<ObjPath>>,
    frames: Vec<Frame>,
    next_scope: usize,
    diagnostics: Vec<Diagnostic>,
    imports: BTreeSet<String>,
}

type Apis = BTreeSet<ObjPath>;

impl<'a> Analyzer<'a> {
    fn loc(&self, pos: Pos) -> SourceLocation {
        SourceLocation::new(&self.file, pos)
    }

    fn add(&mut self, path: &ObjPath, right: Right, pos: Pos) {
        let loc = self.loc(pos);
        self.contract.entry((path.clone(), right)).or_default().insert(loc);
        self.history.push(self.contract.len());
    }

    fn add_all(&mut self, apis: &Apis, rights: &[Right], pos: Pos) {
        for a in apis {
            for &r in rights {
                self.add(a, r, pos);
            }
        }
    }

    fn add_prefix_reads(&mut self, apis: &Apis, pos: Pos) {
        for a in apis {
            for p in a.prefixes().collect::<Vec<_>>() {
                self.add(&p, Right::R, pos);
            }
        }
    }

    fn frame_of(&self, name: &str) -> Option<&Frame> {
        self.frames.iter().rev().find(|f| f.declared.contains(name))
    }

    fn apis_of_key(&self, frame: &Frame, key: &str) -> Apis {
        let mut out = Apis::new();
        if let Some(defs) = frame.state.get(key) {
            for d in defs {
                if let Some(a) = self.def_to_api.get(d) {
                    out.extend(a.iter().cloned());
                }
            }
        }
        out
    }

    fn is_local(&self, name: &str) -> bool {
        self.frame_of(name).is_some()
    }

    /// APIs an identifier may denote: local definitions first, then the
    /// default-available names, then the global object.
    fn resolve_ident(&self, name: &str) -> Apis {
        if let Some(f) = self.frame_of(name) {
            return self.apis_of_key(f, name);
        }
        if self.catalog.contains(name) {
            return [ObjPath::root(name)].into();
        }
        [ObjPath::root("global").field(name)].into()
    }

    fn require_is_builtin(&self) -> bool {
        !self.is_local("require")
    }

    fn resolve_import(&mut self, name: &str, pos: Pos) -> Option<String> {
        match self.project.resolve(self.module, name) {
            Ok(Resolved::Builtin(id)) => Some(id),
            Ok(Resolved::File(id)) => {
                self.imports.insert(id.clone());
                Some(id)
            }
            Err(e) => {
                let location = self.loc(pos);
                self.diagnostics.push(Diagnostic {
                    location,
                    message: e.to_string(),
                });
                None
            }
        }
    }

    /// APIs from definitions of a local property path such as `o.f`.
    fn property_def_apis(&self, e: &Expr) -> Apis {
        match member_key(e) {
            Some((key, root)) if key != root => match self.frame_of(root) {
                Some(f) => self.apis_of_key(f, &key),
                None => Apis::new(),
            },
            _ => Apis::new(),
        }
    }

    fn get_apis(&mut self, e: &Expr) -> Apis {
        match &e.kind {
            ExprKind::Import { .. } => match e.import_literal() {
                Some(name) if self.require_is_builtin() => {
                    let name = name.to_string();
                    self.resolve_import(&name, e.pos).map(|id| ObjPath::import_root(&id)).into_iter().collect()
                }
                _ => Apis::new(),
            },
            ExprKind::Ident(n) => self.resolve_ident(n),
            ExprKind::Member {
                object,
                property: Property::Static(p),
            } => {
                let mut out: Apis = self.get_apis(object).iter().map(|a| a.field(p)).collect();
                out.extend(self.property_def_apis(e));
                out
            }
            _ => Apis::new(),
        }
    }

    fn visit(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Ident(_) => {
                let a = self.get_apis(e);
                self.add_all(&a, &[Right::R], e.pos);
                self.add_prefix_reads(&a, e.pos);
            }
            ExprKind::Member { object, property } => {
                self.visit(object);
                match property {
                    Property::Static(_) => {
                        let a = self.get_apis(e);
                        self.add_all(&a, &[Right::R], e.pos);
                        let from_defs = self.property_def_apis(e);
                        self.add_prefix_reads(&from_defs, e.pos);
                    }
                    Property::Dynamic(k) => self.visit(k),
                }
            }
            ExprKind::Call { callee, args } => {
                self.visit(callee);
                let a = self.get_apis(callee);
                self.add_all(&a, &[Right::X, Right::R], callee.pos);
                for x in args {
                    self.visit(x);
                }
            }
            ExprKind::Import { arg } => {
                self.visit(arg);
                let req = self.resolve_ident("require");
                self.add_all(&req, &[Right::R, Right::X], e.pos);
                let roots = self.get_apis(e);
                self.add_all(&roots, &[Right::I, Right::R], e.pos);
            }
            ExprKind::Eval { arg } => {
                self.visit(arg);
                let ev = self.resolve_ident("eval");
                self.add_all(&ev, &[Right::X, Right::R], e.pos);
            }
            ExprKind::Unary {
                op: UnaryOp::Delete,
                operand,
            } => self.visit_target(operand),
            ExprKind::Unary { operand, .. } => self.visit(operand),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.visit(lhs);
                self.visit(rhs);
            }
            ExprKind::Object(fields) => {
                for (_, v) in fields {
                    self.visit(v);
                }
            }
            ExprKind::Num(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::Function(_) => {}
        }
    }

    /// An assignment target or `delete` operand.
    fn visit_target(&mut self, t: &Expr) {
        match &t.kind {
            ExprKind::Ident(n) => {
                if self.is_local(n) {
                    return;
                }
                let a = self.resolve_ident(n);
                self.add_all(&a, &[Right::W], t.pos);
                self.add_prefix_reads(&a, t.pos);
            }
            ExprKind::Member {
                object,
                property: Property::Static(p),
            } => {
                self.visit(object);
                let a: Apis = self.get_apis(object).iter().map(|b| b.field(p)).collect();
                self.add_all(&a, &[Right::W], t.pos);
            }
            ExprKind::Member {
                object,
                property: Property::Dynamic(k),
            } => {
                self.visit(object);
                self.visit(k);
                let a = self.get_apis(object);
                self.add_all(&a, &[Right::W], object.pos);
            }
            _ => self.visit(t),
        }
    }

    fn visit_node(&mut self, node: &CfgNode<'_>) {
        match node {
            CfgNode::Stmt(s) => match &s.kind {
                StmtKind::VarDecl { init, .. } => self.visit(init),
                StmtKind::Assign { target, value } => {
                    self.visit(value);
                    self.visit_target(target);
                }
                StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.visit(e),
                _ => {}
            },
            CfgNode::Cond(e) => self.visit(e),
            CfgNode::ForInHead { var, pos, object, .. } => {
                self.visit(object);
                let target = Expr::new(ExprKind::Ident(var.to_string()), *pos);
                self.visit_target(&target);
            }
            CfgNode::Entry | CfgNode::Exit | CfgNode::Join => {}
        }
    }

    fn analyze_body(&mut self, body: &[crate::lang::Stmt], params: &[String]) {
        let cfg = build_cfg(body);
        let declared = declared_names(body, params);
        let scope = self.next_scope;
        self.next_scope += 1;
        let rd = reaching_definitions(&cfg, &declared, &self.file, scope);
        self.frames.push(Frame {
            scope,
            declared: declared.clone(),
            state: ReachState::new(),
        });
        for v in cfg.topo_order() {
            self.frames.last_mut().expect("frame").state = rd.node_in[v].clone();
            let node = &cfg.nodes[v];
            self.visit_node(node);
            for d in node_defs(node, &declared) {
                let apis = match d.value {
                    Some(e) => self.get_apis(e),
                    None => Apis::new(),
                };
                self.def_to_api.insert(def_site(&d, &self.file, scope), apis);
            }
            for f in cfg.functions_at(v) {
                self.analyze_function(f);
            }
        }
        let done = self.frames.pop().expect("frame");
        self.def_to_api.retain(|k, _| k.scope != done.scope);
    }

    fn analyze_function(&mut self, f: &Function) {
        self.analyze_body(&f.body, &f.params);
    }
}

/// Analyse one parsed module.
pub fn infer_module(program: &Program, module: &str, project: &Project) -> ModuleInference {
    infer_module_with(program, module, project, BuiltinCatalog::shipped())
}

pub fn infer_module_with(program: &Program, module: &str, project: &Project, catalog: &BuiltinCatalog) -> ModuleInference {
    let mut a = Analyzer {
        module,
        file: program.file.clone(),
        project,
        catalog,
        contract: WitnessMap::new(),
        history: Vec::new(),
        def_to_api: BTreeMap::new(),
        frames: Vec::new(),
        next_scope: 0,
        diagnostics: Vec::new(),
        imports: BTreeSet::new(),
    };
    a.analyze_body(&program.body, &[]);
    let mut perms = ModPermSet::new();
    for (path, right) in a.contract.keys() {
        perms.grant(path.clone(), Mode::NONE.with(*right));
    }
    ModuleInference {
        module: module.to_string(),
        perms,
        witnesses: a.contract,
        history: a.history,
        diagnostics: a.diagnostics,
        imports: a.imports,
    }
}

/// Parse and analyse one module of a project by canonical id.
pub fn infer_source(project: &Project, id: &str) -> Result<(Program, ModuleInference), InferError> {
    let src = project.load(id).ok_or_else(|| InferError::Load(id.to_string()))?;
    let program = parse(id, &src).map_err(|source| InferError::Parse {
        module: id.to_string(),
        source,
    })?;
    let inf = infer_module(&program, id, project);
    Ok((program, inf))
}

/// Analyse the entry module and every module reachable from it through
/// literal imports. Each wave of newly discovered modules is analysed in
/// parallel.
pub fn infer_program(project: &Project, entry: &str, par: Parallelism) -> Result<ProgramInference, InferError> {
    let entry_id = project.canonicalize(entry);
    if project.load(&entry_id).is_none() {
        return Err(ResolveError {
            importer: crate::perm::CWD_PREFIX.to_string(),
            name: entry.to_string(),
        }
        .into());
    }
    let mut out = ProgramInference {
        entry: entry_id.clone(),
        modules: BTreeMap::new(),
    };
    let mut seen: BTreeSet<String> = [entry_id.clone()].into();
    let mut wave: VecDeque<String> = [entry_id].into();
    while !wave.is_empty() {
        let batch: Vec<String> = wave.drain(..).collect();
        let results = par.map(batch, |id| infer_source(project, &id).map(|(_, m)| m));
        for r in results {
            let m = r?;
            for dep in &m.imports {
                if seen.insert(dep.clone()) {
                    wave.push_back(dep.clone());
                }
            }
            out.modules.insert(m.module.clone(), m);
        }
    }
    Ok(out)
}
