use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use super::builtins::SharedRoots;
use super::value::{lookup_scope, new_scope, Builtin, Env, Obj, ObjKind, Value, Wrapper};
use super::{AccessControlException, AccessEvent, RunMode, RunOutcome, RuntimeConfig, RuntimeError};
use crate::infer::reaching::declared_names;
use crate::lang::{
    parse, parse_eval, BinaryOp, Expr, ExprKind, Function, Pos, Property, SourceLocation, Stmt, StmtKind, UnaryOp,
};
use crate::perm::{ModPermSet, ObjPath, Right};
use crate::quant::BuiltinCatalog;
use crate::resolve::{dirname, Project, Resolved};

pub(super) type Res<T> = Result<T, RuntimeError>;

struct ModuleRec {
    id: String,
    module_obj: Rc<Obj>,
    initial_exports: Rc<Obj>,
    ctx: Env,
    scope: Option<Env>,
    exports: Option<Value>,
}

/// Where code is running: which module's permissions apply and which file
/// positions refer to.
#[derive(Clone)]
pub(super) struct Cx {
    pub module: usize,
    pub file: Arc<str>,
}

enum Flow {
    Normal,
    Return(Value),
}

pub(super) struct Interp<'p> {
    project: &'p Project,
    cfg: &'p RuntimeConfig,
    modules: Vec<ModuleRec>,
    by_id: HashMap<String, usize>,
    perms: Vec<ModPermSet>,
    pub(super) roots: SharedRoots,
    pub(super) events: Vec<AccessEvent>,
    pub(super) stdout: String,
    pub(super) vfs: BTreeMap<String, String>,
    pub(super) spawned: Vec<Vec<String>>,
    stack: Vec<String>,
    steps: u64,
    rewraps: usize,
    wrappers_created: usize,
}

/// Execute the configured entry module.
pub fn run(project: &Project, cfg: &RuntimeConfig) -> RunOutcome {
    // Deeply nested MiniJS calls recurse in the host; give them room.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, || run_here(project, cfg))
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread")
    })
}

fn run_here(project: &Project, cfg: &RuntimeConfig) -> RunOutcome {
    let mut it = Interp {
        project,
        cfg,
        modules: Vec::new(),
        by_id: HashMap::new(),
        perms: Vec::new(),
        roots: SharedRoots::new(cfg),
        events: Vec::new(),
        stdout: String::new(),
        vfs: cfg.fs_seed.clone(),
        spawned: Vec::new(),
        stack: Vec::new(),
        steps: 0,
        rewraps: 0,
        wrappers_created: 0,
    };
    let entry = project.canonicalize(&cfg.entry);
    let result = it.load(&entry);
    let exports = match &result {
        Ok(v) => Some(super::builtins::raw_json(v).to_string()),
        Err(_) => None,
    };
    RunOutcome {
        error: result.err(),
        stdout: it.stdout,
        events: it.events,
        spawned: it.spawned,
        fs: it.vfs,
        loaded: it.modules.iter().map(|m| m.id.clone()).collect(),
        exports,
        rewraps: it.rewraps,
        wrappers_created: it.wrappers_created,
    }
}

impl<'p> Interp<'p> {
    fn loc(cx: &Cx, pos: Pos) -> SourceLocation {
        SourceLocation::new(&cx.file, pos)
    }

    pub(super) fn type_error(&self, loc: &SourceLocation, message: impl Into<String>) -> RuntimeError {
        RuntimeError::Type {
            location: loc.clone(),
            message: message.into(),
        }
    }

    fn tick(&mut self) -> Res<()> {
        self.steps += 1;
        if self.steps > self.cfg.max_steps {
            return Err(RuntimeError::StepLimit);
        }
        Ok(())
    }

    // ---- monitors ----

    fn check(&mut self, subject: usize, path: &ObjPath, right: Right, loc: &SourceLocation) -> Res<()> {
        match self.cfg.mode {
            RunMode::Unmonitored => Ok(()),
            RunMode::Trace | RunMode::ImportTime => {
                self.events.push(AccessEvent {
                    module: self.modules[subject].id.clone(),
                    path: path.clone(),
                    kind: right,
                    location: loc.clone(),
                });
                Ok(())
            }
            RunMode::Enforce => {
                if self.perms[subject].allows(path, right) {
                    Ok(())
                } else {
                    Err(RuntimeError::Access(Box::new(AccessControlException {
                        kind: right,
                        module: self.modules[subject].id.clone(),
                        path: path.clone(),
                        location: loc.clone(),
                        stack: self.stack.clone(),
                    })))
                }
            }
        }
    }

    /// Monitor `v` for `subject` at `path` with `depth` levels left.
    pub(super) fn wrap(&mut self, v: Value, path: ObjPath, depth: usize, subject: usize) -> Value {
        if depth == 0 || self.cfg.mode == RunMode::Unmonitored {
            return v;
        }
        let inner = match v {
            Value::Obj(o) => o,
            // Re-monitor for the new holder instead of stacking wrappers.
            Value::Wrapped(w) => {
                self.rewraps += 1;
                w.inner.clone()
            }
            other => return other,
        };
        self.wrappers_created += 1;
        Value::Wrapped(Rc::new(Wrapper {
            inner,
            path,
            subject,
            depth,
        }))
    }

    pub(super) fn get_field(&mut self, target: &Value, key: &str, loc: &SourceLocation) -> Res<Value> {
        match target {
            Value::Wrapped(w) => {
                let child = w.path.field(key);
                self.check(w.subject, &child, Right::R, loc)?;
                self.check(w.subject, &w.path, Right::R, loc)?;
                let v = w.inner.props.borrow().get(key).cloned().unwrap_or_default();
                Ok(self.wrap(v, child, w.depth - 1, w.subject))
            }
            Value::Obj(o) => Ok(o.props.borrow().get(key).cloned().unwrap_or_default()),
            Value::Str(s) if key == "length" => Ok(Value::Num(s.chars().count() as f64)),
            Value::Undefined | Value::Null => {
                Err(self.type_error(loc, format!("cannot read property `{key}` of {}", target.type_name())))
            }
            _ => Ok(Value::Undefined),
        }
    }

    fn set_field(&mut self, target: &Value, key: &str, v: Value, loc: &SourceLocation) -> Res<()> {
        let obj = match target {
            Value::Wrapped(w) => {
                self.check(w.subject, &w.path.field(key), Right::W, loc)?;
                self.check(w.subject, &w.path, Right::R, loc)?;
                w.inner.clone()
            }
            Value::Obj(o) => o.clone(),
            _ => return Err(self.type_error(loc, format!("cannot set property `{key}` of {}", target.type_name()))),
        };
        obj.props.borrow_mut().insert(key.to_string(), v);
        Ok(())
    }

    fn delete_field(&mut self, target: &Value, key: &str, loc: &SourceLocation) -> Res<()> {
        let obj = match target {
            Value::Wrapped(w) => {
                self.check(w.subject, &w.path.field(key), Right::W, loc)?;
                self.check(w.subject, &w.path, Right::R, loc)?;
                w.inner.clone()
            }
            Value::Obj(o) => o.clone(),
            _ => return Err(self.type_error(loc, format!("cannot delete property `{key}` of {}", target.type_name()))),
        };
        obj.props.borrow_mut().shift_remove(key);
        Ok(())
    }

    /// Field names for `for-in` and serialization.
    pub(super) fn keys(&mut self, target: &Value, loc: &SourceLocation) -> Res<Vec<String>> {
        match target {
            Value::Wrapped(w) => {
                self.check(w.subject, &w.path, Right::R, loc)?;
                Ok(w.inner.props.borrow().keys().cloned().collect())
            }
            Value::Obj(o) => Ok(o.props.borrow().keys().cloned().collect()),
            _ => Ok(Vec::new()),
        }
    }

    pub(super) fn call(&mut self, callee: &Value, args: Vec<Value>, loc: &SourceLocation) -> Res<Value> {
        let obj = match callee {
            Value::Wrapped(w) => {
                self.check(w.subject, &w.path, Right::X, loc)?;
                self.check(w.subject, &w.path, Right::R, loc)?;
                w.inner.clone()
            }
            Value::Obj(o) => o.clone(),
            _ => return Err(self.type_error(loc, format!("{} is not a function", callee.type_name()))),
        };
        match &obj.kind {
            ObjKind::Plain => Err(self.type_error(loc, "object is not a function")),
            ObjKind::Native(b) => self.call_builtin(*b, args, loc),
            ObjKind::Closure { func, env, module, file } => {
                if self.stack.len() >= self.cfg.max_call_depth {
                    return Err(RuntimeError::StackOverflow { location: loc.clone() });
                }
                let cx = Cx {
                    module: *module,
                    file: file.clone(),
                };
                let scope = new_scope(Some(env.clone()), false);
                for (i, p) in func.params.iter().enumerate() {
                    scope.vars.borrow_mut().insert(p.clone(), args.get(i).cloned().unwrap_or_default());
                }
                self.hoist(&func.body, &func.params, &scope, &cx);
                self.stack.push(format!(
                    "{} ({}:{}:{})",
                    func.name.as_deref().unwrap_or("<anonymous>"),
                    file,
                    func.pos.line,
                    func.pos.col
                ));
                let r = self.exec_block(&func.body, &scope, &cx);
                self.stack.pop();
                match r? {
                    Flow::Return(v) => Ok(v),
                    Flow::Normal => Ok(Value::Undefined),
                }
            }
        }
    }

    // ---- modules ----

    fn root_value(&mut self, name: &str, idx: usize) -> Value {
        let m = &self.modules[idx];
        match name {
            "require" => {
                let mut props = IndexMap::new();
                props.insert("cache".to_string(), self.roots.cache.clone());
                Value::Obj(Rc::new(Obj {
                    props: std::cell::RefCell::new(props),
                    kind: ObjKind::Native(Builtin::Require(idx)),
                }))
            }
            "eval" => Value::native(Builtin::Eval(idx)),
            "module" => Value::Obj(m.module_obj.clone()),
            "exports" => Value::Obj(m.initial_exports.clone()),
            "__dirname" => Value::str(&dirname(&m.id)),
            "__filename" => Value::str(&m.id),
            other => self.roots.get(other),
        }
    }

    /// Build the context scope of a module: every default-available name,
    /// monitored with the module's permissions.
    fn make_context(&mut self, idx: usize) {
        let ctx = self.modules[idx].ctx.clone();
        for name in BuiltinCatalog::shipped().names() {
            let raw = self.root_value(name, idx);
            let v = self.wrap(raw, ObjPath::root(name), self.cfg.depth, idx);
            ctx.vars.borrow_mut().insert(name.to_string(), v);
        }
    }

    fn current_exports(&self, idx: usize) -> Value {
        let m = &self.modules[idx];
        let from_module = m.module_obj.props.borrow().get("exports").map(|v| v.unwrapped());
        if let Some(v) = &from_module {
            let same = matches!(v, Value::Obj(o) if Rc::ptr_eq(o, &m.initial_exports));
            if !same {
                return v.clone();
            }
        }
        match m.ctx.vars.borrow().get("exports") {
            Some(v) => v.unwrapped(),
            None => Value::Obj(m.initial_exports.clone()),
        }
    }

    /// Evaluate a source module once; later loads (including cyclic ones
    /// still in progress) return its current exports.
    fn load(&mut self, id: &str) -> Res<Value> {
        if let Some(&i) = self.by_id.get(id) {
            return Ok(match &self.modules[i].exports {
                Some(v) => v.clone(),
                None => self.current_exports(i),
            });
        }
        let src = self.project.load(id).ok_or_else(|| crate::resolve::ResolveError {
            importer: crate::perm::CWD_PREFIX.to_string(),
            name: id.to_string(),
        })?;
        let program = parse(id, &src).map_err(|source| RuntimeError::Parse {
            module: id.to_string(),
            source,
        })?;
        let idx = self.modules.len();
        let initial_exports = Rc::new(Obj {
            props: Default::default(),
            kind: ObjKind::Plain,
        });
        let mut mprops = IndexMap::new();
        mprops.insert("exports".to_string(), Value::Obj(initial_exports.clone()));
        let module_obj = Rc::new(Obj {
            props: std::cell::RefCell::new(mprops),
            kind: ObjKind::Plain,
        });
        self.modules.push(ModuleRec {
            id: id.to_string(),
            module_obj,
            initial_exports: initial_exports.clone(),
            ctx: new_scope(None, true),
            scope: None,
            exports: None,
        });
        self.by_id.insert(id.to_string(), idx);
        let perms = match self.cfg.mode {
            RunMode::Enforce => self.cfg.manifest.module_or_empty(id),
            _ => ModPermSet::new(),
        };
        self.perms.push(perms);
        self.roots
            .cache
            .raw_obj()
            .expect("cache object")
            .props
            .borrow_mut()
            .insert(id.to_string(), Value::Obj(initial_exports));
        self.make_context(idx);
        let scope = new_scope(Some(self.modules[idx].ctx.clone()), false);
        self.modules[idx].scope = Some(scope.clone());
        let cx = Cx {
            module: idx,
            file: program.file.clone(),
        };
        self.hoist(&program.body, &[], &scope, &cx);
        self.exec_block(&program.body, &scope, &cx)?;
        let exports = self.current_exports(idx);
        self.roots
            .cache
            .raw_obj()
            .expect("cache object")
            .props
            .borrow_mut()
            .insert(id.to_string(), exports.clone());
        self.modules[idx].exports = Some(exports.clone());
        Ok(exports)
    }

    /// `require(name)` issued by module `idx`.
    pub(super) fn do_require(&mut self, idx: usize, name: &Value, loc: &SourceLocation) -> Res<Value> {
        let name = name.to_string();
        let importer = self.modules[idx].id.clone();
        let resolved = self.project.resolve(&importer, &name)?;
        let root = ObjPath::import_root(resolved.id());
        self.check(idx, &root, Right::I, loc)?;
        let raw = match &resolved {
            Resolved::Builtin(b) => self.roots.get(b),
            Resolved::File(id) => self.load(id)?,
        };
        Ok(self.wrap(raw, root, self.cfg.depth, idx))
    }

    /// `eval(src)` issued by module `idx`: runs in a fresh scope below the
    /// module's top level, under the module's permissions.
    pub(super) fn do_eval(&mut self, idx: usize, arg: Value, loc: &SourceLocation) -> Res<Value> {
        let Value::Str(src) = &arg else {
            return Ok(arg);
        };
        let file = format!("{}#eval", self.modules[idx].id);
        let program = parse_eval(&file, src).map_err(|source| RuntimeError::Eval {
            location: loc.clone(),
            source,
        })?;
        let parent = self.modules[idx].scope.clone().expect("module scope");
        let scope = new_scope(Some(parent), false);
        let cx = Cx {
            module: idx,
            file: program.file.clone(),
        };
        self.hoist(&program.body, &[], &scope, &cx);
        let mut completion = Value::Undefined;
        for s in &program.body {
            if let StmtKind::Expr(e) = &s.kind {
                completion = self.eval(e, &scope, &cx)?;
                continue;
            }
            if let Flow::Return(v) = self.exec(s, &scope, &cx)? {
                return Ok(v);
            }
        }
        Ok(completion)
    }

    // ---- statements ----

    fn hoist(&mut self, body: &[Stmt], params: &[String], scope: &Env, cx: &Cx) {
        for name in declared_names(body, params) {
            scope.vars.borrow_mut().entry(name).or_insert(Value::Undefined);
        }
        fn fns<'a>(body: &'a [Stmt], out: &mut Vec<&'a Arc<Function>>) {
            for s in body {
                if let StmtKind::Function(f) = &s.kind {
                    out.push(f);
                }
                for b in s.child_blocks() {
                    fns(b, out);
                }
            }
        }
        let mut out = Vec::new();
        fns(body, &mut out);
        for f in out {
            let c = self.closure(f, scope, cx);
            if let Some(n) = &f.name {
                scope.vars.borrow_mut().insert(n.clone(), c);
            }
        }
    }

    fn closure(&self, f: &Arc<Function>, env: &Env, cx: &Cx) -> Value {
        Value::Obj(Rc::new(Obj {
            props: Default::default(),
            kind: ObjKind::Closure {
                func: f.clone(),
                env: env.clone(),
                module: cx.module,
                file: cx.file.clone(),
            },
        }))
    }

    fn exec_block(&mut self, body: &[Stmt], env: &Env, cx: &Cx) -> Res<Flow> {
        for s in body {
            if let Flow::Return(v) = self.exec(s, env, cx)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn exec(&mut self, s: &Stmt, env: &Env, cx: &Cx) -> Res<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::VarDecl { name, init, .. } => {
                let v = self.eval(init, env, cx)?;
                let loc = Self::loc(cx, s.pos);
                self.assign_name(name, v, env, cx, &loc)?;
            }
            StmtKind::Assign { target, value } => self.assign(target, value, env, cx)?,
            StmtKind::Expr(e) => {
                self.eval(e, env, cx)?;
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval(cond, env, cx)?.truthy() {
                    return self.exec_block(then_branch, env, cx);
                } else if let Some(e) = else_branch {
                    return self.exec_block(e, env, cx);
                }
            }
            StmtKind::While { cond, body } => {
                while self.eval(cond, env, cx)?.truthy() {
                    self.tick()?;
                    if let Flow::Return(v) = self.exec_block(body, env, cx)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.exec(init, env, cx)?;
                while self.eval(cond, env, cx)?.truthy() {
                    if let Flow::Return(v) = self.exec_block(body, env, cx)? {
                        return Ok(Flow::Return(v));
                    }
                    self.exec(update, env, cx)?;
                }
            }
            StmtKind::ForIn {
                var,
                var_pos,
                object,
                body,
                ..
            } => {
                let obj = self.eval(object, env, cx)?;
                let loc = Self::loc(cx, object.pos);
                let keys = self.keys(&obj, &loc)?;
                let var_loc = Self::loc(cx, *var_pos);
                for k in keys {
                    self.assign_name(var, Value::str(&k), env, cx, &var_loc)?;
                    if let Flow::Return(v) = self.exec_block(body, env, cx)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Function(_) => {}
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e, env, cx)?,
                    None => Value::Undefined,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Block(b) => return self.exec_block(b, env, cx),
        }
        Ok(Flow::Normal)
    }

    fn global_object(&mut self, env: &Env, cx: &Cx) -> Value {
        match lookup_scope(env, "global") {
            Some(s) => s.vars.borrow().get("global").cloned().unwrap_or_default(),
            None => {
                let g = self.roots.get("global");
                self.wrap(g, ObjPath::root("global"), self.cfg.depth, cx.module)
            }
        }
    }

    fn assign_name(&mut self, name: &str, v: Value, env: &Env, cx: &Cx, loc: &SourceLocation) -> Res<()> {
        match lookup_scope(env, name) {
            Some(s) => {
                if s.is_context && self.cfg.depth > 0 {
                    self.check(cx.module, &ObjPath::root(name), Right::W, loc)?;
                }
                s.vars.borrow_mut().insert(name.to_string(), v);
                Ok(())
            }
            None => {
                let g = self.global_object(env, cx);
                self.set_field(&g, name, v, loc)
            }
        }
    }

    fn property_key(&mut self, p: &Property, env: &Env, cx: &Cx) -> Res<String> {
        Ok(match p {
            Property::Static(s) => s.clone(),
            Property::Dynamic(e) => self.eval(e, env, cx)?.to_string(),
        })
    }

    fn assign(&mut self, target: &Expr, value: &Expr, env: &Env, cx: &Cx) -> Res<()> {
        match &target.kind {
            ExprKind::Ident(n) => {
                let v = self.eval(value, env, cx)?;
                let loc = Self::loc(cx, target.pos);
                self.assign_name(n, v, env, cx, &loc)
            }
            ExprKind::Member { object, property } => {
                let obj = self.eval(object, env, cx)?;
                let key = self.property_key(property, env, cx)?;
                let v = self.eval(value, env, cx)?;
                let loc = Self::loc(cx, target.pos);
                self.set_field(&obj, &key, v, &loc)
            }
            _ => Err(self.type_error(&Self::loc(cx, target.pos), "invalid assignment target")),
        }
    }

    // ---- expressions ----

    pub(super) fn eval(&mut self, e: &Expr, env: &Env, cx: &Cx) -> Res<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Num(n) => Ok(Value::Num(*n)),
            ExprKind::Str(s) => Ok(Value::str(s)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Ident(n) => match lookup_scope(env, n) {
                Some(s) => Ok(s.vars.borrow().get(n).cloned().unwrap_or_default()),
                None => {
                    let g = self.global_object(env, cx);
                    self.get_field(&g, n, &Self::loc(cx, e.pos))
                }
            },
            ExprKind::Member { object, property } => {
                let obj = self.eval(object, env, cx)?;
                let key = self.property_key(property, env, cx)?;
                self.get_field(&obj, &key, &Self::loc(cx, e.pos))
            }
            ExprKind::Call { callee, args } => {
                let f = self.eval(callee, env, cx)?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env, cx)?);
                }
                self.call(&f, vals, &Self::loc(cx, callee.pos))
            }
            ExprKind::Import { arg } | ExprKind::Eval { arg } => {
                let name = if matches!(e.kind, ExprKind::Import { .. }) {
                    "require"
                } else {
                    "eval"
                };
                let callee = Expr::new(ExprKind::Ident(name.to_string()), e.pos);
                let f = self.eval(&callee, env, cx)?;
                let a = self.eval(arg, env, cx)?;
                self.call(&f, vec![a], &Self::loc(cx, e.pos))
            }
            ExprKind::Function(f) => Ok(self.closure(f, env, cx)),
            ExprKind::Object(fields) => {
                let mut props = IndexMap::new();
                for (k, v) in fields {
                    let v = self.eval(v, env, cx)?;
                    props.insert(k.clone(), v);
                }
                Ok(Value::object(props))
            }
            ExprKind::Unary { op, operand } => match op {
                UnaryOp::Not => Ok(Value::Bool(!self.eval(operand, env, cx)?.truthy())),
                UnaryOp::Neg => Ok(Value::Num(-self.eval(operand, env, cx)?.to_number())),
                UnaryOp::Delete => match &operand.kind {
                    ExprKind::Member { object, property } => {
                        let obj = self.eval(object, env, cx)?;
                        let key = self.property_key(property, env, cx)?;
                        self.delete_field(&obj, &key, &Self::loc(cx, operand.pos))?;
                        Ok(Value::Bool(true))
                    }
                    _ => Ok(Value::Bool(false)),
                },
            },
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, env, cx)?;
                match op {
                    BinaryOp::And if !l.truthy() => return Ok(l),
                    BinaryOp::Or if l.truthy() => return Ok(l),
                    BinaryOp::And | BinaryOp::Or => return self.eval(rhs, env, cx),
                    _ => {}
                }
                let r = self.eval(rhs, env, cx)?;
                Ok(binary(*op, &l, &r))
            }
        }
    }

}

fn binary(op: BinaryOp, l: &Value, r: &Value) -> Value {
    let num = |f: fn(f64, f64) -> f64| Value::Num(f(l.to_number(), r.to_number()));
    let cmp = |f: fn(std::cmp::Ordering) -> bool| match (l, r) {
        (Value::Str(a), Value::Str(b)) => Value::Bool(f(a.cmp(b))),
        _ => match l.to_number().partial_cmp(&r.to_number()) {
            Some(o) => Value::Bool(f(o)),
            None => Value::Bool(false),
        },
    };
    match op {
        BinaryOp::Add => match (l, r) {
            (Value::Str(_), _) | (_, Value::Str(_)) => Value::str(&format!("{l}{r}")),
            _ => num(|a, b| a + b),
        },
        BinaryOp::Sub => num(|a, b| a - b),
        BinaryOp::Mul => num(|a, b| a * b),
        BinaryOp::Div => num(|a, b| a / b),
        BinaryOp::Rem => num(|a, b| a % b),
        BinaryOp::Eq => Value::Bool(l.strict_eq(r)),
        BinaryOp::Ne => Value::Bool(!l.strict_eq(r)),
        BinaryOp::Lt => cmp(|o| o.is_lt()),
        BinaryOp::Gt => cmp(|o| o.is_gt()),
        BinaryOp::Le => cmp(|o| o.is_le()),
        BinaryOp::Ge => cmp(|o| o.is_ge()),
        BinaryOp::And | BinaryOp::Or => unreachable!("short-circuit handled by caller"),
    }
}
