//! Seeded generator for programs in the dynamic-free class: static property
//! names only, no `eval`, literal imports only, and API values never passed
//! to or returned from calls. API aliases are bound once, before any function
//! that uses them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::quote;
use crate::resolve::Project;

#[derive(Debug, Clone)]
pub struct GeneratedProgram {
    pub seed: u64,
    pub files: Vec<(String, String)>,
    pub entry: String,
}

impl GeneratedProgram {
    pub fn project(&self) -> Project {
        Project::in_memory(self.files.iter().map(|(k, v)| (k.as_str(), v.clone())))
    }

    pub fn line_count(&self) -> usize {
        self.files.iter().map(|(_, s)| s.lines().count()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Math,
    MathFn,
    Console,
    ConsoleLog,
    Process,
    Env,
    Fs,
    FsRead,
    Os,
    ChildProcess,
    Json,
    Global,
    /// The generated library's exports.
    Lib,
    LibSub,
    LibFn,
}

#[derive(Debug, Clone)]
struct Handle {
    expr: String,
    kind: Kind,
}

#[derive(Debug, Clone, Default)]
struct LibShape {
    fns: Vec<String>,
    values: Vec<String>,
    sub_fns: Vec<String>,
    sub_values: Vec<String>,
}

struct Gen {
    rng: ChaCha8Rng,
    lines: Vec<String>,
    indent: usize,
    handles: Vec<Handle>,
    nums: Vec<String>,
    strs: Vec<String>,
    /// Local functions `f(a) -> number`, callable after their definition.
    funcs: Vec<String>,
    fresh: usize,
    lib: Option<LibShape>,
    globals: Vec<String>,
}

impl Gen {
    fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            lines: Vec::new(),
            indent: 0,
            handles: Vec::new(),
            nums: Vec::new(),
            strs: Vec::new(),
            funcs: Vec::new(),
            fresh: 0,
            lib: None,
            globals: Vec::new(),
        }
    }

    fn reset_module(&mut self) {
        self.lines.clear();
        self.indent = 0;
        self.handles.clear();
        self.nums.clear();
        self.strs.clear();
        self.funcs.clear();
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn emit(&mut self, line: impl AsRef<str>) {
        let pad = "  ".repeat(self.indent);
        self.lines.push(format!("{pad}{}", line.as_ref()));
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> Option<T> {
        xs.choose(&mut self.rng).cloned()
    }

    fn num_expr(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 | 1 if !self.nums.is_empty() => {
                let v = self.pick(&self.nums.clone()).expect("num");
                if self.chance(0.3) {
                    format!("{v} + {}", self.rng.gen_range(1..9))
                } else {
                    v
                }
            }
            2 if self.nums.len() >= 2 => {
                let a = self.pick(&self.nums.clone()).expect("num");
                let b = self.pick(&self.nums.clone()).expect("num");
                format!("{a} * {b}")
            }
            _ => self.rng.gen_range(0..20).to_string(),
        }
    }

    fn printable(&mut self) -> String {
        if !self.strs.is_empty() && self.chance(0.4) {
            let s = self.pick(&self.strs.clone()).expect("str");
            return format!("\"s:\" + {s}");
        }
        if self.chance(0.5) {
            quote(&format!("msg {}", self.rng.gen_range(0..100)))
        } else {
            self.num_expr()
        }
    }

    fn root_handle(&mut self) -> Handle {
        let roots = [
            ("Math", Kind::Math),
            ("console", Kind::Console),
            ("process", Kind::Process),
            ("JSON", Kind::Json),
            ("global", Kind::Global),
            ("require(\"fs\")", Kind::Fs),
            ("require(\"os\")", Kind::Os),
            ("require(\"child_process\")", Kind::ChildProcess),
            ("fs", Kind::Fs),
            ("os", Kind::Os),
        ];
        let (e, k) = *roots.choose(&mut self.rng).expect("roots");
        Handle { expr: e.into(), kind: k }
    }

    /// Any handle usable right now: an alias, a root, or (in the main
    /// module) the library.
    fn any_handle(&mut self) -> Handle {
        if !self.handles.is_empty() && self.chance(0.6) {
            let hs = self.handles.clone();
            return self.pick(&hs).expect("handle");
        }
        self.root_handle()
    }

    fn new_num(&mut self, rhs: String) {
        let n = self.name("n");
        self.emit(format!("let {n} = {rhs};"));
        self.nums.push(n);
    }

    fn new_str(&mut self, rhs: String) {
        let s = self.name("s");
        self.emit(format!("let {s} = {rhs};"));
        self.strs.push(s);
    }

    /// Bind an alias to an API value (top level only).
    fn alias(&mut self) {
        let h = self.any_handle();
        let (expr, kind) = match h.kind {
            Kind::Math if self.chance(0.5) => (format!("{}.{}", h.expr, self.pick(&["abs", "floor", "max", "log"]).unwrap()), Kind::MathFn),
            Kind::Console if self.chance(0.5) => (format!("{}.log", h.expr), Kind::ConsoleLog),
            Kind::Process if self.chance(0.6) => (format!("{}.env", h.expr), Kind::Env),
            Kind::Fs if self.chance(0.4) => (format!("{}.read", h.expr), Kind::FsRead),
            Kind::Lib => {
                let shape = self.lib.clone().unwrap_or_default();
                if !shape.fns.is_empty() && self.chance(0.5) {
                    let f = self.pick(&shape.fns).unwrap();
                    (format!("{}.{f}", h.expr), Kind::LibFn)
                } else {
                    (format!("{}.sub", h.expr), Kind::LibSub)
                }
            }
            Kind::MathFn | Kind::ConsoleLog | Kind::Env | Kind::FsRead | Kind::LibFn | Kind::LibSub => (h.expr.clone(), h.kind),
            k => (h.expr.clone(), k),
        };
        if matches!(kind, Kind::Global) && expr != "global" {
            return;
        }
        let v = self.name("v");
        if self.chance(0.25) {
            let n = self.num_expr();
            self.emit(format!("let {v} = {{api: {expr}, k: {n}}};"));
            self.handles.push(Handle {
                expr: format!("{v}.api"),
                kind,
            });
        } else {
            self.emit(format!("let {v} = {expr};"));
            self.handles.push(Handle { expr: v, kind });
        }
    }

    /// One statement that uses an API without binding a new alias.
    fn use_api(&mut self) {
        let h = self.any_handle();
        match h.kind {
            Kind::Math => {
                let f = self.pick(&["abs", "floor", "log"]).unwrap();
                let a = self.num_expr();
                if self.chance(0.3) {
                    let b = self.num_expr();
                    self.new_num(format!("{}.max({a}, {b})", h.expr));
                } else {
                    self.new_num(format!("{}.{f}({a})", h.expr));
                }
            }
            Kind::MathFn => {
                let a = self.num_expr();
                self.new_num(format!("{}({a})", h.expr));
            }
            Kind::Console => {
                let p = self.printable();
                self.emit(format!("{}.log({p});", h.expr));
            }
            Kind::ConsoleLog => {
                let p = self.printable();
                self.emit(format!("{}({p});", h.expr));
            }
            Kind::Process => {
                if self.chance(0.5) {
                    self.new_str(format!("{}.env.HOME", h.expr));
                } else {
                    let n = self.name("c");
                    self.emit(format!("let {n} = 0;"));
                    self.emit(format!("if ({}.argv) {{ {n} = 1; }}", h.expr));
                    self.nums.push(n);
                }
            }
            Kind::Env => {
                let var = self.pick(&["HOME", "USER", "MODE"]).unwrap();
                self.new_str(format!("{}.{var}", h.expr));
            }
            Kind::Fs => {
                let path = format!("/tmp/f{}", self.rng.gen_range(0..4));
                if self.chance(0.5) {
                    let p = self.printable();
                    self.emit(format!("{}.write({}, {p});", h.expr, quote(&path)));
                } else {
                    self.new_str(format!("{}.read({})", h.expr, quote(&path)));
                }
            }
            Kind::FsRead => {
                let path = format!("/tmp/f{}", self.rng.gen_range(0..4));
                self.new_str(format!("{}({})", h.expr, quote(&path)));
            }
            Kind::Os => self.new_str(format!("{}.EOL", h.expr)),
            Kind::ChildProcess => {
                let n = self.num_expr();
                self.emit(format!("{}.spawn(\"ls\", {n});", h.expr));
            }
            Kind::Json => {
                if self.chance(0.5) {
                    let n = self.num_expr();
                    self.new_str(format!("{}.stringify({{a: {n}, b: \"t\"}})", h.expr));
                } else {
                    let o = self.name("j");
                    self.emit(format!("let {o} = {}.parse(\"{{\\\"x\\\": 4}}\");", h.expr));
                    self.new_num(format!("{o}.x"));
                }
            }
            Kind::Global => {
                if h.expr != "global" {
                    return;
                }
                let g = self.global_name();
                if self.chance(0.5) {
                    let n = self.num_expr();
                    self.emit(format!("global.{g} = {n};"));
                } else {
                    self.new_num(format!("global.{g}"));
                }
            }
            Kind::Lib => self.use_lib(&h.expr),
            Kind::LibSub => {
                let shape = self.lib.clone().unwrap_or_default();
                if let (true, Some(f)) = (self.chance(0.5), self.pick(&shape.sub_fns)) {
                    let a = self.num_expr();
                    self.new_num(format!("{}.{f}({a})", h.expr));
                } else if let Some(v) = self.pick(&shape.sub_values) {
                    self.new_num(format!("{}.{v}", h.expr));
                }
            }
            Kind::LibFn => {
                let a = self.num_expr();
                self.new_num(format!("{}({a})", h.expr));
            }
        }
    }

    fn global_name(&mut self) -> String {
        if !self.globals.is_empty() && self.chance(0.6) {
            let gs = self.globals.clone();
            return self.pick(&gs).unwrap();
        }
        let g = format!("g{}", self.rng.gen_range(0..6));
        if !self.globals.contains(&g) {
            self.globals.push(g.clone());
        }
        g
    }

    fn use_lib(&mut self, base: &str) {
        let shape = self.lib.clone().unwrap_or_default();
        match self.rng.gen_range(0..5) {
            0 if !shape.fns.is_empty() => {
                let f = self.pick(&shape.fns).unwrap();
                let a = self.num_expr();
                self.new_num(format!("{base}.{f}({a})"));
            }
            1 if !shape.values.is_empty() => {
                let v = self.pick(&shape.values).unwrap();
                self.new_num(format!("{base}.{v}"));
            }
            2 if !shape.values.is_empty() => {
                let v = self.pick(&shape.values).unwrap();
                let n = self.num_expr();
                self.emit(format!("{base}.{v} = {n};"));
            }
            3 if !shape.sub_fns.is_empty() => {
                let f = self.pick(&shape.sub_fns).unwrap();
                let a = self.num_expr();
                self.new_num(format!("{base}.sub.{f}({a})"));
            }
            _ if !shape.sub_values.is_empty() => {
                let v = self.pick(&shape.sub_values).unwrap();
                self.new_num(format!("{base}.sub.{v}"));
            }
            _ => {}
        }
    }

    /// A statement not touching APIs.
    fn plain(&mut self) {
        match self.rng.gen_range(0..4) {
            0 => {
                let e = self.num_expr();
                self.new_num(e);
            }
            1 if !self.funcs.is_empty() => {
                let f = self.pick(&self.funcs.clone()).unwrap();
                let a = self.num_expr();
                self.new_num(format!("{f}({a})"));
            }
            2 => {
                let o = self.name("o");
                let a = self.num_expr();
                self.emit(format!("let {o} = {{p: {a}, q: \"w\"}};"));
                self.emit(format!("{o}.p = {o}.p + 1;"));
                self.nums.push(format!("{o}.p"));
            }
            _ => {
                let g = self.global_name();
                let n = self.num_expr();
                self.emit(format!("{g} = {n};"));
                self.new_num(g);
            }
        }
    }

    fn stmt(&mut self, depth: usize) {
        let r = self.rng.gen_range(0..10);
        match r {
            0 if depth < 2 => {
                let c = self.cond();
                self.emit(format!("if ({c}) {{"));
                self.block(depth + 1);
                if self.chance(0.5) {
                    self.emit("} else {");
                    self.block(depth + 1);
                }
                self.emit("}");
            }
            1 if depth < 2 => {
                let i = self.name("i");
                self.emit(format!("let {i} = 0;"));
                self.emit(format!("while ({i} < 2) {{"));
                self.block(depth + 1);
                self.indent += 1;
                self.emit(format!("{i} = {i} + 1;"));
                self.indent -= 1;
                self.emit("}");
            }
            2 if depth < 2 => {
                let j = self.name("j");
                self.emit(format!("for (let {j} = 0; {j} < 2; {j} = {j} + 1) {{"));
                self.block(depth + 1);
                self.emit("}");
            }
            3 if depth < 2 => {
                let k = self.name("k");
                let h = self.any_handle();
                let cnt = self.name("n");
                self.emit(format!("let {cnt} = 0;"));
                self.emit(format!("for (let {k} in {}) {{ {cnt} = {cnt} + 1; }}", h.expr));
                self.nums.push(cnt);
            }
            4..=7 => self.use_api(),
            _ => self.plain(),
        }
    }

    fn cond(&mut self) -> String {
        if self.chance(0.4) {
            let h = self.any_handle();
            match h.kind {
                Kind::Process => return format!("{}.env.HOME", h.expr),
                Kind::Os => return format!("{}.EOL", h.expr),
                _ => {}
            }
        }
        let n = self.num_expr();
        format!("{n} > {}", self.rng.gen_range(0..10))
    }

    /// Nested statements; new bindings made inside are scoped away afterwards
    /// so later code never relies on a branch having run.
    fn block(&mut self, depth: usize) {
        let (nums, strs) = (self.nums.len(), self.strs.len());
        self.indent += 1;
        let n = self.rng.gen_range(1..4);
        for _ in 0..n {
            self.stmt(depth);
        }
        self.indent -= 1;
        self.nums.truncate(nums);
        self.strs.truncate(strs);
    }

    fn function(&mut self) -> String {
        let f = self.name("f");
        self.emit(format!("function {f}(a) {{"));
        let (nums, strs) = (self.nums.len(), self.strs.len());
        self.nums.push("a".into());
        self.indent += 1;
        for _ in 0..self.rng.gen_range(1..4) {
            self.stmt(1);
        }
        let e = self.num_expr();
        self.emit(format!("return {e} + a;"));
        self.indent -= 1;
        self.emit("}");
        self.nums.truncate(nums);
        self.strs.truncate(strs);
        self.funcs.push(f.clone());
        f
    }

    fn body(&mut self, aliases: usize, stmts: usize, functions: usize) -> Vec<String> {
        for _ in 0..aliases {
            self.alias();
        }
        for _ in 0..stmts {
            self.stmt(0);
        }
        let mut fns = Vec::new();
        for _ in 0..functions {
            fns.push(self.function());
        }
        for _ in 0..stmts / 2 {
            self.stmt(0);
        }
        fns
    }

    fn library(&mut self, size: usize) -> (String, LibShape) {
        self.reset_module();
        let n = self.rng.gen_range(1..4);
        let fns = self.body(n, size, 3);
        let shape = LibShape {
            fns: fns[..2].to_vec(),
            values: vec!["v".into(), "w".into()],
            sub_fns: fns[2..].to_vec(),
            sub_values: vec!["x".into()],
        };
        if self.chance(0.5) {
            self.emit(format!(
                "module.exports = {{{}: {}, {}: {}, v: 3, w: 4, sub: {{x: 5, {}: {}}}}};",
                fns[0], fns[0], fns[1], fns[1], fns[2], fns[2]
            ));
        } else {
            self.emit(format!("exports.{} = {};", fns[0], fns[0]));
            self.emit(format!("exports.{} = {};", fns[1], fns[1]));
            self.emit("exports.v = 3;");
            self.emit("exports.w = 4;");
            self.emit(format!("exports.sub = {{x: 5, {}: {}}};", fns[2], fns[2]));
        }
        (self.lines.join("\n") + "\n", shape)
    }

    fn main_module(&mut self, size: usize) -> String {
        self.reset_module();
        let l = self.name("L");
        self.emit(format!("let {l} = require(\"./lib\");"));
        self.handles.push(Handle { expr: l, kind: Kind::Lib });
        let n = self.rng.gen_range(1..4);
        self.body(n, size, 1);
        self.lines.join("\n") + "\n"
    }
}

/// A two-module program (entry `main.mjs` importing `lib.mjs`).
pub fn generate_dynamic_free(seed: u64) -> GeneratedProgram {
    generate_sized(seed, 8)
}

/// As [`generate_dynamic_free`], with roughly `size` top-level statements
/// per module.
pub fn generate_sized(seed: u64, size: usize) -> GeneratedProgram {
    let mut g = Gen::new(seed);
    let (lib, shape) = g.library(size);
    g.lib = Some(shape);
    let main = g.main_module(size);
    GeneratedProgram {
        seed,
        files: vec![("main.mjs".into(), main), ("lib.mjs".into(), lib)],
        entry: "main.mjs".into(),
    }
}

/// A prelude binding some API aliases and a loop body using them. The body
/// may be placed under `while (c)` or `if (c)`.
pub fn generate_loop_body(seed: u64) -> (String, String) {
    let mut g = Gen::new(seed);
    for _ in 0..g.rng.gen_range(1..4) {
        g.alias();
    }
    let prelude = g.lines.join("\n");
    g.lines.clear();
    g.indent = 1;
    for _ in 0..g.rng.gen_range(1..5) {
        g.stmt(1);
    }
    (prelude, g.lines.join("\n"))
}

/// Many modules with no imports between them, about `lines` lines in total.
pub fn generate_corpus(seed: u64, lines: usize) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut total = 0;
    let mut i = 0u64;
    while total < lines {
        let p = generate_sized(seed.wrapping_add(i), 40);
        for (name, src) in p.files {
            total += src.lines().count();
            out.push((format!("m{i}/{name}"), src));
        }
        i += 1;
    }
    out
}
