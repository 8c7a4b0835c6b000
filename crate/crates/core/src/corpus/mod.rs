//! Fixture programs and payloads shared by tests, benches and the CLI demo.

pub mod gen;

use std::collections::BTreeMap;

use crate::lang::quote;
use crate::perm::{Mode, ModPermSet, ObjPath, Right};
use crate::resolve::Project;
use crate::runtime::{RunMode, RuntimeConfig};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub files: Vec<(&'static str, String)>,
    pub entry: &'static str,
    pub fs_seed: BTreeMap<String, String>,
    pub argv: Vec<String>,
    pub env: BTreeMap<String, String>,
}

impl Fixture {
    fn new(name: &'static str, files: &[(&'static str, &str)]) -> Self {
        Fixture {
            name,
            files: files.iter().map(|(k, v)| (*k, v.to_string())).collect(),
            entry: "main.mjs",
            fs_seed: BTreeMap::new(),
            argv: Vec::new(),
            env: BTreeMap::new(),
        }
    }

    fn fs(mut self, path: &str, text: &str) -> Self {
        self.fs_seed.insert(path.into(), text.into());
        self
    }

    fn env(mut self, k: &str, v: &str) -> Self {
        self.env.insert(k.into(), v.into());
        self
    }

    fn argv(mut self, args: &[&str]) -> Self {
        self.argv = args.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn project(&self) -> Project {
        Project::in_memory(self.files.iter().map(|(k, v)| (*k, v.clone())))
    }

    pub fn entry_id(&self) -> String {
        self.project().canonicalize(self.entry)
    }

    /// Runtime configuration for this fixture with its seeds applied.
    pub fn config(&self, mode: RunMode) -> RuntimeConfig {
        let mut cfg = RuntimeConfig::new(self.entry_id(), mode);
        cfg.fs_seed = self.fs_seed.clone();
        cfg.argv = self.argv.clone();
        cfg.env = self.env.clone();
        cfg
    }
}

pub const LOG_SRC: &str = r#"let levels = {WARN: 1, INFO: 2};
module.exports = {
  levels: levels,
  LVL: 2,
  info: function(s) { console.log("info: " + s); }
};
"#;

pub const SERIAL_SRC: &str = r#"let lg = require("log");
lg.LVL = lg.levels.WARN;
module.exports = {
  dec: function(str) {
    let v = eval(str);
    lg.info("decoded");
    return v;
  }
};
"#;

pub const MAIN_SRC: &str = r#"let srl = require("serial");
let r = srl.dec("1 + 2");
"#;

/// The three-module deserialization example.
pub fn worked_example() -> Fixture {
    Fixture::new("worked-example", &[("main.mjs", MAIN_SRC), ("serial.mjs", SERIAL_SRC), ("log.mjs", LOG_SRC)])
}

pub const EVAL_MODULE_SRC: &str = "exports = function(p) { return eval(p); };\n";

/// A module that evaluates whatever string it is given, driven by `main`.
pub fn eval_harness(payload: &str) -> Fixture {
    let main = format!("let e = require(\"./e\");\nconsole.log(e({}));\n", quote(payload));
    let mut f = Fixture::new("eval-harness", &[("e.mjs", EVAL_MODULE_SRC)]);
    f.files.push(("main.mjs", main));
    f.fs("/etc/passwd", "root:x:0:0")
        .env("SECRET", "hunter2")
        .argv(&["node", "app", "--token=abc"])
}

/// The permissions the eval module is given in the attack experiment.
pub fn eval_module_grant() -> ModPermSet {
    let mut m = ModPermSet::new();
    m.grant(ObjPath::root("eval"), Mode::of(&[Right::R, Right::X]));
    m.grant(ObjPath::root("exports"), Mode::of(&[Right::W]));
    m
}

/// Which row of the attack table a payload exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttackRow {
    GlobalWrite,
    RequireCache,
    ProcessArgv,
    ProcessEnv,
    FsRead,
    Spawn,
    MathLog,
    OsEol,
    Other,
}

pub const ATTACK_ROWS: [AttackRow; 8] = [
    AttackRow::GlobalWrite,
    AttackRow::RequireCache,
    AttackRow::ProcessArgv,
    AttackRow::ProcessEnv,
    AttackRow::FsRead,
    AttackRow::Spawn,
    AttackRow::MathLog,
    AttackRow::OsEol,
];

pub fn attack_payloads() -> Vec<(AttackRow, &'static str)> {
    use AttackRow::*;
    vec![
        (GlobalWrite, "x = 1"),
        (GlobalWrite, "global.x = 1"),
        (GlobalWrite, "global.y = \"pwned\""),
        (GlobalWrite, "let g = global; g.z = 3"),
        (GlobalWrite, "delete global.x"),
        (GlobalWrite, "eval(\"global.x = 1\")"),
        (GlobalWrite, "counter = counter + 1"),
        (RequireCache, "require.cache"),
        (RequireCache, "let c = require.cache; c"),
        (RequireCache, "require.cache.main = 1"),
        (RequireCache, "for (let k in require.cache) { k; }"),
        (RequireCache, "delete require.cache[\"__CWD__/main.mjs\"]"),
        (ProcessArgv, "process.argv"),
        (ProcessArgv, "process.argv[\"2\"]"),
        (ProcessArgv, "let a = process.argv; a"),
        (ProcessArgv, "JSON.stringify(process.argv)"),
        (ProcessArgv, "for (let i in process.argv) { i; }"),
        (ProcessEnv, "process.env"),
        (ProcessEnv, "process.env.SECRET"),
        (ProcessEnv, "let v = process.env; v.SECRET"),
        (ProcessEnv, "process.env.PATH = \"/evil\""),
        (ProcessEnv, "for (let k in process.env) { k; }"),
        (ProcessEnv, "process[\"env\"]"),
        (FsRead, "require(\"fs\").read(\"/etc/passwd\")"),
        (FsRead, "let f = require(\"fs\"); f.read(\"/etc/passwd\")"),
        (FsRead, "fs.read(\"/etc/passwd\")"),
        (FsRead, "require(\"fs\")"),
        (FsRead, "require(\"fs\").write(\"/etc/passwd\", \"x\")"),
        (FsRead, "let n = \"f\" + \"s\"; require(n).read(\"/etc/passwd\")"),
        (Spawn, "require(\"child_process\").spawn(\"sh\", \"-c\", \"id\")"),
        (Spawn, "child_process.spawn(\"ls\")"),
        (Spawn, "let cp = require(\"child_process\"); cp.spawn(\"rm\", \"-rf\")"),
        (Spawn, "require(\"child_process\")"),
        (Spawn, "let s = child_process.spawn; s(\"id\")"),
        (MathLog, "Math.log(2)"),
        (MathLog, "let m = Math; m.log(10)"),
        (MathLog, "Math.abs(-1)"),
        (MathLog, "Math.max(1, 2)"),
        (MathLog, "Math.floor(2.5)"),
        (MathLog, "let l = Math.log; l(1)"),
        (OsEol, "require(\"os\").EOL"),
        (OsEol, "os.EOL"),
        (OsEol, "\"a\" + os.EOL"),
        (OsEol, "let o = require(\"os\"); o.EOL"),
        (Other, "console.log(\"leak\")"),
        (Other, "JSON.parse(\"1\")"),
        (Other, "module.exports = 1"),
        (Other, "require(\"./e\")"),
    ]
}

/// Payloads that touch nothing outside the module, with the line each
/// prints.
pub fn benign_payloads() -> Vec<(&'static str, &'static str)> {
    vec![
        ("2+2", "4"),
        ("3 * 7", "21"),
        ("10 - 4", "6"),
        ("(1 + 2) * 3", "9"),
        ("7 / 2", "3.5"),
        ("10 % 3", "1"),
        ("\"a\" + \"b\"", "ab"),
        ("\"n\" + 1", "n1"),
        ("1 < 2", "true"),
        ("let a = 5; a * 2", "10"),
        ("let o = {v: 4}; o.v + 1", "5"),
        ("function sq(n) { return n * n; } sq(9)", "81"),
        ("!false && 2 == 2", "true"),
        ("-(3 - 8)", "5"),
    ]
}

/// Re-exports every field of `fs`, which static inference cannot follow.
pub fn fs_reexport() -> Fixture {
    Fixture::new(
        "fs-reexport",
        &[
            ("fsx.mjs", "let fs = require(\"fs\");\nfor (let k in fs) {\n  module.exports[k] = fs[k];\n}\n"),
            ("main.mjs", "let f = require(\"./fsx\");\nconsole.log(f.read(\"/data.txt\"));\n"),
        ],
    )
    .fs("/data.txt", "payload")
}

/// Programs that run to completion and exercise one feature each.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![worked_example(), eval_harness("2+2"), fs_reexport()];
    out.push(Fixture::new(
        "cycle",
        &[
            ("main.mjs", "let a = require(\"./a\");\nconsole.log(a.name + \":\" + a.peer());\n"),
            ("a.mjs", "exports.name = \"a\";\nlet b = require(\"./b\");\nexports.peer = function() { return b.name; };\n"),
            ("b.mjs", "let a = require(\"./a\");\nexports.name = \"b\" + a.name;\n"),
        ],
    ));
    out.push(
        Fixture::new(
            "config",
            &[(
                "main.mjs",
                "let home = process.env.HOME;\nlet args = process.argv;\nconsole.log(home);\nif (args) { console.log(\"args\"); }\n",
            )],
        )
        .env("HOME", "/home/u")
        .argv(&["a", "b"]),
    );
    out.push(Fixture::new(
        "json",
        &[(
            "main.mjs",
            "let o = JSON.parse(\"{\\\"a\\\": 1, \\\"b\\\": [2, 3]}\");\no.c = o.a + 1;\nconsole.log(JSON.stringify(o));\n",
        )],
    ));
    out.push(Fixture::new(
        "math",
        &[(
            "main.mjs",
            "let m = Math;\nlet v = m.max(m.abs(-4), m.floor(2.7));\nconsole.log(v + Math.log(1));\n",
        )],
    ));
    out.push(
        Fixture::new(
            "fs-rw",
            &[(
                "main.mjs",
                "let fs = require(\"fs\");\nfs.write(\"/out.txt\", fs.read(\"/in.txt\") + \"!\");\nconsole.log(fs.read(\"/out.txt\"));\n",
            )],
        )
        .fs("/in.txt", "hello"),
    );
    out.push(Fixture::new(
        "spawn",
        &[
            ("main.mjs", "let run = require(\"./runner\");\nrun.go(\"ls\");\n"),
            ("runner.mjs", "let cp = require(\"child_process\");\nexports.go = function(c) { cp.spawn(c, \"-l\"); };\n"),
        ],
    ));
    out.push(Fixture::new(
        "os",
        &[("main.mjs", "let os = require(\"os\");\nconsole.log(\"line\" + os.EOL + \"next\");\n")],
    ));
    out.push(Fixture::new(
        "globals",
        &[
            ("main.mjs", "counter = 1;\nglobal.limit = 5;\nlet s = require(\"./side\");\ns.bump();\nconsole.log(counter + global.limit);\n"),
            ("side.mjs", "exports.bump = function() { counter = counter + 1; };\n"),
        ],
    ));
    out.push(Fixture::new(
        "exports-binding",
        &[
            ("main.mjs", "let u = require(\"./util\");\nconsole.log(u.twice(u.base));\n"),
            ("util.mjs", "exports.base = 21;\nexports.twice = function(n) { return n * 2; };\n"),
        ],
    ));
    out.push(Fixture::new(
        "deep-chain",
        &[
            ("main.mjs", "let c = require(\"./conf\");\nconsole.log(c.db.primary.host);\nc.db.primary.port = 1;\n"),
            ("conf.mjs", "module.exports = {db: {primary: {host: \"h\", port: 0}}};\n"),
        ],
    ));
    out.push(Fixture::new(
        "closure",
        &[
            ("main.mjs", "let k = require(\"./counter\");\nlet c = k.make();\nc();\nconsole.log(c());\n"),
            ("counter.mjs", "exports.make = function() {\n  let n = 0;\n  return function() { n = n + 1; return n; };\n};\n"),
        ],
    ));
    out.push(Fixture::new(
        "loops",
        &[(
            "main.mjs",
            "let total = 0;\nfor (let i = 0; i < 4; i = i + 1) {\n  total = total + Math.abs(0 - i);\n}\nlet j = 0;\nwhile (j < 2) { j = j + 1; }\nconsole.log(total + j);\n",
        )],
    ));
    out.push(Fixture::new(
        "for-in",
        &[
            ("main.mjs", "let t = require(\"./table\");\nlet keys = \"\";\nfor (let k in t) { keys = keys + k; }\nconsole.log(keys);\n"),
            ("table.mjs", "module.exports = {a: 1, b: 2};\n"),
        ],
    ));
    out.push(Fixture::new(
        "delete",
        &[
            ("main.mjs", "let s = require(\"./store\");\ndelete s.tmp;\nconsole.log(s.keep);\n"),
            ("store.mjs", "module.exports = {tmp: 1, keep: 2};\n"),
        ],
    ));
    out.push(Fixture::new(
        "require-cache",
        &[("main.mjs", "let c = require.cache;\nlet n = 0;\nfor (let k in c) { n = n + 1; }\nconsole.log(n);\n")],
    ));
    out.push(Fixture::new(
        "lib-eval",
        &[
            ("main.mjs", "let calc = require(\"./calc\");\nconsole.log(calc.run(\"6 * 7\"));\n"),
            ("calc.mjs", "exports.run = function(s) { return eval(s); };\n"),
        ],
    ));
    out.push(Fixture::new(
        "nested-dirs",
        &[
            ("main.mjs", "let a = require(\"./lib/a\");\nconsole.log(a.hello());\n"),
            ("lib/a.mjs", "let h = require(\"../helpers/h\");\nexports.hello = function() { return h.greet(\"a\"); };\n"),
            ("helpers/h.mjs", "exports.greet = function(n) { return \"hi \" + n; };\n"),
        ],
    ));
    out.push(Fixture::new(
        "diamond",
        &[
            ("main.mjs", "let a = require(\"./a\");\nlet b = require(\"./b\");\nconsole.log(a.v + b.v);\n"),
            ("a.mjs", "let c = require(\"./c\");\nexports.v = c.base + 1;\n"),
            ("b.mjs", "let c = require(\"./c\");\nexports.v = c.base + 2;\n"),
            ("c.mjs", "exports.base = 10;\n"),
        ],
    ));
    out.push(Fixture::new(
        "filename",
        &[("main.mjs", "console.log(__filename);\nconsole.log(__dirname);\n")],
    ));
    out.push(Fixture::new(
        "method-alias",
        &[
            ("main.mjs", "let p = require(\"./printer\");\nlet f = p.show;\nf(\"x\");\nlet o = {log: console.log};\no.log(\"y\");\n"),
            ("printer.mjs", "let out = console;\nexports.show = function(s) { out.log(\"[\" + s + \"]\"); };\n"),
        ],
    ));
    out.push(Fixture::new(
        "mutate-import",
        &[
            ("main.mjs", "let st = require(\"./state\");\nst.level = 3;\nconsole.log(st.get());\n"),
            ("state.mjs", "module.exports = {level: 1, get: function() { return module.exports.level; }};\n"),
        ],
    ));
    out
}
