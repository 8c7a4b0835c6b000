use permguard::corpus::{eval_harness, eval_module_grant, fixtures, worked_example};
use permguard::infer::infer_program;
use permguard::par::Parallelism;
use permguard::perm::{parse_manifest, FullPermSet, ObjPath, Right};
use permguard::resolve::Project;
use permguard::runtime::{run, trace_log, RunMode, RuntimeConfig, RuntimeError};

fn project(files: &[(&str, &str)]) -> Project {
    Project::in_memory(files.iter().copied())
}

fn enforce(p: &Project, manifest: &str) -> permguard::runtime::RunOutcome {
    let cfg = RuntimeConfig::new("__CWD__/main.mjs", RunMode::Enforce).with_manifest(parse_manifest(manifest).unwrap());
    run(p, &cfg)
}

#[test]
fn primitive_exports_pass_through_unchanged() {
    let p = project(&[
        ("main.mjs", "let n = require(\"./num\");\nconsole.log(n + 1);"),
        ("num.mjs", "module.exports = 42;"),
    ]);
    let out = enforce(
        &p,
        r#"{"__CWD__/main.mjs": {"require": "RX", "require('__CWD__/num.mjs')": "RI", "console": "R", "console.log": "RX"},
            "__CWD__/num.mjs": {"module": "R", "module.exports": "W"}}"#,
    );
    assert_eq!(out.error, None);
    assert_eq!(out.stdout, "43\n");
}

#[test]
fn granted_call_allowed_ungranted_write_denied() {
    let p = project(&[
        ("main.mjs", "let lg = require(\"log\");\nlg.info(\"x\");\nlg.LVL = 1;"),
        ("log.mjs", permguard::corpus::LOG_SRC),
    ]);
    let out = enforce(
        &p,
        r#"{"__CWD__/main.mjs": {"require": "RX", "require('__CWD__/log.mjs')": "RI", "require('__CWD__/log.mjs').info": "RX"},
            "__CWD__/log.mjs": {"module": "R", "module.exports": "W", "console": "R", "console.log": "RX"}}"#,
    );
    assert_eq!(out.stdout, "info: x\n");
    let ace = out.access_violation().expect("write must be denied");
    assert_eq!(ace.kind, Right::W);
    assert_eq!(ace.path.to_string(), "require('__CWD__/log.mjs').LVL");
    assert_eq!(ace.module, "__CWD__/main.mjs");
    assert_eq!(ace.location.line, 3);
}

#[test]
fn import_needs_the_import_right() {
    let p = project(&[("main.mjs", "let f = require(\"fs\");")]);
    let out = enforce(&p, r#"{"__CWD__/main.mjs": {"require": "RX"}}"#);
    let ace = out.access_violation().unwrap();
    assert_eq!((ace.kind, ace.path.to_string().as_str()), (Right::I, "require('fs')"));

    let ok = enforce(&p, r#"{"__CWD__/main.mjs": {"require": "RX", "require('fs')": "RI"}}"#);
    assert_eq!(ok.error, None);
}

#[test]
fn unknown_module_is_a_resolve_error() {
    let p = project(&[("main.mjs", "let f = require(\"nope\");")]);
    let out = run(&p, &RuntimeConfig::new("__CWD__/main.mjs", RunMode::Trace));
    assert!(matches!(out.error, Some(RuntimeError::Resolve(_))));
}

#[test]
fn circular_imports_see_partial_exports() {
    let f = fixtures().into_iter().find(|f| f.name == "cycle").unwrap();
    let out = run(&f.project(), &f.config(RunMode::Unmonitored));
    assert_eq!(out.error, None);
    assert_eq!(out.stdout, "a:ba\n");
    assert_eq!(out.loaded.len(), 3);
}

#[test]
fn empty_manifest_denies_first_boundary_access() {
    for f in fixtures() {
        let trace = run(&f.project(), &f.config(RunMode::Trace));
        if trace.events.is_empty() {
            continue;
        }
        let out = run(&f.project(), &f.config(RunMode::Enforce));
        let ace = out.access_violation().unwrap_or_else(|| panic!("{} ran under an empty manifest", f.name));
        let first = &trace.events[0];
        assert_eq!((&ace.path, ace.kind), (&first.path, first.kind), "{}", f.name);
    }
}

#[test]
fn enforcement_is_transparent_under_traced_manifest() {
    for f in fixtures() {
        let p = f.project();
        let plain = run(&p, &f.config(RunMode::Unmonitored));
        let traced = run(&p, &f.config(RunMode::Trace));
        let enforced = run(&p, &f.config(RunMode::Enforce).with_manifest(traced.observed_perms()));
        assert_eq!(plain.error, None, "{}", f.name);
        assert_eq!(enforced.error, None, "{}", f.name);
        assert_eq!(enforced.stdout, plain.stdout, "{}", f.name);
        assert_eq!(enforced.exports, plain.exports, "{}", f.name);
        assert_eq!(enforced.fs, plain.fs, "{}", f.name);
        assert_eq!(enforced.spawned, plain.spawned, "{}", f.name);
    }
}

#[test]
fn trace_is_byte_stable() {
    for f in fixtures() {
        let a = trace_log(&run(&f.project(), &f.config(RunMode::Trace)).events);
        let b = trace_log(&run(&f.project(), &f.config(RunMode::Trace)).events);
        assert_eq!(a, b, "{}", f.name);
    }
}

#[test]
fn unmonitored_run_records_nothing() {
    let f = worked_example();
    let out = run(&f.project(), &f.config(RunMode::Unmonitored));
    assert!(out.events.is_empty());
    assert_eq!(out.wrappers_created, 0);
    assert_eq!(out.stdout, "info: decoded\n");
}

#[test]
fn values_crossing_modules_are_rewrapped_not_nested() {
    let f = worked_example();
    let out = run(&f.project(), &f.config(RunMode::Trace));
    assert!(out.wrappers_created > 0);
    // `b` re-exports an object it received through its own monitor.
    let p = project(&[
        ("main.mjs", "let b = require(\"./b\");\nlet v = b.obj.v;"),
        ("a.mjs", "exports.obj = {v: 1};"),
        ("b.mjs", "let a = require(\"./a\");\nexports.obj = a.obj;"),
    ]);
    let out = run(&p, &RuntimeConfig::new("__CWD__/main.mjs", RunMode::Trace));
    assert_eq!(out.error, None);
    assert!(out.rewraps > 0);
    let main_reads: Vec<String> = out
        .events
        .iter()
        .filter(|e| e.module == "__CWD__/main.mjs" && e.kind == Right::R)
        .map(|e| e.path.to_string())
        .collect();
    assert!(main_reads.contains(&"require('__CWD__/b.mjs').obj.v".to_string()));
}

#[test]
fn depth_bounds_what_is_checked() {
    let p = project(&[
        ("main.mjs", "let c = require(\"./conf\");\nlet v = c.l1.l2.l3.l4.l5;"),
        ("conf.mjs", "module.exports = {l1: {l2: {l3: {l4: {l5: 1}}}}};"),
    ]);
    for d in 1..=4 {
        let cfg = RuntimeConfig::new("__CWD__/main.mjs", RunMode::Trace).with_depth(d);
        let traced = run(&p, &cfg).observed_perms();
        let longest = traced
            .get("__CWD__/main.mjs")
            .unwrap()
            .iter()
            .filter(|(p, _)| p.is_import_rooted())
            .map(|(p, _)| p.len() - 1)
            .max()
            .unwrap();
        assert_eq!(longest, d, "accesses deeper than {d} must go unchecked");

        let at_d = RuntimeConfig::new("__CWD__/main.mjs", RunMode::Enforce)
            .with_depth(d)
            .with_manifest(traced.clone());
        assert_eq!(run(&p, &at_d).error, None);
        let deeper = RuntimeConfig::new("__CWD__/main.mjs", RunMode::Enforce)
            .with_depth(d + 1)
            .with_manifest(traced);
        let out = run(&p, &deeper);
        let ace = out.access_violation().expect("one more level is checked");
        assert_eq!(ace.path.len() - 1, d + 1);
    }
}

fn harness_manifest(payload: &str) -> (permguard::corpus::Fixture, FullPermSet) {
    let f = eval_harness(payload);
    let inf = infer_program(&f.project(), f.entry, Parallelism::Sequential).unwrap();
    let mut m = FullPermSet::new();
    m.insert(f.entry_id(), inf.perms().module_or_empty(&f.entry_id()));
    m.insert("__CWD__/e.mjs", eval_module_grant());
    (f, m)
}

#[test]
fn eval_runs_with_the_evaluating_modules_rights() {
    let (f, m) = harness_manifest("2+2");
    let out = run(&f.project(), &f.config(RunMode::Enforce).with_manifest(m));
    assert_eq!(out.error, None);
    assert_eq!(out.stdout, "4\n");

    // The importer may read the environment; that does not leak into `e`.
    let (f, mut m) = harness_manifest("process.env.SECRET");
    m.entry(&f.entry_id())
        .grant_right(ObjPath::parse("process.env").unwrap(), Right::R);
    m.entry(&f.entry_id()).grant_right(ObjPath::root("process"), Right::R);
    let out = run(&f.project(), &f.config(RunMode::Enforce).with_manifest(m));
    let ace = out.access_violation().unwrap();
    assert_eq!(ace.module, "__CWD__/e.mjs");
    assert_eq!((ace.kind, ace.path.to_string().as_str()), (Right::R, "process.env"));
    assert!(ace.location.file.ends_with("#eval"));
    assert!(out.stdout.is_empty());
}

#[test]
fn runaway_recursion_is_reported() {
    let p = project(&[("main.mjs", "function f(n) { return f(n + 1); }\nf(0);")]);
    let out = run(&p, &RuntimeConfig::new("__CWD__/main.mjs", RunMode::Unmonitored));
    assert!(matches!(out.error, Some(RuntimeError::StackOverflow { .. })));
}

#[test]
fn exception_report_lists_fields() {
    let (f, m) = harness_manifest("global.x = 1");
    let out = run(&f.project(), &f.config(RunMode::Enforce).with_manifest(m));
    let r = out.access_violation().unwrap().report();
    assert!(r.contains("kind: W"));
    assert!(r.contains("path: global.x"));
    assert!(r.contains("module: __CWD__/e.mjs"));
}
