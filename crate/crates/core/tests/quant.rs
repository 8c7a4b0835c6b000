use std::collections::BTreeSet;

use permguard::corpus::{eval_harness, eval_module_grant, worked_example};
use permguard::infer::infer_program;
use permguard::par::Parallelism;
use permguard::perm::{ObjPath, Right};
use permguard::quant::{allowed_privilege, base_privilege, program_universes, BuiltinCatalog};

#[test]
fn main_module_allowed_set_is_exact() {
    let f = worked_example();
    let p = f.project();
    let inf = infer_program(&p, f.entry, Parallelism::Sequential).unwrap();
    let modules: Vec<String> = inf.modules.keys().cloned().collect();
    let us = program_universes(&p, &modules, BuiltinCatalog::shipped(), 3, Parallelism::Sequential);
    let main = "__CWD__/main.mjs";
    let u = &us[main];
    assert_eq!(base_privilege(u).len(), 3 * u.len());

    let got: BTreeSet<(String, Right)> = allowed_privilege(&inf.perms().module_or_empty(main), u)
        .into_iter()
        .map(|(p, r)| (p.to_string(), r))
        .collect();
    let want: BTreeSet<(String, Right)> = [
        ("require", Right::R),
        ("require", Right::X),
        ("require('__CWD__/serial.mjs')", Right::R),
        ("require('__CWD__/serial.mjs').dec", Right::R),
        ("require('__CWD__/serial.mjs').dec", Right::X),
    ]
    .into_iter()
    .map(|(p, r)| (p.to_string(), r))
    .collect();
    assert_eq!(got, want);
}

#[test]
fn eval_module_infers_its_fixed_grant() {
    let f = eval_harness("1");
    let inf = infer_program(&f.project(), f.entry, Parallelism::Sequential).unwrap();
    assert_eq!(inf.perms().module_or_empty("__CWD__/e.mjs"), eval_module_grant());
}

#[test]
fn serial_universe_reaches_log_exports() {
    let f = worked_example();
    let p = f.project();
    let modules = vec!["__CWD__/serial.mjs".to_string(), "__CWD__/log.mjs".to_string()];
    let us = program_universes(&p, &modules, BuiltinCatalog::shipped(), 3, Parallelism::Sequential);
    let u = &us["__CWD__/serial.mjs"];
    for path in ["require('__CWD__/log.mjs').info", "require('__CWD__/log.mjs').levels.WARN", "eval"] {
        assert!(u.contains(&ObjPath::parse(path).unwrap()), "{path} missing");
    }
    assert!(!u.contains(&ObjPath::parse("require('__CWD__/serial.mjs')").unwrap()));
}
