//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use permguard::check::check;
use permguard::corpus::gen::{generate_corpus, generate_dynamic_free, generate_loop_body};
use permguard::corpus::{
    attack_payloads, benign_payloads, eval_harness, eval_module_grant, fixtures, fs_reexport, worked_example, Fixture, ATTACK_ROWS,
};
use permguard::infer::witness::WitnessValidator;
use permguard::infer::{infer_module, infer_program, infer_source};
use permguard::lang::parse;
use permguard::par::Parallelism;
use permguard::perm::{parse_manifest, serialize_manifest, FullPermSet, Mode, ModPermSet, ObjPath, Right};
use permguard::quant::{
    allowed_privilege, base_privilege, expand_universe, privilege_reduction, program_universes, BuiltinCatalog, CatalogNode,
    CatalogRoot, RootCategory,
};
use permguard::resolve::Project;
use permguard::runtime::{run, trace_log, RunMode, RuntimeConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn write_fixture(f: &Fixture, dir: &Path) {
    for (name, src) in &f.files {
        let p = dir.join(name);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, src).unwrap();
    }
    std::fs::write(dir.join("fs.json"), serde_json::to_string(&f.fs_seed).unwrap()).unwrap();
}

fn permguard(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_permguard"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// CLI arguments that reproduce a fixture's runtime seeds.
fn seed_args(f: &Fixture) -> Vec<String> {
    let mut a = vec!["--fs-seed".to_string(), "fs.json".to_string()];
    for (k, v) in &f.env {
        a.push("--env".into());
        a.push(format!("{k}={v}"));
    }
    if !f.argv.is_empty() {
        a.push("--argv".into());
        a.extend(f.argv.iter().cloned());
    }
    a
}

fn worked_example_fidelity() -> Outcome {
    let f = worked_example();
    let start = Instant::now();
    let inf = infer_program(&f.project(), f.entry, Parallelism::Sequential).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = parse_manifest(
        r#"{
          "__CWD__/main.mjs": {
            "require": "RX",
            "require('__CWD__/serial.mjs')": "RI",
            "require('__CWD__/serial.mjs').dec": "RX"
          },
          "__CWD__/serial.mjs": {
            "eval": "RX",
            "require": "RX",
            "module": "R",
            "module.exports": "W",
            "require('__CWD__/log.mjs')": "RI",
            "require('__CWD__/log.mjs').levels": "R",
            "require('__CWD__/log.mjs').levels.WARN": "R",
            "require('__CWD__/log.mjs').info": "RX",
            "require('__CWD__/log.mjs').LVL": "W"
          }
        }"#,
    )
    .unwrap();
    let got = inf.perms();
    for m in ["__CWD__/main.mjs", "__CWD__/serial.mjs"] {
        ensure(got.get(m) == expected.get(m), || {
            format!("{m}: got {}", serialize_manifest(&got))
        })?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("main 3 entries, serial 9 entries, exact; {elapsed:?}"))
}

fn harness_manifest(f: &Fixture) -> FullPermSet {
    let inf = infer_program(&f.project(), f.entry, Parallelism::Sequential).unwrap();
    let mut m = FullPermSet::new();
    m.insert(f.entry_id(), inf.perms().module_or_empty(&f.entry_id()));
    m.insert("__CWD__/e.mjs", eval_module_grant());
    m
}

fn in_vitro_attacks() -> Outcome {
    let attacks = attack_payloads();
    let benign = benign_payloads();
    ensure(attacks.len() >= 40, || format!("only {} attacks", attacks.len()))?;
    ensure(benign.len() >= 10, || format!("only {} benign payloads", benign.len()))?;
    for row in ATTACK_ROWS {
        ensure(attacks.iter().any(|(r, _)| *r == row), || format!("row {row:?} uncovered"))?;
    }
    for (row, payload) in &attacks {
        let f = eval_harness(payload);
        let out = run(&f.project(), &f.config(RunMode::Enforce).with_manifest(harness_manifest(&f)));
        let ace = out
            .access_violation()
            .ok_or_else(|| format!("{row:?} `{payload}` not blocked: {:?}", out.error))?;
        ensure(ace.module == "__CWD__/e.mjs", || format!("`{payload}` blamed {}", ace.module))?;
    }
    for (payload, want) in &benign {
        let f = eval_harness(payload);
        let out = run(&f.project(), &f.config(RunMode::Enforce).with_manifest(harness_manifest(&f)));
        ensure(out.error.is_none(), || format!("`{payload}` failed: {:?}", out.error))?;
        ensure(out.stdout == format!("{want}\n"), || format!("`{payload}` printed {:?}", out.stdout))?;
    }
    Ok(format!("{}/{} attacks blocked, {}/{} benign correct", attacks.len(), attacks.len(), benign.len(), benign.len()))
}

fn generated_config(p: &Project, entry: &str) -> RuntimeConfig {
    let mut cfg = RuntimeConfig::new(p.canonicalize(entry), RunMode::Trace);
    cfg.env.insert("HOME".into(), "/home/u".into());
    cfg.fs_seed.insert("/tmp/f1".into(), "seeded".into());
    cfg
}

fn dynamic_free_completeness() -> Outcome {
    let seeds: Vec<u64> = (0..250).collect();
    let failures = Parallelism::Parallel.map(seeds.clone(), |seed| {
        let g = generate_dynamic_free(seed);
        let p = g.project();
        let out = run(&p, &generated_config(&p, &g.entry));
        if let Some(e) = out.error {
            return Some(format!("seed {seed}: run failed: {e}"));
        }
        let perms = match infer_program(&p, &g.entry, Parallelism::Sequential) {
            Ok(i) => i.perms(),
            Err(e) => return Some(format!("seed {seed}: {e}")),
        };
        out.events
            .iter()
            .find(|e| !perms.get(&e.module).is_some_and(|m| m.allows(&e.path, e.kind)))
            .map(|e| format!("seed {seed}: {} {}:{} at {} not inferred", e.module, e.path, e.kind, e.location))
    });
    let failed: Vec<String> = failures.into_iter().flatten().collect();
    ensure(failed.is_empty(), || format!("{} programs incomplete; first: {}", failed.len(), failed[0]))?;
    Ok(format!("{} programs, traced within inferred in all", seeds.len()))
}

fn witnesses_hold(p: &Project, entry: &str) -> Result<usize, String> {
    let inf = infer_program(p, entry, Parallelism::Sequential).map_err(|e| e.to_string())?;
    let mut n = 0;
    for id in inf.modules.keys() {
        let (program, m) = infer_source(p, id).map_err(|e| e.to_string())?;
        let validator = WitnessValidator::new(&program);
        for (path, right) in m.perms.pairs() {
            n += 1;
            ensure(m.witnesses.contains_key(&(path.clone(), right)), || format!("{id}: {path}:{right} has no witness"))?;
        }
        let bad = validator.unjustified(&m.witnesses);
        ensure(bad.is_empty(), || format!("{id}: unjustified {bad:?}"))?;
    }
    Ok(n)
}

fn witness_soundness() -> Outcome {
    let mut entries = 0;
    let mut programs = 0;
    for f in fixtures() {
        entries += witnesses_hold(&f.project(), f.entry).map_err(|e| format!("{}: {e}", f.name))?;
        programs += 1;
    }
    for seed in 0..250 {
        let g = generate_dynamic_free(seed);
        entries += witnesses_hold(&g.project(), &g.entry).map_err(|e| format!("seed {seed}: {e}"))?;
        programs += 1;
    }
    Ok(format!("{entries} entries over {programs} programs all justified"))
}

fn drop_one_minimality() -> Outcome {
    let fx = fixtures();
    ensure(fx.len() >= 20, || format!("only {} fixtures", fx.len()))?;
    let results = Parallelism::Parallel.map(fx, |f| -> Result<usize, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        write_fixture(&f, dir.path());
        let traced = run(&f.project(), &f.config(RunMode::Trace)).observed_perms();
        let mut args: Vec<String> = vec!["run".into(), "--manifest".into(), "m.json".into()];
        args.extend(seed_args(&f));
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let run_with = |m: &FullPermSet| {
            std::fs::write(dir.path().join("m.json"), serialize_manifest(m)).unwrap();
            permguard(dir.path(), &argv).status.code()
        };
        ensure(run_with(&traced) == Some(0), || format!("{}: traced manifest does not run", f.name))?;
        let mut drops = 0;
        for (module, perms) in traced.modules() {
            for (path, right) in perms.pairs() {
                let mut m = traced.clone();
                let mode = perms.get(path).unwrap().without(right);
                m.get_mut(module).unwrap().set(path.clone(), mode);
                let code = run_with(&m);
                ensure(code == Some(10), || format!("{}: dropping {module} {path}:{right} exited {code:?}", f.name))?;
                drops += 1;
            }
        }
        ensure(run_with(&traced) == Some(0), || format!("{}: restoring failed", f.name))?;
        Ok(drops)
    });
    let mut total = 0;
    let mut n = 0;
    for r in results {
        total += r?;
        n += 1;
    }
    Ok(format!("{n} fixtures, {total}/{total} drops fail closed, restores exit 0"))
}

fn import_time_augmentation() -> Outcome {
    let f = fs_reexport();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    write_fixture(&f, d);
    let invalid = || -> Result<u64, String> {
        let o = permguard(d, &["check", "--manifest", "m.json", "--trace", "t.jsonl"]);
        let r: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
        r["invalid"].as_u64().ok_or_else(|| "no invalid count".to_string())
    };
    ensure(permguard(d, &["infer", "--manifest", "m.json"]).status.success(), || "infer failed".into())?;
    let mut trace = vec!["trace", "--out", "t.jsonl"];
    let seeds = seed_args(&f);
    trace.extend(seeds.iter().map(String::as_str));
    ensure(permguard(d, &trace).status.success(), || "trace failed".into())?;
    let before = invalid()?;
    ensure(before >= 1, || "static manifest already covers the trace".into())?;
    ensure(permguard(d, &["augment", "--manifest", "m.json"]).status.success(), || "augment failed".into())?;
    let after = invalid()?;
    ensure(after == 0, || format!("{after} invalid after augment"))?;
    Ok(format!("invalid accesses {before} -> {after}"))
}

/// Independent count of catalog paths straight from the JSON file.
fn walk_catalog(v: &serde_json::Value, depth: usize) -> usize {
    let kids = v.get("children").and_then(|c| c.as_array());
    1 + match (depth, kids) {
        (0, _) | (_, None) => 0,
        (_, Some(k)) => k.iter().map(|c| walk_catalog(c, depth - 1)).sum(),
    }
}

fn node(name: &str, children: Vec<CatalogNode>) -> CatalogNode {
    CatalogNode {
        name: name.into(),
        children,
    }
}

fn root(name: &str, children: Vec<CatalogNode>) -> CatalogRoot {
    CatalogRoot {
        name: name.into(),
        category: RootCategory::Es,
        module: false,
        children,
    }
}

fn quantification() -> Outcome {
    let catalog = BuiltinCatalog::shipped();
    let raw: serde_json::Value = serde_json::from_str(include_str!("../data/catalog.json")).unwrap();
    for depth in 0..=4 {
        let walked: usize = raw["roots"].as_array().unwrap().iter().map(|r| walk_catalog(r, depth)).sum();
        let u = expand_universe(catalog, &[], depth);
        ensure(u.len() == walked, || format!("depth {depth}: universe {} vs walk {walked}", u.len()))?;
        ensure(base_privilege(&u).len() == 3 * walked, || format!("depth {depth}: base is not 3x"))?;
    }

    let f = worked_example();
    let p = f.project();
    let inf = infer_program(&p, f.entry, Parallelism::Sequential).unwrap();
    let modules: Vec<String> = inf.modules.keys().cloned().collect();
    let universes = program_universes(&p, &modules, catalog, 3, Parallelism::Sequential);

    let mut full = FullPermSet::new();
    for (m, u) in &universes {
        let mut s = ModPermSet::new();
        for path in u {
            s.grant(path.clone(), Mode::of(&[Right::R, Right::W, Right::X]));
        }
        full.insert(m.clone(), s);
    }
    let rep = privilege_reduction(&full, &universes, catalog.hash(), 3, Parallelism::Sequential).unwrap();
    ensure(rep.program.pr == Some(1.0), || format!("full grant program PR {:?}", rep.program.pr))?;
    for (m, c) in &rep.per_module {
        ensure(c.pr == Some(1.0), || format!("full grant PR for {m} is {:?}", c.pr))?;
    }

    let inferred = inf.perms();
    let baseline = privilege_reduction(&inferred, &universes, catalog.hash(), 3, Parallelism::Sequential).unwrap();
    let mut drops = 0;
    for (m, perms) in inferred.modules() {
        let before = baseline.per_module[m].pr.unwrap();
        for (path, right) in perms.pairs().filter(|(_, r)| *r != Right::I) {
            ensure(universes[m].contains(path), || format!("{m}: {path} outside the universe"))?;
            let mut reduced = inferred.clone();
            reduced
                .get_mut(m)
                .unwrap()
                .set(path.clone(), perms.get(path).unwrap().without(right));
            let after = match privilege_reduction(&reduced, &universes, catalog.hash(), 3, Parallelism::Sequential) {
                Ok(r) => r.per_module[m].pr,
                Err(e) => e.report.per_module[m].pr,
            };
            ensure(after.is_none_or(|a| a > before), || format!("{m}: dropping {path}:{right} gave {after:?} <= {before}"))?;
            drops += 1;
        }
    }

    // Ten paths: a, a.b, a.c, a.c.d, e, e.f, e.g, e.h, i, j.
    let toy = BuiltinCatalog::from_roots(vec![
        root("a", vec![node("b", vec![]), node("c", vec![node("d", vec![])])]),
        root("e", vec![node("f", vec![]), node("g", vec![]), node("h", vec![])]),
        root("i", vec![]),
        root("j", vec![]),
    ]);
    let u = expand_universe(&toy, &[], 3);
    ensure(u.len() == 10, || format!("toy universe has {} paths", u.len()))?;
    let mut grant = ModPermSet::new();
    grant.grant(ObjPath::parse("a").unwrap(), Mode::of(&[Right::R]));
    grant.grant(ObjPath::parse("a.c.d").unwrap(), Mode::of(&[Right::R, Right::X]));
    grant.grant(ObjPath::parse("e.*").unwrap(), Mode::of(&[Right::W]));
    grant.grant(ObjPath::parse("i").unwrap(), Mode::of(&[Right::R, Right::W, Right::X]));
    // By hand: 1 + 2 + 3 (e.f, e.g, e.h) + 3 = 9 allowed out of 30.
    let allowed = allowed_privilege(&grant, &u).len();
    ensure(allowed == 9, || format!("toy allowed {allowed}"))?;
    let mut toy_full = FullPermSet::new();
    toy_full.insert("t", grant);
    let toy_rep = privilege_reduction(&toy_full, &BTreeMap::from([("t".to_string(), u)]), toy.hash(), 3, Parallelism::Sequential)
        .map_err(|e| e.to_string())?;
    ensure(toy_rep.program.pr == Some(30.0 / 9.0), || format!("toy PR {:?}", toy_rep.program.pr))?;

    Ok(format!(
        "base = 3|U| at depths 0-4, full-grant PR = 1, {drops} single drops all raise PR, toy PR = 30/9, program PR {:.2}",
        baseline.program.pr.unwrap()
    ))
}

fn loop_unroll_equivalence() -> Outcome {
    let n = 60;
    for seed in 0..n {
        let (prelude, body) = generate_loop_body(seed);
        let project = Project::in_memory([("m.mjs", "")]);
        let w = parse("m.mjs", &format!("{prelude}\nwhile (c) {{\n{body}\n}}\n")).map_err(|e| e.to_string())?;
        let i = parse("m.mjs", &format!("{prelude}\nif (c) {{\n{body}\n}}\n")).map_err(|e| e.to_string())?;
        let a = infer_module(&w, "__CWD__/m.mjs", &project).perms;
        let b = infer_module(&i, "__CWD__/m.mjs", &project).perms;
        ensure(a == b, || format!("seed {seed}: while and if differ"))?;
    }
    Ok(format!("{n} bodies, identical permission sets"))
}

fn determinism() -> Outcome {
    let catalog = BuiltinCatalog::shipped();
    for f in fixtures() {
        let p = f.project();
        let inf = infer_program(&p, f.entry, Parallelism::Parallel).map_err(|e| e.to_string())?;
        let text = serialize_manifest(&inf.perms());
        let back = parse_manifest(&text).map_err(|e| e.to_string())?;
        ensure(back == inf.perms() && serialize_manifest(&back) == text, || format!("{}: manifest round-trip", f.name))?;

        let t1 = trace_log(&run(&p, &f.config(RunMode::Trace)).events);
        let t2 = trace_log(&run(&p, &f.config(RunMode::Trace)).events);
        ensure(t1 == t2, || format!("{}: trace differs between runs", f.name))?;

        let modules: Vec<String> = inf.modules.keys().cloned().collect();
        let report = |par: Parallelism| {
            let u = program_universes(&p, &modules, catalog, 3, par);
            match privilege_reduction(&inf.perms(), &u, catalog.hash(), 3, par) {
                Ok(r) => r.to_json(),
                Err(e) => e.report.to_json(),
            }
        };
        let r1 = report(Parallelism::Parallel);
        ensure(r1 == report(Parallelism::Parallel) && r1 == report(Parallelism::Sequential), || {
            format!("{}: report bytes differ", f.name)
        })?;

        let c1 = check(&inf.perms(), &run(&p, &f.config(RunMode::Trace)).events).to_json();
        let c2 = check(&inf.perms(), &run(&p, &f.config(RunMode::Trace)).events).to_json();
        ensure(c1 == c2, || format!("{}: check report differs", f.name))?;
    }
    Ok(format!("{} fixtures: manifests, traces and reports byte-stable", fixtures().len()))
}

fn throughput() -> Outcome {
    let corpus = generate_corpus(7, 10_000);
    let lines: usize = corpus.iter().map(|(_, s)| s.lines().count()).sum();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut index = String::new();
    for (name, src) in &corpus {
        let p = dir.path().join(name);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(&p, src).unwrap();
        if name.ends_with("/main.mjs") {
            index.push_str(&format!("require(\"./{}\");\n", name.trim_end_matches(".mjs")));
        }
    }
    std::fs::write(dir.path().join("main.mjs"), &index).unwrap();
    let start = Instant::now();
    let o = permguard(dir.path(), &["infer", "--manifest", "m.json"]);
    let infer_time = start.elapsed();
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let m = parse_manifest(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).map_err(|e| e.to_string())?;
    ensure(m.len() == corpus.len() + 1, || format!("{} modules in manifest", m.len()))?;
    ensure(infer_time < Duration::from_secs(30), || format!("infer took {infer_time:?}"))?;

    let fx = fixtures();
    let manifests: Vec<FullPermSet> = fx
        .iter()
        .map(|f| run(&f.project(), &f.config(RunMode::Trace)).observed_perms())
        .collect();
    let rounds = 30;
    let time = |mode: RunMode| {
        let start = Instant::now();
        for _ in 0..rounds {
            for (f, m) in fx.iter().zip(&manifests) {
                let out = run(&f.project(), &f.config(mode).with_manifest(m.clone()));
                assert!(out.error.is_none(), "{}", f.name);
            }
        }
        start.elapsed()
    };
    let trace = time(RunMode::Trace);
    let enforce = time(RunMode::Enforce);
    let ratio = enforce.as_secs_f64() / trace.as_secs_f64();
    ensure(ratio < 3.0, || format!("enforce/trace = {ratio:.2}"))?;
    Ok(format!(
        "infer {lines} lines in {infer_time:.2?}; enforce {enforce:.2?} vs trace {trace:.2?} ({ratio:.2}x)"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked-example fidelity", worked_example_fidelity),
        ("in-vitro attack suite", in_vitro_attacks),
        ("dynamic-free completeness", dynamic_free_completeness),
        ("witness soundness", witness_soundness),
        ("drop-one minimality", drop_one_minimality),
        ("import-time augmentation", import_time_augmentation),
        ("quantification correctness", quantification),
        ("loop-unroll equivalence", loop_unroll_equivalence),
        ("determinism and round-trips", determinism),
        ("throughput sanity", throughput),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
