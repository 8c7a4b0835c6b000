//! The `permguard` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::check::check;
use crate::infer::infer_program;
use crate::par::Parallelism;
use crate::perm::{parse_manifest, serialize_manifest, FullPermSet};
use crate::quant::{privilege_reduction, program_universes, BuiltinCatalog};
use crate::resolve::Project;
use crate::runtime::{import_time_infer, parse_trace, run, trace_log, RunMode, RuntimeConfig, RuntimeError, DEFAULT_DEPTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_ACCESS: i32 = 10;

#[derive(Parser, Debug)]
#[command(name = "permguard", version, about = "Infer, enforce and measure per-module permissions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Statically infer a manifest for the entry module and its imports.
    Infer {
        #[command(flatten)]
        project: ProjectArgs,
        /// Write the manifest here instead of stdout.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also write the witness locations for every entry.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Extend a manifest with accesses seen while loading each module.
    Augment {
        #[command(flatten)]
        project: ProjectArgs,
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run the program under enforcement.
    Run {
        #[command(flatten)]
        project: ProjectArgs,
        #[command(flatten)]
        runtime: RuntimeArgs,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Run the program allowing everything, logging each check.
    Trace {
        #[command(flatten)]
        project: ProjectArgs,
        #[command(flatten)]
        runtime: RuntimeArgs,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a manifest with a trace.
    Check {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute privilege-reduction ratios for a manifest.
    Quantify {
        #[command(flatten)]
        project: ProjectArgs,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ProjectArgs {
    #[arg(long, default_value = ".")]
    pub project: PathBuf,
    #[arg(long, default_value = "main.mjs")]
    pub entry: String,
    /// Extra directories searched for bare module names.
    #[arg(long = "search-root")]
    pub search_roots: Vec<String>,
    /// Run module analysis on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl ProjectArgs {
    fn project(&self) -> Project {
        let mut p = Project::on_disk(&self.project);
        for r in &self.search_roots {
            p = p.with_search_root(r);
        }
        p
    }

    fn par(&self) -> Parallelism {
        if self.sequential {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RuntimeArgs {
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    /// JSON object mapping virtual file paths to contents.
    #[arg(long = "fs-seed")]
    pub fs_seed: Option<PathBuf>,
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub argv: Vec<String>,
    /// `KEY=VALUE`, repeatable.
    #[arg(long)]
    pub env: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_manifest(path: &Path) -> Result<FullPermSet, CliError> {
    parse_manifest(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn runtime_config(project: &Project, entry: &str, args: &RuntimeArgs, mode: RunMode) -> Result<RuntimeConfig, CliError> {
    let mut cfg = RuntimeConfig::new(project.canonicalize(entry), mode).with_depth(args.depth);
    if let Some(p) = &args.fs_seed {
        cfg.fs_seed = serde_json::from_str::<BTreeMap<String, String>>(&read(p)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    }
    cfg.argv = args.argv.clone();
    for kv in &args.env {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--env expects KEY=VALUE, got `{kv}`")))?;
        cfg.env.insert(k.to_string(), v.to_string());
    }
    Ok(cfg)
}

/// Exit code for a run that stopped with `err`.
fn runtime_exit(err: &RuntimeError) -> i32 {
    match err {
        RuntimeError::Access(_) => EXIT_ACCESS,
        RuntimeError::Parse { .. } | RuntimeError::Resolve(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn infer_manifest(args: &ProjectArgs) -> Result<(crate::infer::ProgramInference, Project), CliError> {
    let project = args.project();
    let inf = infer_program(&project, &args.entry, args.par()).map_err(config_err)?;
    for d in inf.diagnostics() {
        eprintln!("warning: {}: {}", d.location, d.message);
    }
    Ok((inf, project))
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Infer {
            project,
            manifest,
            witness,
        } => {
            let (inf, _) = infer_manifest(&project)?;
            write_or_print(manifest.as_deref(), &serialize_manifest(&inf.perms()))?;
            if let Some(w) = witness {
                write_or_print(Some(&w), &inf.witness_json())?;
            }
            Ok(EXIT_OK)
        }
        Command::Augment { project, manifest } => {
            let current = load_manifest(&manifest)?;
            let (inf, proj) = infer_manifest(&project)?;
            let mut modules: Vec<String> = inf.modules.keys().cloned().collect();
            for m in current.module_ids() {
                if proj.load(m).is_some() && !modules.iter().any(|x| x == m) {
                    modules.push(m.to_string());
                }
            }
            let results = project
                .par()
                .map(modules, |m| {
                    let r = import_time_infer(&proj, &m, DEFAULT_DEPTH);
                    (m, r)
                });
            let mut merged = current.clone();
            let mut total = 0;
            for (m, r) in results {
                if let Some(e) = &r.error {
                    eprintln!("warning: {m}: top level stopped: {e}");
                }
                let before = current.module_or_empty(&m);
                let after = before.merge(&r.perms);
                let added = after.pairs().count() - before.pairs().count();
                println!("{m}: +{added}");
                total += added;
                merged.insert(m, after);
            }
            println!("added {total} entries");
            write_or_print(Some(&manifest), &serialize_manifest(&merged))?;
            Ok(EXIT_OK)
        }
        Command::Run {
            project,
            runtime,
            manifest,
        } => {
            let manifest = manifest.ok_or_else(|| CliError::Config("run needs --manifest".into()))?;
            let perms = load_manifest(&manifest)?;
            let proj = project.project();
            let cfg = runtime_config(&proj, &project.entry, &runtime, RunMode::Enforce)?.with_manifest(perms);
            let out = run(&proj, &cfg);
            print!("{}", out.stdout);
            std::io::stdout().flush().ok();
            match &out.error {
                None => Ok(EXIT_OK),
                Some(RuntimeError::Access(ace)) => {
                    eprint!("{}", ace.report());
                    Ok(EXIT_ACCESS)
                }
                Some(e) => {
                    eprintln!("error: {e}");
                    Ok(runtime_exit(e))
                }
            }
        }
        Command::Trace { project, runtime, out } => {
            let proj = project.project();
            let cfg = runtime_config(&proj, &project.entry, &runtime, RunMode::Trace)?;
            let res = run(&proj, &cfg);
            write_or_print(out.as_deref(), &trace_log(&res.events))?;
            match &res.error {
                None => Ok(EXIT_OK),
                Some(e) => {
                    eprintln!("error: {e}");
                    Ok(runtime_exit(e))
                }
            }
        }
        Command::Check { manifest, trace, out } => {
            let perms = load_manifest(&manifest)?;
            let events = parse_trace(&read(&trace)?).map_err(|e| CliError::Config(format!("{}: {e}", trace.display())))?;
            let report = check(&perms, &events);
            eprintln!("{}", report.summary());
            write_or_print(out.as_deref(), &report.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Quantify {
            project,
            manifest,
            depth,
            out,
        } => {
            let perms = load_manifest(&manifest)?;
            let (inf, proj) = infer_manifest(&project)?;
            let catalog = BuiltinCatalog::shipped();
            let modules: Vec<String> = inf.modules.keys().cloned().collect();
            let universes = program_universes(&proj, &modules, catalog, depth, project.par());
            match privilege_reduction(&perms, &universes, catalog.hash(), depth, project.par()) {
                Ok(report) => {
                    write_or_print(out.as_deref(), &report.to_json())?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    write_or_print(out.as_deref(), &e.report.to_json())?;
                    eprintln!("error: {e}");
                    Ok(EXIT_DEGENERATE)
                }
            }
        }
    }
}

/// Parse `args` and run the chosen subcommand, returning the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            e.print().ok();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
