//! Compare a manifest against what a traced run actually did.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::perm::{match_path, FullPermSet, ObjPath, Right};
use crate::runtime::AccessEvent;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ModuleCheck {
    /// Traced but not granted.
    pub invalid: Vec<String>,
    /// Granted but never traced.
    pub unused: Vec<String>,
    pub valid: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub per_module: BTreeMap<String, ModuleCheck>,
    /// Unique (module, path, right) triples in the trace.
    pub total: usize,
    pub valid: usize,
    pub invalid: usize,
    pub unused: usize,
    pub invalid_percent: f64,
}

fn pair(p: &ObjPath, r: Right) -> String {
    format!("{p}:{r}")
}

pub fn check(manifest: &FullPermSet, events: &[AccessEvent]) -> CheckReport {
    let traced: BTreeSet<(&str, &ObjPath, Right)> = events.iter().map(|e| (e.module.as_str(), &e.path, e.kind)).collect();
    let mut report = CheckReport::default();
    for &(m, p, r) in &traced {
        let entry = report.per_module.entry(m.to_string()).or_default();
        if manifest.get(m).is_some_and(|s| s.allows(p, r)) {
            entry.valid += 1;
        } else {
            entry.invalid.push(pair(p, r));
        }
    }
    for (m, perms) in manifest.modules() {
        for (pattern, r) in perms.pairs() {
            let used = traced
                .iter()
                .any(|&(tm, tp, tr)| tm == m && tr == r && match_path(pattern, tp));
            if !used {
                report.per_module.entry(m.clone()).or_default().unused.push(pair(pattern, r));
            }
        }
    }
    report.total = traced.len();
    for c in report.per_module.values() {
        report.valid += c.valid;
        report.invalid += c.invalid.len();
        report.unused += c.unused.len();
    }
    report.invalid_percent = if report.total == 0 {
        0.0
    } else {
        100.0 * report.invalid as f64 / report.total as f64
    };
    report
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "{} unique accesses: {} valid, {} invalid ({:.2}%), {} unused grants",
            self.total, self.valid, self.invalid, self.invalid_percent, self.unused
        )
    }
}
