//! Writes scenario outputs to disk in a byte-reproducible layout.
//!
//! Each scenario owns one directory under the output root:
//!
//! ```text
//! <out>/<scenario>/verdicts.jsonl    one verdict per line, sorted by name
//! <out>/<scenario>/tables/<x>.csv    numeric tables
//! <out>/<scenario>/report.json       everything above plus the config echo
//! ```
//!
//! Nothing time- or machine-dependent enters the files: identical inputs
//! produce identical bytes, which the reproducibility checks compare
//! directly.

use anyhow::Context;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::gallery::ScenarioRun;
use koop::verify::Verdict;

/// The `report.json` document.
#[derive(Serialize)]
struct ReportDoc<'a> {
    scenario: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    expected_failures: &'a [String],
    tables: Vec<String>,
    verdicts: &'a [Verdict],
}

/// Counts used by the run summary printed to stdout.
#[derive(Clone, Debug)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub passed: usize,
    pub expected_failures: usize,
    pub unexpected: Vec<String>,
    pub dir: PathBuf,
}

/// Writes one scenario's verdicts, tables, and report under `out_root`.
pub fn write_scenario(
    out_root: &Path,
    run: &ScenarioRun,
    cfg: &RunConfig,
) -> anyhow::Result<ScenarioSummary> {
    let dir = out_root.join(&run.scenario);
    let tables_dir = dir.join("tables");
    fs::create_dir_all(&tables_dir)
        .with_context(|| format!("creating {}", tables_dir.display()))?;

    let mut jsonl = String::new();
    for v in &run.verdicts {
        jsonl.push_str(&v.to_jsonl());
        jsonl.push('\n');
    }
    fs::write(dir.join("verdicts.jsonl"), jsonl)
        .with_context(|| format!("writing verdicts under {}", dir.display()))?;

    let mut table_paths = Vec::with_capacity(run.tables.len());
    for table in &run.tables {
        let rel = format!("tables/{}.csv", table.name);
        fs::write(dir.join(&rel), &table.csv)
            .with_context(|| format!("writing table {rel}"))?;
        table_paths.push(rel);
    }

    let doc = ReportDoc {
        scenario: &run.scenario,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        expected_failures: &run.expected_failures,
        tables: table_paths,
        verdicts: &run.verdicts,
    };
    let mut text = serde_json::to_string_pretty(&doc).context("serializing report")?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)
        .with_context(|| format!("writing report under {}", dir.display()))?;

    let unexpected = run.unexpected();
    let passed = run.verdicts.iter().filter(|v| v.pass).count();
    Ok(ScenarioSummary {
        scenario: run.scenario.clone(),
        passed,
        expected_failures: run.expected_failures.len(),
        unexpected,
        dir,
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
