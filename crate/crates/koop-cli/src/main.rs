//! `koop` — a scenario gallery for one-parameter composition groups,
//! weighted groups, and cocycles over flows on discretized probability
//! spaces.
//!
//! Each scenario evaluates a batch of named residual checks against fixed
//! thresholds and writes `verdicts.jsonl`, CSV tables, and a `report.json`
//! echoing the configuration. Counterexample scenarios declare up front
//! which verdicts must fail; the exit code is zero exactly when every
//! verdict lands with its declared polarity.

mod config;
mod gallery;
mod report;

use anyhow::Context;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::RunConfig;
use gallery::{ScenarioRun, SCENARIOS};

#[derive(Parser)]
#[command(
    name = "koop",
    version,
    about = "Numerical gallery for composition groups, weights, and cocycles on discretized probability spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios by name (or `all`) and write their reports.
    Run {
        /// Scenario names, or the single word `all`.
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// JSON file overriding the default configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory that receives one subdirectory per scenario.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run scenarios on worker threads (outputs are identical either way).
        #[arg(long)]
        parallel: bool,
    },
    /// List scenario names with one-line summaries.
    List,
    /// Print the built-in configuration as JSON (accepted back via --config).
    PrintDefaults,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, summary) in SCENARIOS {
                println!("{name:<26} {summary}");
            }
            ExitCode::SUCCESS
        }
        Command::PrintDefaults => {
            print!("{}", RunConfig::default().to_pretty_json());
            ExitCode::SUCCESS
        }
        Command::Run {
            scenarios,
            config,
            out,
            parallel,
        } => match run_command(&scenarios, config.as_deref(), &out, parallel) {
            Ok(clean) => {
                if clean {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
    }
}

/// Expands `all`, rejects unknown names, and deduplicates while keeping the
/// caller's order.
fn resolve_names(requested: &[String]) -> anyhow::Result<Vec<String>> {
    let known: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
    let mut names = Vec::new();
    for raw in requested {
        if raw == "all" {
            for n in &known {
                if !names.iter().any(|x: &String| x == n) {
                    names.push(n.to_string());
                }
            }
        } else if known.contains(&raw.as_str()) {
            if !names.contains(raw) {
                names.push(raw.clone());
            }
        } else {
            anyhow::bail!(
                "unknown scenario `{raw}`; valid names:\n  {}",
                known.join("\n  ")
            );
        }
    }
    Ok(names)
}

fn run_command(
    requested: &[String],
    config_path: Option<&std::path::Path>,
    out: &std::path::Path,
    parallel: bool,
) -> anyhow::Result<bool> {
    let cfg = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    let names = resolve_names(requested)?;

    let runs: Vec<(String, anyhow::Result<ScenarioRun>)> = if parallel {
        std::thread::scope(|scope| {
            let cfg = &cfg;
            let handles: Vec<_> = names
                .iter()
                .map(|name| {
                    let name = name.clone();
                    let handle = scope.spawn(move || gallery::run_scenario(&name, cfg));
                    handle
                })
                .collect();
            names
                .iter()
                .cloned()
                .zip(handles)
                .map(|(name, handle)| {
                    let result = handle.join().expect("scenario worker panicked");
                    (name, result)
                })
                .collect()
        })
    } else {
        names
            .iter()
            .map(|name| (name.clone(), gallery::run_scenario(name, &cfg)))
            .collect()
    };

    let mut clean = true;
    for (name, result) in runs {
        let run = result.with_context(|| format!("scenario {name}"))?;
        let summary = report::write_scenario(out, &run, &cfg)?;
        if summary.unexpected.is_empty() {
            println!(
                "{}: ok ({} passed, {} expected failures) -> {}",
                summary.scenario,
                summary.passed,
                summary.expected_failures,
                summary.dir.display()
            );
        } else {
            clean = false;
            println!(
                "{}: UNEXPECTED ({}) -> {}",
                summary.scenario,
                summary.unexpected.join("; "),
                summary.dir.display()
            );
        }
    }
    Ok(clean)
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    // ---- name resolution ----

    #[test]
    fn all_expands_in_gallery_order() {
        let names = resolve_names(&["all".to_string()]).unwrap();
        let expected: Vec<String> = SCENARIOS.iter().map(|(n, _)| n.to_string()).collect();
        assert_eq!(names, expected);
    }

    #[test]
    fn duplicates_collapse_and_order_is_kept() {
        let names = resolve_names(&[
            "sign-cocycle".to_string(),
            "koopman-derivation".to_string(),
            "sign-cocycle".to_string(),
        ])
        .unwrap();
        assert_eq!(names, ["sign-cocycle", "koopman-derivation"]);
    }

    #[test]
    fn unknown_names_error_with_the_valid_list() {
        let err = resolve_names(&["bogus".to_string()]).unwrap_err();
        let text = format!("{err}");
        assert!(text.contains("bogus"));
        assert!(text.contains("koopman-derivation"));
        assert!(text.contains("winding-obstruction"));
    }
}
