//! `mpw`: run scenarios, verify the acceptance suite, print the config schema.

mod artifacts;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mpw_core::oracle::config_hash;
use mpw_core::scenarios::config::{schema, SCENARIOS};
use mpw_core::scenarios::ScenarioFile;
use mpw_core::verify::{summary_table, verify_all, CheckResult, Suite};
use serde_json::json;

use artifacts::Artifacts;
use run::Overrides;

#[derive(Parser)]
#[command(name = "mpw", version, about = "Wave functions assembled from multi-valued classical action")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its tables and reports.
    Run {
        /// two-slit, aharonov-bohm, box, tunneling, harmonic, coulomb or epr.
        scenario: String,
        /// Scenario file, or a directory holding `<scenario>.toml`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "MPW_OUT_DIR", default_value = "mpw-out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Multiplies every grid's interval count.
        #[arg(long, default_value_t = 1.0)]
        grid_scale: f64,
        /// Screen position `x¹` (two-slit, aharonov-bohm).
        #[arg(long)]
        screen: Option<f64>,
        /// Number of quantized levels (box, harmonic, coulomb).
        #[arg(long)]
        levels: Option<usize>,
        /// Comma-separated filter angles in degrees (epr).
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<f64>>,
        /// Evaluation time (box, harmonic).
        #[arg(long)]
        time: Option<f64>,
    },
    /// Run the acceptance criteria against a config directory.
    VerifyAll {
        #[arg(long, default_value = "configs")]
        config: PathBuf,
        /// Comma-separated criterion ids, suites or tags.
        #[arg(long)]
        filter: Option<String>,
        /// Directory for `summary.json`.
        #[arg(long, env = "MPW_OUT_DIR")]
        out: Option<PathBuf>,
        /// Print the JSON summary instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Print every scenario's parameters with their defaults.
    DumpConfigSchema,
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(name: &str, config: Option<&Path>) -> Result<(ScenarioFile, String, String)> {
    if !SCENARIOS.contains(&name) {
        bail!("unknown scenario `{name}`; expected one of {}", SCENARIOS.join(", "));
    }
    let Some(path) = config else {
        let text = format!("scenario = \"{name}\"\n");
        return Ok((ScenarioFile::parse(&text, false)?, config_hash(&text), "<defaults>".into()));
    };
    let path = if path.is_dir() {
        let toml = path.join(format!("{name}.toml"));
        if toml.exists() {
            toml
        } else {
            path.join(format!("{name}.json"))
        }
    } else {
        path.to_path_buf()
    };
    let (file, text) = ScenarioFile::load(&path).with_context(|| format!("loading {}", path.display()))?;
    if file.scenario != name {
        bail!("{} describes `{}`, not `{name}`", path.display(), file.scenario);
    }
    Ok((file, config_hash(&text), path.display().to_string()))
}

fn print_checks(checks: &[CheckResult]) {
    for c in checks {
        let status = match (c.tolerance, c.passed) {
            (None, _) => "info",
            (Some(_), true) => "ok",
            (Some(_), false) => "FAIL",
        };
        let tol = c.tolerance.map_or(String::new(), |t| format!(" (tol {t:.3e})"));
        println!("{status:>4} {:<34} {:>12.5e}{tol}  {}", c.name, c.value, c.detail);
    }
}

fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { scenario, config, out, seed, grid_scale, screen, levels, angles, time } => {
            if !grid_scale.is_finite() || grid_scale <= 0.0 {
                bail!("--grid-scale must be positive");
            }
            let (file, hash, source) = load_scenario(&scenario, config.as_deref())?;
            let seed = seed.or(file.seed);
            let dir = out.join(&scenario);
            let mut artifacts = Artifacts::new(&dir, &hash, seed)?;
            let ov = Overrides { seed, grid_scale, screen, levels, angles, time };
            let checks = run::run(&file, &ov, &mut artifacts)?;
            let passed = checks.iter().all(|c| c.passed);
            let mut files = artifacts.files().to_vec();
            files.push("manifest.json".into());
            artifacts.json(
                "manifest.json",
                json!({ "scenario": scenario, "config": source, "out": dir, "grid_scale": grid_scale, "files": files, "passed": passed, "checks": checks }),
            )?;
            print_checks(&checks);
            println!("{} {scenario}: {} files in {}", if passed { "PASS" } else { "FAIL" }, files.len(), dir.display());
            Ok(passed)
        }
        Command::VerifyAll { config, filter, out, json } => {
            let suite = Suite::load(&config).with_context(|| format!("loading configs from {}", config.display()))?;
            let reports = verify_all(&suite, filter.as_deref());
            if reports.is_empty() {
                bail!("filter {:?} selects no criterion", filter.unwrap_or_default());
            }
            let passed = reports.iter().all(|r| r.passed);
            let hashes: serde_json::Map<String, serde_json::Value> = SCENARIOS.iter().map(|s| (s.to_string(), json!(suite.hash(s)))).collect();
            let summary = json!({ "passed": passed, "config_hashes": hashes, "criteria": reports });
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                print!("{}", summary_table(&reports));
                let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
                if failed.is_empty() {
                    println!("all {} criteria passed", reports.len());
                } else {
                    println!("failed criteria: {}", failed.join(", "));
                }
            }
            Ok(passed)
        }
        Command::DumpConfigSchema => {
            println!("{}", serde_json::to_string_pretty(&schema())?);
            Ok(true)
        }
    }
}
