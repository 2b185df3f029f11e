//! Acceptance criteria as named checks with pinned tolerances.

mod coulomb_spin;
mod lemma;
mod numerics;
mod waves;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::config_hash;
use crate::scenarios::config::{ScenarioFile, SCENARIOS};

pub use lemma::{residual_slope, SlopeReport};

/// Outcome of one measured quantity.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// `None` for reported-only quantities.
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value, tolerance: Some(tolerance), detail: detail.into() }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value >= tolerance, value, tolerance: Some(tolerance), detail: detail.into() }
    }

    pub fn report(name: &str, value: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, value, tolerance: None, detail: detail.into() }
    }

    fn failed(name: &str, err: &Error) -> Self {
        Self { name: name.into(), passed: false, value: f64::NAN, tolerance: None, detail: err.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

/// Loaded acceptance configs keyed by scenario name.
#[derive(Debug, Clone)]
pub struct Suite {
    files: BTreeMap<String, ScenarioFile>,
    hashes: BTreeMap<String, String>,
}

impl Suite {
    /// Built-in defaults for every scenario.
    pub fn defaults() -> Self {
        let mut files = BTreeMap::new();
        let mut hashes = BTreeMap::new();
        for name in SCENARIOS {
            let text = format!("scenario = \"{name}\"\n");
            files.insert(name.to_string(), ScenarioFile::parse(&text, false).expect("static config"));
            hashes.insert(name.to_string(), config_hash(&text));
        }
        Self { files, hashes }
    }

    /// Every `*.toml` / `*.json` file in `dir`; each scenario must be present.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        let mut hashes = BTreeMap::new();
        let mut entries: Vec<_> = std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        entries.sort();
        for path in entries {
            if !path.extension().is_some_and(|e| e == "toml" || e == "json") {
                continue;
            }
            let (file, text) = ScenarioFile::load(&path)?;
            check_tolerance_keys(&file)?;
            hashes.insert(file.scenario.clone(), config_hash(&text));
            if files.insert(file.scenario.clone(), file).is_some() {
                return Err(Error::Config(format!("duplicate config for scenario in {}", path.display())));
            }
        }
        for name in SCENARIOS {
            if !files.contains_key(name) {
                return Err(Error::Config(format!("no config for scenario `{name}` in {}", dir.display())));
            }
        }
        Ok(Self { files, hashes })
    }

    pub fn file(&self, scenario: &str) -> &ScenarioFile {
        &self.files[scenario]
    }

    pub fn hash(&self, scenario: &str) -> &str {
        &self.hashes[scenario]
    }

    pub(crate) fn tol(&self, scenario: &str, key: &str, default: f64) -> f64 {
        self.file(scenario).tolerance(key, default)
    }

    pub(crate) fn seed(&self, scenario: &str, default: u64) -> u64 {
        self.file(scenario).seed.unwrap_or(default)
    }
}

/// Tolerance keys read by the criteria, per scenario file.
pub const TOLERANCE_KEYS: [(&str, &[&str]); 7] = [
    ("two-slit", &["residual_slope", "hj_residual", "symmetry", "axis_max_cells", "extrema_cells"]),
    ("aharonov-bohm", &[]),
    ("box", &["spectrum", "fidelity", "filter_on", "filter_off", "cn_drift", "pipeline"]),
    ("tunneling", &["equations", "wave_residual"]),
    ("harmonic", &["mehler", "propagation", "free_limit", "hj_residual"]),
    ("coulomb", &["round_trip", "closure", "spectrum", "orbital"]),
    ("epr", &["correlation", "hidden", "chsh", "binary_chsh", "algebra"]),
];

fn check_tolerance_keys(file: &ScenarioFile) -> Result<()> {
    let known = TOLERANCE_KEYS.iter().find(|(s, _)| *s == file.scenario).map_or(&[][..], |(_, k)| *k);
    match file.tolerances.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::Config(format!("unknown tolerance `{k}` for scenario `{}`", file.scenario))),
        None => Ok(()),
    }
}

type CheckFn = fn(&Suite) -> Result<Vec<CheckResult>>;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub suite: &'static str,
    pub tags: &'static [&'static str],
    run: CheckFn,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "branch exactness (residual slope, HJ residual)",
            suite: "lemma",
            tags: &["lemma", "residual", "branches"],
            run: lemma::criterion,
        },
        Criterion { id: 2, title: "two-slit screen pattern", suite: "two-slit", tags: &["two-slit", "wave"], run: waves::two_slit },
        Criterion { id: 3, title: "box spectrum and stationary eigenterms", suite: "box", tags: &["box", "spectrum", "oracle"], run: waves::particle_box },
        Criterion { id: 4, title: "harmonic kernel", suite: "harmonic", tags: &["harmonic", "oracle"], run: waves::harmonic },
        Criterion { id: 5, title: "tunneling step", suite: "tunneling", tags: &["tunneling", "oracle"], run: waves::tunneling },
        Criterion { id: 6, title: "Coulomb / Kepler", suite: "coulomb", tags: &["coulomb", "spectrum"], run: coulomb_spin::coulomb },
        Criterion { id: 7, title: "spin correlations", suite: "epr", tags: &["epr", "spin"], run: coulomb_spin::epr },
        Criterion { id: 8, title: "Pauli/Dirac algebra", suite: "algebra", tags: &["algebra", "spin", "epr"], run: coulomb_spin::algebra },
        Criterion { id: 9, title: "quantization filter", suite: "quantize", tags: &["quantize", "spectrum", "box", "coulomb"], run: numerics::quantization },
        Criterion { id: 10, title: "norm conservation", suite: "norm", tags: &["norm", "oracle"], run: numerics::norm },
    ]
}

impl Criterion {
    pub fn matches(&self, filter: Option<&str>) -> bool {
        match filter {
            None => true,
            Some(f) => f.split(',').map(str::trim).any(|f| f == self.id.to_string() || self.suite == f || self.tags.contains(&f)),
        }
    }

    pub fn run(&self, suite: &Suite) -> CriterionReport {
        let start = Instant::now();
        let checks = match (self.run)(suite) {
            Ok(c) => c,
            Err(e) => vec![CheckResult::failed("run", &e)],
        };
        CriterionReport {
            id: self.id,
            title: self.title,
            suite: self.suite,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Run every criterion selected by `filter` (comma-separated ids, suites or tags).
pub fn verify_all(suite: &Suite, filter: Option<&str>) -> Vec<CriterionReport> {
    criteria().iter().filter(|c| c.matches(filter)).map(|c| c.run(suite)).collect()
}

/// Human-readable table.
pub fn summary_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("[{}] criterion {:>2}: {} ({:.1}s)\n", if r.passed { "PASS" } else { "FAIL" }, r.id, r.title, r.seconds));
        for c in &r.checks {
            let status = match (c.tolerance, c.passed) {
                (None, _) => "info",
                (Some(_), true) => "ok",
                (Some(_), false) => "FAIL",
            };
            let tol = c.tolerance.map_or(String::new(), |t| format!(" (tol {t:.3e})"));
            out.push_str(&format!("    {status:>4} {:<34} {:>12.5e}{tol}  {}\n", c.name, c.value, c.detail));
        }
    }
    out
}
