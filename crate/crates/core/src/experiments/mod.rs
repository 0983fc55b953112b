//! Seeded scenario runners. Each produces a per-replica table, a JSON summary
//! with pre-registered threshold checks, and an SVG chart.
//!
//! Replicas run in parallel and are collected by index, so reports do not
//! depend on the thread count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dists::{DistKind, DistributionSpec, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::io::{format_f64, write_report};
use crate::svg::Chart;

mod cube_corner;
mod deep;
mod intermediate;
mod parabola;
mod shallow;

pub use cube_corner::{corner_point, run_cube_corner};
pub use deep::run_deep;
pub use intermediate::{intermediate_point, run_intermediate};
pub use parabola::{detection_width, parabola_cloud, run_parabola};
pub use shallow::run_shallow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Shallow,
    Intermediate,
    Deep,
    Parabola,
    CubeCorner,
}

impl Scenario {
    pub const ALL: [Scenario; 5] =
        [Scenario::Shallow, Scenario::Intermediate, Scenario::Deep, Scenario::Parabola, Scenario::CubeCorner];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Shallow => "shallow",
            Scenario::Intermediate => "intermediate",
            Scenario::Deep => "deep",
            Scenario::Parabola => "parabola",
            Scenario::CubeCorner => "cube_corner",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Scenario::ALL.into_iter().find(|sc| sc.name() == key).ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// All knobs of every scenario; unused ones are ignored by a given runner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub dist: DistKind,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    /// Nested prefixes of one direction batch; `k` is always included.
    pub k_sweep: Vec<usize>,
    pub eps: f64,
    pub gamma: f64,
    /// Allowed failure rate for replica-count thresholds.
    pub delta: f64,
    pub replicas: usize,
    pub seed: u64,
    pub probes: usize,
    /// Monte Carlo samples per population estimate.
    pub budget: usize,
    pub a: f64,
    pub a_sweep: Vec<f64>,
    pub a_large: f64,
    pub max_draws: usize,
    /// Shallow: bound on the mean exceedance fraction at `k`.
    pub max_mean_fraction: f64,
    /// Deep: bound on the median of `‖m_{n,k}‖` at `k`.
    pub max_median_norm: f64,
    /// Cube corner: depth level counted per replica.
    pub corner_level: f64,
}

impl ExperimentConfig {
    /// Acceptance-scale defaults.
    pub fn defaults(scenario: Scenario) -> Self {
        let base = ExperimentConfig {
            scenario,
            dist: DistKind::Gaussian,
            d: 100,
            n: 0,
            k: 64,
            k_sweep: Vec::new(),
            eps: 0.1,
            gamma: 0.25,
            delta: 0.05,
            replicas: 20,
            seed: 0,
            probes: 2000,
            budget: DEFAULT_BUDGET,
            a: 0.8,
            a_sweep: vec![0.8, 0.4, 0.2, 0.1],
            a_large: 10.0,
            max_draws: 1_000_000,
            max_mean_fraction: 0.05,
            max_median_norm: 1.0,
            corner_level: 0.25,
        };
        match scenario {
            Scenario::Shallow => ExperimentConfig { k_sweep: vec![1, 2, 4, 8, 16, 32, 64], ..base },
            Scenario::Intermediate => ExperimentConfig { k: 1000, k_sweep: vec![1000], replicas: 100, ..base },
            Scenario::Deep => {
                ExperimentConfig { d: 10, n: 20_000, k: 600, k_sweep: vec![10, 100, 600], replicas: 50, ..base }
            }
            Scenario::Parabola => ExperimentConfig { d: 2, n: 6, k: 1, k_sweep: vec![1], ..base },
            Scenario::CubeCorner => {
                ExperimentConfig { dist: DistKind::Cube, d: 200, k: 100, k_sweep: vec![100], replicas: 100, ..base }
            }
        }
    }

    /// Defaults overlaid with the `common` and scenario sections of a JSON
    /// config (`{"common": {...}, "deep": {"n": 5000}, ...}`).
    pub fn from_sections(scenario: Scenario, file: Option<&Value>) -> Result<Self> {
        let mut v = serde_json::to_value(Self::defaults(scenario))?;
        if let Some(file) = file {
            let obj = file.as_object().ok_or_else(|| Error::invalid("config must be a JSON object of sections"))?;
            for key in obj.keys() {
                if key != "common" && Scenario::parse(key).is_err() {
                    return Err(Error::invalid(format!("unknown config section {key:?}")));
                }
            }
            let sections = obj.iter().filter(|(k, _)| *k == "common" || Scenario::parse(k).ok() == Some(scenario));
            // common first, then the scenario section.
            let mut ordered: Vec<_> = sections.collect();
            ordered.sort_by_key(|(k, _)| *k != "common");
            for (name, section) in ordered {
                let s =
                    section.as_object().ok_or_else(|| Error::invalid(format!("section {name:?} must be an object")))?;
                for (key, val) in s {
                    if key == "scenario" {
                        return Err(Error::invalid("the scenario is chosen on the command line, not in sections"));
                    }
                    v[key] = val.clone();
                }
            }
        }
        let cfg: ExperimentConfig = serde_json::from_value(v)?;
        Ok(cfg)
    }

    pub fn distribution(&self) -> Result<DistributionSpec> {
        DistributionSpec::new(self.dist, self.d)
    }

    /// `k_sweep ∪ {k}`, sorted and deduplicated.
    pub fn sweep(&self) -> Vec<usize> {
        let mut s = self.k_sweep.clone();
        s.push(self.k);
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        for (name, p) in [("eps", self.eps), ("gamma", self.gamma), ("delta", self.delta)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.replicas == 0 {
            return bad("replicas must be >= 1".into());
        }
        if self.d == 0 {
            return bad("d must be >= 1".into());
        }
        if self.k == 0 || self.k_sweep.contains(&0) {
            return bad("k must be >= 1".into());
        }
        match self.scenario {
            Scenario::Shallow => {
                if self.probes == 0 {
                    return bad("probes must be >= 1".into());
                }
            }
            Scenario::Intermediate => {
                if self.dist != DistKind::Gaussian {
                    return bad("intermediate requires the gaussian law (closed-form oracle)".into());
                }
                if !(self.gamma > 0.0 && self.gamma < 0.5) {
                    return bad(format!("intermediate requires 0 < gamma < 1/2, got {}", self.gamma));
                }
            }
            Scenario::Deep => {
                if self.dist == DistKind::LaplaceProduct {
                    return bad("deep requires a halfspace-symmetric law with known median (gaussian or cube)".into());
                }
                if self.n == 0 {
                    return bad("n must be >= 1".into());
                }
            }
            Scenario::Parabola => {
                if self.d != 2 {
                    return bad(format!("parabola requires d=2, got d={}", self.d));
                }
                if self.n < 4 || self.n % 2 == 1 {
                    return bad(format!("parabola requires an even n >= 4, got {}", self.n));
                }
                if [self.a, self.a_large].iter().chain(&self.a_sweep).any(|a| a.is_nan() || *a <= 0.0) {
                    return bad("parabola requires a > 0".into());
                }
                if self.max_draws == 0 {
                    return bad("max_draws must be >= 1".into());
                }
            }
            Scenario::CubeCorner => {
                if self.dist != DistKind::Cube {
                    return bad("cube_corner requires the cube law".into());
                }
                if self.budget == 0 {
                    return bad("budget must be >= 1".into());
                }
            }
        }
        Ok(())
    }
}

/// One pre-registered threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub name: String,
    pub value: f64,
    pub comparison: String,
    pub threshold: f64,
    pub pass: bool,
}

impl ThresholdCheck {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        ThresholdCheck { name: name.into(), value, comparison: "<=".into(), threshold, pass: value <= threshold }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        ThresholdCheck { name: name.into(), value, comparison: ">=".into(), threshold, pass: value >= threshold }
    }

    pub fn holds(name: &str, pass: bool) -> Self {
        ThresholdCheck {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            comparison: "==".into(),
            threshold: 1.0,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub columns: Vec<String>,
    /// One row per replica; written to CSV, not to the JSON summary.
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, Value>,
    pub checks: Vec<ThresholdCheck>,
    pub pass: bool,
    /// Only filled on request, so that default outputs stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_s: Option<f64>,
    #[serde(skip)]
    pub plot: Option<String>,
}

/// Output paths of a written report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: Option<PathBuf>,
}

impl ExperimentReport {
    fn new(cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        ExperimentReport {
            scenario: cfg.scenario,
            config: cfg.clone(),
            seed: cfg.seed,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            pass: false,
            wall_clock_s: None,
            plot: None,
        }
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), json!(value));
    }

    fn finish(mut self, chart: Chart) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self.plot = Some(chart.render());
        self
    }

    /// Writes `<scenario>.csv`, `<scenario>.json` and `<scenario>.svg` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<ReportFiles> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stem = self.scenario.name();
        let csv = dir.join(format!("{stem}.csv"));
        let mut text = self.columns.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(&csv, text).map_err(|e| Error::io(&csv, e))?;
        let json = dir.join(format!("{stem}.json"));
        write_report(&json, self)?;
        let svg = match &self.plot {
            Some(s) => {
                let p = dir.join(format!("{stem}.svg"));
                std::fs::write(&p, s).map_err(|e| Error::io(&p, e))?;
                Some(p)
            }
            None => None,
        };
        Ok(ReportFiles { csv, json, svg })
    }
}

/// Runs the scenario named in `cfg` after validating it.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Shallow => run_shallow(cfg),
        Scenario::Intermediate => run_intermediate(cfg),
        Scenario::Deep => run_deep(cfg),
        Scenario::Parabola => run_parabola(cfg),
        Scenario::CubeCorner => run_cube_corner(cfg),
    }
}

fn cell_f(v: f64) -> String {
    format_f64(v)
}

fn cell_u(v: impl Into<u64>) -> String {
    v.into().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::parse(s.name()).unwrap(), s);
        }
        assert_eq!(Scenario::parse("cube-corner").unwrap(), Scenario::CubeCorner);
        let err = Scenario::parse("bogus").unwrap_err();
        assert!(err.to_string().contains("unknown scenario"));
    }

    #[test]
    fn defaults_validate() {
        for s in Scenario::ALL {
            ExperimentConfig::defaults(s).validate().unwrap();
        }
    }

    #[test]
    fn sections_override_defaults() {
        let file =
            json!({"common": {"seed": 9, "replicas": 3}, "deep": {"n": 500, "replicas": 4}, "shallow": {"k": 2}});
        let c = ExperimentConfig::from_sections(Scenario::Deep, Some(&file)).unwrap();
        assert_eq!((c.seed, c.n, c.replicas, c.k), (9, 500, 4, 600));
        let s = ExperimentConfig::from_sections(Scenario::Shallow, Some(&file)).unwrap();
        assert_eq!((s.seed, s.replicas, s.k), (9, 3, 2));
    }

    #[test]
    fn malformed_sections_are_rejected() {
        assert!(ExperimentConfig::from_sections(Scenario::Deep, Some(&json!({"deep": {"nn": 1}}))).is_err());
        assert!(ExperimentConfig::from_sections(Scenario::Deep, Some(&json!({"bogus": {}}))).is_err());
        assert!(ExperimentConfig::from_sections(Scenario::Deep, Some(&json!([1, 2]))).is_err());
        assert!(ExperimentConfig::from_sections(Scenario::Deep, Some(&json!({"deep": {"n": "x"}}))).is_err());
    }

    #[test]
    fn validation_rules() {
        let mut c = ExperimentConfig::defaults(Scenario::Intermediate);
        c.k = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Scenario::Intermediate);
        c.gamma = 0.5;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Scenario::Parabola);
        c.n = 7;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Scenario::CubeCorner);
        c.dist = DistKind::Gaussian;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sweep_includes_k() {
        let c = ExperimentConfig { k: 5, k_sweep: vec![10, 1, 10], ..ExperimentConfig::defaults(Scenario::Shallow) };
        assert_eq!(c.sweep(), vec![1, 5, 10]);
    }
}
