//! `randepth`: exact and random Tukey depth, random Tukey medians, and the
//! seeded experiment and verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use randepth_core::depth::{exact_depth_1d, exact_depth_2d, exact_depth_small_d, grid_depth, random_depth};
use randepth_core::dists::{sample, DistKind, DistributionSpec};
use randepth_core::experiments::{run, ExperimentConfig, ExperimentReport, Scenario};
use randepth_core::io::{format_f64, read_cloud_csv, write_cloud_csv, write_report};
use randepth_core::median::random_tukey_median;
use randepth_core::sphere::{sample_sphere, DirectionBatch};
use randepth_core::verify::run_selected;
use randepth_core::{DepthResult, Error, PointCloud, SeedSpec, Vector};

const OUT_DIR_ENV: &str = "RANDEPTH_OUT_DIR";

#[derive(Parser)]
#[command(name = "randepth", version, about = "Exact and random Tukey depth")]
struct Cli {
    /// Worker threads (default: all cores). Never changes any output byte.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point cloud from a distribution and write it as CSV.
    Sample(SampleArgs),
    /// Depth of query points with respect to a cloud.
    Depth(DepthArgs),
    /// Random Tukey median of a cloud.
    Median(MedianArgs),
    /// Run one scenario, or `all`.
    Experiment(Box<ExperimentArgs>),
    /// Run the numerical verification checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value = "gaussian")]
    dist: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact1d,
    Exact2d,
    Exactsmall,
    Random,
    Grid,
}

#[derive(Args)]
struct DepthArgs {
    #[arg(long)]
    cloud: PathBuf,
    /// One query point per row.
    #[arg(long)]
    query: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Directions for `random`.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Directions for `grid`.
    #[arg(long, default_value_t = 100_000)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input CSVs start with a header row.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct MedianArgs {
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the signed coordinate axes `±e_j` instead of random directions.
    #[arg(long)]
    axis_dirs: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// shallow, intermediate, deep, parabola, cube_corner, or all.
    scenario: String,
    /// JSON file with `common` and per-scenario sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock seconds in the JSON report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    k_sweep: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    a_sweep: Option<Vec<f64>>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every check (the default).
    #[arg(long)]
    all: bool,
    /// Run only the named check.
    #[arg(long, conflicts_with = "all")]
    only: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
    partial: Option<(PathBuf, Value)>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_usage() { 2 } else { 3 }, message: e.to_string(), partial: None }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into(), partial: None }
}

type Outcome = Result<bool, Failure>;

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"))
}

fn out_file(explicit: Option<PathBuf>, name: &str) -> Result<PathBuf, Failure> {
    let p = explicit.unwrap_or_else(|| out_dir().join(name));
    if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Failure::from(Error::Io { path: parent.into(), source: e }))?;
    }
    Ok(p)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let dist = DistributionSpec::new(DistKind::parse(&a.dist)?, a.d)?;
    if a.n == 0 {
        return Err(usage("n must be >= 1"));
    }
    let cloud = sample(&dist, a.n, &mut SeedSpec::new(a.seed).rng("sample", 0))?;
    let path = out_file(a.out, "cloud.csv")?;
    write_cloud_csv(&path, &cloud, a.header)?;
    println!("wrote {} points in d={} to {}", a.n, a.d, path.display());
    Ok(true)
}

fn depth_row(q: usize, r: &DepthResult) -> String {
    let mut cells = vec![
        q.to_string(),
        format_f64(r.value),
        r.count.map(|c| c.to_string()).unwrap_or_default(),
        r.n.map(|c| c.to_string()).unwrap_or_default(),
        serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
    ];
    cells.extend(r.witness.as_slice().iter().map(|v| format_f64(*v)));
    cells.join(",")
}

fn cmd_depth(a: DepthArgs) -> Outcome {
    let cloud = read_cloud_csv(&a.cloud, a.header)?;
    let queries = read_cloud_csv(&a.query, a.header)?;
    if queries.dim() != cloud.dim() {
        return Err(usage(format!("query has d={} but the cloud has d={}", queries.dim(), cloud.dim())));
    }
    let d = cloud.dim();
    let seeds = SeedSpec::new(a.seed);
    let dirs = match a.method {
        Method::Random => {
            if a.k == 0 {
                return Err(usage("k must be >= 1"));
            }
            Some(sample_sphere(d, a.k, &mut seeds.rng("depth-dirs", 0))?)
        }
        _ => None,
    };
    let mut text = String::from("query,value,count,n,method");
    for j in 1..=d {
        text.push_str(&format!(",witness{j}"));
    }
    text.push('\n');
    for (q, p) in queries.points().enumerate() {
        let x = Vector::new(p.to_vec())?;
        let r = match a.method {
            Method::Exact1d => exact_depth_1d(&cloud, &x)?,
            Method::Exact2d => exact_depth_2d(&cloud, &x)?,
            Method::Exactsmall => exact_depth_small_d(&cloud, &x)?,
            Method::Random => random_depth(&cloud, &x, dirs.as_ref().expect("sampled above"))?,
            Method::Grid => grid_depth(&cloud, &x, a.grid, &mut seeds.rng("depth-grid", q as u64))?,
        };
        println!("query {q}: depth {}", format_f64(r.value));
        text.push_str(&depth_row(q, &r));
        text.push('\n');
    }
    let path = out_file(a.out, "depth.csv")?;
    write_text(&path, &text)?;
    Ok(true)
}

fn median_dirs(cloud: &PointCloud, a: &MedianArgs) -> Result<DirectionBatch, Failure> {
    if a.axis_dirs {
        return Ok(DirectionBatch::axes(cloud.dim()));
    }
    if a.k == 0 {
        return Err(usage("k must be >= 1"));
    }
    Ok(sample_sphere(cloud.dim(), a.k, &mut SeedSpec::new(a.seed).rng("median-dirs", 0))?)
}

fn cmd_median(a: MedianArgs) -> Outcome {
    let cloud = read_cloud_csv(&a.cloud, a.header)?;
    let dirs = median_dirs(&cloud, &a)?;
    let path = out_file(a.out.clone(), "median.json")?;
    match random_tukey_median(&cloud, &dirs) {
        Ok(m) => {
            let report = json!({ "seed": a.seed, "axis_dirs": a.axis_dirs, "result": m });
            write_report(&path, &report)?;
            println!(
                "median at level {}/{} (depth {}/{}), radius {}",
                m.level_count,
                m.n,
                m.depth_count,
                m.n,
                format_f64(m.radius)
            );
            Ok(true)
        }
        Err(e) => {
            let mut f = Failure::from(e);
            let partial = json!({
                "seed": a.seed,
                "axis_dirs": a.axis_dirs,
                "n": cloud.len(),
                "k": dirs.len(),
                "error": f.message,
            });
            f.partial = Some((path, partial));
            Err(f)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Option<Value>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::from(Error::Io { path: path.into(), source: e }))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("malformed config {}: {e}", path.display())))?;
    Ok(Some(v))
}

fn apply_flags(cfg: &mut ExperimentConfig, a: &ExperimentArgs) -> Result<(), Failure> {
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = &a.dist {
        cfg.dist = DistKind::parse(v)?;
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = &a.$f { cfg.$f = v.clone(); } )* };
    }
    set!(d, n, k, k_sweep, eps, gamma, delta, replicas, probes, budget, a, a_sweep);
    Ok(())
}

fn print_report(r: &ExperimentReport) {
    println!("{}: {}", r.scenario.name(), if r.pass { "pass" } else { "FAIL" });
    for c in &r.checks {
        println!(
            "  {} {} = {} {} {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            format_f64(c.value),
            c.comparison,
            format_f64(c.threshold)
        );
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Outcome {
    let scenarios = if a.scenario == "all" { Scenario::ALL.to_vec() } else { vec![Scenario::parse(&a.scenario)?] };
    let file = load_config(a.config.as_deref())?;
    let dir = a.out.clone().unwrap_or_else(out_dir);
    let mut configs = Vec::new();
    for s in scenarios {
        let mut cfg = ExperimentConfig::from_sections(s, file.as_ref())?;
        apply_flags(&mut cfg, &a)?;
        cfg.validate()?;
        configs.push(cfg);
    }
    let mut all_pass = true;
    for cfg in configs {
        let start = Instant::now();
        let mut report = run(&cfg)?;
        if a.timing {
            report.wall_clock_s = Some(start.elapsed().as_secs_f64());
        }
        let files = report.write(&dir)?;
        print_report(&report);
        println!("  wrote {}", files.json.display());
        all_pass &= report.pass;
    }
    Ok(all_pass)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let dir = a.out.clone().unwrap_or_else(|| out_dir().join("verify"));
    let reports = run_selected(a.seed, a.only.as_deref())?;
    std::fs::create_dir_all(&dir).map_err(|e| Failure::from(Error::Io { path: dir.clone(), source: e }))?;
    for r in &reports {
        write_report(dir.join(format!("{}.json", r.name)), r)?;
        println!("{} {} (worst margin {})", if r.pass { "ok  " } else { "FAIL" }, r.name, format_f64(r.worst_margin));
    }
    let pass = reports.iter().all(|r| r.pass);
    let summary = json!({
        "seed": a.seed,
        "pass": pass,
        "checks": reports.iter().map(|r| json!({ "name": r.name, "pass": r.pass })).collect::<Vec<_>>(),
    });
    write_report(dir.join("summary.json"), &summary)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let outcome = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Depth(a) => cmd_depth(a),
        Command::Median(a) => cmd_median(a),
        Command::Experiment(a) => cmd_experiment(*a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some((path, v)) = f.partial {
                if write_report(&path, &v).is_ok() {
                    eprintln!("partial report written to {}", path.display());
                }
            }
            ExitCode::from(f.code)
        }
    }
}
