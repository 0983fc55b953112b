//! Numeric checks of the inequalities behind the depth bounds.
//!
//! Each check returns a [`CheckReport`] whose `worst_margin` is the smallest
//! slack (right side minus left side) seen over its grid or replicas. Checks
//! whose constants are unspecified report trends and exceedance rates only.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::depth::{exact_depth, pop_random_depth, random_depth};
use crate::dists::{
    numeric_moments, pop_depth, sample, DistKind, DistributionSpec, LogConcave1D, McBudget, PopDepthMethod,
};
use crate::error::{Error, Result};
use crate::gauss::{phi_cdf, phi_quantile, sqrt_2pi};
use crate::geom::{dot, norm, Vector};
use crate::seed::SeedSpec;
use crate::sphere::{gram_schmidt, sample_direction, sample_sphere};
use crate::stats::{mean, ols};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub grid: String,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seeds: Vec<u64>,
    pub metrics: BTreeMap<String, Value>,
}

impl CheckReport {
    fn new(name: &str, grid: String, worst_margin: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            grid,
            worst_margin,
            tolerance,
            pass: worst_margin >= -tolerance,
            seeds: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn metric(mut self, key: &str, value: impl Serialize) -> Self {
        self.metrics.insert(key.to_string(), json!(value));
        self
    }
}

/// `n` log-spaced points strictly inside `(lo, hi)`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (1..=n).map(|i| (a + (b - a) * i as f64 / (n + 1) as f64).exp()).collect()
}

/// `Φ⁻¹(ε/2) − Φ⁻¹(ε/4)` and `√(2π) / (4 log(1/ε))`.
pub fn phi_control_sides(eps: f64) -> Result<(f64, f64)> {
    let lhs = phi_quantile(eps / 2.0)? - phi_quantile(eps / 4.0)?;
    let rhs = sqrt_2pi() / (4.0 * (1.0 / eps).ln());
    Ok((lhs, rhs))
}

/// Gaussian quantile gap against its logarithmic lower bound, for `0 < ε < e⁻²`.
pub fn check_phi_control(eps_grid: &[f64]) -> Result<CheckReport> {
    let limit = (-2.0f64).exp();
    if let Some(&bad) = eps_grid.iter().find(|&&e| !(e > 0.0 && e < limit)) {
        return Err(Error::invalid(format!("eps {bad} outside (0, e^-2)")));
    }
    let mut worst = (f64::INFINITY, f64::NAN);
    for &e in eps_grid {
        let (lhs, rhs) = phi_control_sides(e)?;
        if lhs - rhs < worst.0 {
            worst = (lhs - rhs, e);
        }
    }
    let lo = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eps_grid.iter().copied().fold(0.0, f64::max);
    Ok(CheckReport::new("phi_control", format!("{} eps in [{lo:e}, {hi:e}]", eps_grid.len()), worst.0, 0.0)
        .metric("worst_eps", worst.1))
}

/// `max_i ‖U_i − V_i‖` over one Gram–Schmidt batch.
pub fn gram_schmidt_distance(d: usize, k: usize, seeds: &SeedSpec, replica: u64) -> Result<f64> {
    let batch = sample_sphere(d, k, &mut seeds.rng("gs-batch", replica))?;
    let ortho = gram_schmidt(&batch)?;
    Ok(batch
        .iter()
        .zip(ortho.iter())
        .map(|(u, v)| u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// Frequency of `max_i ‖U_i − V_i‖ > √(4k/d)`; passes at ≤ 1%.
pub fn check_gram_schmidt_bound(d: usize, k: usize, replicas: usize, seeds: &SeedSpec) -> Result<CheckReport> {
    if k == 0 || k > d || replicas == 0 {
        return Err(Error::invalid(format!("gram_schmidt check needs 1 <= k <= d and replicas > 0 (k={k}, d={d})")));
    }
    let bound = (4.0 * k as f64 / d as f64).sqrt();
    let dists = (0..replicas as u64)
        .into_par_iter()
        .map(|r| gram_schmidt_distance(d, k, seeds, r))
        .collect::<Result<Vec<_>>>()?;
    let exceed = dists.iter().filter(|&&x| x > bound).count() as f64 / replicas as f64;
    let max = dists.iter().copied().fold(0.0, f64::max);
    let mut r =
        CheckReport::new("gram_schmidt_bound", format!("d={d}, k={k}, {replicas} replicas"), 0.01 - exceed, 0.0)
            .metric("bound", bound)
            .metric("exceedance", exceed)
            .metric("max_distance", max)
            .metric("mean_distance", mean(&dists));
    r.seeds = vec![seeds.master, seeds.derive("gs-batch", 0)];
    Ok(r)
}

/// `e^{7.1} · exp(−(|t| − 2e⁴) · ln 2 / (2e⁴))`.
pub fn density_envelope(t: f64) -> f64 {
    let e4 = E.powi(4);
    (7.1 - (t.abs() - 2.0 * e4) * LN_2 / (2.0 * e4)).exp()
}

/// Margins of the four density bounds for one family member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMargins {
    pub at_median: f64,
    pub near_median: f64,
    pub sup: f64,
    pub envelope: f64,
}

impl DensityMargins {
    pub fn worst(&self) -> f64 {
        self.at_median.min(self.near_median).min(self.sup).min(self.envelope)
    }
}

pub fn density_margins(f: LogConcave1D) -> Result<DensityMargins> {
    let mom = numeric_moments(f);
    if (mom.variance - 1.0).abs() > 1e-6 || (mom.median - f.median()).abs() > 1e-9 {
        return Err(Error::Precondition {
            name: f.name().to_string(),
            reason: format!("variance {} and median {} must be 1 and 0", mom.variance, mom.median),
        });
    }
    let e4 = E.powi(4);
    let half = 1.0 / (3.0 * e4);
    let grid = (-50_000..=50_000).map(|i| i as f64 * 1e-3);
    let (mut near, mut sup, mut env) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for t in grid.chain([-half, half]) {
        let v = f.density(t);
        if t.abs() <= half {
            near = near.min(v - 1.0 / (4.0 * e4));
        }
        sup = sup.max(v);
        env = env.min(density_envelope(t) - v);
    }
    Ok(DensityMargins {
        at_median: f.density(f.median()) - (-4.0f64).exp() / 2.0,
        near_median: near,
        sup: 7.1f64.exp() - sup,
        envelope: env,
    })
}

/// The four density bounds on `[−50, 50]` (step `1e−3`) for each member.
pub fn check_density_bounds(family: &[LogConcave1D]) -> Result<CheckReport> {
    let mut worst = f64::INFINITY;
    let mut per = BTreeMap::new();
    for &f in family {
        let m = density_margins(f)?;
        worst = worst.min(m.worst());
        per.insert(f.name().to_string(), json!(m));
    }
    let names: Vec<&str> = family.iter().map(|f| f.name()).collect();
    Ok(CheckReport::new("density_bounds", format!("t in [-50, 50] step 1e-3; {}", names.join(", ")), worst, 0.0)
        .metric("members", per))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalGapConfig {
    pub dist: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub probes: usize,
    pub replicas: usize,
    /// Shared directions when `d > 3`.
    pub k: usize,
    pub budget: McBudget,
}

impl EmpiricalGapConfig {
    pub fn gaussian_2d() -> Self {
        EmpiricalGapConfig {
            dist: DistributionSpec::gaussian(2),
            n_grid: vec![1_000, 10_000, 100_000],
            probes: 200,
            replicas: 20,
            k: 100,
            budget: McBudget::default(),
        }
    }
}

/// `max` over probes of `|population depth − empirical depth|` for one `(n, replica)`.
pub fn empirical_gap(cfg: &EmpiricalGapConfig, n: usize, replica: u64, seeds: &SeedSpec) -> Result<f64> {
    let d = cfg.dist.d;
    let cloud = sample(&cfg.dist, n, &mut seeds.fork("gap-cloud", n as u64).rng("replica", replica))?;
    let probes = sample(&cfg.dist, cfg.probes, &mut seeds.rng("gap-probes", replica))?;
    let shared = sample_sphere(d, cfg.k, &mut seeds.rng("gap-dirs", replica))?;
    let mut worst = 0.0f64;
    for p in probes.points() {
        let x = Vector::new(p.to_vec())?;
        let (pop, emp) = if d <= 3 {
            let pop = match cfg.dist.kind {
                DistKind::Gaussian => phi_cdf(-x.norm()),
                _ => pop_depth(&cfg.dist, &x, PopDepthMethod { budget: cfg.budget, ..Default::default() })?.value,
            };
            (pop, exact_depth(&cloud, &x)?.value)
        } else {
            (pop_random_depth(&cfg.dist, &x, &shared, cfg.budget)?.value, random_depth(&cloud, &x, &shared)?.value)
        };
        worst = worst.max((pop - emp).abs());
    }
    Ok(worst)
}

/// `G(n)` over `n_grid`: passes when `G(n_min)/G(n_max) ≥ 5` and the log-log
/// slope of the replica-mean lies in `[−0.65, −0.35]`.
pub fn check_empirical_gap(cfg: &EmpiricalGapConfig, seeds: &SeedSpec) -> Result<CheckReport> {
    if cfg.n_grid.len() < 2 || cfg.replicas == 0 || cfg.probes == 0 {
        return Err(Error::invalid("empirical gap check needs >= 2 sample sizes, probes and replicas"));
    }
    let tasks: Vec<(usize, u64)> =
        (0..cfg.replicas as u64).flat_map(|r| cfg.n_grid.iter().map(move |&n| (n, r))).collect();
    let gaps = tasks.par_iter().map(|&(n, r)| empirical_gap(cfg, n, r, seeds)).collect::<Result<Vec<_>>>()?;
    let m = cfg.n_grid.len();
    let per_replica: Vec<&[f64]> = gaps.chunks(m).collect();
    let g_mean: Vec<f64> = (0..m).map(|i| mean(&per_replica.iter().map(|r| r[i]).collect::<Vec<_>>())).collect();
    let decreasing = per_replica.iter().filter(|r| r.windows(2).all(|w| w[1] < w[0])).count();
    let logn: Vec<f64> = cfg.n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let logg: Vec<f64> = g_mean.iter().map(|g| g.ln()).collect();
    let (slope, _) = ols(&logn, &logg);
    let ratio = g_mean[0] / g_mean[m - 1];
    let margin = (ratio - 5.0).min(slope + 0.65).min(-0.35 - slope);
    let mut r = CheckReport::new(
        "empirical_gap",
        format!(
            "{} d={}, n in {:?}, {} probes, {} replicas",
            cfg.dist.kind.name(),
            cfg.dist.d,
            cfg.n_grid,
            cfg.probes,
            cfg.replicas
        ),
        margin,
        0.0,
    )
    .metric("n_grid", &cfg.n_grid)
    .metric("g_mean", &g_mean)
    .metric("g_per_replica", per_replica.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    .metric("slope", slope)
    .metric("ratio_first_last", ratio)
    .metric("replicas_decreasing", decreasing);
    r.seeds = vec![seeds.master];
    Ok(r)
}

/// KS distance between a projected sample and `Φ` along one random direction.
///
/// For `d < 20` the distance is recorded but not judged.
pub fn check_marginal_gaussianity(dist: &DistributionSpec, samples: usize, seeds: &SeedSpec) -> Result<CheckReport> {
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let d = dist.d;
    let u = sample_direction(d, &mut seeds.rng("marginal-dir", 0));
    let mut rng = seeds.rng("marginal-sample", 0);
    let mut buf = vec![0.0; d];
    let proj: Vec<f64> = (0..samples)
        .map(|_| {
            dist.fill_point(&mut rng, &mut buf);
            dot(&buf, u.as_slice())
        })
        .collect();
    let ks = crate::stats::ks_one_sample(&proj, phi_cdf);
    let threshold = match dist.kind {
        DistKind::Gaussian => 1.36 / (samples as f64).sqrt() * 1.5,
        _ => 0.02,
    };
    let judged = d >= 20;
    let margin = if judged { threshold - ks } else { 0.0 };
    let mut r = CheckReport::new(
        &format!("marginal_gaussianity_{}_d{d}", dist.kind.name()),
        format!("{} d={d}, {samples} samples", dist.kind.name()),
        margin,
        0.0,
    )
    .metric("ks", ks)
    .metric("threshold", threshold)
    .metric("judged", judged)
    .metric("direction_norm", norm(u.as_slice()));
    r.seeds = vec![seeds.master];
    Ok(r)
}

type Job = Box<dyn Fn() -> Result<CheckReport> + Send + Sync>;

fn jobs(master: u64) -> Vec<(&'static str, Job)> {
    let root = SeedSpec::new(master);
    vec![
        ("phi_control", Box::new(|| check_phi_control(&log_grid(1e-8, (-2.0f64).exp(), 10_000)))),
        (
            "gram_schmidt_bound_d1000_k50",
            Box::new(move || {
                let mut r = check_gram_schmidt_bound(1000, 50, 1000, &root.fork("gram-schmidt", 0))?;
                r.name = "gram_schmidt_bound_d1000_k50".into();
                Ok(r)
            }),
        ),
        (
            "gram_schmidt_bound_d100_k100",
            Box::new(move || {
                let mut r = check_gram_schmidt_bound(100, 100, 100, &root.fork("gram-schmidt", 1))?;
                r.name = "gram_schmidt_bound_d100_k100".into();
                Ok(r)
            }),
        ),
        ("density_bounds", Box::new(|| check_density_bounds(&LogConcave1D::ALL))),
        (
            "empirical_gap",
            Box::new(move || check_empirical_gap(&EmpiricalGapConfig::gaussian_2d(), &root.fork("empirical-gap", 0))),
        ),
        (
            "marginal_gaussianity_gaussian_d100",
            Box::new(move || {
                check_marginal_gaussianity(&DistributionSpec::gaussian(100), 100_000, &root.fork("marginal", 0))
            }),
        ),
        (
            "marginal_gaussianity_cube_d100",
            Box::new(move || {
                check_marginal_gaussianity(&DistributionSpec::cube(100), 100_000, &root.fork("marginal", 1))
            }),
        ),
        (
            "marginal_gaussianity_cube_d2",
            Box::new(move || {
                check_marginal_gaussianity(&DistributionSpec::cube(2), 100_000, &root.fork("marginal", 2))
            }),
        ),
    ]
}

/// Names accepted by [`run_selected`], in report order.
pub fn check_names() -> Vec<&'static str> {
    jobs(0).into_iter().map(|(n, _)| n).collect()
}

/// Runs the named checks (all of them for `None`) at their default scale.
pub fn run_selected(master: u64, only: Option<&str>) -> Result<Vec<CheckReport>> {
    let selected: Vec<Job> =
        jobs(master).into_iter().filter(|(n, _)| only.is_none_or(|o| o == *n)).map(|(_, j)| j).collect();
    if selected.is_empty() {
        return Err(Error::invalid(format!(
            "unknown check {:?}; expected one of {}",
            only.unwrap_or(""),
            check_names().join(", ")
        )));
    }
    selected.par_iter().map(|job| job()).collect()
}

/// Every check at its default scale, seeded from `master`.
pub fn run_all(master: u64) -> Result<Vec<CheckReport>> {
    run_selected(master, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_control_example_values() {
        let (lhs, rhs) = phi_control_sides(0.01).unwrap();
        assert!((lhs - 0.23116).abs() < 1e-4, "lhs {lhs}");
        assert!((rhs - 0.13608).abs() < 1e-5, "rhs {rhs}");
        let (l, r) = phi_control_sides((-2.0f64).exp() - 1e-6).unwrap();
        assert!(l > r);
        let (l, r) = phi_control_sides(1e-8).unwrap();
        assert!(l > r);
    }

    #[test]
    fn phi_control_passes_on_grid() {
        let r = check_phi_control(&log_grid(1e-8, (-2.0f64).exp(), 2000)).unwrap();
        assert!(r.pass && r.worst_margin > 0.0);
        assert!(check_phi_control(&[0.5]).is_err());
    }

    #[test]
    fn log_grid_is_inside_and_increasing() {
        let g = log_grid(1e-8, 0.1, 100);
        assert_eq!(g.len(), 100);
        assert!(g[0] > 1e-8 && g[99] < 0.1);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gram_schmidt_trivial_cases() {
        let s = SeedSpec::new(1);
        for r in 0..10 {
            assert_eq!(gram_schmidt_distance(30, 1, &s, r).unwrap(), 0.0);
        }
        let r = check_gram_schmidt_bound(100, 100, 20, &s).unwrap();
        assert_eq!(r.metrics["exceedance"], json!(0.0));
        assert!(r.pass);
        assert!(check_gram_schmidt_bound(10, 11, 1, &s).is_err());
    }

    #[test]
    fn density_examples() {
        let e4 = E.powi(4);
        assert!((LogConcave1D::Gaussian.density(0.0) - 0.39894).abs() < 1e-5);
        assert!(((-4.0f64).exp() / 2.0 - 0.0091578).abs() < 1e-7);
        assert!((LogConcave1D::Laplace.density(0.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!((7.1f64.exp() - 1211.97).abs() < 0.01);
        assert!((LogConcave1D::Uniform.density(0.0) - 0.28868).abs() < 1e-5);
        assert!((1.0 / (4.0 * e4) - 0.0045789).abs() < 1e-7);
        assert!(1.0 / (3.0 * e4) < 3.0f64.sqrt());
    }

    #[test]
    fn density_bounds_hold_for_family() {
        let r = check_density_bounds(&LogConcave1D::ALL).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.worst_margin > 0.0);
    }

    #[test]
    fn envelope_is_large_near_origin() {
        assert!(density_envelope(0.0) > 7.1f64.exp());
        assert!(density_envelope(1e6) < 1e-10);
    }

    #[test]
    fn marginal_checks() {
        let s = SeedSpec::new(2);
        let g = check_marginal_gaussianity(&DistributionSpec::gaussian(100), 20_000, &s).unwrap();
        assert!(g.pass, "{g:?}");
        let c = check_marginal_gaussianity(&DistributionSpec::cube(100), 100_000, &s).unwrap();
        assert!(c.pass, "{c:?}");
        let low = check_marginal_gaussianity(&DistributionSpec::cube(2), 10_000, &s).unwrap();
        assert_eq!(low.metrics["judged"], json!(false));
    }

    #[test]
    fn small_empirical_gap_shrinks() {
        let cfg = EmpiricalGapConfig {
            n_grid: vec![100, 10_000],
            probes: 50,
            replicas: 3,
            ..EmpiricalGapConfig::gaussian_2d()
        };
        let r = check_empirical_gap(&cfg, &SeedSpec::new(4)).unwrap();
        let g: Vec<f64> = serde_json::from_value(r.metrics["g_mean"].clone()).unwrap();
        assert!(g[1] < g[0]);
    }

    #[test]
    fn reports_are_reproducible() {
        let s = SeedSpec::new(9);
        let a = check_gram_schmidt_bound(50, 5, 30, &s).unwrap();
        let b = check_gram_schmidt_bound(50, 5, 30, &s).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
