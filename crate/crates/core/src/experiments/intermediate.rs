//! Random depth of a point of intermediate population depth `γ`.

use rayon::prelude::*;

use super::{cell_f, cell_u, ExperimentConfig, ExperimentReport, ThresholdCheck};
use crate::depth::pop_random_depth;
use crate::dists::McBudget;
use crate::error::Result;
use crate::gauss::phi_quantile;
use crate::geom::Vector;
use crate::seed::SeedSpec;
use crate::sphere::sample_sphere;
use crate::stats::{mean, quantile};
use crate::svg::{histogram, Chart, Series};

/// `(Φ⁻¹(1 − γ), 0, …, 0)`, whose Gaussian depth is exactly `γ`.
pub fn intermediate_point(d: usize, gamma: f64) -> Result<Vector> {
    Ok(Vector::on_axis(d, 0, phi_quantile(1.0 - gamma)?))
}

pub fn run_intermediate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let x = intermediate_point(cfg.d, cfg.gamma)?;
    let root = SeedSpec::new(cfg.seed);
    let depths = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let dirs = sample_sphere(cfg.d, cfg.k, &mut root.rng("intermediate-dirs", r))?;
            Ok(pop_random_depth(&dist, &x, &dirs, McBudget::default())?.value)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut rep = ExperimentReport::new(cfg, &["replica", "dirs_seed", "random_depth", "gap", "gap_at_least_eps"]);
    for (r, &v) in depths.iter().enumerate() {
        let gap = v - cfg.gamma;
        rep.rows.push(vec![
            cell_u(r as u64),
            cell_u(root.derive("intermediate-dirs", r as u64)),
            cell_f(v),
            cell_f(gap),
            cell_u(u64::from(gap >= cfg.eps)),
        ]);
    }
    let gaps: Vec<f64> = depths.iter().map(|v| v - cfg.gamma).collect();
    let hits = gaps.iter().filter(|&&g| g >= cfg.eps).count();
    let below_half = depths.iter().filter(|&&v| v <= 0.5 - cfg.eps).count();
    let n = cfg.replicas as f64;
    let union_bound = 2.0 * cfg.k as f64 * (-(cfg.d as f64 - 1.0) * cfg.eps * cfg.eps / 2.0).exp();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);

    rep.put("x_norm", x.norm());
    rep.put("population_depth", cfg.gamma);
    rep.put("mean_random_depth", mean(&depths));
    rep.put("gap_min", min_gap);
    rep.put("gap_q05", quantile(&gaps, 0.05));
    rep.put("gap_median", quantile(&gaps, 0.5));
    rep.put("gap_q95", quantile(&gaps, 0.95));
    rep.put("gap_max", gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    rep.put("replicas_gap_at_least_eps", hits);
    rep.put("fraction_at_most_half_minus_eps", below_half as f64 / n);
    rep.put("bound_2k_exp", union_bound);
    rep.checks.push(ThresholdCheck::at_least("fraction_gap_at_least_eps", hits as f64 / n, 1.0 - cfg.delta));
    rep.checks.push(ThresholdCheck::at_least("min_gap_nonnegative", min_gap, 0.0));

    let chart = Chart::new(
        format!("Intermediate regime: random depth at population depth {}, d={}, k={}", cfg.gamma, cfg.d, cfg.k),
        "random depth",
        "replicas",
    )
    .with(histogram("random depth", &depths, 20))
    .with(Series::line("population depth", vec![(cfg.gamma, 0.0), (cfg.gamma, cfg.replicas as f64 / 4.0)]))
    .with(Series::line(
        "population depth + eps",
        vec![(cfg.gamma + cfg.eps, 0.0), (cfg.gamma + cfg.eps, cfg.replicas as f64 / 4.0)],
    ));
    Ok(rep.finish(chart))
}
