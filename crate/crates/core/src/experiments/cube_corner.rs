//! A boundary point of the cube law has population depth 0, yet in high
//! dimension its random depth stays large.

use rayon::prelude::*;

use super::{cell_f, cell_u, ExperimentConfig, ExperimentReport, ThresholdCheck};
use crate::depth::pop_random_depth;
use crate::dists::{pop_depth, McBudget, PopDepthMethod};
use crate::error::Result;
use crate::geom::Vector;
use crate::seed::SeedSpec;
use crate::sphere::sample_sphere;
use crate::stats::{mean, quantile};
use crate::svg::{histogram, Chart, Series};

/// The cube law has unit-variance coordinates on `[-√3, √3]`.
pub fn corner_point(d: usize) -> Vector {
    Vector::on_axis(d, 0, 3f64.sqrt())
}

pub fn run_cube_corner(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let x = corner_point(cfg.d);
    let root = SeedSpec::new(cfg.seed);
    let depths = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let dirs = sample_sphere(cfg.d, cfg.k, &mut root.rng("cube-dirs", r))?;
            let budget = McBudget::new(cfg.budget, root.derive("pop-mc", r));
            Ok(pop_random_depth(&dist, &x, &dirs, budget)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let pop_budget = McBudget::new(cfg.budget, root.derive("pop-depth", 0));
    let pop = pop_depth(&dist, &x, PopDepthMethod { grid: 64, budget: pop_budget })?;

    let mut rep = ExperimentReport::new(cfg, &["replica", "dirs_seed", "random_depth", "at_least_level"]);
    for (r, &v) in depths.iter().enumerate() {
        rep.rows.push(vec![
            cell_u(r as u64),
            cell_u(root.derive("cube-dirs", r as u64)),
            cell_f(v),
            cell_u(u64::from(v >= cfg.corner_level)),
        ]);
    }
    let hits = depths.iter().filter(|&&v| v >= cfg.corner_level).count();
    let se = pop_budget.std_error_bound();

    rep.put("x_norm", x.norm());
    rep.put("population_depth_upper", pop.value);
    rep.put("population_depth_witness_method", &pop.method);
    rep.put("mc_std_error_bound", se);
    rep.put("mean_random_depth", mean(&depths));
    rep.put("random_depth_min", depths.iter().copied().fold(f64::INFINITY, f64::min));
    rep.put("random_depth_median", quantile(&depths, 0.5));
    rep.put("replicas_at_least_level", hits);
    rep.checks.push(ThresholdCheck::at_least(
        "fraction_random_depth_at_least_level",
        hits as f64 / cfg.replicas as f64,
        1.0 - cfg.delta,
    ));
    rep.checks.push(ThresholdCheck::at_most("population_depth_upper", pop.value, 3.0 * se));

    let top = cfg.replicas as f64 / 4.0;
    let chart =
        Chart::new(format!("Cube boundary point: random depth, d={}, k={}", cfg.d, cfg.k), "random depth", "replicas")
            .with(histogram("random depth", &depths, 20))
            .with(Series::line("population depth", vec![(pop.value, 0.0), (pop.value, top)]))
            .with(Series::line("level", vec![(cfg.corner_level, 0.0), (cfg.corner_level, top)]));
    Ok(rep.finish(chart))
}
