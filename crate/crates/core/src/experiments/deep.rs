//! Localization of the empirical random Tukey median around the true median 0.

use rayon::prelude::*;

use super::{cell_f, cell_u, ExperimentConfig, ExperimentReport, ThresholdCheck};
use crate::dists::sample;
use crate::error::Result;
use crate::median::random_tukey_median;
use crate::seed::SeedSpec;
use crate::sphere::sample_sphere;
use crate::stats::{mean, quantile, std_error};
use crate::svg::{Chart, Series};

struct Replica {
    norms: Vec<f64>,
    levels: Vec<usize>,
    depths: Vec<usize>,
    pivots: Vec<usize>,
}

fn replica(cfg: &ExperimentConfig, sweep: &[usize], root: &SeedSpec, r: u64) -> Result<Replica> {
    let dist = cfg.distribution()?;
    let cloud = sample(&dist, cfg.n, &mut root.rng("deep-cloud", r))?;
    let kmax = *sweep.last().expect("sweep is nonempty");
    let dirs = sample_sphere(cfg.d, kmax, &mut root.rng("deep-dirs", r))?;
    let mut out = Replica { norms: vec![], levels: vec![], depths: vec![], pivots: vec![] };
    for &k in sweep {
        let m = random_tukey_median(&cloud, &dirs.prefix(k)?)?;
        out.norms.push(m.point.norm());
        out.levels.push(m.level_count);
        out.depths.push(m.depth_count);
        out.pivots.push(m.pivots);
    }
    Ok(out)
}

pub fn run_deep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sweep = cfg.sweep();
    let root = SeedSpec::new(cfg.seed);
    let reps =
        (0..cfg.replicas as u64).into_par_iter().map(|r| replica(cfg, &sweep, &root, r)).collect::<Result<Vec<_>>>()?;

    let mut rep = ExperimentReport::new(cfg, &[]);
    rep.columns = vec!["replica".into(), "cloud_seed".into(), "dirs_seed".into()];
    for k in &sweep {
        rep.columns.extend([
            format!("norm_k{k}"),
            format!("level_k{k}"),
            format!("depth_k{k}"),
            format!("pivots_k{k}"),
        ]);
    }
    for (r, x) in reps.iter().enumerate() {
        let mut row = vec![
            cell_u(r as u64),
            cell_u(root.derive("deep-cloud", r as u64)),
            cell_u(root.derive("deep-dirs", r as u64)),
        ];
        for i in 0..sweep.len() {
            row.extend([
                cell_f(x.norms[i]),
                cell_u(x.levels[i] as u64),
                cell_u(x.depths[i] as u64),
                cell_u(x.pivots[i] as u64),
            ]);
        }
        rep.rows.push(row);
    }

    let col = |i: usize| reps.iter().map(|x| x.norms[i]).collect::<Vec<f64>>();
    let means: Vec<f64> = (0..sweep.len()).map(|i| mean(&col(i))).collect();
    let ses: Vec<f64> = (0..sweep.len()).map(|i| if cfg.replicas > 1 { std_error(&col(i)) } else { 0.0 }).collect();
    let medians: Vec<f64> = (0..sweep.len()).map(|i| quantile(&col(i), 0.5)).collect();
    let q10: Vec<f64> = (0..sweep.len()).map(|i| quantile(&col(i), 0.1)).collect();
    let q90: Vec<f64> = (0..sweep.len()).map(|i| quantile(&col(i), 0.9)).collect();
    let at = sweep.iter().position(|&k| k == cfg.k).expect("k is in the sweep");
    // Successive medians may rise by at most two combined standard errors
    // (of the mean, used as the spread estimate).
    let worst_rise = medians
        .windows(2)
        .zip(ses.windows(2))
        .map(|(m, s)| (m[1] - m[0]) - 2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);

    rep.put("k_sweep", &sweep);
    rep.put("mean_norm", &means);
    rep.put("se_norm", &ses);
    rep.put("median_norm", &medians);
    rep.put("q10_norm", &q10);
    rep.put("q90_norm", &q90);
    rep.put("median_norm_at_k", medians[at]);
    rep.put("thin_shell_radius", (cfg.d as f64).sqrt());
    rep.put("box_bound_note", "levels with unbounded halfspace intersections place the center on the box 10·max|x|+1");
    rep.checks.push(ThresholdCheck::at_most("median_norm_at_k", medians[at], cfg.max_median_norm));
    if sweep.len() > 1 {
        rep.checks.push(ThresholdCheck::at_most("median_norm_rise_minus_2se", worst_rise, 0.0));
    }

    let pts = |v: &[f64]| sweep.iter().zip(v).map(|(&k, &y)| (k as f64, y)).collect::<Vec<_>>();
    let chart = Chart::new(
        format!("Deep regime: distance of the random Tukey median to 0, d={}, n={}", cfg.d, cfg.n),
        "k (directions)",
        "norm of median",
    )
    .log_x()
    .with(Series::line("median", pts(&medians)))
    .with(Series::line("mean", pts(&means)))
    .with(Series::line("q90", pts(&q90)));
    Ok(rep.finish(chart))
}
