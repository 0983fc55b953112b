//! Points `x_i = (i/n, a(i/n)²)` with `x_{n/2}` removed: the removed point
//! has depth 0, but only a thin arc of directions reveals it.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::{cell_u, ExperimentConfig, ExperimentReport, ThresholdCheck};
use crate::depth::{exact_depth_2d, halfspace_count};
use crate::error::Result;
use crate::geom::{PointCloud, Vector};
use crate::seed::SeedSpec;
use crate::sphere::fill_uniform_direction;
use crate::stats::mean;
use crate::svg::{Chart, Series};

fn parabola_point(i: usize, n: usize, a: f64) -> [f64; 2] {
    let t = i as f64 / n as f64;
    [t, a * t * t]
}

/// The cloud without `x_{n/2}`, and `x_{n/2}` itself.
pub fn parabola_cloud(n: usize, a: f64) -> Result<(PointCloud, Vector)> {
    let m = n / 2;
    let rows: Vec<Vec<f64>> = (1..=n).filter(|&i| i != m).map(|i| parabola_point(i, n, a).to_vec()).collect();
    Ok((PointCloud::from_rows(&rows)?, Vector::new(parabola_point(m, n, a).to_vec())?))
}

/// Angular width of `{u : ⟨x_{m±1} − x_m, u⟩ > 0}`, i.e. `π` minus the angle
/// at `x_m` between its two neighbours.
pub fn detection_width(n: usize, a: f64) -> f64 {
    let m = n / 2;
    let c = parabola_point(m, n, a);
    let l = parabola_point(m - 1, n, a);
    let r = parabola_point(m + 1, n, a);
    let v1 = [l[0] - c[0], l[1] - c[1]];
    let v2 = [r[0] - c[0], r[1] - c[1]];
    let cross = v1[0] * v2[1] - v1[1] * v2[0];
    let dot = v1[0] * v2[0] + v1[1] * v2[1];
    PI - cross.abs().atan2(dot)
}

/// Uniform directions drawn until one witnesses depth 0 (capped at `max_draws`).
fn draws_until_detection(cloud: &PointCloud, x: &Vector, max_draws: usize, seeds: &SeedSpec, r: u64) -> usize {
    let mut rng = seeds.rng("replica", r);
    let mut u = [0.0; 2];
    for t in 1..=max_draws {
        fill_uniform_direction(&mut rng, &mut u);
        if halfspace_count(cloud, x.as_slice(), &u, 0.0) == 0 {
            return t;
        }
    }
    max_draws
}

pub fn run_parabola(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let n = cfg.n;
    let root = SeedSpec::new(cfg.seed);
    let (cloud, x) = parabola_cloud(n, cfg.a)?;
    let exact = exact_depth_2d(&cloud, &x)?;
    let widths: Vec<f64> = cfg.a_sweep.iter().map(|&a| detection_width(n, a)).collect();
    let clouds = cfg.a_sweep.iter().map(|&a| parabola_cloud(n, a)).collect::<Result<Vec<_>>>()?;

    let draws: Vec<Vec<usize>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            clouds
                .iter()
                .enumerate()
                .map(|(ai, (c, xm))| {
                    draws_until_detection(c, xm, cfg.max_draws, &root.fork("parabola-draws", ai as u64), r)
                })
                .collect()
        })
        .collect();

    let mut rep = ExperimentReport::new(cfg, &["replica"]);
    rep.columns.extend(cfg.a_sweep.iter().map(|a| format!("draws_a{a}")));
    for (r, d) in draws.iter().enumerate() {
        let mut row = vec![cell_u(r as u64)];
        row.extend(d.iter().map(|&v| cell_u(v as u64)));
        rep.rows.push(row);
    }
    let mean_draws: Vec<f64> =
        (0..cfg.a_sweep.len()).map(|i| mean(&draws.iter().map(|d| d[i] as f64).collect::<Vec<_>>())).collect();
    let censored: usize = draws.iter().flatten().filter(|&&v| v == cfg.max_draws).count();
    let decreasing = widths.windows(2).all(|w| w[1] < w[0]);
    let smallest_a = cfg.a_sweep.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).map(|(i, _)| i).unwrap_or(0);
    let large = detection_width(n, cfg.a_large);

    rep.put("n", n);
    rep.put("a", cfg.a);
    rep.put("exact_depth", exact.value);
    rep.put("exact_depth_count", exact.count);
    rep.put("exact_witness", exact.witness.as_slice());
    rep.put("a_sweep", &cfg.a_sweep);
    rep.put("detection_width", &widths);
    rep.put("detection_probability", widths.iter().map(|w| w / TAU).collect::<Vec<_>>());
    rep.put("expected_draws", widths.iter().map(|w| TAU / w).collect::<Vec<_>>());
    rep.put("mean_draws", &mean_draws);
    rep.put("censored_replicas", censored);
    rep.put("a_large", cfg.a_large);
    rep.put("detection_width_a_large", large);
    rep.checks.push(ThresholdCheck::at_most("exact_depth", exact.value, 0.0));
    rep.checks.push(ThresholdCheck::holds("width_strictly_decreasing_over_sweep", decreasing));
    if !widths.is_empty() {
        rep.checks.push(ThresholdCheck::holds("width_at_a_large_exceeds_smallest_a", large > widths[smallest_a]));
    }

    // The data set with the two boundary lines of the detection arc.
    let pts: Vec<(f64, f64)> = cloud.points().map(|p| (p[0], p[1])).collect();
    let (cx, cy) = (x.as_slice()[0], x.as_slice()[1]);
    let mut chart = Chart::new(format!("Parabola data set, n={n}, a={}", cfg.a), "x1", "x2")
        .with(Series::scatter("data", pts))
        .with(Series::scatter("x_(n/2)", vec![(cx, cy)]));
    for (name, j) in [("boundary (left)", n / 2 - 1), ("boundary (right)", n / 2 + 1)] {
        let p = parabola_point(j, n, cfg.a);
        let (vx, vy) = (p[0] - cx, p[1] - cy);
        let len = (vx * vx + vy * vy).sqrt();
        let (ox, oy) = (-vy / len * 0.15, vx / len * 0.15);
        chart = chart.with(Series::line(name, vec![(cx - ox, cy - oy), (cx + ox, cy + oy)]));
    }
    Ok(rep.finish(chart))
}
