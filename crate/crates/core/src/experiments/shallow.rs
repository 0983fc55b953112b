//! Mass of points whose random depth exceeds `ε`: `μ({x : D̄_k(x) > ε})`.

use rayon::prelude::*;

use super::{cell_f, cell_u, ExperimentConfig, ExperimentReport, ThresholdCheck};
use crate::dists::{pop_dir_cdf_batch, sample, McBudget};
use crate::error::Result;
use crate::geom::Vector;
use crate::seed::SeedSpec;
use crate::sphere::sample_sphere;
use crate::stats::mean;
use crate::svg::{Chart, Series};

/// Per replica, the fraction of probes with `D̄_k > ε` for every `k` of the sweep.
fn replica(cfg: &ExperimentConfig, sweep: &[usize], root: &SeedSpec, r: u64) -> Result<Vec<f64>> {
    let dist = cfg.distribution()?;
    let kmax = *sweep.last().expect("sweep is nonempty");
    let dirs = sample_sphere(cfg.d, kmax, &mut root.rng("shallow-dirs", r))?;
    let probes = sample(&dist, cfg.probes, &mut root.rng("shallow-probes", r))?;
    let budget = McBudget::new(cfg.budget, root.derive("pop-mc", r));
    let mut exceed = vec![0usize; sweep.len()];
    for p in probes.points() {
        let values = pop_dir_cdf_batch(&dist, &Vector::new(p.to_vec())?, &dirs, budget)?;
        // Running minimum over nested prefixes.
        let mut m = f64::INFINITY;
        let mut s = 0;
        for (i, v) in values.iter().enumerate() {
            m = m.min(*v);
            while s < sweep.len() && sweep[s] == i + 1 {
                exceed[s] += usize::from(m > cfg.eps);
                s += 1;
            }
        }
    }
    Ok(exceed.iter().map(|&c| c as f64 / cfg.probes as f64).collect())
}

pub fn run_shallow(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sweep = cfg.sweep();
    let root = SeedSpec::new(cfg.seed);
    let fractions =
        (0..cfg.replicas as u64).into_par_iter().map(|r| replica(cfg, &sweep, &root, r)).collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["replica".to_string(), "dirs_seed".to_string(), "probes_seed".to_string()];
    columns.extend(sweep.iter().map(|k| format!("fraction_k{k}")));
    let mut rep = ExperimentReport::new(cfg, &[]);
    rep.columns = columns;
    for (r, f) in fractions.iter().enumerate() {
        let mut row = vec![
            cell_u(r as u64),
            cell_u(root.derive("shallow-dirs", r as u64)),
            cell_u(root.derive("shallow-probes", r as u64)),
        ];
        row.extend(f.iter().map(|v| cell_f(*v)));
        rep.rows.push(row);
    }

    let mean_fraction: Vec<f64> =
        (0..sweep.len()).map(|i| mean(&fractions.iter().map(|f| f[i]).collect::<Vec<_>>())).collect();
    let loose: Vec<f64> = sweep.iter().map(|&k| (1.0 - cfg.eps / 4.0).powi(k as i32)).collect();
    let tight: Vec<f64> = sweep.iter().map(|&k| (1.0 - cfg.eps).powi(k as i32)).collect();
    let nested = fractions.iter().all(|f| f.windows(2).all(|w| w[1] <= w[0]));
    let at_k = mean_fraction[sweep.iter().position(|&k| k == cfg.k).expect("k is in the sweep")];

    rep.put("k_sweep", &sweep);
    rep.put("mean_fraction", &mean_fraction);
    rep.put("one_minus_eps_over_4_pow_k", &loose);
    rep.put("one_minus_eps_pow_k", &tight);
    rep.put("mean_fraction_at_k", at_k);
    rep.put("nested_nonincreasing", nested);
    rep.checks.push(ThresholdCheck::at_most("mean_fraction_at_k", at_k, cfg.max_mean_fraction));
    rep.checks.push(ThresholdCheck::holds("fraction_nonincreasing_in_k", nested));

    let xs = |v: &[f64]| sweep.iter().zip(v).map(|(&k, &y)| (k as f64, y)).collect::<Vec<_>>();
    let chart = Chart::new(
        format!("Shallow regime: P(random depth > {}), d={}", cfg.eps, cfg.d),
        "k (directions)",
        "fraction of probes",
    )
    .log_x()
    .with(Series::line("mean fraction", xs(&mean_fraction)))
    .with(Series::line("(1 - eps)^k", xs(&tight)))
    .with(Series::line("(1 - eps/4)^k", xs(&loose)));
    Ok(rep.finish(chart))
}
