//! Empirical random Tukey median: a maximizer of `D_{n,k}` over `R^d`.
//!
//! `r_n(x, U_i) ≥ j/n` holds iff `⟨x, U_i⟩` is at least the `j`-th smallest
//! projection on `U_i`, so the level set `{D_{n,k} ≥ j/n}` is an intersection
//! of `k` halfspaces. The largest nonempty level is found by binary search
//! with LP feasibility, and its Chebyshev center is reported.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::halfspace_count;
use crate::error::{Error, Result};
use crate::gauss::Probability;
use crate::geom::{project, PointCloud, UnitDirection, Vector};
use crate::lp::{chebyshev_center, lp_feasible, HalfspaceSystem};
use crate::sphere::DirectionBatch;

/// Relative distance (in units of the box bound) within which the center may
/// be snapped to a data point when rounding loses a boundary point.
pub const SNAP_TOL: f64 = 1e-9;

/// The `j`-th smallest of `⟨x_i, u⟩` (1-based).
pub fn direction_order_stat(cloud: &PointCloud, u: &UnitDirection, j: usize) -> Result<f64> {
    if j == 0 || j > cloud.len() {
        return Err(Error::invalid(format!("order statistic {j} out of range 1..={}", cloud.len())));
    }
    let mut p = project(cloud, u)?;
    let (_, v, _) = p.select_nth_unstable_by(j - 1, f64::total_cmp);
    Ok(*v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianResult {
    pub point: Vector,
    /// Recounted `D_{n,k}` at `point`.
    pub depth: Probability,
    pub depth_count: usize,
    /// Largest feasible level `t* = j*/n`.
    pub level: Probability,
    pub level_count: usize,
    pub n: usize,
    pub k: usize,
    pub radius: f64,
    /// The reported point is a data point reached by snapping the LP center.
    pub snapped: bool,
    pub pivots: usize,
    pub lp_solves: usize,
}

struct Levels<'a> {
    cloud: &'a PointCloud,
    dirs: &'a DirectionBatch,
    sorted: Vec<Vec<f64>>,
    bound: f64,
    pivots: usize,
    solves: usize,
}

impl Levels<'_> {
    fn system(&self, j: usize) -> Result<HalfspaceSystem> {
        HalfspaceSystem::new(self.dirs, self.sorted.iter().map(|s| s[j - 1]).collect(), self.bound)
    }

    fn feasible(&mut self, j: usize) -> Result<bool> {
        let out = lp_feasible(&self.system(j)?)?;
        self.solves += 1;
        if let Some(p) = &out {
            self.pivots += p.pivots;
        }
        Ok(out.is_some())
    }

    fn recount(&self, x: &[f64]) -> usize {
        self.dirs.iter().map(|u| halfspace_count(self.cloud, x, u.as_slice(), 0.0)).min().unwrap_or(0)
    }

    /// Nearest data point within snapping distance whose depth reaches `j`.
    fn snap(&self, x: &[f64], j: usize) -> Option<(Vector, usize)> {
        let tol = SNAP_TOL * self.bound;
        let dist = |p: &[f64]| p.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let mut near: Vec<(f64, usize)> =
            self.cloud.points().enumerate().map(|(i, p)| (dist(p), i)).filter(|&(dd, _)| dd <= tol).collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        near.into_iter().find_map(|(_, i)| {
            let p = self.cloud.point(i);
            let c = self.recount(p);
            (c >= j).then(|| (Vector::new(p.to_vec()).expect("cloud points are finite"), c))
        })
    }
}

/// Random Tukey median over the given directions.
pub fn random_tukey_median(cloud: &PointCloud, dirs: &DirectionBatch) -> Result<MedianResult> {
    cloud.check_dim(dirs.dim())?;
    let n = cloud.len();
    let sorted = dirs
        .as_slice()
        .par_iter()
        .map(|u| {
            let mut p = project(cloud, u)?;
            p.sort_unstable_by(f64::total_cmp);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lv = Levels { cloud, dirs, sorted, bound: 10.0 * cloud.max_abs() + 1.0, pivots: 0, solves: 0 };

    // The mean's own depth is a feasible level without solving anything.
    let mean = cloud.mean();
    let mean_count = lv.recount(mean.as_slice());
    let floor = mean_count.max(1);
    let (mut lo, mut hi) = (floor, n + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if lv.feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let infeasible_seen = (hi <= n).then_some(hi);

    let mut j = lo;
    let mut known_feasible: Option<usize> = None;
    loop {
        if j < floor {
            // Every LP level failed the recount; the mean is always valid.
            let r = MedianResult::build(mean, mean_count, floor.min(mean_count.max(1)), 0.0, false, &lv, n);
            return Ok(r);
        }
        let center = match chebyshev_center(&lv.system(j)?) {
            Ok(c) => c,
            Err(Error::Infeasible) => {
                lv.solves += 1;
                if let Some(f) = known_feasible {
                    return Err(Error::NonMonotoneLevels { feasible: f, infeasible: j, n });
                }
                j -= 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        lv.solves += 1;
        lv.pivots += center.pivots;
        known_feasible.get_or_insert(j);
        if let Some(bad) = infeasible_seen {
            if j >= bad {
                return Err(Error::NonMonotoneLevels { feasible: j, infeasible: bad, n });
            }
        }
        let c = lv.recount(center.point.as_slice());
        if c >= j {
            return Ok(MedianResult::build(center.point, c, j, center.radius, false, &lv, n));
        }
        if let Some((p, c)) = lv.snap(center.point.as_slice(), j) {
            return Ok(MedianResult::build(p, c, j, 0.0, true, &lv, n));
        }
        j -= 1;
    }
}

impl MedianResult {
    fn build(point: Vector, count: usize, level: usize, radius: f64, snapped: bool, lv: &Levels, n: usize) -> Self {
        let p = |c: usize| Probability::new(c as f64 / n as f64).expect("count ≤ n");
        MedianResult {
            point,
            depth: p(count),
            depth_count: count,
            level: p(level),
            level_count: level,
            n,
            k: lv.dirs.len(),
            radius,
            snapped,
            pivots: lv.pivots,
            lp_solves: lv.solves,
        }
    }
}

/// Feasibility of every level `1..=n`, for small instances and tests.
pub fn level_profile(cloud: &PointCloud, dirs: &DirectionBatch) -> Result<Vec<bool>> {
    cloud.check_dim(dirs.dim())?;
    let sorted = dirs
        .iter()
        .map(|u| {
            let mut p = project(cloud, u)?;
            p.sort_unstable_by(f64::total_cmp);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lv = Levels { cloud, dirs, sorted, bound: 10.0 * cloud.max_abs() + 1.0, pivots: 0, solves: 0 };
    (1..=cloud.len()).map(|j| lv.feasible(j)).collect()
}

/// Checks that a feasibility profile is a prefix of `true`s.
pub fn check_monotone(profile: &[bool]) -> Result<()> {
    let n = profile.len();
    let first_bad = profile.iter().position(|f| !f);
    let last_good = profile.iter().rposition(|f| *f);
    match (first_bad, last_good) {
        (Some(b), Some(g)) if g.cmp(&b) == Ordering::Greater => {
            Err(Error::NonMonotoneLevels { feasible: g + 1, infeasible: b + 1, n })
        }
        _ => Ok(()),
    }
}
