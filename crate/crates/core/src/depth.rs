//! Halfspace depth of a query point in a point cloud.
//!
//! Every empirical depth uses the closed halfspace
//! `H(x, u) = {y : ⟨y, u⟩ ≤ ⟨x, u⟩}` and is computed by integer counting, so
//! values are exact multiples of `1/n`. Points equal to the query always lie
//! in every such halfspace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dists::{argmin, pop_dir_cdf_batch, DistributionSpec, McBudget};
use crate::error::{Error, Result};
use crate::geom::{dot, norm, PointCloud, UnitDirection, Vector};
use crate::seed::StreamRng;
use crate::sphere::{fill_uniform_direction, DirectionBatch};

/// Points closer than this to the query are treated as coincident with it.
pub const COINCIDENT_TOL: f64 = 1e-12;
/// Perturbation size used around candidate normals.
pub const PERTURBATION: f64 = 1e-7;
/// Largest `n^{d-1}` accepted by [`exact_depth_small_d`].
pub const SMALL_D_BUDGET: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMethod {
    Directional,
    RandomK,
    Exact1d,
    Exact2d,
    ExactSmallD,
    Grid,
    /// Population depth from a closed form.
    Population,
    /// Population depth estimated by Monte Carlo.
    PopulationMc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthResult {
    pub value: f64,
    /// Number of cloud points in the witnessing halfspace (empirical depths only).
    pub count: Option<usize>,
    pub n: Option<usize>,
    pub witness: UnitDirection,
    pub method: DepthMethod,
}

impl DepthResult {
    fn empirical(count: usize, n: usize, witness: UnitDirection, method: DepthMethod) -> Self {
        DepthResult { value: count as f64 / n as f64, count: Some(count), n: Some(n), witness, method }
    }
}

/// `#{i : ⟨x_i, u⟩ ≤ ⟨x, u⟩ + tol}`.
#[inline]
pub fn halfspace_count(cloud: &PointCloud, x: &[f64], u: &[f64], tol: f64) -> usize {
    let t = dot(x, u) + tol;
    cloud.points().filter(|p| dot(p, u) <= t).count()
}

fn check(cloud: &PointCloud, x: &Vector) -> Result<()> {
    cloud.check_dim(x.dim())
}

/// `r_n(x, u)`, with exact IEEE comparison.
pub fn directional_depth(cloud: &PointCloud, x: &Vector, u: &UnitDirection) -> Result<DepthResult> {
    directional_depth_tol(cloud, x, u, 0.0)
}

/// `r_n(x, u)` counting points within `boundary_tol` beyond the boundary, for
/// data with rounded coordinates.
pub fn directional_depth_tol(
    cloud: &PointCloud,
    x: &Vector,
    u: &UnitDirection,
    boundary_tol: f64,
) -> Result<DepthResult> {
    check(cloud, x)?;
    cloud.check_dim(u.dim())?;
    let c = halfspace_count(cloud, x.as_slice(), u.as_slice(), boundary_tol);
    Ok(DepthResult::empirical(c, cloud.len(), u.clone(), DepthMethod::Directional))
}

/// `D_{n,k}(x) = min_i r_n(x, U_i)`; the first minimizing direction is the witness.
pub fn random_depth(cloud: &PointCloud, x: &Vector, dirs: &DirectionBatch) -> Result<DepthResult> {
    check(cloud, x)?;
    cloud.check_dim(dirs.dim())?;
    let (best, count) = dirs
        .iter()
        .map(|u| halfspace_count(cloud, x.as_slice(), u.as_slice(), 0.0))
        .enumerate()
        .fold((0, usize::MAX), |(bi, bc), (i, c)| if c < bc { (i, c) } else { (bi, bc) });
    Ok(DepthResult::empirical(count, cloud.len(), dirs.get(best).clone(), DepthMethod::RandomK))
}

/// `D̄_k(x) = min_i r̄(x, U_i)`; exact for the Gaussian.
pub fn pop_random_depth(
    dist: &DistributionSpec,
    x: &Vector,
    dirs: &DirectionBatch,
    budget: McBudget,
) -> Result<DepthResult> {
    let values = pop_dir_cdf_batch(dist, x, dirs, budget)?;
    let (best, value) = argmin(&values);
    let method = match dist.kind {
        crate::dists::DistKind::Gaussian => DepthMethod::Population,
        _ if dist.d == 1 => DepthMethod::Population,
        _ => DepthMethod::PopulationMc,
    };
    Ok(DepthResult { value, count: None, n: None, witness: dirs.get(best).clone(), method })
}

/// Exact depth on the line: `min(#{x_i ≤ x}, #{x_i ≥ x}) / n`.
pub fn exact_depth_1d(cloud: &PointCloud, x: &Vector) -> Result<DepthResult> {
    if cloud.dim() != 1 {
        return Err(Error::invalid(format!("exact1d requires d=1 (got d={})", cloud.dim())));
    }
    check(cloud, x)?;
    let x0 = x.as_slice()[0];
    let le = cloud.as_flat().iter().filter(|&&v| v <= x0).count();
    let ge = cloud.as_flat().iter().filter(|&&v| v >= x0).count();
    let (count, negative) = if le <= ge { (le, false) } else { (ge, true) };
    Ok(DepthResult::empirical(count, cloud.len(), UnitDirection::axis(1, 0, negative), DepthMethod::Exact1d))
}

#[inline]
fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `b` lies in the half-open angular range `[angle(a), angle(a) + π)`.
#[inline]
fn ahead(a: [f64; 2], b: [f64; 2]) -> bool {
    let c = cross2(a, b);
    c > 0.0 || (c == 0.0 && a[0] * b[0] + a[1] * b[1] > 0.0)
}

/// Exact planar depth by an angular sweep, `O(n log n)`.
///
/// The closed halfspace with inner normal `-u` misses exactly the points in an
/// open half-plane, so the depth is `n` minus the largest number of points
/// that fit in an open angular window of width `π` around the query. Windows
/// are scanned with two pointers over the angularly sorted points; membership
/// uses orientation tests rather than angle differences.
#[allow(clippy::needless_range_loop)]
pub fn exact_depth_2d(cloud: &PointCloud, x: &Vector) -> Result<DepthResult> {
    if cloud.dim() != 2 {
        return Err(Error::invalid(format!("exact2d requires d=2 (got d={})", cloud.dim())));
    }
    check(cloud, x)?;
    let n = cloud.len();
    let (x0, x1) = (x.as_slice()[0], x.as_slice()[1]);
    let mut coincident = 0usize;
    let mut pts: Vec<(f64, [f64; 2])> = Vec::with_capacity(n);
    for p in cloud.points() {
        let v = [p[0] - x0, p[1] - x1];
        if norm(&v) <= COINCIDENT_TOL {
            coincident += 1;
        } else {
            pts.push((v[1].atan2(v[0]), v));
        }
    }
    let m = pts.len();
    if m == 0 {
        return Ok(DepthResult::empirical(n, n, UnitDirection::axis(2, 0, false), DepthMethod::Exact2d));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vec_at = |j: usize| pts[j % m].1;

    let (mut best_start, mut best_len) = (0usize, 0usize);
    let mut end = 0usize;
    for i in 0..m {
        end = end.max(i + 1);
        while end < i + m && ahead(pts[i].1, vec_at(end)) {
            end += 1;
        }
        if end - i > best_len {
            best_len = end - i;
            best_start = i;
        }
    }

    // Unwrapped angles around the best window [start, last].
    use std::f64::consts::{PI, TAU};
    let angle = |j: usize| pts[j % m].0 + TAU * (j / m) as f64;
    let last = best_start + best_len - 1;
    let prev = if best_start == 0 { angle(m - 1) - TAU } else { angle(best_start - 1) };
    let next = angle(last + 1);
    let lo = prev.max(angle(last) - PI);
    let hi = angle(best_start).min(next - PI);
    let beta = 0.5 * (lo + hi);
    let theta = beta + 0.5 * PI;
    let witness = UnitDirection::from_raw(vec![theta.cos(), theta.sin()])?;
    let count = coincident + m - best_len;
    Ok(DepthResult::empirical(count, n, witness, DepthMethod::Exact2d))
}

/// Solves the small symmetric positive definite system `g · y = b` in place
/// (Gaussian elimination with partial pivoting). Returns `None` if singular.
#[allow(clippy::needless_range_loop)]
fn solve_small(mut g: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &c| g[a][col].abs().total_cmp(&g[c][col].abs()))?;
        if g[piv][col].abs() < 1e-300 {
            return None;
        }
        g.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = g[r][col] / g[col][col];
            for c in col..n {
                g[r][c] -= f * g[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut y = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| g[r][c] * y[c]).sum();
        y[r] = (b[r] - s) / g[r][r];
    }
    Some(y)
}

/// Unit normal to the hyperplane spanned by `rows` (`d − 1` vectors in `R^d`),
/// via signed cofactors. `None` when the rows are (numerically) dependent.
fn hyperplane_normal(rows: &[&[f64]], d: usize) -> Option<Vec<f64>> {
    let scale: f64 = rows.iter().map(|r| norm(r)).product();
    let mut u = vec![0.0; d];
    for (j, uj) in u.iter_mut().enumerate() {
        let minor: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect()).collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *uj = sign * det(&minor);
    }
    let nu = norm(&u);
    if nu <= 1e-12 * scale {
        return None;
    }
    u.iter_mut().for_each(|c| *c /= nu);
    Some(u)
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("determinants above 3x3 are not needed for d <= 4"),
    }
}

/// Directions probing every cell of the great-sphere arrangement that touches
/// the normal `u` of `rows`: `±u` and `s·u + δ·w_σ` for `s = ±1` and every
/// sign pattern `σ ∈ {±1}^{d−1}`, where `w_σ` is the least-norm solution of
/// `rows · w = σ`.
fn vertex_candidates(rows: &[&[f64]], u: &[f64], d: usize) -> Vec<Vec<f64>> {
    let k = rows.len();
    let mut out = vec![u.to_vec(), u.iter().map(|c| -c).collect()];
    let gram: Vec<Vec<f64>> = rows.iter().map(|a| rows.iter().map(|b| dot(a, b)).collect()).collect();
    for pattern in 0..(1u32 << k) {
        let sigma: Vec<f64> = (0..k).map(|a| if pattern >> a & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let Some(y) = solve_small(gram.clone(), sigma) else { continue };
        let mut w = vec![0.0; d];
        for (ya, row) in y.iter().zip(rows) {
            w.iter_mut().zip(row.iter()).for_each(|(wi, ri)| *wi += ya * ri);
        }
        let nw = norm(&w);
        if nw == 0.0 {
            continue;
        }
        for s in [1.0, -1.0] {
            let mut v: Vec<f64> = u.iter().zip(&w).map(|(ui, wi)| s * ui + PERTURBATION * wi / nw).collect();
            let nv = norm(&v);
            v.iter_mut().for_each(|c| *c /= nv);
            out.push(v);
        }
    }
    out
}

/// Iterates over all `r`-subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact depth for `2 ≤ d ≤ 4` by candidate-normal enumeration, `O(n^d)`.
///
/// For each `(d−1)`-subset of cloud points, the normals `±u` of the hyperplane
/// through the query and the subset are evaluated together with perturbed
/// directions entering every adjacent cell of the arrangement. The depth is a
/// minimum over open cells, each of which has such a vertex on its boundary.
pub fn exact_depth_small_d(cloud: &PointCloud, x: &Vector) -> Result<DepthResult> {
    let d = cloud.dim();
    if !(2..=4).contains(&d) {
        return Err(Error::invalid(format!("exactsmall requires 2 <= d <= 4 (got d={d})")));
    }
    check(cloud, x)?;
    let n = cloud.len();
    let work = (n as f64).powi(d as i32 - 1);
    if work > SMALL_D_BUDGET {
        return Err(Error::BudgetExceeded { work, limit: SMALL_D_BUDGET });
    }
    let xs = x.as_slice();
    let diffs: Vec<Vec<f64>> = cloud
        .points()
        .map(|p| p.iter().zip(xs).map(|(a, b)| a - b).collect::<Vec<f64>>())
        .filter(|v| norm(v) > COINCIDENT_TOL)
        .collect();

    let eval = |u: &[f64]| halfspace_count(cloud, xs, u, 0.0);
    let r = d - 1;

    // Pad with axes when there are too few non-coincident points to span a hyperplane.
    let mut generators = diffs.clone();
    let mut axis = 0;
    while generators.len() < r && axis < d {
        generators.push(UnitDirection::axis(d, axis, false).into_inner());
        axis += 1;
    }

    let firsts: Vec<usize> = (0..generators.len()).collect();
    let best = firsts
        .par_iter()
        .filter_map(|&first| {
            let mut local: Option<(usize, UnitDirection)> = None;
            let rest = generators.len() - first - 1;
            for_each_subset(rest, r - 1, |tail| {
                let mut rows: Vec<&[f64]> = Vec::with_capacity(r);
                rows.push(&generators[first]);
                rows.extend(tail.iter().map(|&t| generators[first + 1 + t].as_slice()));
                let Some(u) = hyperplane_normal(&rows, d) else { return };
                for cand in vertex_candidates(&rows, &u, d) {
                    let Ok(cand) = UnitDirection::from_raw(cand) else { continue };
                    let c = eval(cand.as_slice());
                    if local.as_ref().is_none_or(|(bc, _)| c < *bc) {
                        local = Some((c, cand));
                    }
                }
            });
            local.map(|(c, u)| (c, first, u))
        })
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let (count, witness) = match best {
        Some((c, _, u)) => (c, u),
        // Every subset was degenerate: all points lie on one line through x.
        None => {
            let mut cands: Vec<Vec<f64>> = DirectionBatch::axes(d).iter().map(|u| u.as_slice().to_vec()).collect();
            for v in &diffs {
                let nv = norm(v);
                cands.push(v.iter().map(|c| c / nv).collect());
                cands.push(v.iter().map(|c| -c / nv).collect());
            }
            let cands = cands.into_iter().map(UnitDirection::from_raw).collect::<Result<Vec<_>>>()?;
            cands
                .into_iter()
                .map(|u| (eval(u.as_slice()), u))
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("axis candidates are never empty")
        }
    };
    Ok(DepthResult::empirical(count, n, witness, DepthMethod::ExactSmallD))
}

/// Minimum of `r_n(x, ·)` over `grid_size` uniform random directions: an upper
/// bound on `d_n(x)` that can only decrease as the grid grows.
pub fn grid_depth(cloud: &PointCloud, x: &Vector, grid_size: usize, rng: &mut StreamRng) -> Result<DepthResult> {
    check(cloud, x)?;
    if grid_size == 0 {
        return Err(Error::invalid("grid_size must be >= 1"));
    }
    let d = cloud.dim();
    let mut buf = vec![0.0; d];
    let mut best = (usize::MAX, vec![0.0; d]);
    for _ in 0..grid_size {
        fill_uniform_direction(rng, &mut buf);
        let c = halfspace_count(cloud, x.as_slice(), &buf, 0.0);
        if c < best.0 {
            best = (c, buf.clone());
        }
    }
    // Directions from the sampler are unit already; keep the evaluated coordinates.
    let witness = UnitDirection::new(best.1)?;
    Ok(DepthResult::empirical(best.0, cloud.len(), witness, DepthMethod::Grid))
}

/// Exact depth for `d ≤ 4` using the fastest available oracle.
pub fn exact_depth(cloud: &PointCloud, x: &Vector) -> Result<DepthResult> {
    match cloud.dim() {
        1 => exact_depth_1d(cloud, x),
        2 => exact_depth_2d(cloud, x),
        _ => exact_depth_small_d(cloud, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::{sample, DistributionSpec};
    use crate::gauss::phi_cdf;
    use crate::seed::SeedSpec;
    use crate::sphere::{sample_direction, sample_sphere};
    use proptest::prelude::*;

    fn rng(i: u64) -> StreamRng {
        SeedSpec::new(21).rng("depth-test", i)
    }

    fn line(vals: &[f64]) -> PointCloud {
        PointCloud::from_flat(vals.to_vec(), 1).unwrap()
    }

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    /// Brute force over `m` equally spaced angles.
    fn angle_grid_2d(cloud: &PointCloud, x: &Vector, m: usize) -> usize {
        (0..m)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / m as f64;
                halfspace_count(cloud, x.as_slice(), &[t.cos(), t.sin()], 0.0)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn directional_examples() {
        let c = line(&[0.0, 1.0, 2.0]);
        let up = UnitDirection::axis(1, 0, false);
        assert_eq!(directional_depth(&c, &v(&[1.0]), &up).unwrap().value, 2.0 / 3.0);
        assert_eq!(directional_depth(&c, &v(&[-0.5]), &up).unwrap().value, 0.0);
        assert_eq!(directional_depth(&c, &v(&[2.0]), &up).unwrap().value, 1.0);
        assert!(directional_depth(&c, &v(&[1.0, 2.0]), &up).is_err());
    }

    #[test]
    fn boundary_tol_counts_rounded_points() {
        let c = line(&[1.0, 1.0 + 1e-13, 2.0]);
        let up = UnitDirection::axis(1, 0, false);
        assert_eq!(directional_depth(&c, &v(&[1.0]), &up).unwrap().count, Some(1));
        assert_eq!(directional_depth_tol(&c, &v(&[1.0]), &up, 1e-12).unwrap().count, Some(2));
    }

    #[test]
    fn random_depth_examples() {
        let c = line(&[3.0, 1.0, 2.0, 5.0]);
        let up = UnitDirection::axis(1, 0, false);
        let single = DirectionBatch::new(vec![up.clone()]).unwrap();
        assert_eq!(
            random_depth(&c, &v(&[2.0]), &single).unwrap().value,
            directional_depth(&c, &v(&[2.0]), &up).unwrap().value
        );
        for n in 1..=12usize {
            let c = line(&(1..=n).map(|i| i as f64).collect::<Vec<_>>());
            let med = n.div_ceil(2);
            let pair = DirectionBatch::new(vec![up.clone(), up.neg()]).unwrap();
            let r = random_depth(&c, &v(&[med as f64]), &pair).unwrap();
            let expect = med.min(n - med + 1);
            assert_eq!(r.count, Some(expect), "n = {n}");
        }
    }

    #[test]
    fn random_depth_tie_picks_first_direction() {
        let c = line(&[0.0, 1.0, 2.0]);
        let up = UnitDirection::axis(1, 0, false);
        let pair = DirectionBatch::new(vec![up.clone(), up.neg()]).unwrap();
        assert_eq!(random_depth(&c, &v(&[1.0]), &pair).unwrap().witness, up);
    }

    #[test]
    fn pop_random_depth_gaussian() {
        let g = DistributionSpec::gaussian(3);
        let b = McBudget::default();
        let dirs = sample_sphere(3, 7, &mut rng(1)).unwrap();
        assert_eq!(pop_random_depth(&g, &Vector::zeros(3), &dirs, b).unwrap().value, 0.5);
        let e1 = DirectionBatch::new(vec![UnitDirection::axis(3, 0, false)]).unwrap();
        let r = pop_random_depth(&g, &Vector::on_axis(3, 0, 1.0), &e1, b).unwrap();
        assert!((r.value - 0.8413447).abs() < 1e-7);
        let x = v(&[0.3, -1.2, 0.8]);
        let u = sample_direction(3, &mut rng(2));
        let t = dot(x.as_slice(), u.as_slice());
        let pair = DirectionBatch::new(vec![u.clone(), u.neg()]).unwrap();
        let r = pop_random_depth(&g, &x, &pair, b).unwrap();
        assert_eq!(r.value, phi_cdf(t).min(phi_cdf(-t)));
        assert!(r.value <= 0.5);
    }

    #[test]
    fn exact_1d_examples() {
        let c = line(&[1.0, 2.0, 3.0]);
        assert_eq!(exact_depth_1d(&c, &v(&[2.0])).unwrap().value, 2.0 / 3.0);
        assert_eq!(exact_depth_1d(&c, &v(&[0.0])).unwrap().value, 0.0);
        assert_eq!(exact_depth_1d(&c, &v(&[1.0])).unwrap().count, Some(1));
        assert!(exact_depth_1d(&PointCloud::from_rows(&[vec![0.0, 0.0]]).unwrap(), &v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn exact_2d_square_and_outside() {
        let sq = PointCloud::from_rows(&[vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]).unwrap();
        let r = exact_depth_2d(&sq, &Vector::zeros(2)).unwrap();
        assert_eq!(angle_grid_2d(&sq, &Vector::zeros(2), 100_000), 2);
        assert_eq!(r.value, 0.5);
        assert_eq!(exact_depth_2d(&sq, &v(&[3.0, 0.1])).unwrap().value, 0.0);
        assert!(exact_depth_2d(&line(&[1.0]), &v(&[1.0])).is_err());
    }

    #[test]
    fn exact_2d_parabola_gap_point() {
        let n = 6.0;
        let pts: Vec<Vec<f64>> =
            [1.0, 2.0, 4.0, 5.0, 6.0].iter().map(|&i: &f64| vec![i / n, 0.8 * (i / n).powi(2)]).collect();
        let c = PointCloud::from_rows(&pts).unwrap();
        let x = v(&[3.0 / n, 0.8 * (3.0 / n).powi(2)]);
        let r = exact_depth_2d(&c, &x).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(directional_depth(&c, &x, &r.witness).unwrap().count, Some(0));
    }

    #[test]
    fn exact_2d_coincident_points_always_count() {
        let c = PointCloud::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![5.0, 5.0]]).unwrap();
        assert_eq!(exact_depth_2d(&c, &Vector::zeros(2)).unwrap().count, Some(2));
        let only = PointCloud::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert_eq!(exact_depth_2d(&only, &v(&[1.0, 1.0])).unwrap().value, 1.0);
    }

    #[test]
    fn exact_2d_matches_angle_grid_and_witness() {
        let g = DistributionSpec::gaussian(2);
        for s in 0..40 {
            let c = sample(&g, 30, &mut rng(100 + s)).unwrap();
            let x = v(sample(&g, 1, &mut rng(200 + s)).unwrap().point(0));
            let r = exact_depth_2d(&c, &x).unwrap();
            let brute = angle_grid_2d(&c, &x, 200_000);
            assert!(r.count.unwrap() <= brute);
            assert!(brute - r.count.unwrap() <= 1, "seed {s}");
            assert_eq!(directional_depth(&c, &x, &r.witness).unwrap().count, r.count);
        }
    }

    #[test]
    fn exact_2d_at_data_points() {
        let g = DistributionSpec::gaussian(2);
        for s in 0..20 {
            let c = sample(&g, 25, &mut rng(300 + s)).unwrap();
            let x = v(c.point(s as usize % 25));
            let r = exact_depth_2d(&c, &x).unwrap();
            let small = exact_depth_small_d(&c, &x).unwrap();
            assert_eq!(r.count, small.count);
            assert!(r.count.unwrap() >= 1);
        }
    }

    #[test]
    fn small_d_matches_2d() {
        let g = DistributionSpec::gaussian(2);
        for s in 0..200 {
            let n = 5 + (s as usize % 56);
            let c = sample(&g, n, &mut rng(400 + s)).unwrap();
            let x = v(&[0.3 * (s as f64 % 5.0) - 0.6, 0.1 * (s as f64 % 7.0) - 0.3]);
            let a = exact_depth_2d(&c, &x).unwrap();
            let b = exact_depth_small_d(&c, &x).unwrap();
            assert_eq!(a.count, b.count, "seed {s}");
            assert_eq!(directional_depth(&c, &x, &b.witness).unwrap().count, b.count);
        }
    }

    #[test]
    fn small_d_simplex_centroid() {
        let verts = vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, -1.0], vec![-1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]];
        let c = PointCloud::from_rows(&verts).unwrap();
        let x = Vector::zeros(3);
        let r = exact_depth_small_d(&c, &x).unwrap();
        assert_eq!(r.value, 0.25);
        let grid = grid_depth(&c, &x, 100_000, &mut rng(5)).unwrap();
        assert_eq!(grid.value, 0.25);
    }

    #[test]
    fn small_d_outside_hull_is_zero() {
        let g = DistributionSpec::gaussian(3);
        let c = sample(&g, 20, &mut rng(6)).unwrap();
        let r = exact_depth_small_d(&c, &v(&[10.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn small_d_matches_grid_in_3d_and_4d() {
        for (d, n, grid) in [(3usize, 15usize, 100_000usize), (4, 9, 100_000)] {
            let g = DistributionSpec::gaussian(d);
            for s in 0..6 {
                let c = sample(&g, n, &mut rng(500 + s + 10 * d as u64)).unwrap();
                let x = v(&vec![0.1; d]);
                let exact = exact_depth_small_d(&c, &x).unwrap().count.unwrap();
                let approx = grid_depth(&c, &x, grid, &mut rng(600 + s)).unwrap().count.unwrap();
                assert!(exact <= approx, "d={d} seed {s}");
                assert!(approx - exact <= 1, "d={d} seed {s}: exact {exact}, grid {approx}");
            }
        }
    }

    #[test]
    fn small_d_guard_and_degenerate_input() {
        let c = PointCloud::from_flat(vec![0.0; 4 * 20_000], 4).unwrap();
        assert!(matches!(exact_depth_small_d(&c, &Vector::zeros(4)), Err(Error::BudgetExceeded { .. })));
        // Collinear through the query.
        let c = PointCloud::from_rows(&[vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0], vec![-1.0, -1.0, -1.0]]).unwrap();
        let r = exact_depth_small_d(&c, &Vector::zeros(3)).unwrap();
        assert_eq!(r.count, Some(1));
        assert!(exact_depth_small_d(&line(&[1.0]), &v(&[0.0])).is_err());
    }

    #[test]
    fn grid_depth_is_upper_bound_close_to_exact() {
        let g = DistributionSpec::gaussian(2);
        for s in 0..20 {
            let c = sample(&g, 50, &mut rng(700 + s)).unwrap();
            let x = v(sample(&g, 1, &mut rng(800 + s)).unwrap().point(0));
            let exact = exact_depth_2d(&c, &x).unwrap().count.unwrap();
            let one = grid_depth(&c, &x, 1, &mut rng(900 + s)).unwrap().count.unwrap();
            let many = grid_depth(&c, &x, 100_000, &mut rng(900 + s)).unwrap().count.unwrap();
            assert!(exact <= many && many <= one);
            assert!(many - exact <= 1);
        }
    }

    fn affine_case() -> impl Strategy<Value = (u64, [f64; 4], [f64; 2])> {
        (0u64..1000, prop::array::uniform4(-3.0..3.0f64), prop::array::uniform2(-5.0..5.0f64))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_depth_dominates_exact(seed in 0u64..10_000, d in 1usize..=3, k in 1usize..20) {
            let g = DistributionSpec::gaussian(d);
            let c = sample(&g, 20, &mut rng(seed)).unwrap();
            let x = v(sample(&g, 1, &mut rng(seed + 1)).unwrap().point(0));
            let dirs = sample_sphere(d, k, &mut rng(seed + 2)).unwrap();
            let exact = exact_depth(&c, &x).unwrap();
            prop_assert!(random_depth(&c, &x, &dirs).unwrap().value >= exact.value);
        }

        #[test]
        fn random_depth_nonincreasing_on_append(seed in 0u64..10_000, k in 1usize..15) {
            let g = DistributionSpec::gaussian(3);
            let c = sample(&g, 30, &mut rng(seed)).unwrap();
            let x = v(sample(&g, 1, &mut rng(seed + 1)).unwrap().point(0));
            let mut dirs = sample_sphere(3, k, &mut rng(seed + 2)).unwrap();
            let before = random_depth(&c, &x, &dirs).unwrap().value;
            dirs.push(sample_direction(3, &mut rng(seed + 3))).unwrap();
            prop_assert!(random_depth(&c, &x, &dirs).unwrap().value <= before);
        }

        #[test]
        fn exact_2d_affine_invariant((seed, m, shift) in affine_case()) {
            let det = m[0] * m[3] - m[1] * m[2];
            prop_assume!(det.abs() > 0.1);
            let g = DistributionSpec::gaussian(2);
            let c = sample(&g, 40, &mut rng(seed)).unwrap();
            let x = sample(&g, 1, &mut rng(seed + 1)).unwrap().point(0).to_vec();
            let t = |p: &[f64], out: &mut [f64]| {
                out[0] = m[0] * p[0] + m[1] * p[1] + shift[0];
                out[1] = m[2] * p[0] + m[3] * p[1] + shift[1];
            };
            let tc = c.map_points(t).unwrap();
            let mut tx = [0.0; 2];
            t(&x, &mut tx);
            let a = exact_depth_2d(&c, &v(&x)).unwrap();
            let b = exact_depth_2d(&tc, &v(&tx)).unwrap();
            prop_assert_eq!(a.count, b.count);
        }
    }
}
