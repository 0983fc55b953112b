//! Uniform directions on `S^{d-1}`, Gram–Schmidt orthogonalization and
//! spherical-cap measures.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, norm, UnitDirection};
use crate::seed::StreamRng;

/// Gram–Schmidt rank tolerance on `‖U_i − R_i‖`.
pub const RANK_TOL: f64 = 1e-10;

/// `k ≥ 1` unit directions of a common dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionBatch {
    dirs: Vec<UnitDirection>,
    /// Seed of the stream the batch was drawn from, if any.
    pub seed: Option<u64>,
}

impl DirectionBatch {
    pub fn new(dirs: Vec<UnitDirection>) -> Result<Self> {
        let d = dirs.first().ok_or(Error::EmptyBatch)?.dim();
        if let Some(bad) = dirs.iter().find(|u| u.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        Ok(DirectionBatch { dirs, seed: None })
    }

    /// `{±e_1, …, ±e_d}`, ordered `+e_1, -e_1, +e_2, …`.
    pub fn axes(d: usize) -> Self {
        let dirs = (0..d).flat_map(|j| [UnitDirection::axis(d, j, false), UnitDirection::axis(d, j, true)]).collect();
        DirectionBatch { dirs, seed: None }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dirs[0].dim()
    }

    pub fn get(&self, i: usize) -> &UnitDirection {
        &self.dirs[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitDirection> {
        self.dirs.iter()
    }

    pub fn as_slice(&self) -> &[UnitDirection] {
        &self.dirs
    }

    /// The first `k` directions.
    pub fn prefix(&self, k: usize) -> Result<DirectionBatch> {
        if k == 0 || k > self.len() {
            return Err(Error::invalid(format!("prefix {k} of a batch of {}", self.len())));
        }
        Ok(DirectionBatch { dirs: self.dirs[..k].to_vec(), seed: self.seed })
    }

    /// The batch followed by the negation of every direction.
    pub fn symmetrized(&self) -> DirectionBatch {
        let mut dirs = self.dirs.clone();
        dirs.extend(self.dirs.iter().map(UnitDirection::neg));
        DirectionBatch { dirs, seed: self.seed }
    }

    pub fn push(&mut self, u: UnitDirection) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        self.dirs.push(u);
        Ok(())
    }

    /// Row-major `k × d` matrix of the directions.
    pub fn to_flat(&self) -> Vec<f64> {
        self.dirs.iter().flat_map(|u| u.as_slice().iter().copied()).collect()
    }
}

/// Writes one uniform direction into `out` (normalized standard Gaussian).
pub fn fill_uniform_direction(rng: &mut StreamRng, out: &mut [f64]) {
    loop {
        for c in out.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = norm(out);
        if n > 0.0 {
            out.iter_mut().for_each(|c| *c /= n);
            return;
        }
    }
}

pub fn sample_direction(d: usize, rng: &mut StreamRng) -> UnitDirection {
    let mut buf = vec![0.0; d];
    fill_uniform_direction(rng, &mut buf);
    UnitDirection::from_raw(buf).expect("normalized gaussian is a valid direction")
}

/// `k` i.i.d. uniform directions in `R^d`.
pub fn sample_sphere(d: usize, k: usize, rng: &mut StreamRng) -> Result<DirectionBatch> {
    if d == 0 || k == 0 {
        return Err(Error::invalid(format!("sample_sphere needs d >= 1 and k >= 1 (d={d}, k={k})")));
    }
    let dirs = (0..k).map(|_| sample_direction(d, rng)).collect();
    Ok(DirectionBatch { dirs, seed: None })
}

/// Classical Gram–Schmidt: `V_i = (U_i − R_i)/‖U_i − R_i‖` with
/// `R_i = Σ_{j<i} ⟨U_i, V_j⟩ V_j`.
pub fn gram_schmidt(batch: &DirectionBatch) -> Result<DirectionBatch> {
    let d = batch.dim();
    if batch.len() > d {
        return Err(Error::invalid(format!("gram_schmidt needs k <= d (k={}, d={d})", batch.len())));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(batch.len());
    for (i, u) in batch.iter().enumerate() {
        let u = u.as_slice();
        if i == 0 {
            // Already unit; dividing by its computed norm would perturb the last bit.
            out.push(u.to_vec());
            continue;
        }
        let mut w = u.to_vec();
        for v in &out {
            let c = dot(u, v);
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
        }
        let n = norm(&w);
        if n < RANK_TOL {
            return Err(Error::DegenerateBatch { index: i });
        }
        w.iter_mut().for_each(|c| *c /= n);
        out.push(w);
    }
    let dirs = out.into_iter().map(|v| UnitDirection::new(v).expect("orthonormalized vector has unit norm")).collect();
    Ok(DirectionBatch { dirs, seed: batch.seed })
}

/// Cap `{u : ⟨u, v⟩ ≥ h}` on `S^{d-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub height: f64,
    pub d: usize,
}

/// `(1/(6h√d))(1 − h²)^{(d−1)/2}`, valid for `√(2/d) ≤ h ≤ 1`.
pub fn cap_lower_bound(cap: CapSpec) -> Result<f64> {
    let CapSpec { height: h, d } = cap;
    let df = d as f64;
    if d == 0 || !(h >= (2.0 / df).sqrt() && h <= 1.0) {
        return Err(Error::invalid(format!("cap height {h} outside [sqrt(2/d), 1] for d = {d}")));
    }
    Ok((1.0 - h * h).powf((df - 1.0) / 2.0) / (6.0 * h * df.sqrt()))
}

/// Monte Carlo estimate of `P(U_1 ≥ h)` for uniform `U`.
pub fn cap_measure_mc(cap: CapSpec, samples: usize, rng: &mut StreamRng) -> Result<f64> {
    if samples == 0 || cap.d == 0 {
        return Err(Error::invalid("cap_measure_mc needs samples >= 1 and d >= 1"));
    }
    let mut buf = vec![0.0; cap.d];
    let mut hits = 0usize;
    for _ in 0..samples {
        fill_uniform_direction(rng, &mut buf);
        if buf[0] >= cap.height {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SeedSpec;
    use crate::stats::{ks_pvalue, ks_two_sample};
    use std::f64::consts::PI;

    fn rng(i: u64) -> StreamRng {
        SeedSpec::new(11).rng("sphere-test", i)
    }

    #[test]
    fn d1_is_plus_minus_one() {
        let b = sample_sphere(1, 100, &mut rng(0)).unwrap();
        assert!(b.iter().all(|u| u.as_slice()[0].abs() == 1.0));
        assert!(b.iter().any(|u| u.as_slice()[0] > 0.0));
        assert!(b.iter().any(|u| u.as_slice()[0] < 0.0));
    }

    #[test]
    fn first_coordinate_mean() {
        let b = sample_sphere(3, 100_000, &mut rng(1)).unwrap();
        let mean: f64 = b.iter().map(|u| u.as_slice()[0]).sum::<f64>() / b.len() as f64;
        assert!(mean.abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn norms_are_unit() {
        for (d, k) in [(1, 10), (2, 100), (17, 100), (500, 20)] {
            let b = sample_sphere(d, k, &mut rng(d as u64)).unwrap();
            assert!(b.iter().all(|u| (norm(u.as_slice()) - 1.0).abs() <= 1e-12));
        }
        assert!(sample_sphere(0, 1, &mut rng(0)).is_err());
        assert!(sample_sphere(3, 0, &mut rng(0)).is_err());
    }

    fn gram(b: &DirectionBatch) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in b.iter().enumerate() {
            for (j, v) in b.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(u.as_slice(), v.as_slice()) - target).abs());
            }
        }
        worst
    }

    #[test]
    fn gram_schmidt_singleton_and_fixed_point() {
        let b = sample_sphere(5, 1, &mut rng(2)).unwrap();
        assert_eq!(gram_schmidt(&b).unwrap(), b);

        let axes = DirectionBatch::new((0..4).map(|j| UnitDirection::axis(6, j, j % 2 == 1)).collect()).unwrap();
        let out = gram_schmidt(&axes).unwrap();
        for (u, v) in axes.iter().zip(out.iter()) {
            for (a, b) in u.as_slice().iter().zip(v.as_slice()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gram_schmidt_orthonormal_and_nested_spans() {
        for seed in 0..20 {
            let b = sample_sphere(30, 12, &mut rng(100 + seed)).unwrap();
            let v = gram_schmidt(&b).unwrap();
            assert!(gram(&v) <= 1e-10);
            assert_eq!(v.get(0), b.get(0));
            // U_i lies in span(V_1..V_i): its residual after projection vanishes.
            for i in 0..b.len() {
                let u = b.get(i).as_slice();
                let mut r = u.to_vec();
                for vj in v.iter().take(i + 1) {
                    let c = dot(u, vj.as_slice());
                    r.iter_mut().zip(vj.as_slice()).for_each(|(ri, x)| *ri -= c * x);
                }
                assert!(norm(&r) <= 1e-10);
            }
        }
    }

    #[test]
    fn gram_schmidt_rejects_dependent_batch() {
        let u = UnitDirection::axis(3, 0, false);
        let b = DirectionBatch::new(vec![u.clone(), UnitDirection::axis(3, 1, false), u.neg()]).unwrap();
        assert!(matches!(gram_schmidt(&b), Err(Error::DegenerateBatch { index: 2 })));
        let too_many = DirectionBatch::axes(2);
        assert!(gram_schmidt(&too_many).is_err());
    }

    #[test]
    fn gram_schmidt_bound_d1000_k50() {
        let bound = (4.0 * 50.0 / 1000.0_f64).sqrt();
        assert!((bound - 0.4472).abs() < 1e-4);
        let trials = 1000;
        let mut exceed = 0;
        for t in 0..trials {
            let b = sample_sphere(1000, 50, &mut rng(10_000 + t)).unwrap();
            let v = gram_schmidt(&b).unwrap();
            let worst = b
                .iter()
                .zip(v.iter())
                .map(|(u, w)| u.as_slice().iter().zip(w.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            if worst > bound {
                exceed += 1;
            }
        }
        assert!(exceed as f64 <= 0.01 * trials as f64);
    }

    /// Independent evaluation of the cap bound through logarithms.
    fn cap_bound_oracle(d: usize, h: f64) -> f64 {
        let df = d as f64;
        (0.5 * (df - 1.0) * (1.0 - h * h).ln() - (6.0 * h).ln() - 0.5 * df.ln()).exp()
    }

    #[test]
    fn cap_lower_bound_examples() {
        assert_eq!(cap_lower_bound(CapSpec { height: 1.0, d: 10 }).unwrap(), 0.0);
        let v = cap_lower_bound(CapSpec { height: 0.2, d: 50 }).unwrap();
        assert!((v - cap_bound_oracle(50, 0.2)).abs() < 1e-14);
        assert!((v - 0.043349).abs() < 1e-5, "value {v}");
        assert!(cap_lower_bound(CapSpec { height: 0.1, d: 50 }).is_err());
        assert!(cap_lower_bound(CapSpec { height: 1.1, d: 50 }).is_err());
    }

    #[test]
    fn cap_bound_below_monte_carlo_d50() {
        let cap = CapSpec { height: 0.2, d: 50 };
        let mc = cap_measure_mc(cap, 1_000_000, &mut rng(3)).unwrap();
        assert!(mc >= cap_lower_bound(cap).unwrap());
    }

    #[test]
    fn cap_measure_exact_low_dims() {
        let mc = cap_measure_mc(CapSpec { height: 0.5, d: 2 }, 100_000, &mut rng(4)).unwrap();
        assert!((mc - (0.5_f64).acos() / PI).abs() < 0.005);
        let mc = cap_measure_mc(CapSpec { height: 0.5, d: 3 }, 100_000, &mut rng(5)).unwrap();
        assert!((mc - 0.25).abs() < 0.005);
        let mc = cap_measure_mc(CapSpec { height: 1.0, d: 7 }, 10_000, &mut rng(6)).unwrap();
        assert_eq!(mc, 0.0);
    }

    #[test]
    fn cap_bound_below_mc_over_valid_caps() {
        let samples = 200_000;
        for (i, &d) in [4usize, 10, 30, 100].iter().enumerate() {
            let h_min = (2.0 / d as f64).sqrt();
            for j in 0..5 {
                let h = h_min + (1.0 - h_min) * j as f64 / 5.0;
                let cap = CapSpec { height: h, d };
                let mc = cap_measure_mc(cap, samples, &mut rng(1000 + (i * 10 + j) as u64)).unwrap();
                let se = 0.5 / (samples as f64).sqrt();
                assert!(cap_lower_bound(cap).unwrap() <= mc + 3.0 * se, "d={d} h={h}");
            }
        }
    }

    #[test]
    fn rotation_invariance_ks() {
        let d = 6;
        let q = gram_schmidt(&sample_sphere(d, d, &mut rng(7)).unwrap()).unwrap();
        let rotate = |u: &[f64]| -> Vec<f64> {
            // Q has rows q_i; Q·u.
            q.iter().map(|row| dot(row.as_slice(), u)).collect()
        };
        let a = sample_sphere(d, 20_000, &mut rng(8)).unwrap();
        let b = sample_sphere(d, 20_000, &mut rng(9)).unwrap();
        for probe in 0..4 {
            let v = sample_direction(d, &mut rng(200 + probe));
            let xa: Vec<f64> = a.iter().map(|u| dot(v.as_slice(), u.as_slice())).collect();
            let xb: Vec<f64> = b.iter().map(|u| dot(v.as_slice(), &rotate(u.as_slice()))).collect();
            let stat = ks_two_sample(&xa, &xb);
            let p = ks_pvalue(stat, xa.len(), xb.len());
            assert!(p > 1e-3, "probe {probe}: D = {stat}, p = {p}");
        }
    }
}
