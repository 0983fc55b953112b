//! Isotropic log-concave laws: samplers, population directional CDFs and
//! depth oracles, plus a family of unit-variance, median-zero 1D densities.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{phi_cdf, phi_pdf};
use crate::geom::{dot, PointCloud, UnitDirection, Vector};
use crate::seed::{SeedSpec, StreamRng};
use crate::sphere::{fill_uniform_direction, DirectionBatch};

/// Half-width of the isotropic cube `[−√3, √3]^d`.
pub const CUBE_HALF_WIDTH: f64 = 1.732_050_807_568_877_2;
/// Scale of the unit-variance Laplace law.
pub const LAPLACE_SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Default Monte Carlo budget for population oracles.
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Gaussian,
    Cube,
    LaplaceProduct,
}

impl DistKind {
    pub fn name(self) -> &'static str {
        match self {
            DistKind::Gaussian => "gaussian",
            DistKind::Cube => "cube",
            DistKind::LaplaceProduct => "laplace_product",
        }
    }

    /// Only the Gaussian and the cube appear in the source examples; the
    /// Laplace product is an added stress case.
    pub fn is_stress_case(self) -> bool {
        matches!(self, DistKind::LaplaceProduct)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(DistKind::Gaussian),
            "cube" => Ok(DistKind::Cube),
            "laplace_product" | "laplace" => Ok(DistKind::LaplaceProduct),
            other => Err(Error::invalid(format!(
                "unknown distribution {other:?} (expected gaussian, cube or laplace_product)"
            ))),
        }
    }

    #[inline]
    fn draw(self, rng: &mut StreamRng) -> f64 {
        match self {
            DistKind::Gaussian => rng.sample(StandardNormal),
            DistKind::Cube => CUBE_HALF_WIDTH * (2.0 * rng.random::<f64>() - 1.0),
            DistKind::LaplaceProduct => {
                let e: f64 = rng.sample(Exp1);
                if rng.random::<bool>() {
                    LAPLACE_SCALE * e
                } else {
                    -LAPLACE_SCALE * e
                }
            }
        }
    }

    /// CDF of a single coordinate.
    pub fn coordinate_cdf(self, t: f64) -> f64 {
        match self {
            DistKind::Gaussian => phi_cdf(t),
            DistKind::Cube => ((t + CUBE_HALF_WIDTH) / (2.0 * CUBE_HALF_WIDTH)).clamp(0.0, 1.0),
            DistKind::LaplaceProduct => {
                if t < 0.0 {
                    0.5 * (t / LAPLACE_SCALE).exp()
                } else {
                    1.0 - 0.5 * (-t / LAPLACE_SCALE).exp()
                }
            }
        }
    }
}

/// An isotropic log-concave law on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: DistKind,
    pub d: usize,
}

impl DistributionSpec {
    pub fn new(kind: DistKind, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("distribution dimension must be >= 1"));
        }
        Ok(DistributionSpec { kind, d })
    }

    pub fn gaussian(d: usize) -> Self {
        DistributionSpec { kind: DistKind::Gaussian, d }
    }

    pub fn cube(d: usize) -> Self {
        DistributionSpec { kind: DistKind::Cube, d }
    }

    pub fn fill_point(&self, rng: &mut StreamRng, out: &mut [f64]) {
        for c in out.iter_mut() {
            *c = self.kind.draw(rng);
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: d });
        }
        Ok(())
    }
}

/// `n` i.i.d. draws.
pub fn sample(dist: &DistributionSpec, n: usize, rng: &mut StreamRng) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut data = vec![0.0; n * dist.d];
    for p in data.chunks_exact_mut(dist.d) {
        dist.fill_point(rng, p);
    }
    PointCloud::from_flat(data, dist.d)
}

/// Monte Carlo budget for population oracles of non-Gaussian laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McBudget {
    pub samples: usize,
    /// Seed of the dedicated sample stream.
    pub seed: u64,
}

impl McBudget {
    pub fn new(samples: usize, seed: u64) -> Self {
        McBudget { samples, seed }
    }

    /// Upper bound `1/(2√samples)` on the standard error of one estimate.
    pub fn std_error_bound(&self) -> f64 {
        0.5 / (self.samples as f64).sqrt()
    }
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget { samples: DEFAULT_BUDGET, seed: SeedSpec::new(0).derive("pop-mc", 0) }
    }
}

/// `r̄(x, u) = P(⟨X, u⟩ ≤ ⟨x, u⟩)`.
pub fn pop_dir_cdf(dist: &DistributionSpec, x: &Vector, u: &UnitDirection, budget: McBudget) -> Result<f64> {
    let batch = DirectionBatch::new(vec![u.clone()])?;
    Ok(pop_dir_cdf_batch(dist, x, &batch, budget)?[0])
}

/// `r̄(x, u)` for every direction of a batch.
///
/// Gaussian: exact, `Φ(⟨x, u⟩)`. Other laws: exact through the coordinate CDF
/// when `d = 1`, otherwise Monte Carlo with `budget.samples` draws shared by all
/// directions (common random numbers).
pub fn pop_dir_cdf_batch(
    dist: &DistributionSpec,
    x: &Vector,
    dirs: &DirectionBatch,
    budget: McBudget,
) -> Result<Vec<f64>> {
    dist.check_dim(x.dim())?;
    dist.check_dim(dirs.dim())?;
    let thresholds: Vec<f64> = dirs.iter().map(|u| dot(x.as_slice(), u.as_slice())).collect();
    match dist.kind {
        DistKind::Gaussian => Ok(thresholds.iter().map(|&t| phi_cdf(t)).collect()),
        // Every coordinate law here is symmetric, so ⟨X, ±1⟩ has the coordinate law.
        kind if dist.d == 1 => Ok(thresholds.iter().map(|&t| kind.coordinate_cdf(t)).collect()),
        _ => {
            if budget.samples == 0 {
                return Err(Error::invalid("Monte Carlo budget must be >= 1"));
            }
            let counts = mc_halfspace_counts(dist, &dirs.to_flat(), &thresholds, budget);
            Ok(counts.iter().map(|&c| c as f64 / budget.samples as f64).collect())
        }
    }
}

const MC_BLOCK: usize = 512;

/// Counts draws with `⟨X, U_i⟩ ≤ t_i`, projecting blocks of samples with one
/// matrix product per block.
fn mc_halfspace_counts(dist: &DistributionSpec, dirs: &[f64], thresholds: &[f64], budget: McBudget) -> Vec<u64> {
    let d = dist.d;
    let k = thresholds.len();
    let mut rng = SeedSpec::new(budget.seed).rng("pop-mc", 0);
    let mut counts = vec![0u64; k];
    let mut block = vec![0.0; MC_BLOCK * d];
    let mut proj = vec![0.0; MC_BLOCK * k];
    let mut remaining = budget.samples;
    while remaining > 0 {
        let m = remaining.min(MC_BLOCK);
        for p in block[..m * d].chunks_exact_mut(d) {
            dist.fill_point(&mut rng, p);
        }
        // proj (m × k) = block (m × d) · dirsᵀ (d × k)
        unsafe {
            matrixmultiply::dgemm(
                m,
                d,
                k,
                1.0,
                block.as_ptr(),
                d as isize,
                1,
                dirs.as_ptr(),
                1,
                d as isize,
                0.0,
                proj.as_mut_ptr(),
                k as isize,
                1,
            );
        }
        for row in proj[..m * k].chunks_exact(k) {
            for ((c, &p), &t) in counts.iter_mut().zip(row).zip(thresholds) {
                *c += u64::from(p <= t);
            }
        }
        remaining -= m;
    }
    counts
}

/// Options for [`pop_depth`] on laws without a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopDepthMethod {
    /// Number of extra uniformly random candidate directions.
    pub grid: usize,
    pub budget: McBudget,
}

impl Default for PopDepthMethod {
    fn default() -> Self {
        PopDepthMethod { grid: 64, budget: McBudget::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopDepth {
    pub value: f64,
    pub witness: UnitDirection,
    /// `false` only for closed forms; candidate-set minima bound `d̄(x)` from above.
    pub upper_bound: bool,
    pub method: String,
}

/// `d̄(x) = inf_u r̄(x, u)`.
///
/// Gaussian: `Φ(−‖x‖)`, attained at `u = −x/‖x‖`. Other laws: minimum of
/// [`pop_dir_cdf_batch`] over `±x/‖x‖`, the `2d` signed axes and
/// `method.grid` random directions, which is an upper bound on `d̄(x)`.
pub fn pop_depth(dist: &DistributionSpec, x: &Vector, method: PopDepthMethod) -> Result<PopDepth> {
    dist.check_dim(x.dim())?;
    let d = dist.d;
    let r = x.norm();
    if dist.kind == DistKind::Gaussian {
        let witness = if r > 0.0 {
            UnitDirection::from_raw(x.as_slice().iter().map(|c| -c).collect())?
        } else {
            UnitDirection::axis(d, 0, false)
        };
        return Ok(PopDepth { value: phi_cdf(-r), witness, upper_bound: false, method: "closed_form".into() });
    }
    let mut candidates = Vec::with_capacity(2 + 2 * d + method.grid);
    if r > 0.0 {
        let u = UnitDirection::from_raw(x.as_slice().to_vec())?;
        candidates.push(u.neg());
        candidates.push(u);
    }
    candidates.extend(DirectionBatch::axes(d).iter().cloned());
    let mut rng = SeedSpec::new(method.budget.seed).rng("pop-depth-grid", 0);
    let mut buf = vec![0.0; d];
    for _ in 0..method.grid {
        fill_uniform_direction(&mut rng, &mut buf);
        candidates.push(UnitDirection::from_raw(buf.clone())?);
    }
    let batch = DirectionBatch::new(candidates)?;
    let values = pop_dir_cdf_batch(dist, x, &batch, method.budget)?;
    let (best, value) = argmin(&values);
    Ok(PopDepth {
        value,
        witness: batch.get(best).clone(),
        upper_bound: d > 1,
        method: format!("candidates(x, axes, grid={})", method.grid),
    })
}

/// Index and value of the minimum; the smallest index wins ties.
pub(crate) fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) })
}

/// Unit-variance, median-zero log-concave densities on `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogConcave1D {
    Gaussian,
    Laplace,
    Uniform,
    ShiftedExponential,
    LogisticRescaled,
}

/// Scale `√3/π` of the unit-variance logistic law.
const LOGISTIC_SCALE: f64 = 0.551_328_895_421_792_1;

impl LogConcave1D {
    pub const ALL: [LogConcave1D; 5] = [
        LogConcave1D::Gaussian,
        LogConcave1D::Laplace,
        LogConcave1D::Uniform,
        LogConcave1D::ShiftedExponential,
        LogConcave1D::LogisticRescaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogConcave1D::Gaussian => "gaussian",
            LogConcave1D::Laplace => "laplace",
            LogConcave1D::Uniform => "uniform",
            LogConcave1D::ShiftedExponential => "shifted_exponential",
            LogConcave1D::LogisticRescaled => "logistic_rescaled",
        }
    }

    pub fn density(self, t: f64) -> f64 {
        match self {
            LogConcave1D::Gaussian => phi_pdf(t),
            LogConcave1D::Laplace => (-t.abs() / LAPLACE_SCALE).exp() / (2.0 * LAPLACE_SCALE),
            LogConcave1D::Uniform => {
                if t.abs() <= CUBE_HALF_WIDTH {
                    1.0 / (2.0 * CUBE_HALF_WIDTH)
                } else {
                    0.0
                }
            }
            LogConcave1D::ShiftedExponential => {
                if t >= -LN_2 {
                    (-(t + LN_2)).exp()
                } else {
                    0.0
                }
            }
            LogConcave1D::LogisticRescaled => {
                let e = (-t.abs() / LOGISTIC_SCALE).exp();
                e / (LOGISTIC_SCALE * (1.0 + e) * (1.0 + e))
            }
        }
    }

    pub fn cdf(self, t: f64) -> f64 {
        match self {
            LogConcave1D::Gaussian => phi_cdf(t),
            LogConcave1D::Laplace => DistKind::LaplaceProduct.coordinate_cdf(t),
            LogConcave1D::Uniform => DistKind::Cube.coordinate_cdf(t),
            LogConcave1D::ShiftedExponential => {
                if t >= -LN_2 {
                    1.0 - 0.5 * (-t).exp()
                } else {
                    0.0
                }
            }
            LogConcave1D::LogisticRescaled => 1.0 / (1.0 + (-t / LOGISTIC_SCALE).exp()),
        }
    }

    /// Closed-form median; every member is centred so that it is zero.
    pub fn median(self) -> f64 {
        0.0
    }

    /// Closed-form variance; every member is scaled so that it is one.
    pub fn variance(self) -> f64 {
        match self {
            LogConcave1D::Gaussian => 1.0,
            LogConcave1D::Laplace => 2.0 * LAPLACE_SCALE * LAPLACE_SCALE,
            LogConcave1D::Uniform => CUBE_HALF_WIDTH * CUBE_HALF_WIDTH / 3.0,
            LogConcave1D::ShiftedExponential => 1.0,
            LogConcave1D::LogisticRescaled => (LOGISTIC_SCALE * PI).powi(2) / 3.0,
        }
    }

    /// Points where the density is not smooth, inside `[−50, 50]`.
    pub fn breakpoints(self) -> Vec<f64> {
        let mut b = vec![-50.0, 50.0];
        match self {
            LogConcave1D::Laplace | LogConcave1D::LogisticRescaled => b.push(0.0),
            LogConcave1D::Uniform => b.extend([-CUBE_HALF_WIDTH, CUBE_HALF_WIDTH]),
            LogConcave1D::ShiftedExponential => b.push(-LN_2),
            LogConcave1D::Gaussian => {}
        }
        b.sort_by(f64::total_cmp);
        b
    }
}

/// Moments computed by quadrature, independent of the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericMoments {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
    pub median: f64,
}

const GL_X: [f64; 5] =
    [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss–Legendre with panels no wider than `width`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, width: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / m as f64;
    (0..m)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            GL_X.iter().zip(GL_W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn integrate_pieces(f: &impl Fn(f64) -> f64, breaks: &[f64], lo: f64, hi: f64) -> f64 {
    breaks.windows(2).map(|w| integrate(f, w[0].max(lo), w[1].min(hi), 0.01)).sum()
}

/// Mass, mean, variance and median by quadrature on `[−50, 50]`.
pub fn numeric_moments(f: LogConcave1D) -> NumericMoments {
    let breaks = f.breakpoints();
    let dens = |t: f64| f.density(t);
    let mass = integrate_pieces(&dens, &breaks, -50.0, 50.0);
    let mean = integrate_pieces(&|t: f64| t * f.density(t), &breaks, -50.0, 50.0) / mass;
    let variance = integrate_pieces(&|t: f64| (t - mean).powi(2) * f.density(t), &breaks, -50.0, 50.0) / mass;
    let numeric_cdf = |t: f64| {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b < t).collect();
        pts.push(t);
        integrate_pieces(&dens, &pts, -50.0, t) / mass
    };
    let (mut lo, mut hi) = (-5.0, 5.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if numeric_cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    NumericMoments { mass, mean, variance, median: 0.5 * (lo + hi) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::phi_quantile;
    use crate::sphere::sample_direction;
    use crate::stats::{ks_one_sample, mean, variance};

    fn rng(i: u64) -> StreamRng {
        SeedSpec::new(5).rng("dists-test", i)
    }

    #[test]
    fn gaussian_variance_1d() {
        let c = sample(&DistributionSpec::gaussian(1), 1_000_000, &mut rng(0)).unwrap();
        let v = variance(c.as_flat());
        assert!((0.99..=1.01).contains(&v), "variance {v}");
    }

    #[test]
    fn cube_support() {
        let c = sample(&DistributionSpec::cube(2), 50_000, &mut rng(1)).unwrap();
        assert!(c.as_flat().iter().all(|x| x.abs() <= CUBE_HALF_WIDTH));
        assert_eq!(CUBE_HALF_WIDTH, 3.0_f64.sqrt());
    }

    #[test]
    fn laplace_fourth_moment() {
        let c = sample(&DistributionSpec { kind: DistKind::LaplaceProduct, d: 1 }, 1_000_000, &mut rng(2)).unwrap();
        let m4 = c.as_flat().iter().map(|x| x.powi(4)).sum::<f64>() / c.len() as f64;
        assert!((m4 - 6.0).abs() <= 0.2, "fourth moment {m4}");
    }

    #[test]
    fn every_kind_is_isotropic_at_clt_rate() {
        for kind in [DistKind::Gaussian, DistKind::Cube, DistKind::LaplaceProduct] {
            let c = sample(&DistributionSpec { kind, d: 3 }, 200_000, &mut rng(3)).unwrap();
            for j in 0..3 {
                let col: Vec<f64> = c.points().map(|p| p[j]).collect();
                assert!(mean(&col).abs() < 0.015, "{kind:?} mean");
                assert!((variance(&col) - 1.0).abs() < 0.03, "{kind:?} variance");
            }
            let cov: f64 = c.points().map(|p| p[0] * p[1]).sum::<f64>() / c.len() as f64;
            assert!(cov.abs() < 0.015);
        }
    }

    #[test]
    fn pop_dir_cdf_examples() {
        let b = McBudget::default();
        for seed in 0..5 {
            let u = sample_direction(4, &mut rng(10 + seed));
            let v = pop_dir_cdf(&DistributionSpec::gaussian(4), &Vector::zeros(4), &u, b).unwrap();
            assert_eq!(v, 0.5);
        }
        let x = Vector::new(vec![1.0, 0.0]).unwrap();
        let v = pop_dir_cdf(&DistributionSpec::gaussian(2), &x, &UnitDirection::axis(2, 0, false), b).unwrap();
        assert!((v - 0.8413447).abs() < 1e-7);

        let x = Vector::new(vec![0.5]).unwrap();
        let v = pop_dir_cdf(&DistributionSpec::cube(1), &x, &UnitDirection::axis(1, 0, false), b).unwrap();
        let closed = (0.5 + 3.0_f64.sqrt()) / (2.0 * 3.0_f64.sqrt());
        assert!((closed - 0.644337).abs() < 1e-6);
        assert!((v - closed).abs() < 1e-15);
    }

    #[test]
    fn cube_mc_matches_exact_axis_marginal() {
        // Along an axis the projection is a single uniform coordinate.
        let dist = DistributionSpec::cube(5);
        let x = Vector::on_axis(5, 2, 0.5);
        let b = McBudget::new(200_000, 99);
        let v = pop_dir_cdf(&dist, &x, &UnitDirection::axis(5, 2, false), b).unwrap();
        let exact = DistKind::Cube.coordinate_cdf(0.5);
        assert!((v - exact).abs() <= 4.0 * b.std_error_bound());
    }

    #[test]
    fn complementary_directions_sum_to_one() {
        let b = McBudget::new(100_000, 3);
        for kind in [DistKind::Gaussian, DistKind::Cube, DistKind::LaplaceProduct] {
            let dist = DistributionSpec { kind, d: 6 };
            for s in 0..3 {
                let x = sample(&dist, 1, &mut rng(20 + s)).unwrap().point(0).to_vec();
                let x = Vector::new(x).unwrap();
                let u = sample_direction(6, &mut rng(30 + s));
                let batch = DirectionBatch::new(vec![u.clone(), u.neg()]).unwrap();
                let v = pop_dir_cdf_batch(&dist, &x, &batch, b).unwrap();
                let tol: f64 = if kind == DistKind::Gaussian { 1e-15 } else { 1e-12 };
                // Shared draws: the two counts partition the sample up to ties.
                assert!((v[0] + v[1] - 1.0).abs() <= tol.max(1.0 / b.samples as f64), "{kind:?}");
            }
        }
    }

    #[test]
    fn pop_depth_gaussian_closed_form() {
        let dist = DistributionSpec::gaussian(3);
        let m = PopDepthMethod::default();
        assert_eq!(pop_depth(&dist, &Vector::zeros(3), m).unwrap().value, 0.5);
        let r = phi_quantile(0.75).unwrap();
        assert!((r - 0.6744898).abs() < 1e-7);
        let x = Vector::new(vec![r / 3.0_f64.sqrt(); 3]).unwrap();
        let p = pop_depth(&dist, &x, m).unwrap();
        assert!((p.value - 0.25).abs() < 1e-12);
        assert!(!p.upper_bound);
    }

    #[test]
    fn pop_depth_gaussian_monotone_along_rays() {
        let dist = DistributionSpec::gaussian(4);
        let m = PopDepthMethod::default();
        for s in 0..10 {
            let x = Vector::new(sample(&dist, 1, &mut rng(40 + s)).unwrap().point(0).to_vec()).unwrap();
            let base = pop_depth(&dist, &x, m).unwrap().value;
            for a in [1.0, 1.5, 3.0, 10.0] {
                assert!(pop_depth(&dist, &x.scaled(a), m).unwrap().value <= base);
            }
        }
    }

    #[test]
    fn cube_corner_depth_is_zero() {
        let dist = DistributionSpec::cube(50);
        let x = Vector::on_axis(50, 0, CUBE_HALF_WIDTH);
        let m = PopDepthMethod { grid: 8, budget: McBudget::new(20_000, 1) };
        let p = pop_depth(&dist, &x, m).unwrap();
        assert!(p.value <= 3.0 * m.budget.std_error_bound());
        assert_eq!(p.value, 0.0);
        assert!(p.upper_bound);
    }

    #[test]
    fn pop_depth_below_every_probed_direction() {
        let dist = DistributionSpec { kind: DistKind::LaplaceProduct, d: 3 };
        let budget = McBudget::new(50_000, 8);
        let m = PopDepthMethod { grid: 16, budget };
        let x = Vector::new(vec![0.4, -0.2, 0.7]).unwrap();
        let p = pop_depth(&dist, &x, m).unwrap();
        for s in 0..10 {
            let u = sample_direction(3, &mut rng(60 + s));
            let v = pop_dir_cdf(&dist, &x, &u, budget).unwrap();
            assert!(p.value <= v + 4.0 * budget.std_error_bound());
        }
    }

    #[test]
    fn cube_marginal_is_near_gaussian_in_high_dimension() {
        let dist = DistributionSpec::cube(100);
        let u = sample_direction(100, &mut rng(70));
        let c = sample(&dist, 100_000, &mut rng(71)).unwrap();
        let proj: Vec<f64> = c.points().map(|p| dot(p, u.as_slice())).collect();
        assert!(ks_one_sample(&proj, phi_cdf) <= 0.02);
    }

    #[test]
    fn density_examples() {
        assert!((LogConcave1D::Gaussian.density(0.0) - 0.3989423).abs() < 1e-7);
        assert!((LogConcave1D::Laplace.density(0.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        for t in [-1.7, -0.3, 0.0, 1.0, 1.73] {
            assert!((LogConcave1D::Uniform.density(t) - 0.2886751).abs() < 1e-7);
        }
    }

    #[test]
    fn family_is_normalized() {
        for f in LogConcave1D::ALL {
            let m = numeric_moments(f);
            assert!((m.mass - 1.0).abs() <= 1e-9, "{f:?} mass {}", m.mass);
            assert!((m.variance - 1.0).abs() <= 1e-6, "{f:?} variance {}", m.variance);
            assert!((f.variance() - 1.0).abs() <= 1e-12, "{f:?} closed variance");
            assert!((m.median - f.median()).abs() <= 1e-9, "{f:?} median {}", m.median);
            assert!((f.cdf(0.0) - 0.5).abs() <= 1e-15, "{f:?} cdf(0)");
        }
    }

    #[test]
    fn dist_spec_json_shape() {
        let s = serde_json::to_string(&DistributionSpec::cube(200)).unwrap();
        assert_eq!(s, r#"{"kind":"cube","d":200}"#);
        let back: DistributionSpec = serde_json::from_str(r#"{"kind":"laplace_product","d":3}"#).unwrap();
        assert_eq!(back.kind, DistKind::LaplaceProduct);
    }
}
