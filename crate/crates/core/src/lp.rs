//! Halfspace systems `{x : ⟨x, U_i⟩ ≥ q_i, ‖x‖_∞ ≤ B}` and the two linear
//! programs the median search needs: feasibility and the Chebyshev center.
//!
//! Both are solved by a dense dictionary simplex (two phases, one auxiliary
//! variable in phase 1, Bland's rule throughout). Variables are shifted to
//! `y = x + B·1 ≥ 0` so the box becomes `y ≤ 2B`. The dictionary stores one
//! column per original variable only, so a pivot costs `O((k + d) · d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, Vector};
use crate::sphere::DirectionBatch;

/// Pivot limit across both phases of a single solve.
pub const MAX_PIVOTS: usize = 1_000_000;
/// Phase-1 optimum below `-FEAS_TOL` means infeasible; also the residual bound on returned points.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSystem {
    d: usize,
    /// Row-major `k × d` unit normals.
    normals: Vec<f64>,
    offsets: Vec<f64>,
    bound: f64,
}

impl HalfspaceSystem {
    pub fn new(normals: &DirectionBatch, offsets: Vec<f64>, bound: f64) -> Result<Self> {
        if offsets.len() != normals.len() {
            return Err(Error::DimensionMismatch { expected: normals.len(), got: offsets.len() });
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::invalid(format!("box bound must be positive and finite, got {bound}")));
        }
        if let Some(i) = offsets.iter().position(|q| !q.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(HalfspaceSystem { d: normals.dim(), normals: normals.to_flat(), offsets, bound })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    fn normal(&self, i: usize) -> &[f64] {
        &self.normals[i * self.d..(i + 1) * self.d]
    }

    /// `min(min_i ⟨x, U_i⟩ − q_i, min_j B − |x_j|)`: nonnegative iff `x` is feasible.
    pub fn slack(&self, x: &[f64]) -> f64 {
        let rows = (0..self.len()).map(|i| dot(self.normal(i), x) - self.offsets[i]);
        let boxes = x.iter().map(|v| self.bound - v.abs());
        rows.chain(boxes).fold(f64::INFINITY, f64::min)
    }

    /// `A y ≤ b` in shifted coordinates, with an optional radius column.
    fn standard_form(&self, with_radius: bool) -> (usize, Vec<f64>, Vec<f64>) {
        let d = self.d;
        let nz = d + with_radius as usize;
        let m = self.len() + d;
        let mut a = vec![0.0; m * nz];
        let mut b = vec![0.0; m];
        for i in 0..self.len() {
            // ⟨U, y − B·1⟩ − ρ ≥ q  ⇔  −⟨U, y⟩ + ρ ≤ −q − B·Σ U
            let u = self.normal(i);
            let row = &mut a[i * nz..(i + 1) * nz];
            row[..d].iter_mut().zip(u).for_each(|(r, v)| *r = -v);
            if with_radius {
                row[d] = 1.0;
            }
            b[i] = -self.offsets[i] - self.bound * u.iter().sum::<f64>();
        }
        for j in 0..d {
            let r = self.len() + j;
            a[r * nz + j] = 1.0;
            b[r] = 2.0 * self.bound;
        }
        (nz, a, b)
    }

    fn unshift(&self, z: &[f64]) -> Vec<f64> {
        z[..self.d].iter().map(|y| (y - self.bound).clamp(-self.bound, self.bound)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpPoint {
    pub point: Vector,
    /// Inscribed radius (zero for plain feasibility).
    pub radius: f64,
    pub pivots: usize,
}

/// A point of the system, or `None` when the phase-1 optimum is below `-1e-9`.
pub fn lp_feasible(system: &HalfspaceSystem) -> Result<Option<LpPoint>> {
    let (nz, a, b) = system.standard_form(false);
    let mut dict = Dictionary::new(nz, &a, &b);
    if !dict.phase_one()? {
        return Ok(None);
    }
    let z = dict.solution(nz);
    Ok(Some(LpPoint { point: Vector::new(system.unshift(&z))?, radius: 0.0, pivots: dict.pivots }))
}

/// Center and radius of the largest ball inside the `k` halfspaces (the box
/// constrains the center only).
pub fn chebyshev_center(system: &HalfspaceSystem) -> Result<LpPoint> {
    let (nz, a, b) = system.standard_form(true);
    let mut dict = Dictionary::new(nz, &a, &b);
    if !dict.phase_one()? {
        return Err(Error::Infeasible);
    }
    let mut c = vec![0.0; nz];
    c[system.d] = 1.0;
    dict.set_objective(&c);
    dict.maximize()?;
    let z = dict.solution(nz);
    Ok(LpPoint { point: Vector::new(system.unshift(&z))?, radius: z[system.d].max(0.0), pivots: dict.pivots })
}

/// Dictionary `x_B = β + α x_N`, objective `ζ + γ · x_N`, all variables ≥ 0.
///
/// Variable ids: `0..nz` original, `nz..nz+m` slacks, `nz+m` the phase-1
/// auxiliary.
struct Dictionary {
    m: usize,
    cols: usize,
    beta: Vec<f64>,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    zeta: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
}

impl Dictionary {
    fn new(nz: usize, a: &[f64], b: &[f64]) -> Self {
        let m = b.len();
        Dictionary {
            m,
            cols: nz,
            beta: b.to_vec(),
            alpha: a.iter().map(|v| -v).collect(),
            gamma: vec![0.0; nz],
            zeta: 0.0,
            basic: (nz..nz + m).collect(),
            nonbasic: (0..nz).collect(),
            pivots: 0,
        }
    }

    #[inline]
    fn at(&self, r: usize, j: usize) -> f64 {
        self.alpha[r * self.cols + j]
    }

    fn pivot(&mut self, r: usize, j: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::SolverStall { pivots: self.pivots - 1 });
        }
        let cols = self.cols;
        let a = self.at(r, j);
        // Row r solved for the entering variable.
        let mut row: Vec<f64> = self.alpha[r * cols..(r + 1) * cols].iter().map(|v| -v / a).collect();
        row[j] = 1.0 / a;
        let b = -self.beta[r] / a;
        for s in 0..self.m {
            if s == r {
                continue;
            }
            let c = self.alpha[s * cols + j];
            if c == 0.0 {
                continue;
            }
            self.beta[s] += c * b;
            let dst = &mut self.alpha[s * cols..(s + 1) * cols];
            for (l, v) in dst.iter_mut().enumerate() {
                *v = if l == j { c * row[j] } else { *v + c * row[l] };
            }
        }
        let c = self.gamma[j];
        if c != 0.0 {
            self.zeta += c * b;
            for (l, v) in self.gamma.iter_mut().enumerate() {
                *v = if l == j { c * row[j] } else { *v + c * row[l] };
            }
        }
        self.alpha[r * cols..(r + 1) * cols].copy_from_slice(&row);
        self.beta[r] = b;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[j]);
        Ok(())
    }

    /// Bland: lowest-index improving variable enters; the ratio test breaks
    /// ties by lowest basic index.
    fn maximize(&mut self) -> Result<()> {
        loop {
            let entering = (0..self.cols).filter(|&j| self.gamma[j] > COST_TOL).min_by_key(|&j| self.nonbasic[j]);
            let Some(j) = entering else { return Ok(()) };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.m {
                let a = self.at(r, j);
                if a < -PIVOT_TOL {
                    let ratio = self.beta[r].max(0.0) / -a;
                    best = match best {
                        Some((br, bi)) if ratio > br || (ratio == br && self.basic[r] > self.basic[bi]) => {
                            Some((br, bi))
                        }
                        _ => Some((ratio, r)),
                    };
                }
            }
            match best {
                Some((_, r)) => self.pivot(r, j)?,
                // Cannot happen for the bounded systems built here.
                None => return Err(Error::invalid("unbounded linear program")),
            }
        }
    }

    /// Drives the dictionary to a feasible basis. Returns false if none exists.
    fn phase_one(&mut self) -> Result<bool> {
        let worst = (0..self.m).min_by(|&a, &b| self.beta[a].total_cmp(&self.beta[b]));
        let Some(worst) = worst else { return Ok(true) };
        if self.beta[worst] >= 0.0 {
            return Ok(true);
        }
        let aux = self.cols + self.m;
        let old = self.cols;
        let mut alpha = Vec::with_capacity(self.m * (old + 1));
        for r in 0..self.m {
            alpha.extend_from_slice(&self.alpha[r * old..(r + 1) * old]);
            alpha.push(1.0);
        }
        self.alpha = alpha;
        self.cols = old + 1;
        self.nonbasic.push(aux);
        self.gamma = vec![0.0; self.cols];
        self.gamma[old] = -1.0;
        self.zeta = 0.0;
        self.pivot(worst, old)?;
        self.maximize()?;
        if self.zeta < -FEAS_TOL {
            return Ok(false);
        }
        // Move the auxiliary out of the basis if it is still there (at level ~0).
        if let Some(r) = self.basic.iter().position(|&v| v == aux) {
            let j = (0..self.cols)
                .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()))
                .expect("dictionary has columns");
            self.pivot(r, j)?;
            self.beta[r] = self.beta[r].max(0.0);
        }
        let j = self.nonbasic.iter().position(|&v| v == aux).expect("auxiliary is nonbasic");
        let cols = self.cols;
        let mut alpha = Vec::with_capacity(self.m * (cols - 1));
        for r in 0..self.m {
            let row = &self.alpha[r * cols..(r + 1) * cols];
            alpha.extend(row.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, v)| *v));
        }
        self.alpha = alpha;
        self.nonbasic.remove(j);
        self.cols -= 1;
        self.gamma = vec![0.0; self.cols];
        self.zeta = 0.0;
        Ok(true)
    }

    /// Rewrites `c · z` over the original variables in terms of the nonbasics.
    fn set_objective(&mut self, c: &[f64]) {
        self.gamma = vec![0.0; self.cols];
        self.zeta = 0.0;
        for (j, &v) in self.nonbasic.iter().enumerate() {
            if v < c.len() {
                self.gamma[j] += c[v];
            }
        }
        for r in 0..self.m {
            let v = self.basic[r];
            if v < c.len() && c[v] != 0.0 {
                self.zeta += c[v] * self.beta[r];
                for j in 0..self.cols {
                    self.gamma[j] += c[v] * self.alpha[r * self.cols + j];
                }
            }
        }
    }

    fn solution(&self, nz: usize) -> Vec<f64> {
        let mut z = vec![0.0; nz];
        for (r, &v) in self.basic.iter().enumerate() {
            if v < nz {
                z[v] = self.beta[r].max(0.0);
            }
        }
        z
    }
}
