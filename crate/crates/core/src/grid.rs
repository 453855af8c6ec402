//! Sampling grids: detector sphere, time axis, cylinder data, radial
//! profiles and Cartesian volumes, with their interpolation rules.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Point, ScalarField};
use crate::quadrature::GaussRule;

/// Product quadrature on S^2: Gauss-Legendre in `cos(polar)` times the
/// uniform rule in azimuth. Weights sum to one, so sums against them are
/// means with respect to the normalized surface measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_polar: usize,
    n_azimuth: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Result<Self> {
        if n_polar < 2 || n_azimuth < 4 {
            return Err(Error::invalid(format!(
                "sphere grid needs n_polar >= 2 and n_azimuth >= 4 (got {n_polar} x {n_azimuth})"
            )));
        }
        let gl = GaussRule::legendre(n_polar)?;
        let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (&z, &wz) in gl.nodes().iter().zip(gl.weights()) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for a in 0..n_azimuth {
                let phi = 2.0 * PI * (a as f64 + 0.5) / n_azimuth as f64;
                nodes.push([s * phi.cos(), s * phi.sin(), z]);
                weights.push(0.5 * wz / n_azimuth as f64);
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Ok(SphereGrid {
            n_polar,
            n_azimuth,
            nodes,
            weights,
        })
    }

    /// Rebuild from stored nodes and weights (file input). Checks the unit
    /// norm and unit mass invariants.
    pub fn from_parts(
        n_polar: usize,
        n_azimuth: usize,
        nodes: Vec<Point>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = n_polar * n_azimuth;
        if nodes.len() != n || weights.len() != n {
            return Err(Error::invalid("sphere node/weight count mismatch"));
        }
        if nodes
            .iter()
            .any(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() > 1e-12)
        {
            return Err(Error::invalid("sphere nodes must be unit vectors"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("sphere weights must be positive with unit sum"));
        }
        Ok(SphereGrid {
            n_polar,
            n_azimuth,
            nodes,
            weights,
        })
    }

    pub fn n_polar(&self) -> usize {
        self.n_polar
    }

    pub fn n_azimuth(&self) -> usize {
        self.n_azimuth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        (2 * self.n_polar - 1).min(self.n_azimuth - 1)
    }

    /// Mean of `g` over the sphere.
    pub fn integrate<F: Fn(Point) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * g(p))
            .sum()
    }
}

/// Uniform cell-centered time grid `t_j = (j + 1/2) dt`, `j < n`, on
/// `(0, tmax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n: usize,
    tmax: f64,
}

impl TimeGrid {
    pub fn new(n: usize, tmax: f64) -> Result<Self> {
        if n < 6 {
            return Err(Error::invalid(format!("time grid needs at least 6 samples (got {n})")));
        }
        if !(tmax > 0.0) || !tmax.is_finite() {
            return Err(Error::invalid(format!("tmax must be positive (got {tmax})")));
        }
        Ok(TimeGrid { n, tmax })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tmax(&self) -> f64 {
        self.tmax
    }

    pub fn step(&self) -> f64 {
        self.tmax / self.n as f64
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.t(j)).collect()
    }

    /// Empty profile on this grid.
    pub fn profile(&self, values: Vec<f64>) -> RadialProfile {
        RadialProfile::new(self.t(0), self.step(), values).expect("time grid has >= 6 samples")
    }
}

/// Cubic interpolation along a row sampled on `times`: Catmull-Rom in the
/// interior, the one-sided cubic through the four end samples in the first
/// and last cell. Outside `[t_1, t_n]` a row whose two boundary samples are
/// negligible (see [`TAIL_TOLERANCE`]) evaluates to zero; otherwise the call
/// fails.
#[inline]
pub fn interp_row(row: &[f64], times: &TimeGrid, t: f64) -> Result<f64> {
    interp_samples(row, times.step(), t).ok_or_else(|| Error::OutOfRange {
        what: "interpolation time",
        value: t,
        range: format!("[{}, {}]", times.t(0), times.t(row.len() - 1)),
    })
}

/// Boundary samples at most this fraction of the row maximum count as a
/// vanishing tail. Exact zeros always do.
pub const TAIL_TOLERANCE: f64 = 1e-3;

fn negligible_pair(a: f64, b: f64, row_max: f64) -> bool {
    (a == 0.0 && b == 0.0) || a.abs().max(b.abs()) <= TAIL_TOLERANCE * row_max
}

fn row_max(row: &[f64]) -> f64 {
    row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// [`interp_row`] on a row sampled at `(j + 1/2) dt`; `None` when `t` is
/// outside the sampled range and the row does not vanish there.
#[inline]
pub fn interp_samples(row: &[f64], dt: f64, t: f64) -> Option<f64> {
    let n = row.len();
    let u = t / dt - 0.5;
    if u < 0.0 {
        return negligible_pair(row[0], row[1], row_max(row)).then_some(0.0);
    }
    if u > (n - 1) as f64 {
        return negligible_pair(row[n - 1], row[n - 2], row_max(row)).then_some(0.0);
    }
    let k = (u as usize).min(n - 2);
    let s = u - k as f64;
    Some(if k == 0 {
        cubic4(&row[0..4], s)
    } else if k == n - 2 {
        cubic4(&row[n - 4..n], s + 2.0)
    } else {
        catmull_rom(row[k - 1], row[k], row[k + 1], row[k + 2], s)
    })
}

/// Piecewise-cubic coefficients of the [`interp_samples`] interpolant of
/// one row, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct RowSpline {
    coef: Vec<[f64; 4]>,
    zero_head: bool,
    zero_tail: bool,
    inv_dt: f64,
}

impl RowSpline {
    pub fn new(row: &[f64], dt: f64) -> Self {
        let mut s = RowSpline {
            coef: Vec::new(),
            zero_head: false,
            zero_tail: false,
            inv_dt: 1.0 / dt,
        };
        s.rebuild(row);
        s
    }

    /// Refill from another row with the same sampling, reusing storage.
    pub fn rebuild(&mut self, row: &[f64]) {
        let n = row.len();
        let m = row_max(row);
        self.zero_head = negligible_pair(row[0], row[1], m);
        self.zero_tail = negligible_pair(row[n - 1], row[n - 2], m);
        self.coef.clear();
        for k in 0..n - 1 {
            let c = if k == 0 {
                cubic4_coef(&row[0..4], 0.0)
            } else if k == n - 2 {
                cubic4_coef(&row[n - 4..n], 2.0)
            } else {
                let (p0, p1, p2, p3) = (row[k - 1], row[k], row[k + 1], row[k + 2]);
                [
                    p1,
                    0.5 * (p2 - p0),
                    0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3),
                    0.5 * (3.0 * (p1 - p2) + p3 - p0),
                ]
            };
            self.coef.push(c);
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Option<f64> {
        let u = t * self.inv_dt - 0.5;
        if u < 0.0 {
            return self.zero_head.then_some(0.0);
        }
        let last = self.coef.len();
        if u > last as f64 {
            return self.zero_tail.then_some(0.0);
        }
        let k = (u as usize).min(last - 1);
        let s = u - k as f64;
        let c = &self.coef[k];
        Some(c[0] + s * (c[1] + s * (c[2] + s * c[3])))
    }
}

/// Monomial coefficients in `s` of the cubic through `p` at offsets
/// `0..4`, shifted so that `s = 0` sits at offset `x0`.
fn cubic4_coef(p: &[f64], x0: f64) -> [f64; 4] {
    // Newton form at 0, 1, 2, 3
    let d1 = [p[1] - p[0], p[2] - p[1], p[3] - p[2]];
    let d2 = [(d1[1] - d1[0]) / 2.0, (d1[2] - d1[1]) / 2.0];
    let d3 = (d2[1] - d2[0]) / 3.0;
    // p(x) = p0 + d1 x + d2 x(x-1) + d3 x(x-1)(x-2), then x = s + x0
    let (a0, a1, a2, a3) = (
        p[0],
        d1[0] - d2[0] + 2.0 * d3,
        d2[0] - 3.0 * d3,
        d3,
    );
    [
        a0 + x0 * (a1 + x0 * (a2 + x0 * a3)),
        a1 + x0 * (2.0 * a2 + 3.0 * a3 * x0),
        a2 + 3.0 * a3 * x0,
        a3,
    ]
}

#[inline]
fn catmull_rom(p0: f64, p1: f64, p2: f64, p3: f64, s: f64) -> f64 {
    0.5 * (2.0 * p1
        + s * ((p2 - p0)
            + s * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) + s * (3.0 * (p1 - p2) + p3 - p0))))
}

/// Lagrange cubic through samples at offsets 0, 1, 2, 3.
#[inline]
fn cubic4(p: &[f64], x: f64) -> f64 {
    let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
    let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
    let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
    l0 * p[0] + l1 * p[1] + l2 * p[2] + l3 * p[3]
}

/// Samples `F(theta_i, t_j)` on detector nodes times a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderData {
    sphere: SphereGrid,
    times: TimeGrid,
    samples: Vec<f64>,
}

impl CylinderData {
    pub fn new(sphere: SphereGrid, times: TimeGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != sphere.len() * times.len() {
            return Err(Error::invalid(format!(
                "cylinder samples: expected {} x {} values, got {}",
                sphere.len(),
                times.len(),
                samples.len()
            )));
        }
        Ok(CylinderData {
            sphere,
            times,
            samples,
        })
    }

    pub fn zeros(sphere: SphereGrid, times: TimeGrid) -> Self {
        let samples = vec![0.0; sphere.len() * times.len()];
        CylinderData {
            sphere,
            times,
            samples,
        }
    }

    /// Build from per-node rows.
    pub fn from_rows(sphere: SphereGrid, times: TimeGrid, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != sphere.len() || rows.iter().any(|r| r.len() != times.len()) {
            return Err(Error::invalid("cylinder rows do not match the grids"));
        }
        let samples = rows.into_iter().flatten().collect();
        Self::new(sphere, times, samples)
    }

    pub fn sphere(&self) -> &SphereGrid {
        &self.sphere
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.times.len();
        &self.samples[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.times.len())
    }

    /// Row `i` as a radial profile on the time grid.
    pub fn row_profile(&self, i: usize) -> RadialProfile {
        self.times.profile(self.row(i).to_vec())
    }

    /// Interpolate row `i` at time `t`; see [`interp_row`].
    pub fn interp_time(&self, i: usize, t: f64) -> Result<f64> {
        if i >= self.sphere.len() {
            return Err(Error::invalid(format!("detector index {i} out of range")));
        }
        interp_row(self.row(i), &self.times, t)
    }

    /// Apply a per-row transformation that keeps the grids.
    pub fn map_rows<F>(&self, f: F) -> Result<CylinderData>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    {
        use rayon::prelude::*;
        let rows: Vec<Vec<f64>> = (0..self.sphere.len())
            .into_par_iter()
            .map(|i| f(self.row(i)))
            .collect::<Result<_>>()?;
        CylinderData::from_rows(self.sphere.clone(), self.times, rows)
    }

    /// `a * self + b * other` on identical grids.
    pub fn combine(&self, a: f64, other: &CylinderData, b: f64) -> Result<CylinderData> {
        if self.sphere != other.sphere || self.times != other.times {
            return Err(Error::invalid("cylinder grids differ"));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        CylinderData::new(self.sphere.clone(), self.times, samples)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Values on a uniform grid `t_j = t0 + j dt` with `t0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

/// Number of samples in the local Lagrange stencil of [`RadialProfile::eval`].
pub const PROFILE_STENCIL: usize = 6;

impl RadialProfile {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(t0 > 0.0) || !(dt > 0.0) {
            return Err(Error::invalid(format!(
                "profile grid needs t0 > 0 and dt > 0 (got {t0}, {dt})"
            )));
        }
        if values.len() < PROFILE_STENCIL {
            return Err(Error::invalid(format!(
                "profile needs at least {PROFILE_STENCIL} samples (got {})",
                values.len()
            )));
        }
        Ok(RadialProfile { t0, dt, values })
    }

    /// Sample `f` on the cell-centered grid of `n` points over `(0, tmax]`.
    pub fn cell_centered<F: Fn(f64) -> f64>(n: usize, tmax: f64, f: F) -> Result<Self> {
        let dt = tmax / n as f64;
        Self::sample(0.5 * dt, dt, n, f)
    }

    pub fn sample<F: Fn(f64) -> f64>(t0: f64, dt: f64, n: usize, f: F) -> Result<Self> {
        let values = (0..n).map(|j| f(t0 + j as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn t_last(&self) -> f64 {
        self.t(self.len() - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.t(j)).collect()
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::invalid("profile length mismatch"));
        }
        Ok(RadialProfile {
            t0: self.t0,
            dt: self.dt,
            values,
        })
    }

    /// Pointwise map `(t, v) -> w`.
    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.t(j), v))
            .collect();
        RadialProfile {
            t0: self.t0,
            dt: self.dt,
            values,
        }
    }

    pub fn same_grid(&self, other: &RadialProfile) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Stencil start and Lagrange weights for evaluating at `r`.
    #[inline]
    pub fn stencil(&self, r: f64) -> (usize, [f64; PROFILE_STENCIL]) {
        lagrange_stencil((r - self.t0) / self.dt, self.len())
    }

    /// Degree-5 local Lagrange interpolation; the stencil is clamped to the
    /// grid, so points just below `t0` are extrapolated from the first six
    /// samples.
    pub fn eval(&self, r: f64) -> f64 {
        let (start, w) = self.stencil(r);
        w.iter()
            .zip(&self.values[start..start + PROFILE_STENCIL])
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Start index and weights of the 6-point Lagrange stencil for fractional
/// grid position `u` on a grid of `n` samples.
#[inline]
pub fn lagrange_stencil(u: f64, n: usize) -> (usize, [f64; PROFILE_STENCIL]) {
    let base = u.floor() - 2.0;
    let start = base.clamp(0.0, (n - PROFILE_STENCIL) as f64) as usize;
    let x = u - start as f64;
    let mut w = [0.0; PROFILE_STENCIL];
    // Denominators of equispaced Lagrange basis: prod_{m != k} (k - m)
    const DEN: [f64; PROFILE_STENCIL] = [-120.0, 24.0, -12.0, 12.0, -24.0, 120.0];
    for k in 0..PROFILE_STENCIL {
        let mut p = 1.0;
        for m in 0..PROFILE_STENCIL {
            if m != k {
                p *= x - m as f64;
            }
        }
        w[k] = p / DEN[k];
    }
    (start, w)
}

/// Cell-centered `G^3` samples over `[-L, L]^3`, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    g: usize,
    extent: f64,
    values: Vec<f64>,
}

pub const MIN_VOLUME_SIZE: usize = 8;

impl VolumeGrid {
    pub fn zeros(g: usize, extent: f64) -> Result<Self> {
        Self::new(g, extent, vec![0.0; g * g * g])
    }

    pub fn new(g: usize, extent: f64, values: Vec<f64>) -> Result<Self> {
        if g < MIN_VOLUME_SIZE {
            return Err(Error::invalid(format!(
                "volume grid needs G >= {MIN_VOLUME_SIZE} (got {g})"
            )));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::invalid(format!("volume extent must be positive (got {extent})")));
        }
        if values.len() != g * g * g {
            return Err(Error::invalid(format!(
                "volume expects {} values, got {}",
                g * g * g,
                values.len()
            )));
        }
        Ok(VolumeGrid { g, extent, values })
    }

    pub fn size(&self) -> usize {
        self.g
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.g as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.g * (j + self.g * k)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let g = self.g;
        (idx % g, (idx / g) % g, idx / (g * g))
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        let (i, j, k) = self.unindex(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// Trilinear interpolation; zero outside `[-L, L]^3`, nearest-cell
    /// extrapolation in the half cell between the outer nodes and the box.
    pub fn trilinear(&self, x: Point) -> f64 {
        let l = self.extent;
        if x.iter().any(|&c| !(c >= -l && c <= l)) {
            return 0.0;
        }
        let h = self.spacing();
        let g = self.g;
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..3 {
            let u = (x[d] + l) / h - 0.5;
            let i0 = u.floor().clamp(0.0, (g - 2) as f64);
            base[d] = i0 as usize;
            frac[d] = (u - i0).clamp(0.0, 1.0);
        }
        let mut acc = 0.0;
        for dk in 0..2 {
            let wk = if dk == 0 { 1.0 - frac[2] } else { frac[2] };
            for dj in 0..2 {
                let wj = if dj == 0 { 1.0 - frac[1] } else { frac[1] };
                for di in 0..2 {
                    let wi = if di == 0 { 1.0 - frac[0] } else { frac[0] };
                    acc += wi * wj * wk * self.get(base[0] + di, base[1] + dj, base[2] + dk);
                }
            }
        }
        acc
    }

    /// Axial slice `k` as a row-major `G x G` image (x fastest).
    pub fn slice_z(&self, k: usize) -> Vec<f64> {
        let g = self.g;
        self.values[k * g * g..(k + 1) * g * g].to_vec()
    }
}

/// Sample a field at the cell centers of a `G^3` grid over `[-L, L]^3`.
pub fn sample_to_grid(f: &ScalarField, g: usize, extent: f64) -> Result<VolumeGrid> {
    use rayon::prelude::*;
    let mut v = VolumeGrid::zeros(g, extent)?;
    let probe = v.clone();
    v.values_mut()
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, out)| *out = f.eval(probe.point(idx)));
    Ok(v)
}

/// Wrap a volume as a field by trilinear interpolation.
pub fn grid_to_field(v: VolumeGrid) -> ScalarField {
    ScalarField::from_volume(v)
}
