//! Back-projection, the odd-dimensional inversion formula, Riesz potentials
//! and the radial half-data inversion.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{norm, Point, ScalarField};
use crate::fracops::{diff1, diff2, op_d};
use crate::grid::{sample_to_grid, RowSpline, CylinderData, RadialProfile, VolumeGrid};

/// Order of applying the Laplacian relative to back-projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `f = -2 Delta P[t phi]`.
    #[default]
    LaplacianLast,
    /// `f = -2 P[d^2/dt^2 (t phi)]`, using the Darboux equation for the
    /// spherical means of `Delta f`.
    LaplacianFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconConfig {
    pub grid: usize,
    pub extent: f64,
    /// Quality metrics use voxels with `|x| <= rho + margin`.
    pub margin: f64,
    pub variant: Variant,
    /// Voxels beyond `max_radius` are not reconstructed (left at zero).
    pub max_radius: f64,
}

impl ReconConfig {
    pub fn new(grid: usize, extent: f64) -> Self {
        ReconConfig {
            grid,
            extent,
            margin: 0.0,
            variant: Variant::LaplacianLast,
            max_radius: 1.0,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.grid as f64
    }

    /// The Laplacian stencil near `supp f` must stay on the grid.
    pub fn check_support(&self, rho: f64) -> Result<()> {
        let h = self.spacing();
        if self.extent < rho + 4.0 * h {
            return Err(Error::Geometry(format!(
                "grid extent {} must be at least rho + 4h = {}",
                self.extent,
                rho + 4.0 * h
            )));
        }
        Ok(())
    }

    fn empty_volume(&self) -> Result<VolumeGrid> {
        VolumeGrid::zeros(self.grid, self.extent)
    }
}

/// `(P F)(x) = sum_i w_i F(theta_i, |x - theta_i|)`.
pub fn backproject(data: &CylinderData, x: Point) -> Result<f64> {
    Ok(backproject_points(data, &[x])?[0])
}

/// Back-projection at many points. Parallel over blocks of points; every
/// sum runs over detectors in index order, so results do not depend on the
/// thread count.
pub fn backproject_points(data: &CylinderData, points: &[Point]) -> Result<Vec<f64>> {
    const BLOCK: usize = 4096;
    let dt = data.times().step();
    let sphere = data.sphere();
    let blocks: Vec<Result<Vec<f64>>> = points
        .par_chunks(BLOCK)
        .map(|block| {
            let mut acc = vec![0.0; block.len()];
            let mut spline = RowSpline::new(data.row(0), dt);
            for (i, (theta, &w)) in sphere.nodes().iter().zip(sphere.weights()).enumerate() {
                spline.rebuild(data.row(i));
                for (a, x) in acc.iter_mut().zip(block) {
                    let d = [x[0] - theta[0], x[1] - theta[1], x[2] - theta[2]];
                    let t = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    match spline.eval(t) {
                        Some(v) => *a += w * v,
                        None => {
                            return Err(Error::OutOfRange {
                                what: "|x - theta|",
                                value: t,
                                range: format!("(0, {}] with vanishing tails", data.times().tmax()),
                            })
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut out = Vec::with_capacity(points.len());
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// Indices of voxels within `radius` of the origin.
fn voxels_within(v: &VolumeGrid, radius: f64) -> Vec<usize> {
    (0..v.values().len())
        .filter(|&idx| norm(v.point(idx)) <= radius)
        .collect()
}

/// Back-projection on the voxels of `cfg` with `|x| <= max_radius + 2h`.
pub fn backproject_volume(data: &CylinderData, cfg: &ReconConfig) -> Result<VolumeGrid> {
    let mut v = cfg.empty_volume()?;
    let active = voxels_within(&v, cfg.max_radius + 2.0 * v.spacing());
    let points: Vec<Point> = active.iter().map(|&idx| v.point(idx)).collect();
    let vals = backproject_points(data, &points)?;
    let out = v.values_mut();
    for (&idx, val) in active.iter().zip(vals) {
        out[idx] = val;
    }
    Ok(v)
}

/// Per row: `D^{n-3} (t^{n-2} phi_theta)`.
pub fn weight_chain(phi: &CylinderData, n: usize) -> Result<CylinderData> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!("dimension must be odd and >= 3 (got {n})")));
    }
    let times = *phi.times();
    phi.map_rows(|row| {
        let weighted: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, &x)| times.t(j).powi(n as i32 - 2) * x)
            .collect();
        if n == 3 {
            return Ok(weighted);
        }
        Ok(op_d(&times.profile(weighted), n - 3)?.into_values())
    })
}

/// Seven-point Laplacian with one-sided second differences on the faces.
pub fn laplacian(v: &VolumeGrid) -> VolumeGrid {
    let g = v.size();
    let h2 = v.spacing() * v.spacing();
    let vals = v.values();
    let second = |at: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        if i == 0 {
            2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)
        } else if i == g - 1 {
            2.0 * at(g - 1) - 5.0 * at(g - 2) + 4.0 * at(g - 3) - at(g - 4)
        } else {
            at(i - 1) - 2.0 * at(i) + at(i + 1)
        }
    };
    let out: Vec<f64> = (0..vals.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j, k) = v.unindex(idx);
            let dx = second(&|a| vals[v.index(a, j, k)], i);
            let dy = second(&|a| vals[v.index(i, a, k)], j);
            let dz = second(&|a| vals[v.index(i, j, a)], k);
            (dx + dy + dz) / h2
        })
        .collect();
    VolumeGrid::new(g, v.extent(), out).expect("same shape")
}

/// `c_n sigma_{n-1}` for `n = 3`: the constant `-1/(2 pi)` times the sphere
/// area, which converts unit-mass back-projection to the surface integral.
pub const FPR_PREFACTOR: f64 = -2.0;

/// Reconstruct `f` from spherical means `phi = Mf` (n = 3).
pub fn fpr_invert(phi: &CylinderData, cfg: &ReconConfig) -> Result<VolumeGrid> {
    match cfg.variant {
        Variant::LaplacianLast => {
            let g = backproject_volume(&weight_chain(phi, 3)?, cfg)?;
            let lap = laplacian(&g);
            let h = g.spacing();
            let keep = cfg.max_radius + h;
            let mut out = cfg.empty_volume()?;
            for (idx, o) in out.values_mut().iter_mut().enumerate() {
                if norm(lap.point(idx)) <= keep {
                    *o = FPR_PREFACTOR * lap.values()[idx];
                }
            }
            Ok(out)
        }
        Variant::LaplacianFirst => fpr_invert_variant(phi, cfg),
    }
}

/// `f = -2 P[d^2/dt^2 (t phi_theta)]`: back-projection of the spherical
/// means of `Delta f` recovered through the Darboux equation.
pub fn fpr_invert_variant(phi: &CylinderData, cfg: &ReconConfig) -> Result<VolumeGrid> {
    let times = *phi.times();
    let dt = times.step();
    let second = weight_chain(phi, 3)?.map_rows(|row| diff2(row, dt))?;
    let mut v = backproject_volume(&second, cfg)?;
    let keep = cfg.max_radius + v.spacing();
    let probe = v.clone();
    for (idx, x) in v.values_mut().iter_mut().enumerate() {
        *x = if norm(probe.point(idx)) <= keep {
            FPR_PREFACTOR * *x
        } else {
            0.0
        };
    }
    Ok(v)
}

/// Kernel table `h^3 / (4 pi |offset|)` indexed by absolute integer offsets,
/// with the self cell replaced by the integral of `1/(4 pi |y|)` over the
/// ball of equal volume.
struct RieszTable {
    g: usize,
    k: Vec<f64>,
}

impl RieszTable {
    fn new(g: usize, h: f64) -> Self {
        let mut k = vec![0.0; g * g * g];
        for c in 0..g {
            for b in 0..g {
                for a in 0..g {
                    let r = ((a * a + b * b + c * c) as f64).sqrt();
                    k[a + g * (b + g * c)] = if r == 0.0 {
                        let r_eq = h * (3.0 / (4.0 * PI)).cbrt();
                        r_eq * r_eq / 2.0
                    } else {
                        h * h / (4.0 * PI * r)
                    };
                }
            }
        }
        RieszTable { g, k }
    }

    #[inline]
    fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.k[a + self.g * (b + self.g * c)]
    }
}

/// `(I^2 f)(x) = 1/(4 pi) int f(y) / |x - y| dy` at selected voxels of the
/// sampled volume `src`, by direct summation over its nonzero samples.
pub fn riesz2_at(src: &VolumeGrid, targets: &[usize]) -> Vec<f64> {
    let g = src.size();
    let table = RieszTable::new(g, src.spacing());
    let sources: Vec<(usize, usize, usize, f64)> = src
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(idx, &v)| {
            let (i, j, k) = src.unindex(idx);
            (i, j, k, v)
        })
        .collect();
    targets
        .par_iter()
        .map(|&t| {
            let (i, j, k) = src.unindex(t);
            sources
                .iter()
                .map(|&(a, b, c, v)| v * table.at(i.abs_diff(a), j.abs_diff(b), k.abs_diff(c)))
                .sum()
        })
        .collect()
}

/// Riesz potential of order 2 of `f` sampled on a `G^3` grid over `[-L, L]^3`.
pub fn riesz2(f: &ScalarField, g: usize, extent: f64) -> Result<VolumeGrid> {
    let src = sample_to_grid(f, g, extent)?;
    let all: Vec<usize> = (0..src.values().len()).collect();
    let vals = riesz2_at(&src, &all);
    VolumeGrid::new(g, extent, vals)
}

/// Relative deviations of `got` from `reference`: `max|diff| / max|ref|`
/// and `||diff||_2 / ||ref||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub rel_max: f64,
    pub rel_l2: f64,
}

impl Deviation {
    pub fn between(got: &[f64], reference: &[f64]) -> Self {
        let mut dmax: f64 = 0.0;
        let mut rmax: f64 = 0.0;
        let mut d2 = 0.0;
        let mut r2 = 0.0;
        for (g, r) in got.iter().zip(reference) {
            let d = g - r;
            dmax = dmax.max(d.abs());
            rmax = rmax.max(r.abs());
            d2 += d * d;
            r2 += r * r;
        }
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else if a == 0.0 { 0.0 } else { f64::INFINITY };
        Deviation {
            rel_max: ratio(dmax, rmax),
            rel_l2: ratio(d2.sqrt(), r2.sqrt()),
        }
    }
}

/// Voxels with `|x| <= radius` and at least `2h` from the faces.
pub fn interior_voxels(v: &VolumeGrid, radius: f64) -> Vec<usize> {
    let h = v.spacing();
    let lim = v.extent() - 2.0 * h;
    (0..v.values().len())
        .filter(|&idx| {
            let x = v.point(idx);
            norm(x) <= radius && x.iter().all(|c| c.abs() <= lim)
        })
        .collect()
}

/// Reconstruction error against the phantom on the interior voxels.
pub fn interior_metrics(rec: &VolumeGrid, f: &ScalarField, cfg: &ReconConfig) -> Deviation {
    let idx = interior_voxels(rec, f.support_radius() + cfg.margin);
    let got: Vec<f64> = idx.iter().map(|&i| rec.values()[i]).collect();
    let want: Vec<f64> = idx.iter().map(|&i| f.eval(rec.point(i))).collect();
    Deviation::between(&got, &want)
}

/// Both sides of `P[t phi_theta] = (1/2) I^2 f` on the voxels of `cfg` with
/// `|x| <= rho`.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub backprojected: Vec<f64>,
    pub potential: Vec<f64>,
    pub deviation: Deviation,
}

/// The constant `c = 2 (-1)^{(n-3)/2} Gamma(n/2)^2 / pi` of the identity,
/// for odd `n`.
pub fn identity_constant(n: usize) -> Result<f64> {
    let sign = if ((n - 3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let g = crate::specialfn::gamma(n as f64 / 2.0)?;
    Ok(2.0 * sign * g * g / PI)
}

pub fn identity_check(f: &ScalarField, phi: &CylinderData, cfg: &ReconConfig) -> Result<IdentityReport> {
    cfg.check_support(f.support_radius())?;
    let src = sample_to_grid(f, cfg.grid, cfg.extent)?;
    let targets = voxels_within(&src, f.support_radius());
    let points: Vec<Point> = targets.iter().map(|&i| src.point(i)).collect();
    let backprojected = backproject_points(&weight_chain(phi, 3)?, &points)?;
    let c = identity_constant(3)?;
    let potential: Vec<f64> = riesz2_at(&src, &targets).into_iter().map(|v| c * v).collect();
    let deviation = Deviation::between(&backprojected, &potential);
    Ok(IdentityReport {
        backprojected,
        potential,
        deviation,
    })
}

/// Which half of the data `F0` a radial inversion uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `t in (0, 1)`: `f0(r) = (2/r) d/dt (t F0)(1 - r)`.
    Inner,
    /// `t in (1, 2)`: `f0(r) = -(2/r) d/dt (t F0)(1 + r)`.
    Outer,
}

/// Radial profile `f0` from the common spherical mean `F0` of a radial
/// function (n = 3), using only the samples of `data` on one side of
/// `t = 1`. Output radii start at `r_min >= 2 dt`.
pub fn radial_invert(
    data: &RadialProfile,
    branch: Branch,
    r_min: f64,
    r_max: f64,
    n: usize,
) -> Result<RadialProfile> {
    let dt = data.step();
    if r_min < 2.0 * dt {
        return Err(Error::OutOfRange {
            what: "r_min",
            value: r_min,
            range: format!("[{}, 1)", 2.0 * dt),
        });
    }
    if !(r_max > r_min && r_max < 1.0) {
        return Err(Error::invalid(format!("need r_min < r_max < 1 (got {r_min}, {r_max})")));
    }
    let keep: Vec<usize> = (0..data.len())
        .filter(|&j| match branch {
            Branch::Inner => data.t(j) < 1.0,
            Branch::Outer => data.t(j) > 1.0,
        })
        .collect();
    if keep.len() < 6 {
        return Err(Error::invalid("not enough samples on the requested half"));
    }
    let first = keep[0];
    let half = RadialProfile::new(
        data.t(first),
        dt,
        keep.iter().map(|&j| data.t(j) * data.values()[j]).collect(),
    )?;
    let deriv = half.with_values(diff1(half.values(), dt)?)?;
    let (lo, hi) = (half.t0(), half.t_last());
    let dr = (r_max - r_min) / (n - 1) as f64;
    let values = (0..n)
        .map(|k| {
            let r = r_min + k as f64 * dr;
            let (t, sign) = match branch {
                Branch::Inner => (1.0 - r, 1.0),
                Branch::Outer => (1.0 + r, -1.0),
            };
            if t < lo - 0.5 * dt || t > hi + 0.5 * dt {
                return Err(Error::OutOfRange {
                    what: "t",
                    value: t,
                    range: format!("[{lo}, {hi}]"),
                });
            }
            Ok(sign * 2.0 / r * deriv.eval(t))
        })
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(r_min, dr, values)
}

/// Mean over spherical shells `[k dr, (k+1) dr)` of `g(x)` at the voxels
/// of `v` with `|x| < r_max`. Returns `(mean radius, mean value)` for every
/// non-empty shell.
pub fn shell_average<F: Fn(usize) -> f64>(v: &VolumeGrid, dr: f64, r_max: f64, g: F) -> Vec<(f64, f64)> {
    let bins = (r_max / dr).ceil() as usize;
    let mut sum_r = vec![0.0; bins];
    let mut sum_v = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for idx in 0..v.values().len() {
        let r = norm(v.point(idx));
        if r < r_max {
            let b = ((r / dr) as usize).min(bins - 1);
            sum_r[b] += r;
            sum_v[b] += g(idx);
            count[b] += 1;
        }
    }
    (0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| (sum_r[b] / count[b] as f64, sum_v[b] / count[b] as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_phantom, Bump, PhantomKind};
    use crate::grid::{SphereGrid, TimeGrid};
    use crate::sphmean::{forward_scan, radial_forward_profile};
    use proptest::prelude::*;

    fn cyl(np: usize, na: usize, nt: usize, f: impl Fn(f64) -> f64) -> CylinderData {
        let s = SphereGrid::new(np, na).unwrap();
        let times = TimeGrid::new(nt, 2.0).unwrap();
        let row: Vec<f64> = times.times().iter().map(|&t| f(t)).collect();
        let rows = vec![row; s.len()];
        CylinderData::from_rows(s, times, rows).unwrap()
    }

    #[test]
    fn backproject_constant_and_quadratic() {
        let ones = cyl(6, 12, 60, |_| 1.0);
        assert!((backproject(&ones, [0.2, -0.1, 0.3]).unwrap() - 1.0).abs() < 1e-14);
        let sq = cyl(6, 12, 400, |t| t * t);
        let x = [0.3, -0.2, 0.4];
        let want = 1.0 + 0.09 + 0.04 + 0.16;
        assert!((backproject(&sq, x).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn backproject_radial_at_origin() {
        let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.8, 3)]).unwrap();
        let s = SphereGrid::new(24, 48).unwrap();
        let times = TimeGrid::new(400, 2.0).unwrap();
        let data = forward_scan(&f, &s, &times);
        let at_one = crate::sphmean::radial_forward(|r| f.eval([r, 0.0, 0.0]), 0.8, 1.0, 3).unwrap();
        let got = backproject(&data, [0.0; 3]).unwrap();
        assert!((got - at_one).abs() < 2e-5 * at_one, "{got} {at_one}");
    }

    #[test]
    fn backproject_rejects_uncovered_times() {
        let ones = cyl(4, 8, 20, |_| 1.0);
        let th = ones.sphere().nodes()[0];
        assert!(backproject(&ones, [0.99 * th[0], 0.99 * th[1], 0.99 * th[2]]).is_err());
    }

    #[test]
    fn weight_chain_values() {
        let phi = cyl(4, 8, 100, |t| t * t);
        let w = weight_chain(&phi, 3).unwrap();
        for (j, v) in w.row(3).iter().enumerate() {
            let t = phi.times().t(j);
            assert!((v - t * t * t).abs() < 1e-15);
        }
        // n = 5: D^2 (t^3 t^2) = 15 t / 4
        let phi = cyl(4, 8, 400, |t| t * t);
        let w5 = weight_chain(&phi, 5).unwrap();
        for (j, v) in w5.row(0).iter().enumerate() {
            let t = phi.times().t(j);
            if t > 0.2 && t < 1.9 {
                assert!((v - 3.75 * t).abs() < 1e-6 * t, "t={t} {v}");
            }
        }
        let zero = cyl(4, 8, 50, |_| 0.0);
        assert!(weight_chain(&zero, 3).unwrap().samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn laplacian_of_quadratic_and_constant() {
        let f = ScalarField::from_fn(2.0, |x| x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        let v = sample_to_grid(&f, 12, 1.0).unwrap();
        let lap = laplacian(&v);
        assert!(lap.values().iter().all(|&x| (x - 6.0).abs() < 1e-9));
        let c = sample_to_grid(&ScalarField::from_fn(2.0, |_| 2.5), 10, 1.0).unwrap();
        assert!(laplacian(&c).values().iter().all(|&x| x.abs() < 1e-10));
    }

    #[test]
    fn laplacian_second_order() {
        let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.8, 6)]).unwrap();
        // Laplacian of (1 - r^2/R^2)^p in R^3
        let exact = |x: Point| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let q = 1.0 - r2 / 0.64;
            if q <= 0.0 {
                return 0.0;
            }
            let p = 6.0;
            4.0 * p * (p - 1.0) * r2 / (0.64 * 0.64) * q.powi(4) - 6.0 * p / 0.64 * q.powi(5)
        };
        let err = |g: usize| {
            let v = sample_to_grid(&f, g, 1.0).unwrap();
            let lap = laplacian(&v);
            interior_voxels(&v, 0.9)
                .iter()
                .map(|&i| (lap.values()[i] - exact(v.point(i))).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(16), err(32));
        assert!(a / b > 3.0, "{a} {b}");
    }

    #[test]
    fn riesz_of_uniform_ball() {
        let r = 0.5;
        let ball = ScalarField::from_fn(r, move |x| if norm(x) < r { 1.0 } else { 0.0 });
        let g = 32;
        let v = riesz2(&ball, g, 1.0).unwrap();
        // exact Newtonian potential of the ball, scaled by 1/(4 pi)
        let exact = |s: f64| if s < r { r * r / 2.0 - s * s / 6.0 } else { r * r * r / (3.0 * s) };
        let peak = exact(0.0);
        for idx in (0..v.values().len()).step_by(97) {
            let s = norm(v.point(idx));
            assert!((v.values()[idx] - exact(s)).abs() < 0.03 * peak, "s={s}");
        }
        let zero = riesz2(&ScalarField::zero(), 8, 1.0).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn minus_laplacian_inverts_riesz() {
        let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.6, 4)]).unwrap();
        let g = 32;
        let src = sample_to_grid(&f, g, 1.0).unwrap();
        let all: Vec<usize> = (0..src.values().len()).collect();
        let pot = VolumeGrid::new(g, 1.0, riesz2_at(&src, &all)).unwrap();
        let lap = laplacian(&pot);
        let idx = interior_voxels(&src, 0.6);
        let got: Vec<f64> = idx.iter().map(|&i| -lap.values()[i]).collect();
        let want: Vec<f64> = idx.iter().map(|&i| src.values()[i]).collect();
        let dev = Deviation::between(&got, &want);
        assert!(dev.rel_l2 < 0.03, "{dev:?}");
    }

    #[test]
    fn identity_constant_three_dimensions() {
        assert!((identity_constant(3).unwrap() - 0.5).abs() < 1e-15);
        // n = 5: 2 * (-1) * Gamma(5/2)^2 / pi = -9/8
        assert!((identity_constant(5).unwrap() + 9.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn radial_inversion_both_branches() {
        let b = Bump::new([0.0; 3], 0.8, 3);
        let times = TimeGrid::new(2000, 2.0).unwrap();
        let data = radial_forward_profile(|r| b.profile_sq(r * r), 0.8, &times).unwrap();
        let inner = radial_invert(&data, Branch::Inner, 0.05, 0.8, 151).unwrap();
        let outer = radial_invert(&data, Branch::Outer, 0.05, 0.8, 151).unwrap();
        for k in 0..inner.len() {
            let r = inner.t(k);
            let want = b.profile_sq(r * r);
            assert!((inner.values()[k] - want).abs() < 1e-3, "inner r={r}");
            assert!((outer.values()[k] - want).abs() < 1e-3, "outer r={r}");
            assert!((inner.values()[k] - outer.values()[k]).abs() < 2e-3);
        }
        let zero = times.profile(vec![0.0; 2000]);
        let z = radial_invert(&zero, Branch::Inner, 0.05, 0.8, 20).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
        assert!(radial_invert(&data, Branch::Inner, 0.001, 0.8, 20).is_err());
    }

    #[test]
    fn deviation_definitions() {
        let d = Deviation::between(&[1.0, 2.0], &[1.0, 1.0]);
        assert!((d.rel_max - 1.0).abs() < 1e-15);
        assert!((d.rel_l2 - (1.0f64 / 2.0).sqrt()).abs() < 1e-15);
        assert_eq!(Deviation::between(&[0.0], &[0.0]).rel_l2, 0.0);
    }

    #[test]
    fn zero_data_reconstructs_zero() {
        let zero = cyl(6, 12, 100, |_| 0.0);
        let cfg = ReconConfig::new(16, 1.0);
        assert!(fpr_invert(&zero, &cfg).unwrap().values().iter().all(|&x| x == 0.0));
        let cfg = cfg.with_variant(Variant::LaplacianFirst);
        assert!(fpr_invert(&zero, &cfg).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn coarse_roundtrip_is_positive_on_core() {
        let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.8, 3)]).unwrap();
        let s = SphereGrid::new(16, 32).unwrap();
        let times = TimeGrid::new(200, 2.0).unwrap();
        let data = forward_scan(&f, &s, &times);
        let cfg = ReconConfig::new(24, 1.0);
        let rec = fpr_invert(&data, &cfg).unwrap();
        let centre = rec.values()[rec.index(12, 12, 12)];
        assert!(centre > 0.5, "{centre}");
        let m = interior_metrics(&rec, &f, &cfg);
        assert!(m.rel_l2 < 0.2, "{m:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn variant_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let p1 = cyl(4, 8, 80, |t| (-(t - 1.0) * (t - 1.0) / 0.05).exp());
            let p2 = cyl(4, 8, 80, |t| (-(t - 0.9) * (t - 0.9) / 0.02).exp() * t);
            let mut cfg = ReconConfig::new(10, 1.0).with_variant(Variant::LaplacianFirst);
            cfg.max_radius = 0.5;
            let combo = p1.combine(a, &p2, b).unwrap();
            let lhs = fpr_invert(&combo, &cfg).unwrap();
            let r1 = fpr_invert(&p1, &cfg).unwrap();
            let r2 = fpr_invert(&p2, &cfg).unwrap();
            let scale = r1.values().iter().chain(r2.values()).fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..lhs.values().len() {
                let rhs = a * r1.values()[i] + b * r2.values()[i];
                prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn backproject_is_linear(a in -2.0f64..2.0, x in -0.5f64..0.5, y in -0.5f64..0.5) {
            let p1 = cyl(4, 8, 80, |t| t);
            let p2 = cyl(4, 8, 80, |t| t * t * t);
            let combo = p1.combine(a, &p2, 1.0).unwrap();
            let pt = [x, y, 0.1];
            let lhs = backproject(&combo, pt).unwrap();
            let rhs = a * backproject(&p1, pt).unwrap() + backproject(&p2, pt).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
