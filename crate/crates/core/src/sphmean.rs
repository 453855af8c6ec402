//! Forward spherical mean transform and its radial 1-D reduction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Point, ScalarField};
use crate::grid::{CylinderData, RadialProfile, SphereGrid, TimeGrid};
use crate::quadrature::GaussRule;
use crate::specialfn::gamma;

/// Mean of `f` over the sphere of radius `t` centered at `c`.
pub fn spherical_mean(f: &ScalarField, c: Point, t: f64, sphere: &SphereGrid) -> f64 {
    sphere.integrate(|s| f.eval([c[0] - t * s[0], c[1] - t * s[1], c[2] - t * s[2]]))
}

/// Spherical means about `c` at every radius of `times`.
///
/// Bump phantoms take a fast path: for each bump the quadrature directions
/// are sorted by `(c - center) . sigma`, and at radius `t` exactly a prefix
/// of them lands inside the bump.
pub fn mean_profile(f: &ScalarField, c: Point, times: &[f64], sphere: &SphereGrid) -> Vec<f64> {
    match f.bumps() {
        Some(bumps) => {
            let mut out = vec![0.0; times.len()];
            let mut order: Vec<(f64, f64)> = Vec::with_capacity(sphere.len());
            for b in bumps {
                let d = [c[0] - b.center[0], c[1] - b.center[1], c[2] - b.center[2]];
                let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                let dist = d2.sqrt();
                if dist - b.radius >= times.last().copied().unwrap_or(0.0) {
                    continue;
                }
                order.clear();
                order.extend(
                    sphere
                        .nodes()
                        .iter()
                        .zip(sphere.weights())
                        .map(|(s, &w)| (d[0] * s[0] + d[1] * s[1] + d[2] * s[2], w)),
                );
                order.sort_by(|a, b| b.0.total_cmp(&a.0));
                let r2 = b.radius * b.radius;
                let p = b.exponent as i32;
                for (&t, o) in times.iter().zip(out.iter_mut()) {
                    // |c - t s - center|^2 = d2 - 2 t dot + t^2 < R^2
                    if t <= dist - b.radius || t >= dist + b.radius {
                        continue;
                    }
                    let base = 1.0 - (d2 + t * t) / r2;
                    let slope = 2.0 * t / r2;
                    let threshold = -base / slope;
                    let k = order.partition_point(|&(dot, _)| dot > threshold);
                    let mut acc = 0.0;
                    for &(dot, w) in &order[..k] {
                        let q = base + slope * dot;
                        if q > 0.0 {
                            acc += w * q.powi(p);
                        }
                    }
                    *o += b.amplitude * acc;
                }
            }
            out
        }
        None => times.iter().map(|&t| spherical_mean(f, c, t, sphere)).collect(),
    }
}

/// `(Mf)(theta_i, t_j)` for every node of `sphere`, which serves both as
/// detector set and as integration rule.
pub fn forward_scan(f: &ScalarField, sphere: &SphereGrid, times: &TimeGrid) -> CylinderData {
    forward_scan_with(f, sphere, sphere, times)
}

/// As [`forward_scan`] with separate detector and integration grids.
pub fn forward_scan_with(
    f: &ScalarField,
    detectors: &SphereGrid,
    quad: &SphereGrid,
    times: &TimeGrid,
) -> CylinderData {
    let ts = times.times();
    let rows: Vec<Vec<f64>> = detectors
        .nodes()
        .par_iter()
        .map(|&theta| mean_profile(f, theta, &ts, quad))
        .collect();
    CylinderData::from_rows(detectors.clone(), *times, rows).expect("rows built on the grids")
}

/// Ratio `sigma_{n-2} / sigma_{n-1}` of sphere areas.
fn area_ratio(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(gamma(nf / 2.0)? / (std::f64::consts::PI.sqrt() * gamma((nf - 1.0) / 2.0)?))
}

/// Gauss nodes used by [`radial_forward`].
pub const RADIAL_NODES: usize = 64;

/// Spherical mean of the radial function `f0(|x|)` (supported in
/// `[0, rho]`) over the sphere of radius `t` centered on the unit sphere:
///
/// ```text
/// F0(t) = (sigma_{n-2}/sigma_{n-1}) 2^{n-3} t^{2-n} int_{|1-t|}^{1+t} f0(r) a(r,t)^{n-3} r dr
/// ```
///
/// where `a` is the area of the triangle with sides `1, t, r`. For odd `n`
/// the factor `a^{n-3}` is a polynomial in `r`, so Gauss-Legendre on the
/// clipped interval `[|1-t|, min(1+t, rho)]` suffices.
pub fn radial_forward<F: Fn(f64) -> f64>(f0: F, rho: f64, t: f64, n: usize) -> Result<f64> {
    radial_forward_with(&GaussRule::legendre(RADIAL_NODES)?, f0, rho, t, n)
}

fn radial_forward_with<F: Fn(f64) -> f64>(gl: &GaussRule, f0: F, rho: f64, t: f64, n: usize) -> Result<f64> {
    if !(t > 0.0 && t < 2.0) {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            range: "(0, 2)".into(),
        });
    }
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!("dimension must be odd and >= 3 (got {n})")));
    }
    let lo = (1.0 - t).abs();
    let hi = (1.0 + t).min(rho);
    if hi <= lo {
        return Ok(0.0);
    }
    let k = (n - 3) / 2;
    let integral = gl.integrate_on(lo, hi, |r| {
        let r2 = r * r;
        let a2 = (r2 - (1.0 - t) * (1.0 - t)) * ((1.0 + t) * (1.0 + t) - r2) / 16.0;
        f0(r) * a2.powi(k as i32) * r
    });
    let nf = n as f64;
    Ok(area_ratio(n)? * 2f64.powi(n as i32 - 3) * t.powf(2.0 - nf) * integral)
}

/// [`radial_forward`] at every node of `times` (n = 3).
pub fn radial_forward_profile<F: Fn(f64) -> f64>(
    f0: F,
    rho: f64,
    times: &TimeGrid,
) -> Result<RadialProfile> {
    let gl = GaussRule::legendre(RADIAL_NODES)?;
    let values = times
        .times()
        .iter()
        .map(|&t| radial_forward_with(&gl, &f0, rho, t, 3))
        .collect::<Result<Vec<_>>>()?;
    Ok(times.profile(values))
}

/// Max over all samples of `|forward_scan - radial_forward|` for a single
/// bump centered at the origin.
pub fn crosscheck_radial(f: &ScalarField, sphere: &SphereGrid, times: &TimeGrid) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let b = f
        .radial_profile()
        .ok_or_else(|| Error::invalid("crosscheck_radial needs a radial phantom"))?;
    let one_d = radial_forward_profile(|r| b.profile_sq(r * r), b.radius, times)?;
    let scan = forward_scan(f, sphere, times);
    Ok(scan
        .rows()
        .flat_map(|row| row.iter().zip(one_d.values()).map(|(a, c)| (a - c).abs()))
        .fold(0.0, f64::max))
}

/// Distance from `x` to the nearest point of the ball `|y - c| <= rho`.
#[cfg(test)]
fn ball_distance(x: Point, c: Point, rho: f64) -> f64 {
    (crate::field::norm([x[0] - c[0], x[1] - c[1], x[2] - c[2]]) - rho).max(0.0)
}
