//! Euler-Poisson-Darboux solutions through their Erdelyi-Kober form.
//!
//! For the Cauchy problem
//!
//! ```text
//! Delta_x u - u_tt - ((n + 2a - 1)/t) u_t = lam^2 u,   u(x,0) = f(x),   u_t(x,0) = 0
//! ```
//!
//! the solution is `u(x,t) = Gamma(a+n/2)/Gamma(n/2) * (J^a_{eta,lam} phi_x)(t)`
//! with `eta = n/2 - 1` and `phi_x(t)` the spherical mean of `f` about `x`.
//! The inverse problem (recover `f` from `u` on the unit sphere) undoes the
//! operator row by row and hands the spherical means to [`fpr_invert`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Point, ScalarField};
use crate::fracops::{FracSpec, ProfileGrid, ProfileOperator};
use crate::grid::{grid_to_field, CylinderData, RadialProfile, SphereGrid, TimeGrid, VolumeGrid};
use crate::quadrature::GaussRule;
use crate::recon::{fpr_invert, ReconConfig};
use crate::specialfn::gamma;
use crate::sphmean::{forward_scan, mean_profile, spherical_mean};

/// Relative size of recovered spherical means outside the admissible
/// support band above which [`epd_invert`] warns.
pub const SUPPORT_TOLERANCE: f64 = 1e-3;

/// Parameters `(alpha, lambda)` of the EPD problem in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpdSpec {
    pub alpha: f64,
    pub lambda: f64,
    n: usize,
}

impl EpdSpec {
    /// Spec in three dimensions.
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        Self::with_dimension(alpha, lambda, 3)
    }

    pub fn with_dimension(alpha: f64, lambda: f64, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(format!("dimension must be odd and >= 3, got {n}")));
        }
        let min = Self::threshold(n);
        if !(alpha >= min) || !alpha.is_finite() {
            return Err(Error::OutOfRange {
                what: "alpha",
                value: alpha,
                range: format!("[{min}, inf)"),
            });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::OutOfRange {
                what: "lambda",
                value: lambda,
                range: "[0, inf)".into(),
            });
        }
        Ok(EpdSpec { alpha, lambda, n })
    }

    /// Smallest `alpha` for which the Cauchy problem is well posed.
    pub fn threshold(n: usize) -> f64 {
        (1.0 - n as f64) / 2.0
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.n as f64 / 2.0 - 1.0
    }

    /// `Gamma(alpha + n/2) / Gamma(n/2)`.
    pub fn gamma_ratio(&self) -> Result<f64> {
        let half = self.n as f64 / 2.0;
        Ok(gamma(self.alpha + half)? / gamma(half)?)
    }

    fn frac(&self) -> Result<FracSpec> {
        FracSpec::new(self.alpha, self.eta(), self.lambda)
    }

    /// Map from the spherical mean profile `phi_x` to `u(x, .)`.
    pub fn solution_operator(&self, grid: ProfileGrid) -> Result<ProfileOperator> {
        Ok(self.frac()?.forward_operator(grid)?.scaled(self.gamma_ratio()?))
    }

    /// Map from `u(theta, .)` back to `phi_theta`.
    pub fn recovery_operator(&self, grid: ProfileGrid) -> Result<ProfileOperator> {
        Ok(self
            .frac()?
            .inverse_operator(grid)?
            .scaled(1.0 / self.gamma_ratio()?))
    }
}

/// `u(x, t_j)` for all times of `times`.
pub fn epd_solve(
    f: &ScalarField,
    spec: &EpdSpec,
    x: Point,
    times: &TimeGrid,
    sphere: &SphereGrid,
) -> Result<RadialProfile> {
    let op = spec.solution_operator(ProfileGrid::from_times(times))?;
    solve_with(&op, f, x, times, sphere)
}

fn solve_with(
    op: &ProfileOperator,
    f: &ScalarField,
    x: Point,
    times: &TimeGrid,
    sphere: &SphereGrid,
) -> Result<RadialProfile> {
    let phi = mean_profile(f, x, &times.times(), sphere);
    Ok(times.profile(op.apply(&phi)?))
}

/// Trace `u(theta_i, t_j)` on the detector sphere. The nodes of `sphere`
/// are both the detectors and the averaging rule.
pub fn epd_trace(
    f: &ScalarField,
    spec: &EpdSpec,
    sphere: &SphereGrid,
    times: &TimeGrid,
) -> Result<CylinderData> {
    let op = spec.solution_operator(ProfileGrid::from_times(times))?;
    forward_scan(f, sphere, times).map_rows(|row| op.apply(row))
}

/// `M^1_t f(x)` as the mean of `f` over the ball `|y - x| < t`, computed
/// directly in polar coordinates. Independent of the time grid; used as a
/// cross-check of [`epd_solve`] for `alpha = 1, lambda = 0`, `n = 3`.
pub fn ball_mean(f: &ScalarField, x: Point, t: f64, sphere: &SphereGrid, nodes: usize) -> Result<f64> {
    let rule = GaussRule::legendre(nodes)?;
    // 3 int_0^1 s^2 phi_x(t s) ds
    Ok(3.0 * rule.integrate_on(0.0, 1.0, |s| s * s * spherical_mean(f, x, t * s, sphere)))
}

/// Samples of `u` on a cube of `m^3` points with spacing `h` around
/// `center`, at every time of a grid.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    center: Point,
    h: f64,
    m: usize,
    times: TimeGrid,
    /// `values[p * nt + j]` with `p = (i m + k) m + l`.
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(center: Point, h: f64, m: usize, times: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if m < 3 || !(h > 0.0) {
            return Err(Error::invalid("space-time box needs m >= 3 and h > 0"));
        }
        if values.len() != m * m * m * times.len() {
            return Err(Error::invalid("space-time sample count mismatch"));
        }
        Ok(SpaceTimeField {
            center,
            h,
            m,
            times,
            values,
        })
    }

    /// Sample `profile(x)` (the time series at `x`) at every box point.
    pub fn sample<F>(center: Point, h: f64, m: usize, times: TimeGrid, profile: F) -> Result<Self>
    where
        F: Fn(Point) -> Result<Vec<f64>> + Sync,
    {
        let nt = times.len();
        let probe = SpaceTimeField::new(center, h, m, times, vec![0.0; m * m * m * nt])?;
        let rows: Vec<Vec<f64>> = (0..m * m * m)
            .into_par_iter()
            .map(|p| {
                let row = profile(probe.point(p))?;
                if row.len() != nt {
                    return Err(Error::invalid("profile length differs from the time grid"));
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        SpaceTimeField::new(center, h, m, times, rows.concat())
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn point(&self, p: usize) -> Point {
        let m = self.m;
        let half = (m as f64 - 1.0) / 2.0;
        let idx = [p / (m * m), (p / m) % m, p % m];
        let mut x = self.center;
        for d in 0..3 {
            x[d] += (idx[d] as f64 - half) * self.h;
        }
        x
    }

    fn at(&self, i: usize, k: usize, l: usize, j: usize) -> f64 {
        let m = self.m;
        self.values[((i * m + k) * m + l) * self.times.len() + j]
    }
}

/// `box u - lam^2 u` at interior space points and interior times.
#[derive(Debug, Clone)]
pub struct Residual {
    pub points: Vec<Point>,
    pub times: Vec<f64>,
    /// `values[p][j]` at `points[p]`, `times[j]`.
    pub values: Vec<Vec<f64>>,
}

impl Residual {
    /// Largest magnitude over times `t >= t_min`.
    pub fn max_abs_from(&self, t_min: f64) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter().zip(&self.times))
            .filter(|(_, &t)| t >= t_min)
            .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }
}

/// Second-order finite-difference residual of the (generalized) EPD
/// equation. Every time node is positive, so the `1/t` term is always
/// finite.
pub fn pde_residual(u: &SpaceTimeField, spec: &EpdSpec) -> Result<Residual> {
    let m = u.m;
    let nt = u.times.len();
    if nt < 3 {
        return Err(Error::invalid("residual needs at least 3 time samples"));
    }
    let h2 = u.h * u.h;
    let dt = u.times.step();
    let damping = spec.dimension() as f64 + 2.0 * spec.alpha - 1.0;
    let lam2 = spec.lambda * spec.lambda;
    let times: Vec<f64> = (1..nt - 1).map(|j| u.times.t(j)).collect();
    let mut points = Vec::new();
    let mut values = Vec::new();
    for i in 1..m - 1 {
        for k in 1..m - 1 {
            for l in 1..m - 1 {
                points.push(u.point((i * m + k) * m + l));
                let row = (1..nt - 1)
                    .map(|j| {
                        let c = u.at(i, k, l, j);
                        let lap = (u.at(i - 1, k, l, j)
                            + u.at(i + 1, k, l, j)
                            + u.at(i, k - 1, l, j)
                            + u.at(i, k + 1, l, j)
                            + u.at(i, k, l - 1, j)
                            + u.at(i, k, l + 1, j)
                            - 6.0 * c)
                            / h2;
                        let (prev, next) = (u.at(i, k, l, j - 1), u.at(i, k, l, j + 1));
                        let utt = (prev - 2.0 * c + next) / (dt * dt);
                        let ut = (next - prev) / (2.0 * dt);
                        lap - utt - damping / u.times.t(j) * ut - lam2 * c
                    })
                    .collect();
                values.push(row);
            }
        }
    }
    Ok(Residual {
        points,
        times,
        values,
    })
}

/// Samples `u = epd_solve(f, ...)` on a space-time box.
pub fn epd_box(
    f: &ScalarField,
    spec: &EpdSpec,
    center: Point,
    h: f64,
    m: usize,
    times: &TimeGrid,
    sphere: &SphereGrid,
) -> Result<SpaceTimeField> {
    let op = spec.solution_operator(ProfileGrid::from_times(times))?;
    SpaceTimeField::sample(center, h, m, *times, |x| {
        Ok(solve_with(&op, f, x, times, sphere)?.into_values())
    })
}

/// Spherical means `phi_theta` recovered from a trace, row by row.
pub fn recover_means(u_trace: &CylinderData, spec: &EpdSpec) -> Result<CylinderData> {
    if spec.dimension() != 3 {
        return Err(Error::invalid("trace inversion is implemented for n = 3"));
    }
    let op = spec.recovery_operator(ProfileGrid::from_times(u_trace.times()))?;
    u_trace.map_rows(|row| op.apply(row))
}

/// Largest `|phi|` at times where a function supported in `|x| <= radius`
/// must have vanishing means about unit-sphere centers, relative to the
/// overall maximum.
pub fn support_violation(phi: &CylinderData, radius: f64) -> f64 {
    let scale = phi.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let times = phi.times();
    let outside: Vec<usize> = (0..times.len())
        .filter(|&j| {
            let t = times.t(j);
            t < 1.0 - radius || t > 1.0 + radius
        })
        .collect();
    let worst = phi
        .rows()
        .flat_map(|row| outside.iter().map(move |&j| row[j].abs()))
        .fold(0.0f64, f64::max);
    worst / scale
}

/// Reconstruct the initial value `f` from the trace of `u` on the unit
/// sphere (n = 3).
pub fn epd_invert(u_trace: &CylinderData, spec: &EpdSpec, cfg: &ReconConfig) -> Result<VolumeGrid> {
    let phi = recover_means(u_trace, spec)?;
    let radius = cfg.max_radius.min(0.98);
    let violation = support_violation(&phi, radius);
    if violation > SUPPORT_TOLERANCE {
        log::warn!(
            "recovered spherical means are {violation:.3e} (relative) outside the support band \
             |t - 1| <= {radius}; the trace may not match alpha = {}, lambda = {}",
            spec.alpha,
            spec.lambda
        );
    }
    fpr_invert(&phi, cfg)
}

/// Initial value recovered from a trace, together with the means to
/// evaluate the corresponding solution anywhere.
#[derive(Debug, Clone)]
pub struct EpdSolution {
    pub spec: EpdSpec,
    pub volume: VolumeGrid,
    field: ScalarField,
}

impl EpdSolution {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    /// `u(x, t_j)` from the reconstructed initial value.
    pub fn u(&self, x: Point, times: &TimeGrid, sphere: &SphereGrid) -> Result<RadialProfile> {
        epd_solve(&self.field, &self.spec, x, times, sphere)
    }
}

/// [`epd_invert`] followed by wrapping the volume as a field.
pub fn epd_resolve(u_trace: &CylinderData, spec: &EpdSpec, cfg: &ReconConfig) -> Result<EpdSolution> {
    let volume = epd_invert(u_trace, spec, cfg)?;
    let field = grid_to_field(volume.clone());
    Ok(EpdSolution {
        spec: *spec,
        volume,
        field,
    })
}
