//! Erdelyi-Kober, Riemann-Liouville and Bessel-kernel fractional operators
//! on uniformly sampled radial profiles.
//!
//! Every operator is linear on a fixed grid, so it is assembled once as a
//! [`ProfileOperator`] (a short chain of quadrature matrices, power weights
//! and applications of `D = (1/2t) d/dt`) and then applied to any number of
//! rows. The one-shot functions ([`ek_forward`], [`gek_inverse`], ...) are
//! thin wrappers.
//!
//! Quadrature uses the substitution `r = t sqrt(v)`, under which
//!
//! ```text
//! I^a_eta phi(t)      = 1/Gamma(a) * int_0^1 (1-v)^(a-1) v^eta phi(t sqrt v) dv
//! J^a_{eta,lam} phi(t) =             int_0^1 (1-v)^(a-1) v^eta K_a(lam t sqrt(1-v)) phi(t sqrt v) dv
//! ```
//!
//! with `K_a(z) = (z/2)^(1-a) J_(a-1)(z)` (modified kernel for `I^a_{eta,lam}`).
//! The weight is absorbed by a Gauss-Jacobi rule; `phi` between samples is
//! the 6-point Lagrange interpolant of the profile.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{lagrange_stencil, RadialProfile, TimeGrid, PROFILE_STENCIL};
use crate::quadrature::GaussRule;
use crate::specialfn::{gamma, reduced_kernel_i, reduced_kernel_j, rgamma};

/// Gauss nodes per output sample unless configured otherwise.
pub const DEFAULT_NODES: usize = 64;

/// Parameters of an Erdelyi-Kober type operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracSpec {
    pub alpha: f64,
    pub eta: f64,
    pub lambda: f64,
    /// Continuation depth; `None` selects the smallest admissible one.
    pub depth: Option<usize>,
    pub nodes: usize,
}

impl FracSpec {
    pub fn new(alpha: f64, eta: f64, lambda: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        if !(eta >= -0.5) {
            return Err(Error::OutOfRange {
                what: "eta",
                value: eta,
                range: "[-1/2, inf)".into(),
            });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::OutOfRange {
                what: "lambda",
                value: lambda,
                range: "[0, inf)".into(),
            });
        }
        Ok(FracSpec {
            alpha,
            eta,
            lambda,
            depth: None,
            nodes: DEFAULT_NODES,
        })
    }

    pub fn with_depth(mut self, m: usize) -> Self {
        self.depth = Some(m);
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    /// `J^alpha_{eta,lambda}` (equal to `I^alpha_eta` when `lambda = 0`),
    /// continued to `alpha <= 0`.
    pub fn forward_operator(&self, grid: ProfileGrid) -> Result<ProfileOperator> {
        let kernel = if self.lambda == 0.0 {
            Kernel::Plain
        } else {
            Kernel::J(self.lambda)
        };
        continued(grid, self.alpha, self.eta, kernel, self.depth, self.nodes)
    }

    /// `(J^alpha_{eta,lambda})^{-1}`.
    pub fn inverse_operator(&self, grid: ProfileGrid) -> Result<ProfileOperator> {
        let (alpha, eta, lambda) = (self.alpha, self.eta, self.lambda);
        if lambda == 0.0 {
            return continued(grid, -alpha, eta + alpha, Kernel::Plain, self.depth, self.nodes);
        }
        let m = match self.depth {
            Some(m) => {
                if !(m as f64 - alpha > 0.0) {
                    return Err(Error::invalid(format!(
                        "depth {m} too small for the inverse of order {alpha}"
                    )));
                }
                m
            }
            None => min_depth_strict(-alpha),
        };
        // t^{-2 eta} D^m t^{2(eta+m)} I^{m-alpha}_{eta+alpha,lambda}
        let mut op = ProfileOperator::identity(grid);
        op.push_matrix(
            grid,
            m as f64 - alpha,
            eta + alpha,
            Kernel::I(lambda),
            self.nodes,
        )?;
        op.push_power(2.0 * (eta + m as f64));
        op.push_d(m);
        op.push_power(-2.0 * eta);
        Ok(op)
    }
}

/// Smallest integer `m >= 0` with `alpha + m > 0`.
fn min_depth_strict(alpha: f64) -> usize {
    if alpha > 0.0 {
        0
    } else {
        (-alpha).floor() as usize + 1
    }
}

fn is_nonpositive_integer(alpha: f64) -> bool {
    alpha <= 0.0 && alpha.fract() == 0.0
}

/// Uniform sample positions `t_j = t0 + j dt`, `j < n`, of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl ProfileGrid {
    pub fn of(p: &RadialProfile) -> Self {
        ProfileGrid {
            t0: p.t0(),
            dt: p.step(),
            n: p.len(),
        }
    }

    pub fn from_times(times: &TimeGrid) -> Self {
        ProfileGrid {
            t0: times.t(0),
            dt: times.step(),
            n: times.len(),
        }
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    Plain,
    J(f64),
    I(f64),
}

#[derive(Debug, Clone)]
enum Step {
    /// Lower-triangular quadrature matrix; row `j` holds the coefficients of
    /// samples `0..row.len()`.
    Matrix(Vec<Vec<f64>>),
    Scale(Vec<f64>),
    D,
}

/// A linear map between profiles sampled on one fixed grid.
#[derive(Debug, Clone)]
pub struct ProfileOperator {
    grid: ProfileGrid,
    steps: Vec<Step>,
}

impl ProfileOperator {
    pub fn identity(grid: ProfileGrid) -> Self {
        ProfileOperator {
            grid,
            steps: Vec::new(),
        }
    }

    pub fn grid(&self) -> ProfileGrid {
        self.grid
    }

    /// Pointwise factor `c` applied after the current chain.
    pub fn scaled(mut self, c: f64) -> Self {
        self.steps.push(Step::Scale(vec![c; self.grid.n]));
        self
    }

    fn push_power(&mut self, p: f64) {
        if p != 0.0 {
            let g = self.grid;
            self.steps
                .push(Step::Scale((0..g.n).map(|j| g.t(j).powf(p)).collect()));
        }
    }

    fn push_d(&mut self, m: usize) {
        for _ in 0..m {
            self.steps.push(Step::D);
        }
    }

    fn push_matrix(
        &mut self,
        grid: ProfileGrid,
        alpha: f64,
        eta: f64,
        kernel: Kernel,
        nodes: usize,
    ) -> Result<()> {
        self.steps
            .push(Step::Matrix(quadrature_matrix(grid, alpha, eta, kernel, nodes)?));
        Ok(())
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        let g = self.grid;
        if values.len() != g.n {
            return Err(Error::invalid(format!(
                "operator expects {} samples, got {}",
                g.n,
                values.len()
            )));
        }
        let mut cur = values.to_vec();
        for step in &self.steps {
            cur = match step {
                Step::Matrix(rows) => rows
                    .iter()
                    .map(|row| row.iter().zip(&cur).map(|(a, b)| a * b).sum())
                    .collect(),
                Step::Scale(s) => cur.iter().zip(s).map(|(a, b)| a * b).collect(),
                Step::D => d_half(&cur, g)?,
            };
        }
        Ok(cur)
    }

    pub fn apply_profile(&self, p: &RadialProfile) -> Result<RadialProfile> {
        if ProfileGrid::of(p) != self.grid {
            return Err(Error::invalid("profile grid differs from the operator grid"));
        }
        p.with_values(self.apply(p.values())?)
    }
}

/// Quadrature matrix of `phi -> int_0^1 (1-v)^(a-1) v^eta k(t sqrt(1-v)) phi(t sqrt v) dv`.
fn quadrature_matrix(
    grid: ProfileGrid,
    alpha: f64,
    eta: f64,
    kernel: Kernel,
    nodes: usize,
) -> Result<Vec<Vec<f64>>> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!(
            "quadrature realization needs a positive order (got {alpha})"
        )));
    }
    if !(eta > -1.0) {
        return Err(Error::invalid(format!("weight exponent {eta} must exceed -1")));
    }
    if grid.n < PROFILE_STENCIL {
        return Err(Error::invalid("profile too short for interpolation"));
    }
    let rule = GaussRule::jacobi(nodes, alpha - 1.0, eta)?;
    let (v, w) = rule.to_unit_interval(alpha - 1.0, eta);
    let plain = rgamma(alpha);
    (0..grid.n)
        .into_par_iter()
        .map(|j| {
            let t = grid.t(j);
            let mut row = vec![0.0; grid.n];
            let mut len = 0;
            for (&vq, &wq) in v.iter().zip(&w) {
                let z = t * (1.0 - vq).sqrt();
                let k = match kernel {
                    Kernel::Plain => plain,
                    Kernel::J(lam) => reduced_kernel_j(alpha, lam * z)?,
                    Kernel::I(lam) => reduced_kernel_i(alpha, lam * z)?,
                };
                let r = t * vq.sqrt();
                let (start, lw) = lagrange_stencil((r - grid.t0) / grid.dt, grid.n);
                for (i, l) in lw.iter().enumerate() {
                    row[start + i] += wq * k * l;
                }
                len = len.max(start + PROFILE_STENCIL);
            }
            row.truncate(len);
            Ok(row)
        })
        .collect()
}

/// Operator of `I^alpha_eta` (kernel `Plain`) or its Bessel analogues,
/// continued to `alpha <= 0` by
/// `t^{-2(alpha+eta)} D^m t^{2(alpha+m+eta)} X^{alpha+m}`.
fn continued(
    grid: ProfileGrid,
    alpha: f64,
    eta: f64,
    kernel: Kernel,
    depth: Option<usize>,
    nodes: usize,
) -> Result<ProfileOperator> {
    let plain = matches!(kernel, Kernel::Plain);
    let m = match depth {
        Some(m) => {
            let ok = alpha + m as f64 > 0.0 || (plain && alpha + m as f64 == 0.0);
            if !ok {
                return Err(Error::invalid(format!(
                    "continuation depth {m} too small for order {alpha}"
                )));
            }
            m
        }
        None if plain && is_nonpositive_integer(alpha) => (-alpha) as usize,
        None => min_depth_strict(alpha),
    };
    let mut op = ProfileOperator::identity(grid);
    let inner = alpha + m as f64;
    if inner > 0.0 {
        op.push_matrix(grid, inner, eta, kernel, nodes)?;
    }
    if m > 0 {
        op.push_power(2.0 * (inner + eta));
        op.push_d(m);
        op.push_power(-2.0 * (alpha + eta));
    }
    Ok(op)
}

/// Operator of `I^alpha_eta` on `grid` for any real `alpha`.
pub fn ek_operator(grid: ProfileGrid, alpha: f64, eta: f64) -> Result<ProfileOperator> {
    FracSpec::new(alpha, eta, 0.0)?.forward_operator(grid)
}

/// Erdelyi-Kober fractional integral `I^alpha_eta` for `alpha > 0`.
pub fn ek_forward(phi: &RadialProfile, alpha: f64, eta: f64) -> Result<RadialProfile> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!(
            "ek_forward needs alpha > 0 (got {alpha}); use ek_continue"
        )));
    }
    ek_operator(ProfileGrid::of(phi), alpha, eta)?.apply_profile(phi)
}

/// `I^alpha_eta` for any real `alpha`, by analytic continuation of minimal
/// depth.
pub fn ek_continue(phi: &RadialProfile, alpha: f64, eta: f64) -> Result<RadialProfile> {
    ek_operator(ProfileGrid::of(phi), alpha, eta)?.apply_profile(phi)
}

/// As [`ek_continue`] with an explicit continuation depth `m`.
pub fn ek_continue_depth(
    phi: &RadialProfile,
    alpha: f64,
    eta: f64,
    m: usize,
) -> Result<RadialProfile> {
    FracSpec::new(alpha, eta, 0.0)?
        .with_depth(m)
        .forward_operator(ProfileGrid::of(phi))?
        .apply_profile(phi)
}

/// Max-norm of `I^beta_{eta+alpha} I^alpha_eta phi - I^{alpha+beta}_eta phi`.
pub fn ek_compose_check(phi: &RadialProfile, alpha: f64, beta: f64, eta: f64) -> Result<f64> {
    let lhs = ek_forward(&ek_forward(phi, alpha, eta)?, beta, eta + alpha)?;
    let rhs = ek_forward(phi, alpha + beta, eta)?;
    Ok(max_abs_diff(lhs.values(), rhs.values()))
}

/// Generalized operator `J^alpha_{eta,lambda}` for `alpha > 0`.
pub fn gek_forward(phi: &RadialProfile, alpha: f64, eta: f64, lambda: f64) -> Result<RadialProfile> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!(
            "gek_forward needs alpha > 0 (got {alpha}); use gek_continue"
        )));
    }
    gek_continue(phi, alpha, eta, lambda)
}

/// `J^alpha_{eta,lambda}` for any real `alpha`.
pub fn gek_continue(phi: &RadialProfile, alpha: f64, eta: f64, lambda: f64) -> Result<RadialProfile> {
    FracSpec::new(alpha, eta, lambda)?
        .forward_operator(ProfileGrid::of(phi))?
        .apply_profile(phi)
}

/// `(J^alpha_{eta,lambda})^{-1} = I^{-alpha}_{eta+alpha,lambda}`.
pub fn gek_inverse(psi: &RadialProfile, alpha: f64, eta: f64, lambda: f64) -> Result<RadialProfile> {
    FracSpec::new(alpha, eta, lambda)?
        .inverse_operator(ProfileGrid::of(psi))?
        .apply_profile(psi)
}

/// `D^m phi` with `D = (1/2t) d/dt`.
pub fn op_d(phi: &RadialProfile, m: usize) -> Result<RadialProfile> {
    if phi.len() < (2 * m + 3).max(5) {
        return Err(Error::invalid(format!(
            "D^{m} needs at least {} samples (got {})",
            (2 * m + 3).max(5),
            phi.len()
        )));
    }
    let g = ProfileGrid::of(phi);
    let mut v = phi.values().to_vec();
    for _ in 0..m {
        v = d_half(&v, g)?;
    }
    phi.with_values(v)
}

fn d_half(v: &[f64], g: ProfileGrid) -> Result<Vec<f64>> {
    let mut d = diff1(v, g.dt)?;
    for (j, x) in d.iter_mut().enumerate() {
        *x /= 2.0 * g.t(j);
    }
    Ok(d)
}

/// First derivative of uniform samples, fourth order: 5-point central
/// stencil inside, one-sided 5-point stencils at the two end samples on
/// each side.
pub fn diff1(v: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = v.len();
    if n < 5 {
        return Err(Error::invalid("differentiation needs at least 5 samples"));
    }
    let s = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = s * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
    d[1] = s * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
    for j in 2..n - 2 {
        d[j] = s * (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]);
    }
    d[n - 2] = -s * (-3.0 * v[n - 1] - 10.0 * v[n - 2] + 18.0 * v[n - 3] - 6.0 * v[n - 4] + v[n - 5]);
    d[n - 1] =
        -s * (-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] - 3.0 * v[n - 5]);
    Ok(d)
}

/// Second derivative of uniform samples, fourth order (6-point one-sided
/// stencils at the ends).
pub fn diff2(v: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = v.len();
    if n < 6 {
        return Err(Error::invalid("second differences need at least 6 samples"));
    }
    let s = 1.0 / (12.0 * h * h);
    const E0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    const E1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    let end = |c: &[f64; 6], idx: &dyn Fn(usize) -> usize| -> f64 {
        s * c.iter().enumerate().map(|(k, &ck)| ck * v[idx(k)]).sum::<f64>()
    };
    let mut d = vec![0.0; n];
    d[0] = end(&E0, &|k| k);
    d[1] = end(&E1, &|k| k);
    for j in 2..n - 2 {
        d[j] = s * (-v[j - 2] + 16.0 * v[j - 1] - 30.0 * v[j] + 16.0 * v[j + 1] - v[j + 2]);
    }
    d[n - 2] = end(&E1, &|k| n - 1 - k);
    d[n - 1] = end(&E0, &|k| n - 1 - k);
    Ok(d)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Samples of a function on `[lo, hi]` at `lo + k (hi - lo)/(n - 1)`,
/// endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSamples {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl UniformSamples {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::invalid("sample interval must have hi > lo"));
        }
        if values.len() < PROFILE_STENCIL {
            return Err(Error::invalid(format!(
                "need at least {PROFILE_STENCIL} samples"
            )));
        }
        Ok(UniformSamples { lo, hi, values })
    }

    pub fn sample<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self> {
        let h = (hi - lo) / (n.max(2) - 1) as f64;
        Self::new(lo, hi, (0..n).map(|k| f(lo + k as f64 * h)).collect())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.values.len() - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.step()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 6-point Lagrange interpolation.
    pub fn eval(&self, s: f64) -> f64 {
        let (start, w) = lagrange_stencil((s - self.lo) / self.step(), self.values.len());
        w.iter()
            .zip(&self.values[start..start + PROFILE_STENCIL])
            .map(|(a, b)| a * b)
            .sum()
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        UniformSamples {
            lo: self.lo,
            hi: self.hi,
            values,
        }
    }
}

/// Left-sided Riemann-Liouville integral
/// `(1/Gamma(alpha)) int_lo^s (s-t)^(alpha-1) u(t) dt` with lower limit the
/// left end of the sample interval, continued to `alpha <= 0` by
/// `(d/ds)^m I^{alpha+m}` (pure differentiation for nonpositive integers).
pub fn rl_integral(u: &UniformSamples, alpha: f64, s: f64) -> Result<f64> {
    rl_integral_with(u, alpha, s, DEFAULT_NODES)
}

pub fn rl_integral_with(u: &UniformSamples, alpha: f64, s: f64, nodes: usize) -> Result<f64> {
    if !(s >= u.lo && s <= u.hi) {
        return Err(Error::OutOfRange {
            what: "s",
            value: s,
            range: format!("[{}, {}]", u.lo, u.hi),
        });
    }
    if alpha > 0.0 {
        return rl_positive(u, alpha, s, nodes);
    }
    let (m, base) = if is_nonpositive_integer(alpha) {
        ((-alpha) as usize, u.clone())
    } else {
        let m = min_depth_strict(alpha);
        let beta = alpha + m as f64;
        let vals = (0..u.values.len())
            .map(|k| rl_positive(u, beta, u.node(k), nodes))
            .collect::<Result<Vec<_>>>()?;
        (m, u.with_values(vals))
    };
    let mut cur = base;
    for _ in 0..m {
        let d = diff1(&cur.values, cur.step())?;
        cur = cur.with_values(d);
    }
    Ok(cur.eval(s))
}

fn rl_positive(u: &UniformSamples, alpha: f64, s: f64, nodes: usize) -> Result<f64> {
    let span = s - u.lo;
    if span == 0.0 {
        return Ok(0.0);
    }
    // t = s - span * w, weight w^(alpha-1) on [0, 1]
    let rule = GaussRule::jacobi(nodes, 0.0, alpha - 1.0)?;
    let (w, c) = rule.to_unit_interval(0.0, alpha - 1.0);
    let sum: f64 = w.iter().zip(&c).map(|(&wq, &cq)| cq * u.eval(s - span * wq)).sum();
    Ok(span.powf(alpha) / gamma(alpha)? * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(n: usize, tmax: f64, f: impl Fn(f64) -> f64) -> RadialProfile {
        RadialProfile::cell_centered(n, tmax, f).unwrap()
    }

    /// Smooth profile vanishing to all orders near t = 0.
    fn gauss_bump(t: f64) -> f64 {
        (-(t - 1.0) * (t - 1.0) / 0.05).exp() * (1.0 + 0.3 * t)
    }

    fn max_err(p: &RadialProfile, f: impl Fn(f64) -> f64, from: f64) -> f64 {
        (0..p.len())
            .filter(|&j| p.t(j) >= from)
            .map(|j| (p.values()[j] - f(p.t(j))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn diff_stencils_exact_on_low_degree() {
        let h = 0.1;
        let v: Vec<f64> = (0..12).map(|k| (k as f64 * h).powi(4) - 2.0 * (k as f64 * h)).collect();
        let d = diff1(&v, h).unwrap();
        for (k, x) in d.iter().enumerate() {
            let t = k as f64 * h;
            assert!((x - (4.0 * t.powi(3) - 2.0)).abs() < 1e-11);
        }
        let v: Vec<f64> = (0..12).map(|k| (k as f64 * h).powi(5)).collect();
        let d = diff2(&v, h).unwrap();
        for (k, x) in d.iter().enumerate() {
            let t = k as f64 * h;
            assert!((x - 20.0 * t.powi(3)).abs() < 1e-9, "k={k}: {x}");
        }
    }

    #[test]
    fn d_on_powers() {
        let p = profile(200, 2.0, |t| t * t);
        let d = op_d(&p, 1).unwrap();
        assert!(d.values().iter().all(|&x| (x - 1.0).abs() < 1e-8));
        let p = profile(200, 2.0, |t| t.powi(6));
        let d = op_d(&p, 2).unwrap();
        // 1/(2t) amplifies the one-sided end stencils near t = 0
        for j in 0..d.len() {
            let want = 6.0 * d.t(j).powi(2);
            if d.t(j) >= 0.1 {
                assert!(((d.values()[j] - want) / want).abs() < 1e-5, "t={}", d.t(j));
            }
        }
        let c = profile(50, 2.0, |_| 3.0);
        assert!(op_d(&c, 1).unwrap().values().iter().all(|&x| x.abs() < 1e-12));
        assert!(op_d(&profile(6, 1.0, |t| t), 3).is_err());
    }

    #[test]
    fn d_power_identity_matches_product_form() {
        // D^m = t^{-1} (d/dt 1/(2t))^m t
        let p = profile(400, 2.0, gauss_bump);
        let g = ProfileGrid::of(&p);
        let direct = op_d(&p, 2).unwrap();
        let mut v: Vec<f64> = (0..g.n).map(|j| g.t(j) * p.values()[j]).collect();
        for _ in 0..2 {
            for (j, x) in v.iter_mut().enumerate() {
                *x /= 2.0 * g.t(j);
            }
            v = diff1(&v, g.dt).unwrap();
        }
        let alt: Vec<f64> = v.iter().enumerate().map(|(j, x)| x / g.t(j)).collect();
        let scale = direct.max_abs();
        assert!(max_abs_diff(direct.values(), &alt) / scale < 1e-5);
    }

    #[test]
    fn ek_of_constant() {
        let one = profile(100, 2.0, |_| 1.0);
        let r = ek_forward(&one, 1.0, 0.0).unwrap();
        assert!(r.values().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let z = profile(100, 2.0, |_| 0.0);
        assert!(ek_forward(&z, 0.5, 0.5).unwrap().values().iter().all(|&x| x == 0.0));
        assert!(ek_forward(&one, 0.0, 0.5).is_err());
    }

    #[test]
    fn ek_power_law() {
        for &(alpha, eta, beta) in &[(0.5, 0.5, 1.0), (1.5, 0.0, 2.0), (2.0, 1.0, 0.5), (0.25, -0.5, 1.0)] {
            let p = profile(200, 2.0, |t| t.powf(2.0 * beta));
            let r = ek_forward(&p, alpha, eta).unwrap();
            let c = gamma(eta + beta + 1.0).unwrap() / gamma(alpha + eta + beta + 1.0).unwrap();
            for j in 10..200 {
                let t = p.t(j);
                let want = c * t.powf(2.0 * beta);
                let rel = ((r.values()[j] - want) / want).abs();
                // half-integer beta leaves a sqrt(v) factor in the integrand,
                // where the Gauss rule converges only algebraically
                let tol = if beta.fract() == 0.0 { 1e-12 } else { 1e-8 };
                assert!(rel < tol, "alpha={alpha} eta={eta} beta={beta} t={t}: {rel}");
            }
        }
    }

    #[test]
    fn ek_zero_order_is_identity() {
        let p = profile(200, 2.0, gauss_bump);
        let r = ek_continue(&p, 0.0, 0.5).unwrap();
        assert_eq!(r.values(), p.values());
    }

    #[test]
    fn ek_negative_integer_order() {
        // I^{-1}_eta t^2 = t^{-2(eta-1)} D t^{2 eta + 2} = (eta + 1) t^2
        let eta = 0.5;
        let p = profile(400, 2.0, |t| t * t);
        let r = ek_continue(&p, -1.0, eta).unwrap();
        assert!(max_err(&r, |t| (eta + 1.0) * t * t, 0.0) < 1e-8);
        // the generic continuation at depth 2 agrees with the direct formula
        let q = profile(400, 2.0, gauss_bump);
        let a = ek_continue(&q, -1.0, eta).unwrap();
        let b = ek_continue_depth(&q, -1.0, eta, 2).unwrap();
        assert!(max_abs_diff(a.values(), b.values()) < 1e-5 * a.max_abs());
    }

    #[test]
    fn continuation_depth_consistency() {
        let p = profile(800, 2.0, gauss_bump);
        let a = ek_continue_depth(&p, -0.5, 0.5, 1).unwrap();
        let b = ek_continue_depth(&p, -0.5, 0.5, 2).unwrap();
        assert!(max_abs_diff(a.values(), b.values()) < 1e-5 * a.max_abs());
        assert!(ek_continue_depth(&p, -1.5, 0.5, 1).is_err());
    }

    #[test]
    fn ek_roundtrip() {
        for &(alpha, eta) in &[(0.5, 0.5), (1.0, 0.5), (1.5, 0.0)] {
            let p = profile(1600, 2.0, gauss_bump);
            let fwd = ek_forward(&p, alpha, eta).unwrap();
            let back = ek_continue(&fwd, -alpha, eta + alpha).unwrap();
            let err = max_abs_diff(back.values(), p.values());
            assert!(err < 1e-6, "alpha={alpha} eta={eta}: {err}");
        }
    }

    #[test]
    fn ek_semigroup() {
        let p = profile(400, 2.0, gauss_bump);
        for &a in &[0.5, 1.0, 1.5] {
            for &b in &[0.5, 1.0, 1.5] {
                for &eta in &[0.5, 1.0] {
                    let r = ek_compose_check(&p, a, b, eta).unwrap();
                    assert!(r < 1e-6, "a={a} b={b} eta={eta}: {r}");
                }
            }
        }
        let z = profile(50, 2.0, |_| 0.0);
        assert_eq!(ek_compose_check(&z, 0.5, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn gek_reduces_to_ek_at_zero_lambda() {
        let p = profile(300, 2.0, gauss_bump);
        let a = gek_forward(&p, 0.5, 0.5, 0.0).unwrap();
        let b = ek_forward(&p, 0.5, 0.5).unwrap();
        assert!(max_abs_diff(a.values(), b.values()) < 1e-12);
        let c = gek_forward(&p, 0.5, 0.5, 1e-8).unwrap();
        assert!(max_abs_diff(a.values(), c.values()) < 1e-7);
    }

    #[test]
    fn gek_order_one_matches_direct_quadrature() {
        // J^1_{eta,lam} phi(t) = t^{-2(1+eta)} 2 int_0^t J_0(lam sqrt(t^2-r^2)) r^{2 eta + 1} phi(r) dr
        let (eta, lam) = (0.5, 2.0);
        let p = profile(400, 2.0, gauss_bump);
        let r = gek_forward(&p, 1.0, eta, lam).unwrap();
        let gl = GaussRule::legendre(400).unwrap();
        for j in [100, 200, 300, 399] {
            let t = p.t(j);
            let integral = gl.integrate_on(0.0, t, |s| {
                crate::specialfn::bessel_j(0.0, lam * (t * t - s * s).max(0.0).sqrt()).unwrap()
                    * s.powf(2.0 * eta + 1.0)
                    * gauss_bump(s)
            });
            let want = t.powf(-2.0 * (1.0 + eta)) * 2.0 * integral;
            assert!((r.values()[j] - want).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn gek_roundtrip() {
        for &(alpha, lam) in &[(1.0, 2.0), (0.5, 1.0), (1.0, 0.0), (1.5, 3.0)] {
            let p = profile(1600, 2.0, gauss_bump);
            let fwd = gek_forward(&p, alpha, 0.5, lam).unwrap();
            let back = gek_inverse(&fwd, alpha, 0.5, lam).unwrap();
            let err = max_abs_diff(back.values(), p.values());
            assert!(err < 1e-5, "alpha={alpha} lam={lam}: {err}");
        }
        let z = profile(50, 2.0, |_| 0.0);
        assert!(gek_inverse(&z, 1.0, 0.5, 2.0).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gek_continuation_at_zero_lambda() {
        let p = profile(1600, 2.0, gauss_bump);
        let fwd = gek_continue(&p, -0.5, 0.5, 0.0).unwrap();
        let ek = ek_continue(&p, -0.5, 0.5).unwrap();
        assert!(max_abs_diff(fwd.values(), ek.values()) < 1e-12 * ek.max_abs().max(1.0));
    }

    #[test]
    fn rl_basic_values() {
        let one = UniformSamples::sample(-1.0, 1.0, 41, |_| 1.0).unwrap();
        for s in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert!((rl_integral(&one, 1.0, s).unwrap() - (s + 1.0)).abs() < 1e-13);
        }
        let u = UniformSamples::sample(-1.0, 1.0, 41, |t| t.sin()).unwrap();
        assert!((rl_integral(&u, 0.0, 0.35).unwrap() - 0.35f64.sin()).abs() < 1e-9);
        assert!(rl_integral(&u, 1.0, 1.5).is_err());
    }

    #[test]
    fn rl_half_order_matches_closed_form() {
        // I^{1/2} of 1 from -1 is (s+1)^{1/2} / Gamma(3/2)
        let one = UniformSamples::sample(-1.0, 1.0, 41, |_| 1.0).unwrap();
        let s: f64 = 0.2;
        let want = (s + 1.0).sqrt() / gamma(1.5).unwrap();
        assert!((rl_integral(&one, 0.5, s).unwrap() - want).abs() < 1e-13);
        // I^{-1/2} u = d/ds I^{1/2} u; for u = 1: (s+1)^{-1/2} / Gamma(1/2)
        let want = (s + 1.0).powf(-0.5) / gamma(0.5).unwrap();
        assert!((rl_integral(&one, -0.5, s).unwrap() - want).abs() < 1e-6);
    }

    #[test]
    fn rl_even_negative_orders_on_polynomials() {
        // (d/ds)^{2k} (1 - s^2)^k = (-1)^k (2k)!
        for (k, want) in [(0u32, 1.0), (1, -2.0), (2, 24.0)] {
            let u = UniformSamples::sample(-1.0, 1.0, 41, |t| (1.0 - t * t).powi(k as i32)).unwrap();
            for s in [-0.5, 0.0, 0.4] {
                let got = rl_integral(&u, -2.0 * k as f64, s).unwrap();
                assert!((got - want).abs() < 1e-8, "k={k} s={s}: {got}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn ek_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.2f64..2.5) {
            let p = profile(120, 2.0, gauss_bump);
            let q = profile(120, 2.0, |t| t * t * (2.0 - t));
            let combo = p.with_values(p.values().iter().zip(q.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
            let lhs = ek_forward(&combo, alpha, 0.5).unwrap();
            let rp = ek_forward(&p, alpha, 0.5).unwrap();
            let rq = ek_forward(&q, alpha, 0.5).unwrap();
            for j in 0..120 {
                let rhs = a * rp.values()[j] + b * rq.values()[j];
                prop_assert!((lhs.values()[j] - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn ek_power_law_prop(alpha in 0.1f64..3.0, eta in -0.5f64..2.0, beta in 0u32..3) {
            let beta = beta as f64;
            let p = profile(64, 2.0, |t| t.powf(2.0 * beta));
            let r = ek_forward(&p, alpha, eta).unwrap();
            let c = gamma(eta + beta + 1.0).unwrap() / gamma(alpha + eta + beta + 1.0).unwrap();
            for j in 0..64 {
                let want = c * p.values()[j];
                prop_assert!(((r.values()[j] - want) / want).abs() < 1e-10);
            }
        }
    }
}
