//! Gauss-Legendre and Gauss-Jacobi rules.
//!
//! Nodes are the eigenvalues of the Jacobi (three-term recurrence) matrix,
//! found by Sturm-sequence bisection; weights come from the Christoffel
//! function of the orthonormal polynomials. Both steps are stable for the
//! node counts used here (up to a few hundred).

use crate::error::{Error, Result};
use crate::specialfn::gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss-Legendre rule with `n` nodes on `[-1, 1]`.
    pub fn legendre(n: usize) -> Result<Self> {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// Gauss-Jacobi rule with `n` nodes for the weight `(1-x)^a (1+x)^b` on
    /// `[-1, 1]`, exact for polynomials of degree `2n-1`.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a Gauss rule needs at least one node"));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::invalid(format!(
                "Jacobi exponents must exceed -1 (got a = {a}, b = {b})"
            )));
        }
        let (diag, off) = jacobi_recurrence(n, a, b);
        let mu0 = 2f64.powf(a + b + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(a + b + 2.0)?;
        let nodes: Vec<f64> = (0..n).map(|k| tridiag_eigenvalue(&diag, &off, k)).collect();
        let weights = nodes
            .iter()
            .map(|&x| christoffel(&diag, &off, mu0, x))
            .collect();
        Ok(GaussRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_i w_i f(x_i)` on the reference interval.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate over `[lo, hi]` by the affine map; only meaningful for the
    /// Legendre weight.
    pub fn integrate_on<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        half * self.integrate(|x| f(mid + half * x))
    }

    /// Map a Jacobi rule with exponents `(a, b)` to `[0, 1]`, where its weight
    /// becomes `(1-v)^a v^b`. Returns `(nodes, weights)`.
    pub fn to_unit_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let scale = 2f64.powf(-(a + b + 1.0));
        let v = self.nodes.iter().map(|&x| 0.5 * (x + 1.0)).collect();
        let w = self.weights.iter().map(|&w| w * scale).collect();
        (v, w)
    }
}

/// Diagonal and squared off-diagonal of the monic Jacobi recurrence.
fn jacobi_recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    let mut off = vec![0.0; n];
    diag.push((b - a) / (ab + 2.0));
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag.push((b * b - a * a) / (s * (s + 2.0)));
        off[k] = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
    }
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 0..diag.len() {
        let coupling = if k == 0 { 0.0 } else { off[k] / d };
        d = diag[k] - x - coupling;
        if d == 0.0 {
            d = -f64::EPSILON * (x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue; all eigenvalues lie in `(-1, 1)`.
fn tridiag_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn christoffel(diag: &[f64], off: &[f64], mu0: f64, x: f64) -> f64 {
    let mut p_prev = 0.0;
    let mut p = 1.0 / mu0.sqrt();
    let mut sum = p * p;
    for k in 0..diag.len() - 1 {
        let next = ((x - diag[k]) * p - if k == 0 { 0.0 } else { off[k].sqrt() * p_prev })
            / off[k + 1].sqrt();
        p_prev = p;
        p = next;
        sum += p * p;
    }
    1.0 / sum
}
