//! Evaluable scalar fields on R^3 and the polynomial bump phantoms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::VolumeGrid;

pub type Point = [f64; 3];

/// Spatial dimension of every discrete pipeline.
pub const DIM: usize = 3;

pub(crate) fn norm(x: Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub(crate) fn dist2(a: Point, b: Point) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// `a (1 - |x-c|^2 / R^2)^p` inside the ball `|x-c| < R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
    pub exponent: u32,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl Bump {
    pub fn new(center: Point, radius: f64, exponent: u32) -> Self {
        Bump {
            center,
            radius,
            exponent,
            amplitude: 1.0,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Value as a function of the squared distance to the center.
    #[inline]
    pub fn profile_sq(&self, r2: f64) -> f64 {
        let q = 1.0 - r2 / (self.radius * self.radius);
        if q > 0.0 {
            self.amplitude * q.powi(self.exponent as i32)
        } else {
            0.0
        }
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        self.profile_sq(dist2(x, self.center))
    }

    pub fn outer_radius(&self) -> f64 {
        norm(self.center) + self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhantomKind {
    RadialBump,
    ShiftedBump,
    SumOfBumps,
}

/// Serializable description of a phantom; the analytic sidecar written next
/// to sampled volumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub kind: PhantomKind,
    #[serde(rename = "bump")]
    pub bumps: Vec<Bump>,
}

impl PhantomSpec {
    pub fn build(&self) -> Result<ScalarField> {
        make_phantom(self.kind, &self.bumps)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("phantom spec is always representable in TOML")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format {
            kind: "phantom spec",
            msg: e.to_string(),
        })
    }
}

#[derive(Clone)]
enum Repr {
    Bumps(Vec<Bump>),
    Volume(Arc<VolumeGrid>),
    Closure(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

/// A compactly supported function on R^3.
#[derive(Clone)]
pub struct ScalarField {
    repr: Repr,
    support_radius: f64,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Bumps(b) => format!("bumps({})", b.len()),
            Repr::Volume(v) => format!("volume(G={})", v.size()),
            Repr::Closure(_) => "closure".to_string(),
        };
        f.debug_struct("ScalarField")
            .field("repr", &kind)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Build a bump phantom. Every bump must sit strictly inside the unit ball.
pub fn make_phantom(kind: PhantomKind, bumps: &[Bump]) -> Result<ScalarField> {
    if bumps.is_empty() {
        return Err(Error::invalid("a phantom needs at least one bump"));
    }
    match kind {
        PhantomKind::RadialBump => {
            if bumps.len() != 1 || norm(bumps[0].center) != 0.0 {
                return Err(Error::invalid(
                    "radial-bump takes exactly one bump centered at the origin",
                ));
            }
        }
        PhantomKind::ShiftedBump => {
            if bumps.len() != 1 {
                return Err(Error::invalid("shifted-bump takes exactly one bump"));
            }
        }
        PhantomKind::SumOfBumps => {}
    }
    for b in bumps {
        if !(b.radius > 0.0) || !b.radius.is_finite() {
            return Err(Error::invalid(format!("bump radius {} must be positive", b.radius)));
        }
        if b.exponent < 2 {
            return Err(Error::invalid(format!(
                "bump exponent {} must be at least 2",
                b.exponent
            )));
        }
        if !b.amplitude.is_finite() {
            return Err(Error::invalid("bump amplitude must be finite"));
        }
        if b.outer_radius() >= 1.0 {
            return Err(Error::Geometry(format!(
                "bump at {:?} with radius {} reaches |x| = {} and leaves the unit ball",
                b.center,
                b.radius,
                b.outer_radius()
            )));
        }
    }
    let support_radius = bumps.iter().map(Bump::outer_radius).fold(0.0, f64::max);
    Ok(ScalarField {
        repr: Repr::Bumps(bumps.to_vec()),
        support_radius,
    })
}

impl ScalarField {
    /// Wrap an arbitrary function. The caller asserts that it vanishes for
    /// `|x| >= support_radius`; this is the path for oracle-only fields such
    /// as indicators.
    pub fn from_fn<F>(support_radius: f64, f: F) -> Self
    where
        F: Fn(Point) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            repr: Repr::Closure(Arc::new(f)),
            support_radius,
        }
    }

    pub(crate) fn from_volume(v: VolumeGrid) -> Self {
        let h = v.spacing();
        let mut r: f64 = 0.0;
        for (idx, &val) in v.values().iter().enumerate() {
            if val != 0.0 {
                r = r.max(norm(v.point(idx)));
            }
        }
        let support_radius = if r > 0.0 { r + 3f64.sqrt() * h } else { 0.0 };
        ScalarField {
            repr: Repr::Volume(Arc::new(v)),
            support_radius,
        }
    }

    /// The zero field.
    pub fn zero() -> Self {
        ScalarField {
            repr: Repr::Bumps(Vec::new()),
            support_radius: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        DIM
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        match &self.repr {
            Repr::Bumps(bumps) => bumps.iter().map(|b| b.eval(x)).sum(),
            Repr::Volume(v) => v.trilinear(x),
            Repr::Closure(f) => f(x),
        }
    }

    pub fn bumps(&self) -> Option<&[Bump]> {
        match &self.repr {
            Repr::Bumps(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Bumps(b) if b.is_empty())
    }

    /// For a single bump centered at the origin, its radial profile
    /// `f0(r)`.
    pub fn radial_profile(&self) -> Option<Bump> {
        match self.bumps() {
            Some([b]) if norm(b.center) == 0.0 => Some(*b),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_bump_values() {
        let f = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.8, 3)]).unwrap();
        assert_eq!(f.eval([0.0; 3]), 1.0);
        assert!((f.eval([0.4, 0.0, 0.0]) - 0.421875).abs() < 1e-15);
        assert_eq!(f.eval([0.8, 0.0, 0.0]), 0.0);
        assert_eq!(f.eval([0.0, 0.9, 0.0]), 0.0);
        assert!((f.support_radius() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn protruding_bump_is_rejected() {
        let err = make_phantom(PhantomKind::ShiftedBump, &[Bump::new([0.5, 0.0, 0.0], 0.6, 3)]);
        assert!(matches!(err, Err(Error::Geometry(_))));
    }

    #[test]
    fn kind_constraints() {
        let off = Bump::new([0.1, 0.0, 0.0], 0.3, 3);
        assert!(make_phantom(PhantomKind::RadialBump, &[off]).is_err());
        assert!(make_phantom(PhantomKind::ShiftedBump, &[off, off]).is_err());
        assert!(make_phantom(PhantomKind::SumOfBumps, &[off, off]).is_ok());
        assert!(make_phantom(PhantomKind::SumOfBumps, &[Bump::new([0.0; 3], 0.3, 1)]).is_err());
        assert!(make_phantom(PhantomKind::SumOfBumps, &[]).is_err());
    }

    #[test]
    fn sum_of_bumps_support() {
        let f = make_phantom(
            PhantomKind::SumOfBumps,
            &[
                Bump::new([0.3, 0.0, 0.0], 0.4, 4),
                Bump::new([-0.2, 0.2, 0.0], 0.3, 2).with_amplitude(-0.5),
            ],
        )
        .unwrap();
        assert!((f.support_radius() - 0.7).abs() < 1e-12);
        assert!((f.eval([0.3, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spec_roundtrips_through_toml() {
        let spec = PhantomSpec {
            kind: PhantomKind::ShiftedBump,
            bumps: vec![Bump::new([0.3, 0.0, 0.0], 0.4, 3)],
        };
        let text = spec.to_toml();
        assert_eq!(PhantomSpec::from_toml(&text).unwrap(), spec);
        assert!(PhantomSpec::from_toml("kind = 3").is_err());
    }

    #[test]
    fn radial_profile_only_for_centered_single_bump() {
        let f = make_phantom(PhantomKind::ShiftedBump, &[Bump::new([0.3, 0.0, 0.0], 0.4, 3)]).unwrap();
        assert!(f.radial_profile().is_none());
        let g = make_phantom(PhantomKind::RadialBump, &[Bump::new([0.0; 3], 0.4, 3)]).unwrap();
        assert!(g.radial_profile().is_some());
    }
}
