//! Skew rotations of the plane and their finite products.
//!
//! A skew rotation with center `F` moves every point `z != F` along the
//! circle of radius `|z - F|` by the arc length `h`, i.e. it rotates the
//! circle by the angle `h / |z - F|`. In inverse polar coordinates
//! `(r, phi) = (1/|z - F|, arg(z - F))` it is the shear `phi -> phi + h r`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distances below this are treated as zero when testing for a center hit.
pub const CENTER_EPS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Argument of `self - center`, in `(-pi, pi]`.
    pub fn angle_about(self, center: PlanarPoint) -> f64 {
        (self.y - center.y).atan2(self.x - center.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    /// Rotates `self` about `center` by `angle` radians counterclockwise.
    pub fn rotated_about(self, center: PlanarPoint, angle: f64) -> PlanarPoint {
        let (s, c) = angle.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        PlanarPoint::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }
}

impl fmt::Display for PlanarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(f64, f64)> for PlanarPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

/// Sense in which a positive arc length is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewRotationMap {
    pub center: PlanarPoint,
    /// Signed arc length travelled along each circle.
    pub h: f64,
    pub orientation: Orientation,
}

impl SkewRotationMap {
    pub fn new(center: PlanarPoint, h: f64) -> Self {
        Self { center, h, orientation: Orientation::CounterClockwise }
    }

    pub fn with_orientation(center: PlanarPoint, h: f64, orientation: Orientation) -> Self {
        Self { center, h, orientation }
    }

    /// Arc length counted counterclockwise.
    pub fn signed_h(&self) -> f64 {
        self.orientation.sign() * self.h
    }

    /// Counterclockwise rotation angle applied to `z`.
    pub fn angle_at(&self, z: PlanarPoint) -> Result<f64> {
        let rho = z.distance(self.center);
        if rho < CENTER_EPS {
            return Err(Error::DegenerateCenter { point: z, center: self.center });
        }
        Ok(self.signed_h() / rho)
    }

    pub fn apply(&self, z: PlanarPoint) -> Result<PlanarPoint> {
        let angle = self.angle_at(z)?;
        Ok(z.rotated_about(self.center, angle))
    }

    pub fn inverse(&self) -> Self {
        Self { h: -self.h, ..*self }
    }
}

/// Rotates `z` about `map.center` by the arc length `map.h`.
pub fn apply_skew_rotation(map: &SkewRotationMap, z: PlanarPoint) -> Result<PlanarPoint> {
    map.apply(z)
}

/// An ordered product of skew rotations, applied first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct MapProduct {
    factors: Vec<SkewRotationMap>,
}

impl MapProduct {
    pub fn new(factors: Vec<SkewRotationMap>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        for f in &factors {
            if !f.h.is_finite() || !f.center.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite skew rotation {f:?}"
                )));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(map: SkewRotationMap) -> Self {
        Self { factors: vec![map] }
    }

    /// `T = R_{F2,h2} . R_{F1,h1}`, both counterclockwise.
    pub fn pair(f1: PlanarPoint, h1: f64, f2: PlanarPoint, h2: f64) -> Self {
        Self {
            factors: vec![SkewRotationMap::new(f1, h1), SkewRotationMap::new(f2, h2)],
        }
    }

    /// The two-center map with centers `(-1, 0)` and `(1, 0)`.
    pub fn standard_pair(h1: f64, h2: f64) -> Self {
        Self::pair(PlanarPoint::new(-1.0, 0.0), h1, PlanarPoint::new(1.0, 0.0), h2)
    }

    pub fn factors(&self) -> &[SkewRotationMap] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Sum of the counterclockwise arc lengths. Boundedness of orbits hinges
    /// on whether this vanishes.
    pub fn angular_sum(&self) -> f64 {
        self.factors.iter().map(SkewRotationMap::signed_h).sum()
    }

    pub fn centroid(&self) -> PlanarPoint {
        let n = self.factors.len() as f64;
        let (sx, sy) = self
            .factors
            .iter()
            .fold((0.0, 0.0), |(sx, sy), f| (sx + f.center.x, sy + f.center.y));
        PlanarPoint::new(sx / n, sy / n)
    }

    pub fn inverse(&self) -> Self {
        Self { factors: self.factors.iter().rev().map(SkewRotationMap::inverse).collect() }
    }

    pub fn apply(&self, z: PlanarPoint) -> Result<PlanarPoint> {
        self.factors.iter().enumerate().try_fold(z, |p, (i, f)| {
            f.apply(p).map_err(|_| Error::DegenerateFactor { factor: i, point: p })
        })
    }

    /// Applies the factors in order, passing every intermediate image to `visit`.
    pub fn apply_visiting(
        &self,
        z: PlanarPoint,
        mut visit: impl FnMut(usize, PlanarPoint),
    ) -> Result<PlanarPoint> {
        let mut p = z;
        for (i, f) in self.factors.iter().enumerate() {
            p = f.apply(p).map_err(|_| Error::DegenerateFactor { factor: i, point: p })?;
            visit(i, p);
        }
        Ok(p)
    }
}

pub fn apply_product(prod: &MapProduct, z: PlanarPoint) -> Result<PlanarPoint> {
    prod.apply(z)
}

/// Inverse polar coordinates `(r, phi) = (1/|z - F|, arg(z - F))` about `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversePolarFrame {
    pub center: PlanarPoint,
}

impl InversePolarFrame {
    pub fn new(center: PlanarPoint) -> Self {
        Self { center }
    }

    /// Returns `(r, phi)` with `phi` in `[0, 2 pi)`.
    pub fn to_inverse_polar(&self, z: PlanarPoint) -> Result<(f64, f64)> {
        let rho = z.distance(self.center);
        if rho < CENTER_EPS {
            return Err(Error::DegenerateCenter { point: z, center: self.center });
        }
        Ok((1.0 / rho, normalize_angle(z.angle_about(self.center))))
    }

    pub fn from_inverse_polar(&self, r: f64, phi: f64) -> Result<PlanarPoint> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let rho = 1.0 / r;
        let (s, c) = phi.sin_cos();
        Ok(PlanarPoint::new(self.center.x + rho * c, self.center.y + rho * s))
    }
}

pub fn to_inverse_polar(frame: &InversePolarFrame, z: PlanarPoint) -> Result<(f64, f64)> {
    frame.to_inverse_polar(z)
}

pub fn from_inverse_polar(frame: &InversePolarFrame, r: f64, phi: f64) -> Result<PlanarPoint> {
    frame.from_inverse_polar(r, phi)
}

/// Maps an angle into `[0, 2 pi)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let v = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if v >= TAU {
        0.0
    } else {
        v
    }
}

/// Maps an angle difference into `(-pi, pi]`.
pub fn wrap_pi(d: f64) -> f64 {
    let v = normalize_angle(d);
    if v > std::f64::consts::PI {
        v - TAU
    } else {
        v
    }
}

/// `H(z) = sum_j h_j |z - F_j|`, whose level sets are Cartesian ovals.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedHamiltonian {
    centers: Vec<PlanarPoint>,
    weights: Vec<f64>,
}

impl CombinedHamiltonian {
    pub fn new(centers: Vec<PlanarPoint>, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "need matching non-empty centers/weights, got {} and {}",
                centers.len(),
                weights.len()
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Hamiltonian data".into()));
        }
        Ok(Self { centers, weights })
    }

    /// The Hamiltonian built from a product's own centers and signed arc lengths.
    pub fn from_product(prod: &MapProduct) -> Self {
        Self {
            centers: prod.factors().iter().map(|f| f.center).collect(),
            weights: prod.factors().iter().map(SkewRotationMap::signed_h).collect(),
        }
    }

    pub fn centers(&self) -> &[PlanarPoint] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn value(&self, z: PlanarPoint) -> f64 {
        self.centers.iter().zip(&self.weights).map(|(c, w)| w * z.distance(*c)).sum()
    }
}

pub fn combined_h(hamiltonian: &CombinedHamiltonian, z: PlanarPoint) -> f64 {
    hamiltonian.value(z)
}

/// A rigid motion `z -> a z + b` with `|a| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub a: Complex64,
    pub b: Complex64,
}

impl RigidMotion {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(center: PlanarPoint, angle: f64) -> Self {
        let a = Complex64::from_polar(1.0, angle);
        let c = center.to_complex();
        Self { a, b: c - a * c }
    }

    pub fn apply(&self, z: PlanarPoint) -> PlanarPoint {
        PlanarPoint::from_complex(self.a * z.to_complex() + self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedMotion {
    pub a: Complex64,
    pub b: Complex64,
    /// `b / (1 - a)` when the composite is a genuine rotation.
    pub fixed_point: Option<PlanarPoint>,
}

/// Composes motions applied in the given order.
///
/// The fixed point solves `z = a z + b`. When `a = 1` the composite is a
/// translation (or the identity) and no fixed point is reported.
pub fn compose_rigid_motions(motions: &[RigidMotion]) -> Result<ComposedMotion> {
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    for m in motions {
        if (m.a.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|a| = {} is not 1", m.a.norm())));
        }
        a = m.a * a;
        b = m.a * b + m.b;
    }
    let fixed_point =
        ((a - 1.0).norm() > 1e-12).then(|| PlanarPoint::from_complex(b / (Complex64::new(1.0, 0.0) - a)));
    Ok(ComposedMotion { a, b, fixed_point })
}
