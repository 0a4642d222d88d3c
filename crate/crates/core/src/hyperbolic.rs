//! Upper half-plane primitives: points, Möbius maps, geodesic segments and
//! the distance functions built on them.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when deciding whether a point lies on a segment.
pub const ON_SEGMENT_TOL: f64 = 1e-9;

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UhpPoint {
    pub x: f64,
    pub y: f64,
}

impl UhpPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(Error::Domain(format!("{x}+{y}i is not in the upper half-plane")));
        }
        Ok(UhpPoint { x, y })
    }

    /// Constructor for points known to be valid (constants, internal grids).
    pub(crate) fn at(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0 && x.is_finite() && y.is_finite());
        UhpPoint { x, y }
    }

    pub fn i() -> Self {
        UhpPoint { x: 0.0, y: 1.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        UhpPoint::new(z.re, z.im)
    }
}

impl fmt::Display for UhpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.x, self.y)
    }
}

/// Squared Euclidean distance, kept separate so the displacement and the
/// distance formula share one expression.
fn euclid_sq(z: UhpPoint, w: UhpPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    dx * dx + dy * dy
}

/// `sigma(z, w) = |z - conj(w)|^2 / (4 Im z Im w) = cosh^2(dist / 2)`.
pub fn displacement(z: UhpPoint, w: UhpPoint) -> f64 {
    let dx = z.x - w.x;
    let sy = z.y + w.y;
    (dx * dx + sy * sy) / (4.0 * z.y * w.y)
}

/// Hyperbolic distance. Evaluated as `2 asinh(sqrt(u))` with
/// `u = |z - w|^2 / (4 Im z Im w)`, which is algebraically the same as
/// `arccosh(1 + |z - w|^2 / (2 Im z Im w))` but keeps precision for nearby points.
pub fn dist_hyp(z: UhpPoint, w: UhpPoint) -> f64 {
    let u = euclid_sq(z, w) / (4.0 * z.y * w.y);
    2.0 * u.sqrt().asinh()
}

/// Hyperbolic area of a disk of radius `r`: `4 pi sinh^2(r / 2)`.
pub fn disk_volume(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let s = (0.5 * r).sinh();
    Ok(4.0 * PI * s * s)
}

/// Element of PSL(2, R), stored with determinant one and a canonical sign:
/// the first nonzero entry among `(c, d, a, b)` is positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Largest accepted `|ad - bc - 1|` for user-supplied matrices before rescaling.
pub const DET_INPUT_TOL: f64 = 1e-9;

impl MoebiusMap {
    /// Builds a map from entries whose determinant is one up to
    /// [`DET_INPUT_TOL`]; the entries are rescaled to an exact unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if ![a, b, c, d].iter().all(|v| v.is_finite()) || (det - 1.0).abs() > DET_INPUT_TOL {
            return Err(Error::Domain(format!(
                "matrix ({a}, {b}; {c}, {d}) has determinant {det}, expected 1"
            )));
        }
        let s = det.sqrt().recip();
        Ok(MoebiusMap { a: a * s, b: b * s, c: c * s, d: d * s }.canonical())
    }

    pub fn identity() -> Self {
        MoebiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub fn translation(t: f64) -> Self {
        MoebiusMap { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    pub fn inversion() -> Self {
        MoebiusMap { a: 0.0, b: -1.0, c: 1.0, d: 0.0 }
    }

    fn canonical(self) -> Self {
        let lead = [self.c, self.d, self.a, self.b]
            .into_iter()
            .find(|v| *v != 0.0)
            .unwrap_or(1.0);
        if lead < 0.0 {
            MoebiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// `(az + b) / (cz + d)`.
    pub fn apply(&self, z: UhpPoint) -> UhpPoint {
        let zc = z.to_complex();
        let w = (zc * self.a + self.b) / (zc * self.c + self.d);
        // Im(gz) = Im(z) / |cz + d|^2 exactly; use it rather than the quotient's
        // imaginary part, which can lose sign for extreme inputs.
        let den = (zc * self.c + self.d).norm_sqr();
        UhpPoint::at(w.re, z.y / den)
    }

    /// Image of `i * infinity`, `None` when the map fixes infinity.
    pub fn image_of_infinity(&self) -> Option<f64> {
        (self.c != 0.0).then(|| self.a / self.c)
    }

    /// Equality in PSL(2, R) up to an absolute entry tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let same = |s: f64| {
            (self.a - s * other.a).abs() <= tol
                && (self.b - s * other.b).abs() <= tol
                && (self.c - s * other.c).abs() <= tol
                && (self.d - s * other.d).abs() <= tol
        };
        same(1.0) || same(-1.0)
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, r: MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
        .canonical()
    }
}

/// A piece of a geodesic bounding a fundamental domain.
///
/// Arcs are parameterised by the angle `theta` of `center + radius * e^{i theta}`,
/// with `0 <= theta_min < theta_max <= pi`; an angle of `0` or `pi` is an ideal
/// endpoint on the real axis. Vertical rays have `y_max = None` when they run
/// up to the cusp at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GeodesicSegment {
    Vertical {
        x: f64,
        y_min: f64,
        #[serde(default)]
        y_max: Option<f64>,
    },
    Arc {
        center: f64,
        radius: f64,
        theta_min: f64,
        theta_max: f64,
    },
}

/// Arclength cut-off used for ideal arc endpoints; points this far out are
/// at Euclidean height ~1e-17 * radius and never minimise a distance.
const IDEAL_ARCLENGTH: f64 = 40.0;

impl GeodesicSegment {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GeodesicSegment::Vertical { x, y_min, y_max } => {
                let upper_ok = y_max.is_none_or(|t| t.is_finite() && t > y_min);
                if !x.is_finite() || !(y_min > 0.0) || !y_min.is_finite() || !upper_ok {
                    return Err(Error::Domain(format!("invalid vertical segment {self:?}")));
                }
            }
            GeodesicSegment::Arc { center, radius, theta_min, theta_max } => {
                if !center.is_finite()
                    || !(radius > 0.0)
                    || !radius.is_finite()
                    || !(0.0 <= theta_min && theta_min < theta_max && theta_max <= PI)
                {
                    return Err(Error::Domain(format!("invalid arc segment {self:?}")));
                }
            }
        }
        Ok(())
    }

    /// Range of the hyperbolic arclength parameter; ideal endpoints are infinite.
    fn arclength_range(&self) -> (f64, f64) {
        match *self {
            GeodesicSegment::Vertical { y_min, y_max, .. } => {
                (y_min.ln(), y_max.map_or(f64::INFINITY, f64::ln))
            }
            GeodesicSegment::Arc { theta_min, theta_max, .. } => {
                let s = |t: f64| (0.5 * t).tan().ln();
                let lo = if theta_min > 0.0 { s(theta_min) } else { f64::NEG_INFINITY };
                let hi = if theta_max < PI { s(theta_max) } else { f64::INFINITY };
                (lo, hi)
            }
        }
    }

    /// Point at hyperbolic arclength parameter `s`.
    fn point_at(&self, s: f64) -> UhpPoint {
        match *self {
            GeodesicSegment::Vertical { x, .. } => UhpPoint::at(x, s.exp()),
            GeodesicSegment::Arc { center, radius, .. } => {
                let theta = 2.0 * s.exp().atan();
                UhpPoint::at(center + radius * theta.cos(), radius * theta.sin())
            }
        }
    }

    /// Finite endpoints of the segment.
    pub fn endpoints(&self) -> Vec<UhpPoint> {
        let (lo, hi) = self.arclength_range();
        [lo, hi]
            .into_iter()
            .filter(|s| s.is_finite())
            .map(|s| self.point_at(s))
            .collect()
    }

    pub fn is_unbounded(&self) -> bool {
        let (lo, hi) = self.arclength_range();
        !(lo.is_finite() && hi.is_finite())
    }

    /// `n` points spread evenly in arclength; an unbounded side is cut at `top_height`
    /// (vertical rays) or at the ideal cut-off (arcs).
    pub fn sample(&self, n: usize, top_height: Option<f64>) -> Vec<UhpPoint> {
        let (mut lo, mut hi) = self.arclength_range();
        if let (GeodesicSegment::Vertical { .. }, Some(top)) = (self, top_height) {
            hi = hi.min(top.ln());
        }
        if !lo.is_finite() {
            lo = -IDEAL_ARCLENGTH;
        }
        if !hi.is_finite() {
            hi = if matches!(self, GeodesicSegment::Vertical { .. }) { lo + IDEAL_ARCLENGTH } else { IDEAL_ARCLENGTH };
        }
        if hi <= lo || n < 2 {
            return vec![self.point_at(lo)];
        }
        (0..n)
            .map(|i| self.point_at(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect()
    }

    /// Whether `p` lies on the segment (within [`ON_SEGMENT_TOL`]).
    pub fn contains(&self, p: UhpPoint) -> bool {
        match *self {
            GeodesicSegment::Vertical { x, y_min, y_max } => {
                (p.x - x).abs() <= ON_SEGMENT_TOL
                    && p.y >= y_min - ON_SEGMENT_TOL
                    && y_max.is_none_or(|t| p.y <= t + ON_SEGMENT_TOL)
            }
            GeodesicSegment::Arc { center, radius, theta_min, theta_max } => {
                let dx = p.x - center;
                let r = dx.hypot(p.y);
                let theta = p.y.atan2(dx);
                (r - radius).abs() <= ON_SEGMENT_TOL * radius.max(1.0)
                    && theta >= theta_min - ON_SEGMENT_TOL
                    && theta <= theta_max + ON_SEGMENT_TOL
            }
        }
    }

    /// Infimum of `dist_hyp(p, q)` over points `q` of the segment.
    pub fn distance_to(&self, p: UhpPoint) -> f64 {
        match *self {
            GeodesicSegment::Vertical { x, y_min, y_max } => {
                // cosh d = 1 + (dx^2 + (y - t)^2) / (2 y t) is minimised at t = |p - x|.
                let dx = p.x - x;
                let t_star = dx.hypot(p.y);
                let t = t_star.max(y_min).min(y_max.unwrap_or(f64::INFINITY));
                dist_hyp(p, UhpPoint::at(x, t))
            }
            GeodesicSegment::Arc { .. } => {
                // Distance to a point is convex along a geodesic, so a golden
                // section search in arclength finds the constrained minimum.
                let (lo, hi) = self.arclength_range();
                let lo = lo.max(-IDEAL_ARCLENGTH);
                let hi = hi.min(IDEAL_ARCLENGTH);
                let f = |s: f64| dist_hyp(p, self.point_at(s));
                golden_min(f, lo, hi)
            }
        }
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    [f(lo), f(hi), f1, f2].into_iter().fold(f64::INFINITY, f64::min)
}

/// Free-function form of [`GeodesicSegment::distance_to`].
pub fn dist_point_to_segment(s: &GeodesicSegment, p: UhpPoint) -> f64 {
    s.distance_to(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const S3_2: f64 = 0.866_025_403_784_438_6;

    fn rho() -> UhpPoint {
        UhpPoint::at(-0.5, S3_2)
    }

    #[test]
    fn displacement_examples() {
        let i = UhpPoint::i();
        assert_eq!(displacement(i, i), 1.0);
        assert_relative_eq!(displacement(i, UhpPoint::at(0.0, 2.0)), 1.125, max_relative = 1e-15);
        assert_relative_eq!(displacement(i, UhpPoint::at(1.0, 1.0)), 1.25, max_relative = 1e-15);
    }

    #[test]
    fn distance_examples() {
        let i = UhpPoint::i();
        assert_eq!(dist_hyp(i, i), 0.0);
        assert_relative_eq!(dist_hyp(i, UhpPoint::at(0.0, 2.0)), 2f64.ln(), max_relative = 1e-14);
        let d = dist_hyp(i, rho());
        assert_relative_eq!(d, (2.0 * 3f64.sqrt() / 3.0).acosh(), max_relative = 1e-12);
        assert!((d - 0.549).abs() < 1e-3);
    }

    #[test]
    fn apply_examples() {
        let i = UhpPoint::i();
        assert_eq!(MoebiusMap::identity().apply(i), i);
        assert_eq!(MoebiusMap::translation(1.0).apply(i), UhpPoint::at(1.0, 1.0));
        let s = MoebiusMap::inversion().apply(i);
        assert!((s.x).abs() < 1e-15 && (s.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_sign_identifies_negatives() {
        let m = MoebiusMap::new(-2.0, -1.0, -1.0, -1.0).unwrap();
        assert_eq!(m, MoebiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap());
        assert!(MoebiusMap::new(2.0, 0.0, 0.0, 2.0).is_err());
        let inv = m.inverse();
        assert!((m * inv).approx_eq(&MoebiusMap::identity(), 1e-14));
    }

    #[test]
    fn segment_distances_of_the_modular_domain() {
        let s1 = GeodesicSegment::Vertical { x: -0.5, y_min: S3_2, y_max: None };
        let s3 = GeodesicSegment::Vertical { x: 0.5, y_min: S3_2, y_max: None };
        let d1 = s1.distance_to(UhpPoint::i());
        assert_relative_eq!(d1, (5f64.sqrt() / 2.0).acosh(), max_relative = 1e-12);
        assert!((d1 - 0.481).abs() < 1e-3);
        let d3 = s3.distance_to(rho());
        assert_relative_eq!(d3, (7f64.sqrt() / 3f64.sqrt()).acosh(), max_relative = 1e-12);
        assert!((d3 - 0.986).abs() < 1e-3);
        let s4 = GeodesicSegment::Arc { center: 0.0, radius: 1.0, theta_min: PI / 3.0, theta_max: PI / 2.0 };
        assert_relative_eq!(s4.distance_to(rho()), dist_hyp(UhpPoint::i(), rho()), max_relative = 1e-9);
        assert_eq!(s1.distance_to(rho()), 0.0);
        assert!(s4.distance_to(UhpPoint::i()) < 1e-12);
    }

    #[test]
    fn disk_volume_examples() {
        assert_eq!(disk_volume(0.0).unwrap(), 0.0);
        assert_relative_eq!(disk_volume(2.0).unwrap(), 17.355_387_381_771_433, max_relative = 1e-11);
        assert!(disk_volume(3.0).unwrap() > disk_volume(2.0).unwrap());
        assert!(disk_volume(-1.0).is_err());
    }

    #[test]
    fn contains_respects_range() {
        let s2 = GeodesicSegment::Arc { center: 0.0, radius: 1.0, theta_min: PI / 2.0, theta_max: 2.0 * PI / 3.0 };
        assert!(s2.contains(rho()));
        assert!(s2.contains(UhpPoint::i()));
        assert!(!s2.contains(UhpPoint::at(0.5, S3_2)));
    }

    fn point() -> impl Strategy<Value = UhpPoint> {
        (-5.0..5.0f64, -3.0..3.0f64).prop_map(|(x, ly)| UhpPoint::at(x, 10f64.powf(ly)))
    }

    fn unit_map() -> impl Strategy<Value = MoebiusMap> {
        (-3.0..3.0f64, -3.0..3.0f64, 0.2..3.0f64).prop_map(|(a, b, d)| {
            // c chosen so that ad - bc = 1 whenever b != 0; otherwise use a diagonal map.
            if b.abs() > 1e-3 {
                MoebiusMap::new(a, b, (a * d - 1.0) / b, d).unwrap()
            } else {
                MoebiusMap::new(d, 0.0, a, 1.0 / d).unwrap()
            }
        })
    }

    proptest! {
        #[test]
        fn distance_matches_displacement(z in point(), w in point()) {
            let c = (0.5 * dist_hyp(z, w)).cosh();
            let s = displacement(z, w);
            prop_assert!((c * c - s).abs() <= 1e-12 * s);
        }

        #[test]
        fn moebius_invariance(m in unit_map(), z in point(), w in point()) {
            let s = displacement(z, w);
            let t = displacement(m.apply(z), m.apply(w));
            prop_assert!((s - t).abs() <= 1e-11 * s, "{} vs {}", s, t);
        }

        #[test]
        fn triangle_inequality(a in point(), b in point(), c in point()) {
            prop_assert!(dist_hyp(a, c) <= dist_hyp(a, b) + dist_hyp(b, c) + 1e-9);
        }

        #[test]
        fn segment_distance_below_endpoint_distance(
            c in -1.0..1.0f64, r in 0.3..2.0f64, t0 in 0.1..1.5f64, dt in 0.1..1.5f64, p in point()
        ) {
            let arc = GeodesicSegment::Arc { center: c, radius: r, theta_min: t0, theta_max: (t0 + dt).min(PI) };
            let ray = GeodesicSegment::Vertical { x: c, y_min: r, y_max: Some(r + dt) };
            for s in [arc, ray] {
                let d = s.distance_to(p);
                for e in s.endpoints() {
                    prop_assert!(d <= dist_hyp(p, e) + 1e-9);
                }
            }
        }
    }
}
