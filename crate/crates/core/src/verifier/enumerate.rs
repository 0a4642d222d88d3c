//! Elements of PSL(2, Z) that move a point by a bounded displacement.
//!
//! For `γ = (a b; c d)`, `σ(z, γz) = 1 + |cz² + (d − a)z − b|² / (4y²)`, and
//! `σ(z, γz) ≥ |cz + d|²/4`. The second inequality bounds `c` and `d`; for a
//! fixed coprime pair the remaining freedom is `(a, b) + n(c, d)`, along which
//! the numerator is `|W − n(cz + d)|²`, so the admissible `n` form an interval
//! that is solved for directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hyperbolic::UhpPoint;

/// Determinant-one integer matrix up to sign; the first nonzero of `(c, d)` is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegerMoebius {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMoebius {
    /// Canonical representative, or `None` if the determinant is not one.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        if a * d - b * c != 1 {
            return None;
        }
        let flip = c < 0 || (c == 0 && d < 0);
        Some(if flip { IntegerMoebius { a: -a, b: -b, c: -c, d: -d } } else { IntegerMoebius { a, b, c, d } })
    }

    pub fn identity() -> Self {
        IntegerMoebius { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Upper-triangular elements fix the cusp at infinity.
    pub fn is_parabolic_at_infinity(&self) -> bool {
        self.c == 0
    }

    pub fn apply(&self, z: UhpPoint) -> UhpPoint {
        let zc = z.to_complex();
        let w = (self.a as f64 * zc + self.b as f64) / (self.c as f64 * zc + self.d as f64);
        UhpPoint::at(w.re, w.im)
    }

    /// `σ(z, γz)` from the matrix entries.
    pub fn displacement_at(&self, z: UhpPoint) -> f64 {
        let zc = z.to_complex();
        let w = self.c as f64 * zc * zc + (self.d - self.a) as f64 * zc - self.b as f64;
        1.0 + w.norm_sqr() / (4.0 * z.y * z.y)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(x, y)` with `a x + b y = gcd(a, b)`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64) {
    if b == 0 {
        return (a.signum(), 0);
    }
    let (x, y) = ext_gcd(b, a % b);
    (y, x - (a / b) * y)
}

/// All `γ` with `σ(z, γz) ≤ r`, sorted.
pub fn enumerate_ball(z: UhpPoint, r: f64) -> Vec<IntegerMoebius> {
    let mut out = Vec::new();
    if !(r >= 1.0) {
        return out;
    }
    let zc = z.to_complex();
    let budget = 4.0 * z.y * z.y * (r - 1.0);
    // c = 0: translations, numerator |n|²
    let n_max = budget.sqrt().floor() as i64;
    for n in -n_max..=n_max {
        out.push(IntegerMoebius { a: 1, b: n, c: 0, d: 1 });
    }
    // |cz + d|² ≤ 4r
    let c_max = (2.0 * r.sqrt() / z.y).floor() as i64;
    for c in 1..=c_max {
        let half_width = (4.0 * r - (c as f64 * z.y).powi(2)).max(0.0).sqrt();
        let center = -(c as f64) * z.x;
        let d_lo = (center - half_width).floor() as i64;
        let d_hi = (center + half_width).ceil() as i64;
        for d in d_lo..=d_hi {
            if gcd(c, d) != 1 {
                continue;
            }
            // a0 d − b0 c = 1
            let (x, y) = ext_gcd(d, c);
            let (a0, b0) = (x, -y);
            debug_assert_eq!(a0 * d - b0 * c, 1);
            let w0 = c as f64 * zc * zc + (d - a0) as f64 * zc - b0 as f64;
            let v: Complex64 = c as f64 * zc + d as f64;
            let vv = v.norm_sqr();
            let proj = w0 * v.conj();
            let n_star = proj.re / vv;
            let slack = budget - proj.im * proj.im / vv;
            if slack < -1e-9 * budget.max(1.0) {
                continue;
            }
            let spread = (slack.max(0.0) / vv).sqrt();
            let lo = (n_star - spread).floor() as i64 - 1;
            let hi = (n_star + spread).ceil() as i64 + 1;
            for n in lo..=hi {
                let g = IntegerMoebius { a: a0 + n * c, b: b0 + n * d, c, d };
                if g.displacement_at(z) <= r {
                    out.push(g);
                }
            }
        }
    }
    out.retain(|g| g.displacement_at(z) <= r);
    out.sort();
    out.dedup();
    out
}

/// Oracle: every canonical matrix with entries bounded by `entry_max`.
pub fn brute_force_ball(z: UhpPoint, r: f64, entry_max: i64) -> Vec<IntegerMoebius> {
    let mut out = Vec::new();
    for c in 0..=entry_max {
        for d in -entry_max..=entry_max {
            if c == 0 && d <= 0 {
                continue;
            }
            for a in -entry_max..=entry_max {
                // b = (a d − 1) / c, or free when c = 0
                let bs: Vec<i64> = if c == 0 {
                    if a * d != 1 {
                        continue;
                    }
                    (-entry_max..=entry_max).collect()
                } else if (a * d - 1) % c == 0 {
                    vec![(a * d - 1) / c]
                } else {
                    continue;
                };
                for b in bs {
                    if b.abs() > entry_max {
                        continue;
                    }
                    let g = IntegerMoebius { a, b, c, d };
                    if g.displacement_at(z) <= r {
                        out.push(g);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Entry bound sufficient for [`brute_force_ball`] to be complete.
///
/// With `g` the affine map taking `i` to `z`, `‖g⁻¹γg‖²_F = 4σ − 2`, so
/// `‖γ‖_F ≤ ‖g‖_F ‖g⁻¹‖_F √(4r − 2)`.
pub fn brute_force_entry_bound(z: UhpPoint, r: f64) -> i64 {
    let g_norm_sq = z.y + (z.x * z.x + 1.0) / z.y;
    (g_norm_sq * (4.0 * r - 2.0).max(0.0).sqrt()).ceil() as i64
}
