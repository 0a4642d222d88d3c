//! Regions of the upper half-plane cut out by vertical lines and circles, and
//! hyperbolic area over them.
//!
//! At fixed `x` every constraint restricts `y` to a union of intervals, so the
//! inner integral of `dy / y²` is exact and only the outer `x` integral is
//! numerical. This is the same as integrating in `(x, 1/y)` coordinates, which
//! keeps the unbounded cusp direction finite.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{MoebiusMap, UhpPoint};
use crate::quadrature::{integrate, integrate_with_breaks, Tolerance};

/// Slack allowed when testing membership of points that lie on the boundary.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// One half-plane or disk condition; a region is the intersection of its constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    XMin { value: f64 },
    XMax { value: f64 },
    /// `|z − center| ≥ radius`
    OutsideDisk { center: [f64; 2], radius: f64 },
    /// `|z − center| ≤ radius`
    InsideDisk { center: [f64; 2], radius: f64 },
}

impl Constraint {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Constraint::XMin { value } | Constraint::XMax { value } => value.is_finite(),
            Constraint::OutsideDisk { center, radius } | Constraint::InsideDisk { center, radius } => {
                center.iter().all(|c| c.is_finite()) && radius > 0.0 && radius.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid region constraint {self:?}")))
        }
    }

    pub fn contains(&self, p: UhpPoint, tol: f64) -> bool {
        match *self {
            Constraint::XMin { value } => p.x >= value - tol,
            Constraint::XMax { value } => p.x <= value + tol,
            Constraint::OutsideDisk { center, radius } => {
                (p.x - center[0]).hypot(p.y - center[1]) >= radius - tol
            }
            Constraint::InsideDisk { center, radius } => {
                (p.x - center[0]).hypot(p.y - center[1]) <= radius + tol
            }
        }
    }

    /// The allowed `y` set at abscissa `x`.
    fn slice(&self, x: f64) -> Vec<(f64, f64)> {
        let all = vec![(0.0, f64::INFINITY)];
        match *self {
            Constraint::XMin { value } => if x >= value { all } else { vec![] },
            Constraint::XMax { value } => if x <= value { all } else { vec![] },
            Constraint::OutsideDisk { center, radius } => {
                let dx = x - center[0];
                if dx.abs() >= radius {
                    return all;
                }
                let h = (radius * radius - dx * dx).sqrt();
                vec![(0.0, (center[1] - h).max(0.0)), (center[1] + h, f64::INFINITY)]
            }
            Constraint::InsideDisk { center, radius } => {
                let dx = x - center[0];
                if dx.abs() >= radius {
                    return vec![];
                }
                let h = (radius * radius - dx * dx).sqrt();
                vec![((center[1] - h).max(0.0), center[1] + h)]
            }
        }
    }

    /// Abscissas where the slice changes shape.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Constraint::XMin { value } | Constraint::XMax { value } => vec![value],
            Constraint::OutsideDisk { center, radius } | Constraint::InsideDisk { center, radius } => {
                vec![center[0] - radius, center[0], center[0] + radius]
            }
        }
    }

    /// `{Im(m⁻¹ z) ≤ Y}` when the cusp `m(∞)` is finite: the outside of a
    /// horoball disk tangent to the real axis. `None` for the cusp at infinity.
    pub fn below_horocycle(m: &MoebiusMap, height: f64) -> Option<Constraint> {
        let inv = m.inverse();
        if inv.c == 0.0 {
            return None;
        }
        // y / |cz + d|² ≥ Y  ⇔  |z + d/c − i/(2c²Y)| ≤ 1/(2c²Y)
        let r = 1.0 / (2.0 * inv.c * inv.c * height);
        Some(Constraint::OutsideDisk { center: [-inv.d / inv.c, r], radius: r })
    }
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// A region given as an intersection of constraints and optional height caps `y ≤ h`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Region {
    pub constraints: Vec<Constraint>,
    pub caps: Vec<f64>,
}

impl Region {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        Region { constraints, caps: Vec::new() }
    }

    /// Removes the cusp neighbourhood `{Im(m⁻¹ z) > height}`.
    pub fn truncate(&mut self, m: &MoebiusMap, height: f64) {
        match Constraint::below_horocycle(m, height) {
            Some(c) => self.constraints.push(c),
            // Im(m⁻¹ z) = y / d² for a cusp at infinity
            None => {
                let d = m.inverse().d;
                self.caps.push(height * d * d);
            }
        }
    }

    pub fn contains(&self, p: UhpPoint, tol: f64) -> bool {
        self.constraints.iter().all(|c| c.contains(p, tol)) && self.caps.iter().all(|&h| p.y <= h + tol)
    }

    fn slice(&self, x: f64) -> Vec<(f64, f64)> {
        let mut set = vec![(0.0, self.caps.iter().copied().fold(f64::INFINITY, f64::min))];
        for c in &self.constraints {
            set = intersect(&set, &c.slice(x));
            if set.is_empty() {
                break;
            }
        }
        set
    }

    /// `∫ dy / y²` over the slice at `x`.
    fn slice_measure(&self, x: f64) -> f64 {
        self.slice(x)
            .iter()
            .map(|&(lo, hi)| if lo <= 0.0 { f64::INFINITY } else { 1.0 / lo - 1.0 / hi })
            .sum()
    }

    /// Horizontal extent `[x_min, x_max]`, which must be finite.
    fn x_extent(&self) -> Result<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in &self.constraints {
            match *c {
                Constraint::XMin { value } => lo = lo.max(value),
                Constraint::XMax { value } => hi = hi.min(value),
                Constraint::InsideDisk { center, radius } => {
                    lo = lo.max(center[0] - radius);
                    hi = hi.min(center[0] + radius);
                }
                Constraint::OutsideDisk { .. } => {}
            }
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::MissingData("region is not bounded horizontally".into()));
        }
        Ok((lo, hi))
    }

    /// `x_min`, interior breakpoints and `x_max`, or `None` for an empty extent.
    fn x_breaks(&self) -> Result<Option<Vec<f64>>> {
        let (lo, hi) = self.x_extent()?;
        if hi <= lo {
            return Ok(None);
        }
        let mut pts: Vec<f64> = self
            .constraints
            .iter()
            .flat_map(|c| c.breakpoints())
            .filter(|&x| x > lo && x < hi)
            .collect();
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(Some(pts))
    }

    pub(crate) fn x_width(&self) -> Result<f64> {
        let (lo, hi) = self.x_extent()?;
        Ok((hi - lo).max(0.0))
    }

    /// Hyperbolic area `∫∫ dx dy / y²`.
    pub fn hyperbolic_area(&self, tol: Tolerance) -> Result<f64> {
        let Some(pts) = self.x_breaks()? else { return Ok(0.0) };
        let est = integrate_with_breaks(|x| self.slice_measure(x), &pts, tol)?;
        Ok(est.value)
    }

    /// `∫∫ g(x, y) dx dy` with adaptive quadrature in `y` nested in `x`.
    /// Every slice must be bounded, so the region needs a cap.
    pub(crate) fn integrate_2d<G: Fn(f64, f64) -> Result<f64>>(&self, g: G, tol: Tolerance) -> Result<f64> {
        let Some(pts) = self.x_breaks()? else { return Ok(0.0) };
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let inner_tol = Tolerance::new(tol.abs * 1e-2, tol.rel * 1e-2);
        let inner = |x: f64| -> f64 {
            let mut total = 0.0;
            for (lo, hi) in self.slice(x) {
                if !hi.is_finite() || lo <= 0.0 {
                    failure.borrow_mut().get_or_insert(Error::MissingData("region slice is unbounded".into()));
                    return f64::NAN;
                }
                let est = integrate(
                    |y| {
                        g(x, y).unwrap_or_else(|e| {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        })
                    },
                    lo,
                    hi,
                    inner_tol,
                );
                match est {
                    Ok(e) => total += e.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                    }
                }
            }
            total
        };
        let est = integrate_with_breaks(inner, &pts, tol);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(est?.value)
    }
}
