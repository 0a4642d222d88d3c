//! The individual verification checks and the report that collects them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_ball, IntegerMoebius};
use super::forms::{build_basis, shifted_region, CuspFormBasis, SUPPORTED_WEIGHTS};
use crate::bounds::{bound_report, compute_constants, poincare_bound_compact, BoundSource, EffectiveConstants, PUBLISHED_MODULAR};
use crate::domain::{FundamentalDomain, RegionTag};
use crate::error::{Error, Result};
use crate::hyperbolic::UhpPoint;
use crate::kernels::{faddeev_transfer, parabolic_sum_bound};
use crate::numfmt::sig;
use crate::quadrature::Tolerance;

/// Base points in the compact part used by the lattice checks.
pub fn base_points() -> [UhpPoint; 3] {
    [UhpPoint::i(), UhpPoint::at(0.5, 0.75f64.sqrt()), UhpPoint::at(0.1, 1.2)]
}

pub const COUNTING_RADII: [f64; 10] = [1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0, 89.0];
pub const POINCARE_WEIGHTS: [u32; 4] = [2, 3, 6, 10];
pub const POINCARE_EPS: f64 = 0.1;
/// Weights where the interval `[Y, k/2π]` is nonempty.
pub const PARABOLIC_WEIGHTS: [u32; 4] = [26, 30, 40, 60];
pub const PARABOLIC_EPS: f64 = 0.01;
pub const MASS_TOL: f64 = 1e-4;
pub const LOWER_SLACK: f64 = 0.05;
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Relative slack for floating-point comparisons of quantities that may meet with equality.
const ROUNDING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    pub count: usize,
    pub bound: f64,
}

impl CountCheck {
    pub fn passed(&self) -> bool {
        (self.count as f64) <= self.bound
    }
}

/// `|{γ : σ(z,γz) ≤ r}|` against `4π B_Y r`.
pub fn counting_check(z: UhpPoint, r: f64, c: &EffectiveConstants) -> CountCheck {
    CountCheck { count: enumerate_ball(z, r).len(), bound: 4.0 * PI * c.b_y * r }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareDirect {
    pub partial: f64,
    pub tail_bound: f64,
}

impl PoincareDirect {
    pub fn total(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

/// Tail `Σ_{σ > R} σ^{−(k+ε)}` bounded through the counting estimate by partial summation.
pub fn poincare_tail_bound(k: u32, eps: f64, r_cut: f64, b_y: f64) -> f64 {
    4.0 * PI * b_y * (2.0 + eps) / (1.0 + eps) * r_cut.powf(-(k as f64 + eps - 1.0))
}

fn poincare_partial(elements: &[(IntegerMoebius, f64)], k: u32, eps: f64, r_cut: f64) -> f64 {
    elements
        .iter()
        .filter(|(g, s)| !g.is_identity() && *s <= r_cut)
        .map(|(_, s)| s.powf(-(k as f64 + eps)))
        .sum()
}

fn with_displacement(z: UhpPoint, r: f64) -> Vec<(IntegerMoebius, f64)> {
    enumerate_ball(z, r).into_iter().map(|g| (g, g.displacement_at(z))).collect()
}

/// Partial sum of `Σ_{γ≠id} σ(z,γz)^{−(k+ε)}` over `σ ≤ R_cut` plus its tail bound.
pub fn poincare_direct(z: UhpPoint, k: u32, eps: f64, r_cut: f64, b_y: f64) -> PoincareDirect {
    let elements = with_displacement(z, r_cut);
    PoincareDirect { partial: poincare_partial(&elements, k, eps, r_cut), tail_bound: poincare_tail_bound(k, eps, r_cut, b_y) }
}

/// `2 Σ_{n≥1} (1 + (n/2y)²)^{−(k+ε)}`, stopped once a term is below `1e−18` of the total.
pub fn parabolic_direct(y: f64, k: u32, eps: f64) -> f64 {
    let s = k as f64 + eps;
    let mut total = 0.0;
    let mut n = 1u64;
    loop {
        let t = 2.0 * (1.0 + (n as f64 / (2.0 * y)).powi(2)).powf(-s);
        total += t;
        if t < 1e-18 * total || t == 0.0 {
            return total;
        }
        n += 1;
    }
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    /// Weight `2k`, or `None` for checks that do not involve a cusp form.
    pub weight: Option<u32>,
    pub name: String,
    pub passed: bool,
    pub points: usize,
    /// Worst observed value of the checked statistic.
    pub value: f64,
    /// The value the statistic is compared with.
    pub limit: f64,
    pub detail: String,
}

/// Where the grid maximum of `S_{2k}` sits and which bound applies there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub weight: u32,
    pub grid_points: usize,
    pub grid_max: f64,
    pub argmax: [f64; 2],
    pub argmax_region: RegionTag,
    pub branch: BoundSource,
    pub engine_bound: f64,
    pub published_bound: f64,
    pub lower_bound: f64,
    pub petersson_norm: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub items: Vec<VerifyItem>,
    pub weights: Vec<WeightSummary>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            let w = i.weight.map_or("-".to_string(), |w| w.to_string());
            out.push_str(&format!(
                "{:<4} {:>4} {:<28} {:>7} {:>20} {:>20}  {}\n",
                if i.passed { "PASS" } else { "FAIL" },
                w,
                i.name,
                i.points,
                sig(i.value),
                sig(i.limit),
                i.detail
            ));
        }
        for s in &self.weights {
            out.push_str(&format!(
                "weight {}: max S = {} at {}+{}i ({}, {}), engine bound {}, published {}, lower {}\n",
                s.weight,
                sig(s.grid_max),
                sig(s.argmax[0]),
                sig(s.argmax[1]),
                s.argmax_region,
                s.branch.label(),
                sig(s.engine_bound),
                sig(s.published_bound),
                sig(s.lower_bound)
            ));
        }
        out
    }
}

/// Points of the standard domain, with their region tags.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<UhpPoint>,
    pub tags: Vec<RegionTag>,
}

/// `n × n` points uniform in `(x, 1/y)` over the standard domain, plus `n` points on
/// `x = 0` with `Y ≤ y ≤ k/2π` when that range is nonempty.
pub fn sample_grid(d: &FundamentalDomain, y_trunc: f64, n: usize, k: u32) -> Result<SampleGrid> {
    if n < 1 {
        return Err(Error::Precondition("grid size must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(n * n + n);
    for i in 0..n {
        let x = if n == 1 { 0.0 } else { -0.5 + i as f64 / (n - 1) as f64 };
        let u_max = 1.0 / (1.0 - x * x).sqrt();
        for j in 1..=n {
            points.push(UhpPoint::at(x, n as f64 / (j as f64 * u_max)));
        }
    }
    let y_hi = k as f64 / (2.0 * PI);
    if y_hi >= y_trunc {
        for j in 0..n {
            let t = if n == 1 { 0.0 } else { j as f64 / (n - 1) as f64 };
            points.push(UhpPoint::at(0.0, y_trunc + t * (y_hi - y_trunc)));
        }
    }
    let tags = points.iter().map(|&z| d.classify(y_trunc, z)).collect::<Result<_>>()?;
    Ok(SampleGrid { points, tags })
}

fn item(weight: Option<u32>, name: &str, passed: bool, points: usize, value: f64, limit: f64, detail: String) -> VerifyItem {
    VerifyItem { weight, name: name.into(), passed, points, value, limit, detail }
}

fn counting_items(c: &EffectiveConstants) -> Vec<VerifyItem> {
    let points = [UhpPoint::i(), UhpPoint::at(0.5, 0.75f64.sqrt()), UhpPoint::at(0.1, 1.2), UhpPoint::at(0.3, 2.0), UhpPoint::at(-0.4, 3.5)];
    let pairs: Vec<(UhpPoint, f64)> = points.iter().flat_map(|&z| COUNTING_RADII.map(|r| (z, r))).collect();
    let checks: Vec<CountCheck> = pairs.par_iter().map(|&(z, r)| counting_check(z, r, c)).collect();
    let failures = checks.iter().filter(|x| !x.passed()).count();
    let worst = checks.iter().map(|x| x.count as f64 / x.bound).fold(0.0, f64::max);
    vec![item(
        None,
        "counting",
        failures == 0,
        checks.len(),
        worst,
        1.0,
        format!("max count / (4 pi B_Y r); {failures} failures"),
    )]
}

fn poincare_items(c: &EffectiveConstants) -> Result<Vec<VerifyItem>> {
    let per_point: Vec<Result<(f64, f64, bool)>> = base_points()
        .par_iter()
        .map(|&z| {
            let elements = with_displacement(z, 1e4);
            let mut worst: f64 = 0.0;
            let mut monotone = true;
            let mut ok = true;
            for k in POINCARE_WEIGHTS {
                let r_cut = if k == 2 { 1e4 } else { 1e3 };
                let partial = poincare_partial(&elements, k, POINCARE_EPS, r_cut);
                let total = partial + poincare_tail_bound(k, POINCARE_EPS, r_cut, c.b_y);
                let bound = poincare_bound_compact(k, POINCARE_EPS, c.b_y, c.sigma_y, c.elliptic_excess)?;
                ok &= total <= bound;
                worst = worst.max(total / bound);
                let mut prev = 0.0;
                for cut in [1.5, 10.0, 100.0, 1e3, 1e4] {
                    let p = poincare_partial(&elements, k, POINCARE_EPS, cut);
                    monotone &= p >= prev;
                    prev = p;
                }
            }
            Ok((worst, if monotone { 0.0 } else { 1.0 }, ok))
        })
        .collect();
    let per_point = per_point.into_iter().collect::<Result<Vec<_>>>()?;
    let worst = per_point.iter().map(|p| p.0).fold(0.0, f64::max);
    let ok = per_point.iter().all(|p| p.2);
    let monotone_failures: f64 = per_point.iter().map(|p| p.1).sum();
    let n = per_point.len() * POINCARE_WEIGHTS.len();
    Ok(vec![
        item(None, "poincare-direct", ok, n, worst, 1.0, "max (partial + tail) / compact Poincare bound".into()),
        item(
            None,
            "poincare-monotone",
            monotone_failures == 0.0,
            per_point.len(),
            monotone_failures,
            0.0,
            "points where partial sums decrease with the cutoff".into(),
        ),
    ])
}

fn parabolic_items(c: &EffectiveConstants) -> Result<Vec<VerifyItem>> {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for k in PARABOLIC_WEIGHTS {
        let bound = parabolic_sum_bound(k, PARABOLIC_EPS)?;
        let y_hi = k as f64 / (2.0 * PI);
        if y_hi < c.y {
            continue;
        }
        for j in 0..=20 {
            let y = c.y + (y_hi - c.y) * j as f64 / 20.0;
            worst = worst.max(parabolic_direct(y, k, PARABOLIC_EPS) / bound);
            points += 1;
        }
    }
    Ok(vec![item(None, "parabolic-direct", worst <= 1.0, points, worst, 1.0, "max direct sum / closed-form bound on [Y, k/2pi]".into())])
}

/// Termwise transfer inequality `σ(z,γz)^{−δ₂} ≤ T · σ(z₀,γz₀)^{−δ₁−1}` for `c ≠ 0`.
fn faddeev_items() -> Result<Vec<VerifyItem>> {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for x in [-0.5, 0.0, 0.3] {
        for y0 in [0.9, 2.0] {
            let z0 = UhpPoint::at(x, y0);
            let elements: Vec<IntegerMoebius> = enumerate_ball(z0, 200.0).into_iter().filter(|g| g.c != 0).collect();
            for factor in [2.0, 3.0, 5.0] {
                let z = UhpPoint::at(x, factor * y0);
                for (d1, d2) in [(0.5, 2.0), (1.0, 2.0), (2.0, 3.5), (1.5, 6.0)] {
                    let t = faddeev_transfer(y0, z.y, d1, d2)?;
                    for g in &elements {
                        let lhs = g.displacement_at(z).powf(-d2);
                        let rhs = t * g.displacement_at(z0).powf(-d1 - 1.0);
                        worst = worst.max(lhs / rhs);
                        points += 1;
                    }
                }
            }
        }
    }
    Ok(vec![item(None, "faddeev-termwise", worst <= 1.0 + ROUNDING, points, worst, 1.0, "max lhs / rhs over gamma with c != 0".into())])
}

fn published_bound(k: u32) -> f64 {
    let p = PUBLISHED_MODULAR;
    let m = (2 * k - 1) as f64;
    p.elliptic_coefficient * m / (4.0 * PI) + p.decay_coefficient * m * p.sigma_y.powi(-(k as i32 - 2))
}

fn invariance_worst(basis: &CuspFormBasis) -> Result<f64> {
    let gens = [
        IntegerMoebius { a: 0, b: -1, c: 1, d: 0 },
        IntegerMoebius { a: 1, b: 1, c: 0, d: 1 },
        IntegerMoebius { a: 1, b: 0, c: 1, d: 1 },
        IntegerMoebius { a: 2, b: 1, c: 1, d: 1 },
        IntegerMoebius { a: 1, b: -1, c: 2, d: -1 },
    ];
    let mut worst: f64 = 0.0;
    for z in [UhpPoint::at(0.21, 1.1), UhpPoint::at(-0.37, 0.95), UhpPoint::at(0.05, 1.6)] {
        let s = basis.s2k(z)?;
        for g in gens {
            worst = worst.max((basis.s2k(g.apply(z))? - s).abs() / s);
        }
    }
    Ok(worst)
}

fn weight_items(d: &FundamentalDomain, c: &EffectiveConstants, weight: u32, grid: usize) -> Result<(Vec<VerifyItem>, WeightSummary)> {
    let k = weight / 2;
    let w = Some(weight);
    let basis = build_basis(weight).map_err(Error::at("cusp form basis"))?;
    let samples = sample_grid(d, c.y, grid, k)?;
    let values: Vec<f64> = samples.points.par_iter().map(|&z| basis.s2k(z)).collect::<Result<_>>()?;
    let (imax, &smax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Precondition("empty grid".into()))?;

    let rows = bound_report(d, c, k, k)?.rows;
    let row_for = |tag: RegionTag| rows.iter().find(|r| r.region == tag);
    let mut ratio: f64 = 0.0;
    for (s, tag) in values.iter().zip(&samples.tags) {
        let row = row_for(*tag).ok_or_else(|| Error::MissingData(format!("no bound row for {tag}")))?;
        ratio = ratio.max(s / row.upper);
    }
    let argmax_row = row_for(samples.tags[imax]).expect("row looked up above");
    let published = published_bound(k);
    let dim = d.dimension_d2k(k as i64)?;
    let lower = dim as f64 / c.covolume - LOWER_SLACK;
    let (mass_raw, mass_tail) = basis.mass(&shifted_region(), Tolerance::relative(1e-9))?;
    let mass = (mass_raw + mass_tail) / basis.petersson_norm;
    let inv = invariance_worst(&basis)?;
    let n = values.len();

    let items = vec![
        item(w, "engine-bound", ratio <= 1.0, n, ratio, 1.0, format!("max S / engine bound for the point's region; argmax branch {}", argmax_row.source.label())),
        item(w, "published-bound", smax <= published, n, smax, published, "grid max of S".into()),
        item(w, "lower-bound", smax >= lower, n, smax, lower, format!("grid max vs d/vol - {LOWER_SLACK}")),
        item(w, "mass-identity", (mass - dim as f64).abs() <= MASS_TOL, 1, mass, dim as f64, format!("integral over a second fundamental domain, tolerance {MASS_TOL}")),
        item(w, "invariance", inv <= INVARIANCE_TOL, 15, inv, INVARIANCE_TOL, "max relative change under group elements".into()),
    ];
    let z = samples.points[imax];
    let summary = WeightSummary {
        weight,
        grid_points: n,
        grid_max: smax,
        argmax: [z.x, z.y],
        argmax_region: samples.tags[imax],
        branch: argmax_row.source,
        engine_bound: argmax_row.upper,
        published_bound: published,
        lower_bound: lower + LOWER_SLACK,
        petersson_norm: basis.petersson_norm,
        mass,
    };
    Ok((items, summary))
}

/// All checks for the modular group with truncation parameter `Y0`.
pub fn verify_domain(d: &FundamentalDomain, y0: f64, weights: &[u32], grid: usize) -> Result<VerificationReport> {
    if !d.is_modular_group() {
        return Err(Error::UnsupportedVerification);
    }
    if let Some(&w) = weights.iter().find(|w| !SUPPORTED_WEIGHTS.contains(w)) {
        return Err(Error::UnsupportedWeight(w as i64 / 2));
    }
    if weights.is_empty() {
        return Ok(VerificationReport::default());
    }
    let c = compute_constants(d, y0)?;
    let mut items = counting_items(&c);
    items.extend(poincare_items(&c)?);
    items.extend(parabolic_items(&c)?);
    items.extend(faddeev_items()?);
    let mut ws: Vec<u32> = weights.to_vec();
    ws.sort_unstable();
    ws.dedup();
    let per_weight: Vec<(Vec<VerifyItem>, WeightSummary)> =
        ws.par_iter().map(|&w| weight_items(d, &c, w, grid)).collect::<Result<_>>()?;
    let mut weights_out = Vec::new();
    for (its, s) in per_weight {
        items.extend(its);
        weights_out.push(s);
    }
    items.sort_by(|a, b| (a.weight, &a.name).cmp(&(b.weight, &b.name)));
    Ok(VerificationReport { items, weights: weights_out })
}

/// [`verify_domain`] on the bundled modular group with `Y0 = 2`.
pub fn verify_all(weights: &[u32], grid: usize) -> Result<VerificationReport> {
    verify_domain(&crate::domain::psl2z(), 2.0, weights, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::psl2z;
    use crate::kernels::parabolic_sum_bound;
    use proptest::prelude::*;

    fn constants() -> EffectiveConstants {
        compute_constants(&psl2z(), 2.0).unwrap()
    }

    #[test]
    fn counting_at_i() {
        let c = constants();
        let chk = counting_check(UhpPoint::i(), 10.0, &c);
        assert!((chk.bound - 652.75).abs() < 0.1, "{}", chk.bound);
        assert!(chk.passed() && chk.count < 200);
        assert_eq!(counting_check(UhpPoint::i(), 1.0, &c).count, 2);
    }

    #[test]
    fn order_three_point_contributes_two_unit_terms() {
        let rho = base_points()[1];
        let p = poincare_direct(rho, 3, 0.1, 1.0 + 1e-9, 5.0);
        assert!((p.partial - 2.0).abs() < 1e-6);
    }

    #[test]
    fn poincare_sum_at_i_within_bound() {
        let c = constants();
        for k in [2, 10] {
            let p = poincare_direct(UhpPoint::i(), k, 0.1, if k == 2 { 1e4 } else { 1e3 }, c.b_y);
            let bound = poincare_bound_compact(k, 0.1, c.b_y, c.sigma_y, c.elliptic_excess).unwrap();
            assert!(p.total() <= bound, "k = {k}: {} > {bound}", p.total());
        }
    }

    #[test]
    fn parabolic_at_the_top_of_the_range() {
        let y = 26.0 / (2.0 * PI);
        let s = parabolic_direct(y, 26, 0.01);
        assert!(s <= parabolic_sum_bound(26, 0.01).unwrap());
        assert!(parabolic_direct(1e-3, 26, 0.01) < 1e-100);
    }

    #[test]
    fn grid_lies_in_the_domain() {
        let d = psl2z();
        let g = sample_grid(&d, 4.13118, 20, 30).unwrap();
        assert_eq!(g.points.len(), 420);
        assert!(g.points.iter().all(|&z| d.contains(z).unwrap()));
        assert!(g.tags.contains(&RegionTag::Cusp(0)));
    }

    #[test]
    fn empty_weight_list() {
        let r = verify_all(&[], 10).unwrap();
        assert!(r.items.is_empty() && r.all_passed());
        assert!(matches!(verify_all(&[14], 10), Err(Error::UnsupportedWeight(7))));
    }

    #[test]
    fn small_grid_passes() {
        let r = verify_all(&[12, 26], 20).unwrap();
        assert!(r.all_passed(), "{}", r.table());
        let w26 = r.weights.iter().find(|s| s.weight == 26).unwrap();
        assert_ne!(w26.branch, BoundSource::CuspParabolic);
        let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn parabolic_sum_grows_with_height(y in 0.5f64..8.0, k in 2u32..40) {
            let a = parabolic_direct(y, k, 0.1);
            let b = parabolic_direct(y * 1.1, k, 0.1);
            prop_assert!(b >= a);
        }
    }
}
