//! Grid property suites over the kernel layer, shared by `kernel-check` and the tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;

/// One named check with its worst observed margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Points evaluated.
    pub points: usize,
    /// Worst value of the checked statistic (a relative error or a lhs/rhs ratio).
    pub worst: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub items: Vec<CheckItem>,
}

impl KernelReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

#[derive(Clone, Debug)]
pub struct KernelSuiteConfig {
    /// Largest weight parameter in the grids.
    pub k_max: u32,
    /// Relative tolerance for the heat-kernel transform identity.
    pub transform_tol: f64,
    /// Relative tolerance for the two routes to `g_k`.
    pub gk_tol: f64,
}

impl Default for KernelSuiteConfig {
    fn default() -> Self {
        KernelSuiteConfig { k_max: 12, transform_tol: 1e-4, gk_tol: GK_AGREEMENT_TOL }
    }
}

/// `(k, s, σ)` triples for the transform identity.
pub const TRANSFORM_TRIPLES: [(u32, f64, f64); 3] = [(1, 2.0, 2.0), (2, 2.5, 1.5), (3, 3.5, 5.0)];
pub const GK_EPS: [f64; 2] = [0.1, 0.5];
pub const GK_SIGMA: [f64; 3] = [1.5, 2.0, 10.0];

fn gk_weights(k_max: u32) -> Vec<u32> {
    let mut ks: Vec<u32> = [1, 2, 6].into_iter().filter(|&k| k <= k_max.max(6)).collect();
    for extra in [12, 25, 50] {
        if extra <= k_max {
            ks.push(extra);
        }
    }
    ks
}

/// Run a grid; `stat` returns `(statistic, ok)` per point. Failures to evaluate count as failed points.
fn grid<P: Sync, F>(name: &str, points: &[P], stat: F) -> CheckItem
where
    F: Fn(&P) -> crate::Result<(f64, bool)> + Sync,
{
    let results: Vec<_> = points.par_iter().map(&stat).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut failed = 0;
    let mut first_error = None;
    for r in results {
        match r {
            Ok((v, ok)) => {
                worst = worst.max(v);
                if !ok {
                    failed += 1;
                }
            }
            Err(e) => {
                failed += 1;
                first_error.get_or_insert(e.to_string());
            }
        }
    }
    let detail = match first_error {
        Some(e) => format!("{failed} failing points; first error: {e}"),
        None if failed > 0 => format!("{failed} failing points"),
        None => String::new(),
    };
    CheckItem { name: name.to_string(), passed: failed == 0, points: points.len(), worst, detail }
}

/// `T_{2k}(cosh(r/2)) ≤ e^{kr}` for r in [0, 10], k ≤ k_max; statistic is `ln T − kr`.
pub fn check_chebyshev(k_max: u32) -> CheckItem {
    let pts: Vec<(u32, f64)> = (1..=k_max.max(1)).flat_map(|k| (0..=200).map(move |i| (k, 0.05 * i as f64))).collect();
    grid("chebyshev exponential bound", &pts, |&(k, r)| {
        let lhs = special::ln_t2k_from_acosh(k, r / 2.0);
        let gap = lhs - k as f64 * r;
        Ok((gap, gap <= 1e-12))
    })
}

/// Heat-kernel transform reproduces the resolvent; statistic is the relative error.
pub fn check_transform(tol: f64) -> CheckItem {
    grid("heat transform equals resolvent", &TRANSFORM_TRIPLES, |&(k, s, sigma)| {
        let g = resolvent_g(k, s, sigma)?;
        let h = heat_transform(k, s, sigma)?;
        let rel = (g - h).abs() / g.abs();
        Ok((rel, rel <= tol))
    })
}

fn gk_grid(k_max: u32) -> Vec<(u32, f64, f64)> {
    let mut pts = Vec::new();
    for k in gk_weights(k_max) {
        for eps in GK_EPS {
            for sigma in GK_SIGMA {
                pts.push((k, eps, sigma));
            }
        }
    }
    pts
}

/// Series and integral routes to `g_k` agree; statistic is the relative gap.
pub fn check_gk_agreement(k_max: u32, tol: f64) -> CheckItem {
    grid("g_k series vs integral", &gk_grid(k_max), |&(k, eps, sigma)| {
        let p = g_k_pair(k, k as f64 + eps, sigma)?;
        let gap = p.relative_gap();
        Ok((gap, gap <= tol))
    })
}

/// `g_k(k+ε;σ) ≤ (3/2πε) σ^{−(k+ε)}`; statistic is lhs/rhs.
pub fn check_gk_bound(k_max: u32) -> CheckItem {
    grid("g_k resolvent bound", &gk_grid(k_max), |&(k, eps, sigma)| {
        let ratio = g_k_series(k, k as f64 + eps, sigma)? / g_k_bound(k, eps, sigma);
        Ok((ratio, ratio <= 1.0))
    })
}

/// Damped radial integral `≤ (3√2/ε) e^{−ερ}`; statistic is lhs/rhs.
pub fn check_damped_integral(k_max: u32) -> CheckItem {
    let mut pts = Vec::new();
    for k in gk_weights(k_max) {
        for eps in [0.05, 0.1, 0.5, 0.9] {
            for rho in [0.0, 0.3, 1.0, 2.5, 6.0] {
                pts.push((k, eps, rho));
            }
        }
    }
    grid("damped radial integral bound", &pts, |&(k, eps, rho)| {
        let ratio = damped_radial_integral(k, eps, rho)? / damped_radial_bound(eps, rho);
        Ok((ratio, ratio <= 1.0))
    })
}

/// Effective Stirling bound on a log grid of Z in [1, 1e6]; statistic is ratio/bound.
pub fn check_stirling() -> CheckItem {
    let pts: Vec<f64> = (0..200).map(|i| 10f64.powf(6.0 * i as f64 / 199.0)).collect();
    grid("effective Stirling bound", &pts, |&z| {
        let g = gamma_ratio_bound(z)?;
        Ok((g.ratio / g.bound, g.holds()))
    })
}

/// Heat kernel is nonincreasing in ρ and bounded by its value at ρ = 0.
/// Statistic is the largest relative increase between consecutive ρ samples.
pub fn check_heat_monotone(k_max: u32) -> CheckItem {
    let mut pts = Vec::new();
    for k in [1, 2, 6.min(k_max.max(1))] {
        for t in [0.1, 0.5, 1.0, 2.0] {
            pts.push((k, t));
        }
    }
    pts.dedup();
    grid("heat kernel monotone in rho", &pts, |&(k, t)| {
        let at0 = heat_kernel(k, t, 0.0)?;
        let mut prev = at0;
        let mut worst = f64::NEG_INFINITY;
        for i in 1..=12 {
            let v = heat_kernel(k, t, 0.25 * i as f64)?;
            worst = worst.max((v - prev) / prev).max((v - at0) / at0);
            prev = v;
        }
        Ok((worst, worst <= 1e-9))
    })
}

/// Closed form of the digamma combination against four digamma calls.
pub fn check_digamma_combo(k_max: u32) -> CheckItem {
    let pts: Vec<(u32, f64)> =
        (1..=k_max.max(1)).flat_map(|k| [0.01, 0.1, 0.5, 0.99].into_iter().map(move |e| (k, e))).collect();
    grid("digamma combination closed form", &pts, |&(k, e)| {
        let a = digamma_combo(k, e)?;
        let b = digamma_combo_direct(k, e)?;
        let rel = (a - b).abs() / a.abs();
        Ok((rel, rel <= 1e-9 && a < 0.0))
    })
}

/// Every suite, in a fixed order.
pub fn run(cfg: &KernelSuiteConfig) -> KernelReport {
    let items = vec![
        check_chebyshev(cfg.k_max.max(50)),
        check_transform(cfg.transform_tol),
        check_gk_agreement(cfg.k_max, cfg.gk_tol),
        check_gk_bound(cfg.k_max),
        check_damped_integral(cfg.k_max),
        check_stirling(),
        check_heat_monotone(cfg.k_max),
        check_digamma_combo(cfg.k_max),
    ];
    KernelReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let rep = run(&KernelSuiteConfig::default());
        for item in &rep.items {
            assert!(item.passed, "{item:?}");
        }
    }

    #[test]
    fn absurd_tolerance_fails() {
        let item = check_transform(1e-16);
        assert!(!item.passed || item.worst == 0.0);
    }
}
