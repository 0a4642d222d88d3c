//! Closed-form bounds. Every function here is a direct formula evaluation with
//! argument checks; orchestration lives in the parent module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const E_5_4: f64 = 3.490_342_957_461_841_4; // e^{5/4}

fn check_eps_unit(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon {eps} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    Ok(())
}

/// `Y = max{2 Y0, 16/√15}`.
pub fn truncation_height(y0: f64) -> Result<f64> {
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(Error::Domain(format!("Y0 = {y0} must be positive")));
    }
    Ok((2.0 * y0).max(16.0 / 15f64.sqrt()))
}

/// Lower bounds for `σ(z, γz)` per kind of group element; `None` marks a kind
/// that cannot occur for the domain (no torsion, no cusps).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaBranches {
    pub hyperbolic: f64,
    pub elliptic: Option<f64>,
    pub parabolic_low: Option<f64>,
    pub parabolic_high: Option<f64>,
}

impl SigmaBranches {
    pub fn min(&self) -> f64 {
        [self.elliptic, self.parabolic_low, self.parabolic_high]
            .into_iter()
            .flatten()
            .fold(self.hyperbolic, f64::min)
    }
}

/// The four branch values `(cosh ℓ + 1)/2`, `sinh²μ sin²(θ/2) + 1`,
/// `m_Y²/4 + 1`, `1/(4 M_Y²) + 1`.
pub fn sigma_y_branches(ell: f64, mu: Option<f64>, theta: Option<f64>, heights: Option<(f64, f64)>) -> SigmaBranches {
    SigmaBranches {
        hyperbolic: 0.5 * (ell.cosh() + 1.0),
        elliptic: mu.zip(theta).map(|(m, t)| (m.sinh() * (0.5 * t).sin()).powi(2) + 1.0),
        parabolic_low: heights.map(|(m, _)| 0.25 * m * m + 1.0),
        parabolic_high: heights.map(|(_, big)| 0.25 / (big * big) + 1.0),
    }
}

/// `e^{diam/2} / vol`.
pub fn b_y(diam: f64, vol: f64) -> Result<f64> {
    if !(vol > 0.0) || !diam.is_finite() {
        return Err(Error::Domain(format!("need diam finite and vol > 0, got {diam}, {vol}")));
    }
    Ok((0.5 * diam).exp() / vol)
}

/// `π Y0^{−4−2ε} B_{Y0} 4^{−k+3} (2+ε)/(1+ε) (k/2π)^{4+2ε}`.
pub fn b_k_y0(k: u32, y0: f64, b_y0: f64, eps: f64) -> Result<f64> {
    if k < 1 || !(y0 > 0.0) || !(eps > 0.0) {
        return Err(Error::Domain(format!("need k >= 1, Y0 > 0, eps > 0 (k={k}, Y0={y0}, eps={eps})")));
    }
    let p = 4.0 + 2.0 * eps;
    let ln = PI.ln() - p * y0.ln() + b_y0.ln() + (3.0 - k as f64) * 4f64.ln() + ((2.0 + eps) / (1.0 + eps)).ln()
        + p * (k as f64 / (2.0 * PI)).ln();
    Ok(ln.exp())
}

/// The `ε → 0` limit `2π Y0^{−4} B_{Y0} 4^{−k+3} (k/2π)^4`.
pub fn b_k_y0_limit(k: u32, y0: f64, b_y0: f64) -> Result<f64> {
    if k < 1 || !(y0 > 0.0) {
        return Err(Error::Domain(format!("need k >= 1 and Y0 > 0 (k={k}, Y0={y0})")));
    }
    let ln = (2.0 * PI).ln() - 4.0 * y0.ln() + b_y0.ln() + (3.0 - k as f64) * 4f64.ln()
        + 4.0 * (k as f64 / (2.0 * PI)).ln();
    Ok(ln.exp())
}

/// Bound for `Σ_{γ≠id} σ(z,γz)^{−(k+ε)}` on the compact part.
pub fn poincare_bound_compact(k: u32, eps: f64, b_y: f64, sigma_y: f64, elliptic_excess: u32) -> Result<f64> {
    check_weight(k)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("epsilon {eps} must be positive")));
    }
    Ok(4.0 * PI * (2.0 + eps) / (1.0 + eps) * b_y * sigma_y.powi(-(k as i32 - 2)) + elliptic_excess as f64)
}

/// Bound for `S_{2k}(z)` in terms of a bound `p` for the Poincaré series.
pub fn spectral_gap_bound(k: u32, eps: f64, p: f64) -> Result<f64> {
    check_eps_unit(eps)?;
    if k < 1 || !(p >= 0.0) {
        return Err(Error::Domain(format!("need k >= 1 and P >= 0 (k={k}, P={p})")));
    }
    let (k, e) = (k as f64, eps);
    Ok((2.0 * k - 1.0 + e) * (1.0 + e) / (4.0 * PI)
        + 3.0 * (2.0 * k + e) * (2.0 * k - 1.0 + e) * (1.0 + e) / (4.0 * PI * (k + e)) * p)
}

/// The `ε → 0` limit of [`spectral_gap_bound`].
pub fn spectral_gap_bound_limit(k: u32, p: f64) -> f64 {
    let k = k as f64;
    (2.0 * k - 1.0) / (4.0 * PI) + 3.0 * (2.0 * k - 1.0) / (2.0 * PI) * p
}

/// Two summands of the compact-part bound, kept apart for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactBound {
    /// `(2k−1)/4π · (1 + 6 Σ(n_j − 1))`
    pub elliptic_term: f64,
    /// `12 (2k−1) B_Y σ_Y^{−(k−2)}`
    pub decay_term: f64,
}

impl CompactBound {
    pub fn total(&self) -> f64 {
        self.elliptic_term + self.decay_term
    }
}

/// Upper bound for `S_{2k}` on the compact part.
pub fn sup_bound_compact(k: u32, b_y: f64, sigma_y: f64, elliptic_excess: u32) -> Result<CompactBound> {
    check_weight(k)?;
    let w = 2.0 * k as f64 - 1.0;
    Ok(CompactBound {
        elliptic_term: w / (4.0 * PI) * (1.0 + 6.0 * elliptic_excess as f64),
        decay_term: 12.0 * w * b_y * sigma_y.powi(-(k as i32 - 2)),
    })
}

/// Outcome for a cusp neighbourhood: either the compact bound carries over by the
/// maximum principle (`Y ≥ k/2π`), or the explicit cusp formula applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CuspBound {
    UseCompact,
    Explicit(f64),
}

/// `(2k−1)/4π + 3(2k−1)/2π · (B_{k,Y0} + √k e^{5/4}/√π)` when `Y < k/2π`.
pub fn sup_bound_cusp(k: u32, y0: f64, b_y0: f64) -> Result<CuspBound> {
    check_weight(k)?;
    let y = truncation_height(y0)?;
    if y >= k as f64 / (2.0 * PI) {
        return Ok(CuspBound::UseCompact);
    }
    let bk = b_k_y0_limit(k, y0, b_y0)?;
    let kf = k as f64;
    Ok(CuspBound::Explicit(spectral_gap_bound_limit(k, bk + kf.sqrt() * E_5_4 / PI.sqrt())))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocompactConstants {
    pub c_gamma: f64,
    pub delta_gamma: f64,
}

impl CocompactConstants {
    /// `(2k−1)/4π + C_Γ e^{−δ_Γ k}`.
    pub fn bound(&self, k: u32) -> f64 {
        (2.0 * k as f64 - 1.0) / (4.0 * PI) + self.c_gamma * (-self.delta_gamma * k as f64).exp()
    }
}

/// Constants of the exponential bound for compact torsion-free quotients.
pub fn cocompact_constants(genus: u32, ell: f64) -> Result<CocompactConstants> {
    if genus < 2 {
        return Err(Error::Domain(format!("genus {genus} < 2 has no compact torsion-free quotient")));
    }
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::Domain(format!("systole {ell} must be positive")));
    }
    let g = genus as f64;
    let s = 0.5 * (ell.cosh() + 1.0);
    let log_s = s.ln();
    Ok(CocompactConstants {
        c_gamma: 3.0 * (4.0 * PI * g / ell).exp() / (PI * (g - 1.0)) * (2.0 * s).powi(2) / log_s,
        delta_gamma: 0.5 * log_s,
    })
}

/// `(1+ε)²/4π + 3(1+ε)²(2+ε)/ε · B_Y`, valid for `Y ≥ 1/2π`.
pub fn sup_bound_weight2(eps: f64, y: f64, b_y: f64) -> Result<f64> {
    check_eps_unit(eps)?;
    if y < 1.0 / (2.0 * PI) {
        return Err(Error::Precondition(format!("weight 2 needs Y >= 1/(2 pi), got {y}")));
    }
    let q = (1.0 + eps).powi(2);
    Ok(q / (4.0 * PI) + 3.0 * q * (2.0 + eps) / eps * b_y)
}

pub const WEIGHT2_GRID: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight2Bound {
    pub eps: f64,
    pub bound: f64,
}

/// The weight-2 bound minimised over a log grid of `ε` in `(1e−3, 1 − 1e−3)`.
pub fn sup_bound_weight2_best(y: f64, b_y: f64) -> Result<Weight2Bound> {
    let (lo, hi) = (1e-3f64.ln(), (1.0 - 1e-3f64).ln());
    let mut best: Option<Weight2Bound> = None;
    for i in 0..WEIGHT2_GRID {
        let eps = (lo + (hi - lo) * i as f64 / (WEIGHT2_GRID - 1) as f64).exp();
        let bound = sup_bound_weight2(eps, y, b_y)?;
        if best.is_none_or(|b| bound < b.bound) {
            best = Some(Weight2Bound { eps, bound });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Grid points used by [`sup_bound_weight2_best`].
pub fn weight2_grid() -> Vec<f64> {
    let (lo, hi) = (1e-3f64.ln(), (1.0 - 1e-3f64).ln());
    (0..WEIGHT2_GRID).map(|i| (lo + (hi - lo) * i as f64 / (WEIGHT2_GRID - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn e_five_quarters() {
        assert_relative_eq!(E_5_4, 1.25f64.exp(), max_relative = 1e-15);
    }

    #[test]
    fn truncation() {
        assert_relative_eq!(truncation_height(2.0).unwrap(), 16.0 / 15f64.sqrt());
        assert_eq!(truncation_height(3.0).unwrap(), 6.0);
        assert!(truncation_height(0.0).is_err());
    }

    #[test]
    fn branch_values_for_modular_data() {
        let ell = 2.0 * 1.5f64.acosh();
        let mu = (5f64.sqrt() / 2.0).acosh();
        let y = 16.0 / 15f64.sqrt();
        let b = sigma_y_branches(ell, Some(mu), Some(2.0 * PI / 3.0), Some((3f64.sqrt() / 2.0, y)));
        assert_relative_eq!(b.hyperbolic, 2.25, max_relative = 1e-14);
        assert_relative_eq!(b.elliptic.unwrap(), 1.1875, max_relative = 1e-14);
        assert_relative_eq!(b.parabolic_low.unwrap(), 1.1875, max_relative = 1e-14);
        assert_relative_eq!(b.parabolic_high.unwrap(), 1.0 + 15.0 / 1024.0, max_relative = 1e-14);
        assert_relative_eq!(b.min(), 1.0 + 15.0 / 1024.0, max_relative = 1e-14);
        let bare = sigma_y_branches(ell, None, None, None);
        assert_eq!(bare.min(), 2.25);
    }

    #[test]
    fn b_y_values() {
        // 50-digit evaluations of the closed forms
        let a = 3f64.sqrt() / 2.0;
        let y = 16.0 / 15f64.sqrt();
        let d = |b: f64| (1.0 + (1.0 + (b - a) * (b - a)) / (2.0 * a * a)).acosh();
        assert_relative_eq!(b_y(d(y), PI / 3.0 - 1.0 / y).unwrap(), 5.194455337530586, max_relative = 1e-13);
        assert_relative_eq!(b_y(d(2.0), PI / 3.0 - 0.5).unwrap(), 4.021029387327822, max_relative = 1e-13);
        assert_relative_eq!(b_y(1.0, 2.0).unwrap(), 0.5 * b_y(1.0, 1.0).unwrap());
    }

    #[test]
    fn b_k_y0_oracles() {
        assert_relative_eq!(b_k_y0_limit(26, 2.0, 4.0209).unwrap(), 6.579263434063923e-12, max_relative = 1e-12);
        assert_relative_eq!(b_k_y0(26, 2.0, 4.0209, 0.3).unwrap(), 9.003053985501142e-12, max_relative = 1e-12);
        let lim = b_k_y0_limit(26, 2.0, 4.0209).unwrap();
        assert_relative_eq!(b_k_y0(26, 2.0, 4.0209, 1e-6).unwrap(), lim, max_relative = 1e-4);
        // the modular-group simplification 4^{−k+4}(k/2π)^4 dominates once B_{Y0} ≤ 4.022
        for k in 2..60 {
            let simple = 4f64.powi(4 - k as i32) * (k as f64 / (2.0 * PI)).powi(4);
            assert!(b_k_y0_limit(k, 2.0, 4.022).unwrap() <= simple * (1.0 + 1e-12));
        }
    }

    #[test]
    fn spectral_gap_oracles() {
        assert_relative_eq!(spectral_gap_bound(6, 0.1, 5.0).unwrap(), 29.88194065791173, max_relative = 1e-13);
        assert_relative_eq!(spectral_gap_bound(3, 0.2, 0.0).unwrap(), 5.2 * 1.2 / (4.0 * PI));
        assert!(spectral_gap_bound(3, 1.0, 1.0).is_err());
        assert!(spectral_gap_bound(3, 0.0, 1.0).is_err());
        let lim = spectral_gap_bound_limit(7, 2.5);
        assert_relative_eq!(spectral_gap_bound(7, 1e-9, 2.5).unwrap(), lim, max_relative = 1e-7);
    }

    #[test]
    fn compact_bounds() {
        assert_eq!(poincare_bound_compact(2, 0.1, 5.0, 7.0, 5).unwrap(), 4.0 * PI * 2.1 / 1.1 * 5.0 + 5.0);
        assert!(poincare_bound_compact(1, 0.1, 5.0, 7.0, 5).is_err());
        let c = sup_bound_compact(6, 5.194, 1.0146, 5).unwrap();
        assert_relative_eq!(c.elliptic_term, 31.0 * 11.0 / (4.0 * PI));
        assert_relative_eq!(c.decay_term, 12.0 * 11.0 * 5.194 * 1.0146f64.powi(-4));
        let free = sup_bound_compact(6, 5.194, 1.0146, 0).unwrap();
        assert_relative_eq!(free.elliptic_term, 11.0 / (4.0 * PI));
    }

    #[test]
    fn cusp_bound_gate_and_growth() {
        assert_eq!(sup_bound_cusp(25, 2.0, 4.021).unwrap(), CuspBound::UseCompact);
        let CuspBound::Explicit(v) = sup_bound_cusp(26, 2.0, 4.021).unwrap() else { panic!() };
        let k = 26.0;
        let want = (2.0 * k - 1.0) / (4.0 * PI)
            + 3.0 * (2.0 * k - 1.0) / (2.0 * PI) * (b_k_y0_limit(26, 2.0, 4.021).unwrap() + k.sqrt() * E_5_4 / PI.sqrt());
        assert_relative_eq!(v, want, max_relative = 1e-14);
        let limit = 3.0 * E_5_4 / (PI * PI.sqrt());
        let CuspBound::Explicit(big) = sup_bound_cusp(1_000_000, 2.0, 4.021).unwrap() else { panic!() };
        assert_relative_eq!(big / 1e9, limit, max_relative = 1e-3);
    }

    #[test]
    fn cocompact_oracles() {
        let c = cocompact_constants(2, 2.0 * 1.5f64.acosh()).unwrap();
        assert!((c.delta_gamma - 0.405465108108164).abs() < 1e-12);
        let c1 = cocompact_constants(2, 1.0).unwrap();
        assert_relative_eq!(c1.c_gamma, 2_113_863_869_303.296, max_relative = 1e-12);
        assert_relative_eq!(c1.delta_gamma, 0.12011450695827752, max_relative = 1e-13);
        assert!(cocompact_constants(1, 1.0).is_err());
    }

    #[test]
    fn weight_two() {
        assert_relative_eq!(sup_bound_weight2(0.5, 4.0, 5.194).unwrap(), 175.47654931097838, max_relative = 1e-13);
        assert!(sup_bound_weight2(0.5, 0.1, 5.194).is_err());
        let best = sup_bound_weight2_best(4.0, 5.194).unwrap();
        for e in weight2_grid() {
            assert!(best.bound <= sup_bound_weight2(e, 4.0, 5.194).unwrap());
        }
        let tiny = sup_bound_weight2(1e-6, 4.0, 5.194).unwrap();
        assert_relative_eq!(tiny * 1e-6, 6.0 * 5.194, max_relative = 1e-5);
    }

    proptest! {
        #[test]
        fn compact_bound_monotone(k in 2u32..80, b in 0.1f64..50.0, s in 1.0f64..3.0, ds in 0.0f64..1.0, db in 0.0f64..5.0) {
            let base = sup_bound_compact(k, b, s, 3).unwrap().total();
            prop_assert!(sup_bound_compact(k, b, s + ds, 3).unwrap().total() <= base);
            prop_assert!(sup_bound_compact(k, b + db, s, 3).unwrap().total() >= base);
        }

        #[test]
        fn delta_increases_with_systole(l in 0.01f64..10.0, dl in 1e-3f64..5.0) {
            let a = cocompact_constants(3, l).unwrap().delta_gamma;
            let b = cocompact_constants(3, l + dl).unwrap().delta_gamma;
            prop_assert!(b > a);
        }

        #[test]
        fn exponential_bound_exceeds_main_term(g in 2u32..6, l in 0.5f64..5.0, k in 2u32..200) {
            let c = cocompact_constants(g, l).unwrap();
            prop_assert!(c.bound(k) >= (2.0 * k as f64 - 1.0) / (4.0 * PI));
        }
    }
}
