//! Special functions and the hyperbolic kernels (resolvent, heat, and the
//! difference kernel), plus the closed-form estimates built on them.

mod heat;
mod radial;
mod resolvent;
pub mod special;
pub mod suite;

pub use heat::{heat_kernel, heat_transform};
pub use resolvent::{
    damped_radial_bound, damped_radial_integral, g_k_bound, g_k_difference, g_k_integral, g_k_pair, g_k_series,
    resolvent_g, GkPair, GK_AGREEMENT_TOL,
};
pub use special::{
    chebyshev_t2k, digamma, digamma_combo, digamma_combo_direct, gamma_ratio_bound, ln_gamma, r_factor, GammaRatio,
};

use crate::error::{Error, Result};

/// Closed-form bound `k e^{5/4} / (√π √(k+ε))` on the parabolic part of the Poincaré series.
pub fn parabolic_sum_bound(k: u32, eps: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("need eps >= 0, got {eps}")));
    }
    let z = k as f64 + eps;
    Ok(k as f64 * gamma_ratio_bound(z)?.bound / std::f64::consts::PI.sqrt())
}

/// The intermediate quantity `(k/√π) Γ(k−½+ε)/Γ(k+ε)` bounded by [`parabolic_sum_bound`].
pub fn parabolic_sum_gamma_form(k: u32, eps: f64) -> Result<f64> {
    let z = k as f64 + eps;
    Ok(k as f64 * gamma_ratio_bound(z)?.ratio / std::f64::consts::PI.sqrt())
}

/// Factor `(64/15)^{δ₂−δ₁−1} y₀^{−2δ₁−2} y^{−2δ₂+4δ₁+4}` transferring a sum at height `y₀`
/// to height `y ≥ 2y₀`.
pub fn faddeev_transfer(y0: f64, y: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(y0 > 0.0) || !(y >= 2.0 * y0) {
        return Err(Error::Domain(format!("need y >= 2 y0 > 0, got y0 = {y0}, y = {y}")));
    }
    if !(d1 > 0.0) || !(d2 >= d1 + 1.0) {
        return Err(Error::Domain(format!("need d2 >= d1 + 1 and d1 > 0, got d1 = {d1}, d2 = {d2}")));
    }
    let ln = (d2 - d1 - 1.0) * (64.0f64 / 15.0).ln() - (2.0 * d1 + 2.0) * y0.ln() + (-2.0 * d2 + 4.0 * d1 + 4.0) * y.ln();
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parabolic_bound_values() {
        let b = parabolic_sum_bound(26, 0.0).unwrap();
        assert_relative_eq!(b, 26f64.sqrt() * 1.25f64.exp() / std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        for k in 1..60 {
            for &e in &[0.0, 0.01, 0.5] {
                assert!(parabolic_sum_gamma_form(k, e).unwrap() <= parabolic_sum_bound(k, e).unwrap());
            }
        }
    }

    #[test]
    fn faddeev_factor() {
        // d2 = d1 + 1 leaves only the height powers
        let f = faddeev_transfer(2.0, 5.0, 1.5, 2.5).unwrap();
        assert_relative_eq!(f, 2f64.powf(-5.0) * 5f64.powf(5.0), max_relative = 1e-13);
        assert!(faddeev_transfer(2.0, 3.0, 1.0, 2.0).is_err());
        assert!(faddeev_transfer(1.0, 3.0, 1.0, 1.5).is_err());
        // (64/15)^{k−2} = Y^{2k−4}/4^{k−2} at Y = 16/√15
        let y = 16.0 / 15f64.sqrt();
        for k in 2..40 {
            let lhs = (64.0f64 / 15.0).powi(k - 2);
            let rhs = y.powi(2 * k - 4) / 4f64.powi(k - 2);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }
}
