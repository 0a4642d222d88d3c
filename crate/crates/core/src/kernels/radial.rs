//! Shared change of variables for radial integrals `∫_ρ^∞ f(r) / √(cosh r − cosh ρ) dr`.
//!
//! With `r = ρ + u²` the inverse square root singularity at `r = ρ` is absorbed
//! by the Jacobian `2u`, leaving a smooth integrand in `u`. Everything is kept
//! in log form so that large `k` or large `r` never overflow.

use super::special::{ln_cosh, ln_sinh, ln_t2k_from_acosh};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Radial {
    pub rho: f64,
    ln_cosh_half_rho: f64,
}

impl Radial {
    pub fn new(rho: f64) -> Self {
        Radial { rho, ln_cosh_half_rho: ln_cosh(rho / 2.0) }
    }

    pub fn r(&self, u: f64) -> f64 {
        self.rho + u * u
    }

    /// `ln( 2u / √(cosh r − cosh ρ) )`, using
    /// `cosh r − cosh ρ = 2 sinh(ρ + u²/2) sinh(u²/2)`.
    pub fn ln_jacobian(&self, u: f64) -> f64 {
        let v = 0.5 * u * u;
        // ln √(v / sinh v), equal to 0 in the limit v → 0
        let ratio = if v == 0.0 { 0.0 } else { 0.5 * (v.ln() - ln_sinh(v)) };
        std::f64::consts::LN_2 + ratio - 0.5 * ln_sinh(self.rho + v)
    }

    /// `arccosh( cosh(r/2) / cosh(ρ/2) )`, accurate near `r = ρ`.
    pub fn acosh_ratio(&self, u: f64) -> f64 {
        let r = self.r(u);
        let ln_x = ln_cosh(r / 2.0) - self.ln_cosh_half_rho;
        if ln_x < 0.5 {
            // x − 1 = 2 sinh((r+ρ)/4) sinh((r−ρ)/4) / cosh(ρ/2), no cancellation
            let t = 2.0 * ((r + self.rho) / 4.0).sinh() * (u * u / 4.0).sinh() / (self.rho / 2.0).cosh();
            (t + (t * (t + 2.0)).sqrt()).ln_1p()
        } else {
            // arccosh x = ln x + ln(1 + √(1 − x⁻²))
            ln_x + (1.0 + (1.0 - (-2.0 * ln_x).exp()).sqrt()).ln()
        }
    }

    /// `ln T_{2k}( cosh(r/2) / cosh(ρ/2) )`.
    pub fn ln_chebyshev(&self, k: u32, u: f64) -> f64 {
        ln_t2k_from_acosh(k, self.acosh_ratio(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobian_matches_direct_form() {
        let rad = Radial::new(1.3);
        for &u in &[0.1, 0.7, 2.0, 5.0] {
            let r = rad.r(u);
            let direct = 2.0 * u / (r.cosh() - 1.3f64.cosh()).sqrt();
            assert_relative_eq!(rad.ln_jacobian(u).exp(), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn acosh_ratio_both_branches() {
        let rad = Radial::new(0.8);
        for &u in &[1e-4, 0.3, 1.0, 3.0, 8.0] {
            let r = rad.r(u);
            let direct = ((r / 2.0).cosh() / 0.4f64.cosh()).acosh();
            assert_relative_eq!(rad.acosh_ratio(u), direct, max_relative = 1e-8);
        }
    }
}
