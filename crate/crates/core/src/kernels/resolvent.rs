//! Resolvent kernel `G_k(s;σ)` via its hypergeometric series, and the
//! difference kernel `g_k(s;σ) = G_k(s;σ) − G_k(s+1;σ)` computed two ways.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::radial::Radial;
use super::special::ln_gamma;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, Tolerance};

const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 1_000_000;

/// Relative agreement demanded between the two routes to `g_k`.
pub const GK_AGREEMENT_TOL: f64 = 1e-6;

fn check_args(k: u32, s: f64, sigma: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if !(s > k as f64) || !s.is_finite() {
        return Err(Error::Domain(format!("need s > k, got s = {s}, k = {k}")));
    }
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("kernel is singular at sigma <= 1 (got {sigma})")));
    }
    Ok(())
}

/// `F(a, b; c; x)` by its defining series; all terms are positive here.
fn hypergeometric_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term < SERIES_REL_TOL * sum {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: SERIES_MAX_TERMS, partial: sum })
}

/// `G_k(s;σ) = σ^{−s} Γ(s+k)Γ(s−k) / (4πΓ(2s)) · F(s+k, s−k; 2s; 1/σ)`.
pub fn resolvent_g(k: u32, s: f64, sigma: f64) -> Result<f64> {
    check_args(k, s, sigma)?;
    let kf = k as f64;
    let ln_pref = -s * sigma.ln() + ln_gamma(s + kf)? + ln_gamma(s - kf)? - ln_gamma(2.0 * s)? - (4.0 * PI).ln();
    let f = hypergeometric_2f1(s + kf, s - kf, 2.0 * s, 1.0 / sigma)?;
    Ok(ln_pref.exp() * f)
}

/// Both evaluations of `g_k(s;σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GkPair {
    /// `G_k(s) − G_k(s+1)` from the series.
    pub series: f64,
    /// Radial integral representation.
    pub integral: f64,
}

impl GkPair {
    pub fn relative_gap(&self) -> f64 {
        (self.series - self.integral).abs() / self.series.abs().max(f64::MIN_POSITIVE)
    }
}

/// `G_k(s) − G_k(s+1)` from the hypergeometric series.
pub fn g_k_series(k: u32, s: f64, sigma: f64) -> Result<f64> {
    Ok(resolvent_g(k, s, sigma)? - resolvent_g(k, s + 1.0, sigma)?)
}

/// `(1/2π√2) ∫_ρ^∞ (e^{−(s−½)r} − e^{−(s+½)r}) / √(cosh r − cosh ρ) · T_{2k}(cosh(r/2)/cosh(ρ/2)) dr`
/// with `σ = cosh²(ρ/2)`.
pub fn g_k_integral(k: u32, s: f64, sigma: f64) -> Result<f64> {
    check_args(k, s, sigma)?;
    let rad = Radial::new(2.0 * sigma.sqrt().acosh());
    let f = |u: f64| {
        let r = rad.r(u);
        let ln = -(s - 0.5) * r + (-(-r).exp_m1()).ln() + rad.ln_chebyshev(k, u) + rad.ln_jacobian(u);
        ln.exp()
    };
    let est = integrate_to_infinity(f, 0.0, 0.5, Tolerance::relative(1e-11))?;
    Ok(est.value / (2.0 * PI * SQRT_2))
}

/// `g_k(s;σ)` from the series, after checking it against the integral route.
pub fn g_k_difference(k: u32, s: f64, sigma: f64) -> Result<f64> {
    let pair = g_k_pair(k, s, sigma)?;
    if pair.relative_gap() > GK_AGREEMENT_TOL {
        return Err(Error::Consistency { left: pair.series, right: pair.integral });
    }
    Ok(pair.series)
}

pub fn g_k_pair(k: u32, s: f64, sigma: f64) -> Result<GkPair> {
    Ok(GkPair { series: g_k_series(k, s, sigma)?, integral: g_k_integral(k, s, sigma)? })
}

/// Left side of the resolvent integral estimate at `s = k+ε`:
/// `∫_ρ^∞ (e^{−(s−½)r} − e^{−(s+½)r}) e^{kr} / √(cosh r − cosh ρ) dr`.
pub fn damped_radial_integral(k: u32, eps: f64, rho: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("need 0 < eps < 1, got {eps}")));
    }
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("need rho >= 0, got {rho}")));
    }
    let rad = Radial::new(rho);
    let s = k as f64 + eps;
    let f = |u: f64| {
        let r = rad.r(u);
        if r == 0.0 {
            return 0.0;
        }
        let ln = -(s - 0.5 - k as f64) * r + (-(-r).exp_m1()).ln() + rad.ln_jacobian(u);
        ln.exp()
    };
    Ok(integrate_to_infinity(f, 0.0, 0.5, Tolerance::relative(1e-10))?.value)
}

/// `(3√2/ε) e^{−ερ}`.
pub fn damped_radial_bound(eps: f64, rho: f64) -> f64 {
    3.0 * SQRT_2 / eps * (-eps * rho).exp()
}

/// `(3/(2πε)) σ^{−(k+ε)}`.
pub fn g_k_bound(k: u32, eps: f64, sigma: f64) -> f64 {
    3.0 / (2.0 * PI * eps) * sigma.powf(-(k as f64 + eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn leading_term_at_large_sigma() {
        for &(k, s) in &[(1u32, 2.0), (3, 3.4), (6, 6.1)] {
            let kf = k as f64;
            let lead = (ln_gamma(s + kf).unwrap() + ln_gamma(s - kf).unwrap() - ln_gamma(2.0 * s).unwrap()).exp()
                / (4.0 * PI);
            let sigma = 1e8f64;
            assert_relative_eq!(resolvent_g(k, s, sigma).unwrap() * sigma.powf(s), lead, max_relative = 1e-7);
        }
    }

    #[test]
    fn closed_form_oracle() {
        // 2F1(3, 1; 4; x) = −3(x²/2 + x + ln(1−x))/x³, so G_1(2;2) has an elementary value.
        let x: f64 = 0.5;
        let f = -3.0 * (x * x / 2.0 + x + (1.0 - x).ln()) / x.powi(3);
        let want = 0.25 * 2.0 * 1.0 / (4.0 * PI * 6.0) * f;
        assert_relative_eq!(resolvent_g(1, 2.0, 2.0).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(resolvent_g(1, 2.0, 1.0).is_err());
        assert!(resolvent_g(2, 2.0, 3.0).is_err());
        assert!(resolvent_g(0, 2.0, 3.0).is_err());
    }

    #[test]
    fn positive_on_grid() {
        for k in 1..=8u32 {
            for &e in &[0.05, 0.5, 2.0] {
                for &sigma in &[1.01, 1.5, 4.0, 100.0] {
                    assert!(resolvent_g(k, k as f64 + e, sigma).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn routes_agree_on_grid() {
        for &k in &[1u32, 2, 6] {
            for &e in &[0.1, 0.5] {
                for &sigma in &[1.5, 2.0, 10.0] {
                    let p = g_k_pair(k, k as f64 + e, sigma).unwrap();
                    assert!(p.relative_gap() <= GK_AGREEMENT_TOL, "k={k} e={e} sigma={sigma}: {p:?}");
                    assert!(p.series <= g_k_bound(k, e, sigma));
                }
            }
        }
    }

    #[test]
    fn damped_integral_closed_form_at_zero() {
        // at ρ = 0 the integrand collapses to √2 e^{−εr}
        for &eps in &[0.1, 0.3, 0.9] {
            assert_relative_eq!(damped_radial_integral(4, eps, 0.0).unwrap(), SQRT_2 / eps, max_relative = 1e-9);
        }
    }
}
