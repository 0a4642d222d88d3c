//! Weight-k heat kernel `K_k(t;ρ)` and its integral transform back to `G_k`.

use std::f64::consts::{PI, SQRT_2};

use super::radial::Radial;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, Tolerance};

const HEAT_REL_TOL: f64 = 1e-10;

/// `∫_ρ^∞ r e^{−r²/4t} / √(cosh r − cosh ρ) · T_{2k}(…) dr · e^{shift}`, with the
/// factor `e^{−ρ²/4t}` already folded into `shift` by the caller.
fn heat_integral(k: u32, t: f64, rad: &Radial, ln_shift: f64, tol: f64) -> Result<f64> {
    let rho = rad.rho;
    let f = |u: f64| {
        let r = rad.r(u);
        if r == 0.0 {
            return 0.0;
        }
        let u2 = u * u;
        // r² − ρ² = u²(2ρ + u²)
        let ln = r.ln() - u2 * (2.0 * rho + u2) / (4.0 * t) + rad.ln_chebyshev(k, u) + rad.ln_jacobian(u) + ln_shift;
        ln.exp()
    };
    let h0 = 0.25 * (1.0 + t.sqrt());
    Ok(integrate_to_infinity(f, 0.0, h0, Tolerance::relative(tol))?.value)
}

fn check(k: u32, t: f64, rho: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("need rho >= 0, got {rho}")));
    }
    Ok(())
}

fn ln_prefactor(t: f64) -> f64 {
    SQRT_2.ln() - 1.5 * (4.0 * PI * t).ln()
}

/// `K_k(t;ρ) = √2 e^{−t/4}/(4πt)^{3/2} ∫_ρ^∞ r e^{−r²/4t} / √(cosh r − cosh ρ) · T_{2k}(cosh(r/2)/cosh(ρ/2)) dr`.
pub fn heat_kernel(k: u32, t: f64, rho: f64) -> Result<f64> {
    check(k, t, rho)?;
    let rad = Radial::new(rho);
    let shift = -t / 4.0 + ln_prefactor(t) - rho * rho / (4.0 * t);
    heat_integral(k, t, &rad, shift, HEAT_REL_TOL)
}

/// `∫_0^∞ e^{−(s−½)²t} e^{t/4} K_k(t;ρ) dt` with `σ = cosh²(ρ/2)`; equals `G_k(s;σ)`.
pub fn heat_transform(k: u32, s: f64, sigma: f64) -> Result<f64> {
    if !(s > k as f64) {
        return Err(Error::Domain(format!("need s > k, got s = {s}, k = {k}")));
    }
    if !(sigma > 1.0) {
        return Err(Error::Domain(format!("need sigma > 1, got {sigma}")));
    }
    let rho = 2.0 * sigma.sqrt().acosh();
    let rad = Radial::new(rho);
    let a2 = (s - 0.5) * (s - 0.5);
    let inner_failed = std::cell::Cell::new(None);
    let f = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let shift = -a2 * t + ln_prefactor(t) - rho * rho / (4.0 * t);
        match heat_integral(k, t, &rad, shift, 1e-11) {
            Ok(v) => v,
            Err(e) => {
                inner_failed.set(Some(e.to_string()));
                f64::NAN
            }
        }
    };
    let out = integrate_to_infinity(f, 0.0, 0.25, Tolerance::relative(1e-9));
    if let Some(msg) = inner_failed.take() {
        return Err(Error::Domain(format!("heat kernel evaluation failed inside transform: {msg}")));
    }
    Ok(out?.value)
}
