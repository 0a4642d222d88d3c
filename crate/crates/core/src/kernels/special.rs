//! Scalar special functions: log-gamma, digamma, Chebyshev T_{2k}, and the
//! closed forms built on them.

use serde::{Deserialize, Serialize};
use statrs::function::gamma;

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(gamma::ln_gamma(x))
}

/// Digamma ψ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma needs x > 0, got {x}")));
    }
    Ok(gamma::digamma(x))
}

/// ψ(2k+ε) + ψ(ε) − ψ(2k+1+ε) − ψ(1+ε), in closed form `−2(k+ε)/(ε(2k+ε))`.
pub fn digamma_combo(k: u32, eps: f64) -> Result<f64> {
    check_k_eps(k, eps)?;
    let k = k as f64;
    Ok(-2.0 * (k + eps) / (eps * (2.0 * k + eps)))
}

/// The same combination evaluated through four digamma calls.
pub fn digamma_combo_direct(k: u32, eps: f64) -> Result<f64> {
    check_k_eps(k, eps)?;
    let k = k as f64;
    Ok(digamma(2.0 * k + eps)? + digamma(eps)? - digamma(2.0 * k + 1.0 + eps)? - digamma(1.0 + eps)?)
}

/// Weight relating the spectral sum at `s = k+ε` to the Poincaré series:
/// `2(k+ε) / (ε(2k+ε)(2k−1+ε)(1+ε))`.
pub fn r_factor(k: u32, eps: f64) -> Result<f64> {
    check_k_eps(k, eps)?;
    let k = k as f64;
    Ok(2.0 * (k + eps) / (eps * (2.0 * k + eps) * (2.0 * k - 1.0 + eps) * (1.0 + eps)))
}

fn check_k_eps(k: u32, eps: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("need eps > 0, got {eps}")));
    }
    Ok(())
}

/// `T_{2k}(x) = cosh(2k arccosh x)` for `x ≥ 1`.
pub fn chebyshev_t2k(k: u32, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::Domain(format!("chebyshev_t2k needs x >= 1, got {x}")));
    }
    Ok((2.0 * k as f64 * x.acosh()).cosh())
}

/// `ln T_{2k}` given `A = arccosh x`, stable for large `k·A`.
pub(crate) fn ln_t2k_from_acosh(k: u32, a: f64) -> f64 {
    let y = 2.0 * k as f64 * a;
    y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln cosh(y)` without overflow.
pub(crate) fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln sinh(y)` for `y > 0` without overflow.
pub(crate) fn ln_sinh(y: f64) -> f64 {
    if y < 1.0 {
        y.sinh().ln()
    } else {
        y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// `Γ(Z−½)/Γ(Z)` next to the effective Stirling bound `e^{5/4}/√Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRatio {
    pub ratio: f64,
    pub bound: f64,
}

impl GammaRatio {
    pub fn holds(&self) -> bool {
        self.ratio <= self.bound
    }
}

pub fn gamma_ratio_bound(z: f64) -> Result<GammaRatio> {
    if !(z >= 1.0) || !z.is_finite() {
        return Err(Error::Domain(format!("gamma_ratio_bound needs Z >= 1, got {z}")));
    }
    let ratio = (ln_gamma(z - 0.5)? - ln_gamma(z)?).exp();
    let bound = 1.25f64.exp() / z.sqrt();
    Ok(GammaRatio { ratio, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Stirling series with a recurrence shift, used as an independent oracle.
    fn ln_gamma_stirling(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut x = x;
        while x < 20.0 {
            shift -= x.ln();
            x += 1.0;
        }
        let x2 = x * x;
        let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x2 * x2 * x)
            - 1.0 / (1680.0 * x2 * x2 * x2 * x);
        shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
    }

    fn digamma_asymptotic(x: f64) -> f64 {
        let mut acc = 0.0;
        let mut x = x;
        while x < 20.0 {
            acc -= 1.0 / x;
            x += 1.0;
        }
        let x2 = x * x;
        acc + x.ln() - 0.5 / x - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2) - 1.0 / (252.0 * x2 * x2 * x2)
    }

    #[test]
    fn digamma_at_one_is_minus_euler_gamma() {
        // Euler–Mascheroni constant, from ln n − H_n with Richardson-style correction.
        let n = 1.0e6f64;
        let h: f64 = (1..=1_000_000).rev().map(|m| 1.0 / m as f64).sum();
        let oracle = n.ln() - h + 0.5 / n - 1.0 / (12.0 * n * n);
        assert_relative_eq!(digamma(1.0).unwrap(), oracle, max_relative = 1e-12);
        assert_relative_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_9, max_relative = 1e-13);
        assert_relative_eq!(digamma(2.0).unwrap(), digamma(1.0).unwrap() + 1.0, max_relative = 1e-13);
        assert_relative_eq!(digamma(10.5).unwrap(), digamma_asymptotic(10.5), max_relative = 1e-12);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.0).is_err());
    }

    #[test]
    fn ln_gamma_matches_stirling_oracle() {
        for &x in &[1.0, 1.5, 2.5, 3.7, 10.0, 26.01, 100.5, 1e4] {
            let got = ln_gamma(x).unwrap();
            let want = ln_gamma_stirling(x);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn digamma_combo_examples() {
        assert_relative_eq!(digamma_combo(1, 0.5).unwrap(), -2.4, max_relative = 1e-14);
        assert_relative_eq!(digamma_combo(6, 0.1).unwrap(), -2.0 * 6.1 / (0.1 * 12.1), max_relative = 1e-14);
        assert_relative_eq!(digamma_combo(6, 0.1).unwrap(), -10.082_644_628_099_173, max_relative = 1e-12);
    }

    #[test]
    fn r_factor_examples() {
        assert_relative_eq!(r_factor(1, 1.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        for k in 1..20u32 {
            let e = 1e-8;
            assert_relative_eq!(e * r_factor(k, e).unwrap(), 1.0 / (2.0 * k as f64 - 1.0), max_relative = 1e-7);
        }
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t2k(3, 1.0).unwrap(), 1.0);
        assert_relative_eq!(chebyshev_t2k(2, 2.0).unwrap(), 97.0, max_relative = 1e-13);
        assert!(chebyshev_t2k(2, 0.5).is_err());
        // log form agrees with the direct form where the latter is finite
        let a = 1.7f64.acosh();
        assert_relative_eq!(ln_t2k_from_acosh(5, a), chebyshev_t2k(5, 1.7).unwrap().ln(), max_relative = 1e-13);
    }

    #[test]
    fn chebyshev_exponential_bound_on_grid() {
        for k in 1..=50u32 {
            for i in 0..=200 {
                let r = 10.0 * i as f64 / 200.0;
                let lhs = ln_t2k_from_acosh(k, r / 2.0);
                assert!(lhs <= k as f64 * r + 1e-12, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        let g1 = gamma_ratio_bound(1.0).unwrap();
        assert_relative_eq!(g1.ratio, std::f64::consts::PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(g1.bound, 3.490_342_957_461_841, max_relative = 1e-13);
        let g10 = gamma_ratio_bound(10.0).unwrap();
        assert_relative_eq!(g10.ratio, (ln_gamma_stirling(9.5) - ln_gamma_stirling(10.0)).exp(), max_relative = 1e-12);
        assert_relative_eq!(g10.ratio, 0.328_738_045_620_064_5, max_relative = 1e-12);
        assert!(g10.holds());
        let big = gamma_ratio_bound(1e6).unwrap();
        assert!((big.ratio * 1e3 - 1.0).abs() < 1e-5);
        assert!(gamma_ratio_bound(0.9).is_err());
    }

    proptest! {
        #[test]
        fn digamma_functional_equation(x in 0.05f64..200.0) {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            prop_assert!((lhs - 1.0 / x).abs() <= 1e-12 * (1.0 / x).max(1.0));
        }

        #[test]
        fn digamma_combo_matches_four_terms(k in 1u32..60, eps in 0.01f64..0.99) {
            let closed = digamma_combo(k, eps).unwrap();
            let direct = digamma_combo_direct(k, eps).unwrap();
            prop_assert!(closed < 0.0);
            prop_assert!((closed - direct).abs() <= 1e-9 * closed.abs());
        }

        #[test]
        fn stirling_bound_holds(z in 1.0f64..1e5) {
            prop_assert!(gamma_ratio_bound(z).unwrap().holds());
        }
    }
}
