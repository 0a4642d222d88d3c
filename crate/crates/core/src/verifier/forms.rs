//! Cusp forms for the modular group in the weights where the space is one
//! dimensional: `Δ · E4^a · E6^b`, built from exact integer q-expansions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{Constraint, Region};
use crate::error::{Error, Result};
use crate::hyperbolic::UhpPoint;
use crate::quadrature::Tolerance;

/// Weights `2k` with a one-dimensional cusp form space.
pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];
pub const DEFAULT_COEFFICIENTS: usize = 120;
/// Height above which the Petersson integrand is replaced by its tail bound.
pub const NORM_CUTOFF: f64 = 20.0;
/// Largest accepted truncation error relative to the absolute series scale.
pub const TAIL_REL: f64 = 1e-10;

type Series = Vec<i128>;

fn mul(a: &[i128], b: &[i128], len: usize) -> Result<Series> {
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            let t = x.checked_mul(y).and_then(|t| t.checked_add(out[i + j]));
            out[i + j] = t.ok_or_else(|| Error::Precondition("q-expansion coefficient overflow".into()))?;
        }
    }
    Ok(out)
}

/// `∏ (1 − qⁿ)` by the pentagonal number theorem.
fn euler_product(len: usize) -> Series {
    let mut out = vec![0i128; len];
    let mut m: i64 = 0;
    loop {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let p1 = (m * (3 * m - 1) / 2) as usize;
        let p2 = (m * (3 * m + 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        out[p1] += sign;
        if m > 0 && p2 < len {
            out[p2] += sign;
        }
        m += 1;
    }
    out
}

fn divisor_power_sum(n: usize, p: u32) -> i128 {
    (1..=n).filter(|&d| n.is_multiple_of(d)).map(|d| (d as i128).pow(p)).sum()
}

/// `E4 = 1 + 240 Σ σ3(n) qⁿ`.
pub fn eisenstein_e4(len: usize) -> Vec<i128> {
    (0..len).map(|n| if n == 0 { 1 } else { 240 * divisor_power_sum(n, 3) }).collect()
}

/// `E6 = 1 − 504 Σ σ5(n) qⁿ`.
pub fn eisenstein_e6(len: usize) -> Vec<i128> {
    (0..len).map(|n| if n == 0 { 1 } else { -504 * divisor_power_sum(n, 5) }).collect()
}

/// `Δ = q ∏ (1 − qⁿ)²⁴`, coefficients of `q⁰ … q^{len−1}`.
pub fn delta(len: usize) -> Result<Vec<i128>> {
    let e = euler_product(len);
    let e2 = mul(&e, &e, len)?;
    let e4 = mul(&e2, &e2, len)?;
    let e8 = mul(&e4, &e4, len)?;
    let e16 = mul(&e8, &e8, len)?;
    let e24 = mul(&e16, &e8, len)?;
    let mut out = vec![0i128; len];
    out[1..].copy_from_slice(&e24[..len - 1]);
    Ok(out)
}

/// A normalised cusp form with its Petersson norm `∫_F |f|² y^{2k} dμ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspFormBasis {
    pub weight: u32,
    /// Coefficients `a_1, a_2, …` (the constant term vanishes).
    pub coefficients: Vec<i128>,
    pub petersson_norm: f64,
    pub norm_error: f64,
}

/// `(a, b)` with `weight = 12 + 4a + 6b`, or `None` outside the supported list.
fn eisenstein_exponents(weight: u32) -> Option<(u32, u32)> {
    match weight {
        12 => Some((0, 0)),
        16 => Some((1, 0)),
        18 => Some((0, 1)),
        20 => Some((2, 0)),
        22 => Some((1, 1)),
        26 => Some((2, 1)),
        _ => None,
    }
}

/// q-expansion coefficients `a_1 … a_n` of the normalised generator.
pub fn generator_coefficients(weight: u32, n: usize) -> Result<Vec<i128>> {
    let (ea, eb) = eisenstein_exponents(weight).ok_or(Error::UnsupportedWeight(weight as i64 / 2))?;
    let len = n + 1;
    let mut f = delta(len)?;
    for _ in 0..ea {
        f = mul(&f, &eisenstein_e4(len), len)?;
    }
    for _ in 0..eb {
        f = mul(&f, &eisenstein_e6(len), len)?;
    }
    Ok(f[1..].to_vec())
}

/// Bound `|a_n| ≤ d(n) n^{(w−1)/2} ≤ 2 n^{w/2}` for normalised eigenforms.
fn coefficient_bound(weight: u32, n: usize) -> f64 {
    2.0 * (n as f64).powf(weight as f64 / 2.0)
}

/// `Σ_{n>N} 2 n^{w/2} |q|^n`, summed until terms are negligible.
fn tail_bound(weight: u32, n_terms: usize, abs_q: f64) -> f64 {
    let mut total = 0.0;
    let mut n = n_terms + 1;
    loop {
        let t = coefficient_bound(weight, n) * abs_q.powi(n as i32);
        total += t;
        // terms decrease geometrically once n·ln|q| dominates the power
        if t <= 1e-30 * total.max(f64::MIN_POSITIVE) || t == 0.0 || n > n_terms + 100_000 {
            return total;
        }
        n += 1;
    }
}

/// Value of `f` at `z` with the truncation checked.
fn eval(coefficients: &[i128], weight: u32, z: UhpPoint) -> Result<Complex64> {
    let q = Complex64::from_polar((-2.0 * PI * z.y).exp(), 2.0 * PI * z.x);
    let mut qn = q;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for &a in coefficients {
        let term = a as f64 * qn;
        sum += term;
        scale += term.norm();
        qn *= q;
    }
    let tail = tail_bound(weight, coefficients.len(), q.norm());
    if tail > TAIL_REL * scale {
        return Err(Error::TruncationTooShort { coefficients: coefficients.len(), y: z.y });
    }
    Ok(sum)
}

/// The standard domain of the modular group as a region.
pub fn standard_region() -> Region {
    Region::new(vec![
        Constraint::XMin { value: -0.5 },
        Constraint::XMax { value: 0.5 },
        Constraint::OutsideDisk { center: [0.0, 0.0], radius: 1.0 },
    ])
}

/// A second fundamental domain, `{0 ≤ x ≤ 1, |z| ≥ 1, |z − 1| ≥ 1}`.
pub fn shifted_region() -> Region {
    Region::new(vec![
        Constraint::XMin { value: 0.0 },
        Constraint::XMax { value: 1.0 },
        Constraint::OutsideDisk { center: [0.0, 0.0], radius: 1.0 },
        Constraint::OutsideDisk { center: [1.0, 0.0], radius: 1.0 },
    ])
}

impl CuspFormBasis {
    pub fn k(&self) -> u32 {
        self.weight / 2
    }

    pub fn value(&self, z: UhpPoint) -> Result<Complex64> {
        eval(&self.coefficients, self.weight, z)
    }

    /// `|f(z)|² y^{2k}` without normalisation.
    pub fn raw_density(&self, z: UhpPoint) -> Result<f64> {
        let f = self.value(z)?;
        Ok(f.norm_sqr() * z.y.powi(self.weight as i32))
    }

    /// `∫ |f|² y^{2k} dμ` over `region`, with the part above [`NORM_CUTOFF`] bounded.
    pub fn mass(&self, region: &Region, tol: Tolerance) -> Result<(f64, f64)> {
        let w = self.weight as i32;
        let mut capped = region.clone();
        capped.caps.push(NORM_CUTOFF);
        let value = capped.integrate_2d(|x, y| Ok(self.value(UhpPoint::at(x, y))?.norm_sqr() * y.powi(w - 2)), tol)?;
        // Above the cutoff |f| ≤ S e^{−2πy} with S = Σ|a_n| e^{−2π(n−1)·cutoff}; the
        // remaining ∫ e^{−4πy} y^m dy is bounded by its first-order Laplace estimate.
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &a)| (a as f64).abs() * (-2.0 * PI * i as f64 * NORM_CUTOFF).exp())
            .sum();
        let m = (w - 2) as f64;
        let rate = 4.0 * PI - m / NORM_CUTOFF;
        let width = region.x_width()?;
        let tail = width * s * s * (-4.0 * PI * NORM_CUTOFF).exp() * NORM_CUTOFF.powf(m) / rate;
        Ok((value, tail))
    }

    /// `S_{2k}(z) = |f(z)|² y^{2k} / ‖f‖²`.
    pub fn s2k(&self, z: UhpPoint) -> Result<f64> {
        Ok(self.raw_density(z)? / self.petersson_norm)
    }
}

/// Builds the generator of weight `weight` with `n` coefficients and its norm.
pub fn build_basis_with(weight: u32, n: usize, tol: Tolerance) -> Result<CuspFormBasis> {
    if n < 64 {
        return Err(Error::Precondition(format!("need at least 64 coefficients, got {n}")));
    }
    let coefficients = generator_coefficients(weight, n)?;
    let mut basis = CuspFormBasis { weight, coefficients, petersson_norm: f64::NAN, norm_error: f64::NAN };
    let (value, tail) = basis.mass(&standard_region(), tol)?;
    basis.petersson_norm = value + tail;
    basis.norm_error = tail + tol.rel * value;
    Ok(basis)
}

pub fn build_basis(weight: u32) -> Result<CuspFormBasis> {
    build_basis_with(weight, DEFAULT_COEFFICIENTS, Tolerance::new(0.0, 1e-10))
}
