//! Real-argument log-gamma, log-beta, digamma and polygamma functions.
//!
//! All functions shift the argument upward with the recurrence
//! `Γ(x+1) = xΓ(x)` (and its logarithmic derivatives) until `x >= SHIFT`,
//! then sum the Bernoulli-coefficient asymptotic expansion.

use crate::error::{Error, Result};

const SHIFT: f64 = 10.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Order of a polygamma function, restricted to ψ, ψ', ψ'', ψ'''.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolygammaOrder(u8);

impl PolygammaOrder {
    pub const DIGAMMA: Self = PolygammaOrder(0);
    pub const TRIGAMMA: Self = PolygammaOrder(1);
    pub const TETRAGAMMA: Self = PolygammaOrder(2);
    pub const PENTAGAMMA: Self = PolygammaOrder(3);

    pub fn new(k: u8) -> Result<Self> {
        if k <= 3 {
            Ok(PolygammaOrder(k))
        } else {
            Err(Error::Order(k))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for PolygammaOrder {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        PolygammaOrder::new(k)
    }
}

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} requires a finite positive argument, got {x}"
        )))
    }
}

/// `ln Γ(x)` for finite `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < SHIFT {
        prod *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    let asymptotic = (z - 0.5) * z.ln() - z + HALF_LN_2PI + series;
    asymptotic - prod.ln()
}

/// `ln β(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b)`.
///
/// Symmetric in its arguments bit for bit: the two gamma terms are summed
/// in a canonical order.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive(a, "log_beta")?;
    check_positive(b, "log_beta")?;
    Ok(log_beta_unchecked(a, b))
}

pub(crate) fn log_beta_unchecked(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    log_gamma_unchecked(lo) + log_gamma_unchecked(hi) - log_gamma_unchecked(lo + hi)
}

/// Digamma `ψ(x)`.
pub fn digamma(x: f64) -> Result<f64> {
    polygamma(PolygammaOrder::DIGAMMA, x)
}

/// Trigamma `ψ'(x)`.
pub fn trigamma(x: f64) -> Result<f64> {
    polygamma(PolygammaOrder::TRIGAMMA, x)
}

/// `ψ⁽ᵏ⁾(x)` for `k ∈ {0,1,2,3}` and finite `x > 0`.
pub fn polygamma(k: PolygammaOrder, x: f64) -> Result<f64> {
    check_positive(x, "polygamma")?;
    Ok(polygamma_unchecked(k.0, x))
}

pub(crate) fn polygamma_unchecked(m: u8, x: f64) -> f64 {
    // Collect the recurrence corrections; they are summed smallest first.
    let mut z = x;
    let mut shifts = Vec::with_capacity(SHIFT as usize + 1);
    while z < SHIFT {
        shifts.push(z);
        z += 1.0;
    }
    let asymptotic = polygamma_asymptotic(m, z);
    let mut correction = 0.0;
    for &s in shifts.iter().rev() {
        correction += s.powi(-(m as i32 + 1));
    }
    if m == 0 {
        asymptotic - correction
    } else {
        // ψ⁽ᵐ⁾(x) = ψ⁽ᵐ⁾(x+1) − (−1)ᵐ m! / x^{m+1}
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        asymptotic - sign * factorial(m as u32) * correction
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn polygamma_asymptotic(m: u8, z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    if m == 0 {
        let mut series = 0.0;
        let mut pow = inv2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let two_k = 2.0 * (k as f64 + 1.0);
            series += b / two_k * pow;
            pow *= inv2;
        }
        return z.ln() - 0.5 * inv - series;
    }
    let m_u = m as u32;
    let lead =
        factorial(m_u - 1) * inv.powi(m as i32) + 0.5 * factorial(m_u) * inv.powi(m as i32 + 1);
    let mut series = 0.0;
    let mut pow = inv.powi(m as i32 + 2);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (k as u32 + 1);
        // (2k+m−1)! / (2k)!
        let ratio = ((two_k + 1)..=(two_k + m_u - 1)).fold(1.0, |acc, j| acc * j as f64);
        series += b * ratio * pow;
        pow *= inv2;
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * (lead + series)
}
