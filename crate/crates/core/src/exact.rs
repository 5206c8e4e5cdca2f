//! Closed-form evaluation of φ, volumes and second moments for p-balls and
//! `×ₚ` products.
//!
//! Two independent routes compute `φ(B_p^n)`:
//!
//! * [`phi_pball`] peels one coordinate at a time using the product formula
//!   `φ(A ×ₚ B) = f(n, n+m, p) φ(A) + f(m, n+m, p) φ(B)`;
//! * [`phi_via_moments`] propagates the triple `(|B_p^k|, |B_q^k|, I(B_p^k))`
//!   through the Beta-function volume and moment recursions.
//!
//! Every Gamma ratio is formed in log space and exponentiated once.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::specfun::{log_beta_unchecked, log_gamma_unchecked};

const LN_2: f64 = std::f64::consts::LN_2;

/// `φ([−1, 1]) = (1/4)(2/3)²`.
pub const PHI_INTERVAL: f64 = 1.0 / 9.0;

/// Exact evaluation record for a body `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBreakdown {
    pub dim: usize,
    pub p: Exponent,
    pub volume: f64,
    pub polar_volume: f64,
    pub ln_volume: f64,
    pub ln_polar_volume: f64,
    /// `I(K) = ∫_K ∫_{K°} ⟨x,y⟩² dy dx`.
    pub cross_integral: f64,
    pub phi: f64,
}

impl PhiBreakdown {
    fn from_logs(dim: usize, p: Exponent, ln_volume: f64, ln_polar_volume: f64, phi: f64) -> Self {
        PhiBreakdown {
            dim,
            p,
            volume: ln_volume.exp(),
            polar_volume: ln_polar_volume.exp(),
            ln_volume,
            ln_polar_volume,
            cross_integral: (phi.ln() + ln_volume + ln_polar_volume).exp(),
            phi,
        }
    }
}

/// `φ(B_2^n) = n/(n+2)²`.
pub fn phi_euclidean(n: usize) -> f64 {
    let n = n as f64;
    n / ((n + 2.0) * (n + 2.0))
}

/// `ln |B_2^n| = (n/2) ln π − ln Γ(1 + n/2)`.
pub fn ln_euclidean_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    0.5 * n * std::f64::consts::PI.ln() - log_gamma_unchecked(1.0 + 0.5 * n)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("dimension must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_y(y1: f64, y2: f64) -> Result<()> {
    if !(y1.is_finite() && y2.is_finite()) || y1 <= 0.0 || y1 >= y2 {
        Err(Error::domain(format!(
            "f requires 0 < y1 < y2, got y1={y1}, y2={y2}"
        )))
    } else {
        Ok(())
    }
}

/// `ln f` in terms of the weights `a = 1/p`, `b = 1/q` (`a + b = 1`).
///
/// Either weight being zero selects the `p ∈ {1, ∞}` branch, which reduces
/// to `(y1+1)(y1+2) / ((y2+1)(y2+2))`.
pub(crate) fn ln_f_weights(y1: f64, y2: f64, a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return ((y1 + 1.0) * (y1 + 2.0)).ln() - ((y2 + 1.0) * (y2 + 2.0)).ln();
    }
    let lg = log_gamma_unchecked;
    let rational = 2.0 * ((y1 + 2.0).ln() + y2.ln() - y1.ln() - (y2 + 2.0).ln());
    let up = lg((y1 + 2.0) * a) + lg((y1 + 2.0) * b) + lg(y2 * a) + lg(y2 * b);
    let down = lg((y2 + 2.0) * a) + lg((y2 + 2.0) * b) + lg(y1 * a) + lg(y1 * b);
    rational + up - down
}

fn weights(p: Exponent) -> (f64, f64) {
    match p {
        Exponent::Infinite => (0.0, 1.0),
        Exponent::Finite(1.0) => (1.0, 0.0),
        Exponent::Finite(v) => {
            let a = 1.0 / v;
            (a, 1.0 - a)
        }
    }
}

/// The weight `f(y1, y2, p)` of the product formula.
pub fn f_factor(y1: f64, y2: f64, p: Exponent) -> Result<f64> {
    check_y(y1, y2)?;
    let (a, b) = weights(p);
    Ok(ln_f_weights(y1, y2, a, b).exp())
}

/// `φ(A ×ₚ B)` from `φ(A)` (dimension `n`) and `φ(B)` (dimension `m`).
pub fn phi_combine(phi_a: f64, n: usize, phi_b: f64, m: usize, p: Exponent) -> Result<f64> {
    check_dim(n)?;
    check_dim(m)?;
    if !(phi_a >= 0.0 && phi_b >= 0.0) {
        return Err(Error::domain("phi values must be non-negative"));
    }
    let total = (n + m) as f64;
    Ok(f_factor(n as f64, total, p)? * phi_a + f_factor(m as f64, total, p)? * phi_b)
}

/// `ln |A ×ₚ B|` from the factor volumes.
pub fn ln_product_volume(n: usize, ln_vol_a: f64, m: usize, ln_vol_b: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => ln_vol_a + ln_vol_b,
        Exponent::Finite(p) => {
            let (n, m) = (n as f64, m as f64);
            (n * m / (p * (n + m))).ln() + ln_vol_a + ln_vol_b + log_beta_unchecked(m / p, n / p)
        }
    }
}

/// `ln |B_p^n|` by the product-volume recursion `B_p^k = B_p^{k−1} ×ₚ [−1,1]`.
pub fn ln_pball_volume(n: usize, p: Exponent) -> Result<f64> {
    check_dim(n)?;
    if p.is_infinite() {
        return Ok(n as f64 * LN_2);
    }
    let mut ln_vol = LN_2;
    for k in 2..=n {
        ln_vol = ln_product_volume(k - 1, ln_vol, 1, LN_2, p);
    }
    Ok(ln_vol)
}

/// `|B_p^n|`.
pub fn pball_volume(n: usize, p: Exponent) -> Result<f64> {
    Ok(ln_pball_volume(n, p)?.exp())
}

/// `ln |B_p^n| = n ln 2 + n ln Γ(1+1/p) − ln Γ(1+n/p)`.
pub fn ln_pball_volume_closed_form(n: usize, p: Exponent) -> Result<f64> {
    check_dim(n)?;
    let a = p.reciprocal();
    let n_f = n as f64;
    Ok(n_f * LN_2 + n_f * log_gamma_unchecked(1.0 + a) - log_gamma_unchecked(1.0 + n_f * a))
}

fn ln_moment2_formula(n: usize, p: Exponent) -> f64 {
    let n_f = n as f64;
    match p {
        Exponent::Infinite => n_f * LN_2 - 3.0_f64.ln(),
        Exponent::Finite(p) => {
            n_f * LN_2 - n_f * p.ln()
                + log_gamma_unchecked(3.0 / p)
                + (n_f - 1.0) * log_gamma_unchecked(1.0 / p)
                - log_gamma_unchecked(1.0 + (n_f + 2.0) / p)
        }
    }
}

fn moment2_self_test() -> Result<()> {
    let close = |got: f64, want: f64, what: &str| -> Result<()> {
        if (got - want).abs() <= 1e-12 * want.abs() {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "second-moment self-test failed for {what}: {got} vs {want}"
            )))
        }
    };
    close(
        ln_moment2_formula(1, Exponent::ONE).exp(),
        2.0 / 3.0,
        "(1, 1)",
    )?;
    close(
        ln_moment2_formula(2, Exponent::TWO).exp(),
        std::f64::consts::FRAC_PI_4,
        "(2, 2)",
    )?;
    close(
        ln_moment2_formula(3, Exponent::Infinite).exp(),
        8.0 / 3.0,
        "(3, inf)",
    )?;
    // I(B_p^n) = n ∫x₁² over B_p^n · ∫y₁² over B_q^n, checked against the
    // independent moment recursion.
    for &n in &[1usize, 2, 3, 7, 15] {
        for &p in &[1.25, 1.5, 3.0, 8.0] {
            let p = Exponent::Finite(p);
            let via = phi_via_moments(n, p)?;
            let ln_i = (n as f64).ln() + ln_moment2_formula(n, p) + ln_moment2_formula(n, p.dual());
            close(ln_i.exp(), via.cross_integral, &format!("I(B_{p}^{n})"))?;
        }
    }
    Ok(())
}

/// `∫_{B_p^n} x₁² dx`.
///
/// Backed by the Dirichlet-integral closed form, which is gated by a one-time
/// self-test against the moment recursion of [`phi_via_moments`].
pub fn pball_moment2(n: usize, p: Exponent) -> Result<f64> {
    check_dim(n)?;
    static GATE: OnceLock<Result<()>> = OnceLock::new();
    GATE.get_or_init(moment2_self_test).clone()?;
    Ok(ln_moment2_formula(n, p).exp())
}

/// `φ(B_p^n)` by the product-formula recursion, with both volumes filled.
pub fn phi_pball(n: usize, p: Exponent) -> Result<PhiBreakdown> {
    check_dim(n)?;
    let q = p.dual();
    // ∞ is evaluated through its dual; φ is symmetric under polarity.
    let (a, b) = weights(if p.is_infinite() { q } else { p });
    let mut phi = PHI_INTERVAL;
    for k in 2..=n {
        let k_f = k as f64;
        phi = ln_f_weights(k_f - 1.0, k_f, a, b).exp() * phi
            + ln_f_weights(1.0, k_f, a, b).exp() * PHI_INTERVAL;
    }
    Ok(PhiBreakdown::from_logs(
        n,
        p,
        ln_pball_volume(n, p)?,
        ln_pball_volume(n, q)?,
        phi,
    ))
}

fn log_add_exp(x: f64, y: f64) -> f64 {
    let hi = x.max(y);
    hi + ((x - hi).exp() + (y - hi).exp()).ln()
}

/// `φ(B_p^n)` by the second-moment recursion; `p` must lie strictly inside `(1, ∞)`.
pub fn phi_via_moments(n: usize, p: Exponent) -> Result<PhiBreakdown> {
    check_dim(n)?;
    let p_val = match p {
        Exponent::Finite(v) if v > 1.0 => v,
        _ => {
            return Err(Error::domain(
                "moment recursion is defined only for finite p > 1; use the f recursion at the endpoints",
            ))
        }
    };
    let q_val = p.dual().value();
    let ln_interval_i = (4.0_f64 / 9.0).ln();
    let (mut ln_vol, mut ln_polar, mut ln_i) = (LN_2, LN_2, ln_interval_i);
    let m = 1.0;
    for k in 2..=n {
        let nn = (k - 1) as f64;
        let total2 = (m + nn + 2.0) * (m + nn + 2.0);
        let ln_first = 2.0 * LN_2
            + (m * m * (nn + 2.0) * (nn + 2.0) / (p_val * q_val * total2)).ln()
            + log_beta_unchecked(m / p_val, (nn + 2.0) / p_val)
            + log_beta_unchecked(m / q_val, (nn + 2.0) / q_val)
            + ln_i;
        let ln_second = ln_vol
            + ln_polar
            + (nn * nn * (m + 2.0) * (m + 2.0) / (p_val * q_val * total2)).ln()
            + log_beta_unchecked(nn / p_val, (m + 2.0) / p_val)
            + log_beta_unchecked(nn / q_val, (m + 2.0) / q_val)
            + ln_interval_i;
        ln_i = log_add_exp(ln_first, ln_second);
        ln_vol = (nn * m / (p_val * (nn + m))).ln()
            + ln_vol
            + LN_2
            + log_beta_unchecked(m / p_val, nn / p_val);
        ln_polar = (nn * m / (q_val * (nn + m))).ln()
            + ln_polar
            + LN_2
            + log_beta_unchecked(m / q_val, nn / q_val);
    }
    let phi = (ln_i - ln_vol - ln_polar).exp();
    Ok(PhiBreakdown::from_logs(n, p, ln_vol, ln_polar, phi))
}

/// Volume-product, isotropy-constant and lower-bound data for `B_p^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotropyReport {
    pub dim: usize,
    pub p: Exponent,
    pub phi: f64,
    /// `L_K²` of the volume-normalized body.
    pub l_sq: f64,
    pub l_polar_sq: f64,
    /// `|K||K°|`.
    pub santalo_product: f64,
    /// `|B_2^n|²`.
    pub euclidean_product: f64,
    /// `n |K|^{2/n}|K°|^{2/n} / ((n+2)² |B_2^n|^{4/n})`.
    pub lower_bound: f64,
    /// `|φ − n |K|^{2/n}|K°|^{2/n} L_K² L_{K°}²|`.
    pub identity_residual: f64,
    /// `n·φ`, reported only.
    pub n_phi: f64,
}

impl IsotropyReport {
    /// Human-readable descriptions of every failed assertion.
    pub fn violations(&self, slack: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.santalo_product > self.euclidean_product + slack {
            out.push(format!(
                "volume product {} exceeds |B_2^n|^2 = {}",
                self.santalo_product, self.euclidean_product
            ));
        }
        if self.lower_bound > self.phi + slack {
            out.push(format!(
                "lower bound {} exceeds phi {}",
                self.lower_bound, self.phi
            ));
        }
        if self.identity_residual > slack * self.phi {
            out.push(format!(
                "isotropic identity residual {} too large",
                self.identity_residual
            ));
        }
        out
    }
}

/// Computes an [`IsotropyReport`] without asserting anything.
pub fn isotropy_report(n: usize, p: Exponent) -> Result<IsotropyReport> {
    let breakdown = phi_pball(n, p)?;
    let n_f = n as f64;
    let ln_m2 = pball_moment2(n, p)?.ln();
    let ln_m2_polar = pball_moment2(n, p.dual())?.ln();
    let ln_l_sq = ln_m2 - (n_f + 2.0) / n_f * breakdown.ln_volume;
    let ln_l_polar_sq = ln_m2_polar - (n_f + 2.0) / n_f * breakdown.ln_polar_volume;
    let ln_ball = ln_euclidean_ball_volume(n);
    let ln_product = breakdown.ln_volume + breakdown.ln_polar_volume;
    let lower =
        (n_f.ln() + 2.0 / n_f * ln_product - 2.0 * (n_f + 2.0).ln() - 4.0 / n_f * ln_ball).exp();
    let identity = (n_f.ln() + 2.0 / n_f * ln_product + ln_l_sq + ln_l_polar_sq).exp();
    Ok(IsotropyReport {
        dim: n,
        p,
        phi: breakdown.phi,
        l_sq: ln_l_sq.exp(),
        l_polar_sq: ln_l_polar_sq.exp(),
        santalo_product: ln_product.exp(),
        euclidean_product: (2.0 * ln_ball).exp(),
        lower_bound: lower,
        identity_residual: (breakdown.phi - identity).abs(),
        n_phi: n_f * breakdown.phi,
    })
}

/// Computes the report and fails if the volume-product inequality, the
/// lower-bound chain, or the isotropic identity is violated.
pub fn inequality_report(n: usize, p: Exponent, slack: f64) -> Result<IsotropyReport> {
    let report = isotropy_report(n, p)?;
    let violations = report.violations(slack);
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(Error::Invariant(format!(
            "B_{p}^{n}: {}",
            violations.join("; ")
        )))
    }
}
