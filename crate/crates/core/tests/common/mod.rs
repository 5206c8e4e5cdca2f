//! Oracles shared by the integration and acceptance tests. Everything here
//! is computed independently of the production code paths it checks.

#![allow(dead_code)]

use polarphi_core::quadrature;
use polarphi_core::revolution::RevolutionProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// `(ψ(1), ψ'(1), ψ''(1), ψ'''(1)) = (−γ, π²/6, −2ζ(3), π⁴/15)`.
pub fn polygamma_at_one() -> [f64; 4] {
    let pi = std::f64::consts::PI;
    [-EULER_GAMMA, pi * pi / 6.0, -2.0 * ZETA3, pi.powi(4) / 15.0]
}

/// `ζ(s)` for `s > 1` by a partial sum plus Euler–Maclaurin tail.
pub fn zeta_series(s: f64) -> f64 {
    let n = 1000.0f64;
    let partial: f64 = (1..1000).map(|k| (k as f64).powf(-s)).sum();
    partial + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s / 12.0 * n.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0)
}

/// `γ = lim (H_N − ln N)` with Euler–Maclaurin corrections.
pub fn euler_gamma_series() -> f64 {
    let n = 1000.0f64;
    let h: f64 = (1..=1000).map(|k| 1.0 / k as f64).sum();
    h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4))
}

/// `ψ⁽ᵏ⁾(x) = (−1)^{k+1} ∫₀^∞ tᵏ e^{−xt}/(1 − e^{−t}) dt` for `k ≥ 1`, by
/// quadrature after the substitution `u = xt`.
pub fn polygamma_by_quadrature(k: u32, x: f64) -> f64 {
    assert!(k >= 1, "the integral diverges for k = 0");
    let kf = k as i32;
    let integrand = |u: f64| {
        if u == 0.0 {
            // tᵏ/(1 − e^{−t}) → 0 for k ≥ 2, → 1 for k = 1.
            return [if k == 1 { 1.0 / x } else { 0.0 }];
        }
        let t = u / x;
        [t.powi(kf) * (-u).exp() / (-(-t).exp_m1()) / x]
    };
    let factorial: f64 = (1..k).map(|i| i as f64).product();
    let scale = factorial / x.powi(kf) + factorial * k as f64 / x.powi(kf + 1);
    let q = quadrature::integrate(
        integrand,
        &[0.0, 0.5, 2.0, 8.0, 20.0, 45.0, 80.0],
        1e-14 * scale,
        50_000,
    )
    .expect("oracle quadrature converges");
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * q.values[0]
}

/// Random even concave profiles with `r(0) = 1`, including cone-like ones
/// that reach zero at the ends.
pub fn random_concave_grids(count: usize, seed: u64) -> Vec<RevolutionProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let interior = rng.random_range(1..12);
            let mut ts: Vec<f64> = (0..interior)
                .map(|_| rng.random_range(0.02..0.98))
                .collect();
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            ts.insert(0, 0.0);
            ts.push(1.0);
            // Non-increasing, non-positive slopes give a concave right half.
            let mut slope = -rng.random_range(0.0..0.5);
            let mut slopes = Vec::new();
            for _ in 1..ts.len() {
                slopes.push(slope);
                slope -= rng.random_range(0.0..2.0);
            }
            let drop: f64 = slopes
                .iter()
                .zip(ts.windows(2))
                .map(|(s, w)| -s * (w[1] - w[0]))
                .sum();
            let target = if i % 4 == 0 {
                1.0
            } else {
                rng.random_range(0.05..1.0)
            };
            let scale = if drop > 0.0 { target / drop } else { 0.0 };
            let mut right = vec![(0.0, 1.0)];
            let mut r = 1.0f64;
            for (s, w) in slopes.iter().zip(ts.windows(2)) {
                r += s * scale * (w[1] - w[0]);
                right.push((w[1], r.max(0.0)));
            }
            let mut knots: Vec<(f64, f64)> =
                right.iter().skip(1).rev().map(|&(t, r)| (-t, r)).collect();
            knots.extend(right);
            RevolutionProfile::grid(knots).expect("constructed grids are valid")
        })
        .collect()
}
