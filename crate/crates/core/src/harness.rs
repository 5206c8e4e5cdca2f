//! Grid verification of the analytic steps behind the maximality theorem:
//! the one-variable reduction `f₁(x) = f(y₁, y₂, 1/x)`, the kernels `F`, `G`,
//! `H` of its log-derivative, convexity of `x²ψ'(x)`, and the argmax scan.
//!
//! Nothing here proves anything; every report is numerical evidence on a
//! finite grid.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exact::{self, ln_f_weights};
use crate::exponent::Exponent;
use crate::specfun::polygamma_unchecked;

fn psi(x: f64) -> f64 {
    polygamma_unchecked(0, x)
}

fn psi1(x: f64) -> f64 {
    polygamma_unchecked(1, x)
}

fn psi2(x: f64) -> f64 {
    polygamma_unchecked(2, x)
}

fn psi3(x: f64) -> f64 {
    polygamma_unchecked(3, x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub coords: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub point: Vec<f64>,
    pub value: f64,
}

/// Outcome of a grid verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub description: String,
    pub grid: Vec<GridPoint>,
    pub violations: Vec<Violation>,
    /// Worst finite-difference mismatch (relative; absolute when the
    /// analytic value is below `1e-8`).
    pub max_residual: f64,
    pub residual_tolerance: f64,
}

impl GridReport {
    pub fn new(description: impl Into<String>, residual_tolerance: f64) -> Self {
        GridReport {
            description: description.into(),
            grid: Vec::new(),
            violations: Vec::new(),
            max_residual: 0.0,
            residual_tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.max_residual <= self.residual_tolerance
    }

    fn record(&mut self, coords: Vec<f64>, value: f64) {
        self.grid.push(GridPoint { coords, value });
    }

    fn violation(&mut self, check: &str, point: Vec<f64>, value: f64) {
        self.violations.push(Violation {
            check: check.to_string(),
            point,
            value,
        });
    }

    fn residual(&mut self, check: &str, point: Vec<f64>, numeric: f64, analytic: f64) {
        let r = residual(numeric, analytic);
        if !(r <= self.residual_tolerance) {
            self.violation(check, point, r);
        }
        if r > self.max_residual || r.is_nan() {
            self.max_residual = r;
        }
    }
}

fn residual(numeric: f64, analytic: f64) -> f64 {
    let diff = (numeric - analytic).abs();
    if analytic.abs() < 1e-8 {
        diff
    } else {
        diff / analytic.abs()
    }
}

/// Richardson-extrapolated central difference with base step `1e-3·scale`.
fn central_difference(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> f64 {
    let h = 1e-3 * scale;
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Richardson-extrapolated second central difference with base step `1e-3·scale`.
fn second_difference(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> f64 {
    let h = 1e-3 * scale;
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Step scale for a coordinate in `(0, 1)`: the distance to the nearer pole.
fn x_scale(x: f64) -> f64 {
    x.min(1.0 - x)
}

/// Strict comparison after rounding at `rounding` relative to the larger magnitude.
fn strictly_less(a: f64, b: f64, rounding: f64) -> bool {
    b - a > rounding * a.abs().max(b.abs())
}

fn check_open_unit(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("x must lie in (0, 1), got {x}")))
    }
}

fn check_positive(y: f64, name: &str) -> Result<()> {
    if y.is_finite() && y > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {y}")))
    }
}

fn check_pair(y1: f64, y2: f64) -> Result<()> {
    check_positive(y1, "y1")?;
    if y2.is_finite() && y2 > y1 {
        Ok(())
    } else {
        Err(Error::domain(format!("need 0 < y1 < y2, got ({y1}, {y2})")))
    }
}

fn ln_f1(x: f64, y1: f64, y2: f64) -> f64 {
    ln_f_weights(y1, y2, x, 1.0 - x)
}

/// `f₁(x) = f(y₁, y₂, 1/x)` on `[0, 1]`; the endpoints use the `p ∈ {1, ∞}` branch.
pub fn f1_eval(x: f64, y1: f64, y2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0, 1], got {x}")));
    }
    check_pair(y1, y2)?;
    Ok(ln_f1(x, y1, y2).exp())
}

// The kernels are evaluated through single-variable pieces whose pole
// terms cancel analytically; each piece is shifted by one via the ψ
// recurrences when its argument is below 1.

/// `sψ(s)`.
fn s_psi(s: f64) -> f64 {
    if s < 1.0 {
        s * psi(s + 1.0) - 1.0
    } else {
        s * psi(s)
    }
}

/// `ψ(s) + sψ'(s)`.
fn psi_plus_s_psi1(s: f64) -> f64 {
    if s < 1.0 {
        psi(s + 1.0) + s * psi1(s + 1.0)
    } else {
        psi(s) + s * psi1(s)
    }
}

/// `(s²ψ'(s))' = 2sψ'(s) + s²ψ''(s)`.
fn xsq_trigamma_d1(s: f64) -> f64 {
    if s < 1.0 {
        2.0 * s * psi1(s + 1.0) + s * s * psi2(s + 1.0)
    } else {
        2.0 * s * psi1(s) + s * s * psi2(s)
    }
}

/// `(s²ψ'(s))'' = 2ψ'(s) + 4sψ''(s) + s²ψ'''(s)`.
fn convexity_raw(s: f64) -> f64 {
    if s < 1.0 {
        2.0 * psi1(s + 1.0) + 4.0 * s * psi2(s + 1.0) + s * s * psi3(s + 1.0)
    } else {
        2.0 * psi1(s) + 4.0 * s * psi2(s) + s * s * psi3(s)
    }
}

fn f_kernel_raw(x: f64, y: f64) -> f64 {
    let z = y + 2.0;
    let w = 1.0 - x;
    (s_psi(z * x) - s_psi(y * x)) / x - (s_psi(z * w) - s_psi(y * w)) / w
}

/// `F(x,y) = (y+2)[ψ((y+2)x) − ψ((y+2)(1−x))] − y[ψ(yx) − ψ(y(1−x))]`.
pub fn f_kernel(x: f64, y: f64) -> Result<f64> {
    check_open_unit(x)?;
    check_positive(y, "y")?;
    Ok(f_kernel_raw(x, y))
}

fn g_kernel_raw(x: f64, y: f64) -> f64 {
    let z = y + 2.0;
    let w = 1.0 - x;
    let v = psi_plus_s_psi1;
    (v(z * x) - v(y * x)) - (v(z * w) - v(y * w))
}

/// `G(x,y) = ∂F/∂y(x,y)`.
pub fn g_kernel(x: f64, y: f64) -> Result<f64> {
    check_open_unit(x)?;
    check_positive(y, "y")?;
    Ok(g_kernel_raw(x, y))
}

fn h_kernel_raw(x: f64, y: f64) -> f64 {
    let w = 1.0 - x;
    xsq_trigamma_d1(y * x) / x + xsq_trigamma_d1(y * w) / w
}

/// `H(x,y) = 2y[ψ'(yx) + ψ'(y(1−x))] + y²[xψ''(yx) + (1−x)ψ''(y(1−x))]`.
pub fn h_kernel(x: f64, y: f64) -> Result<f64> {
    check_open_unit(x)?;
    check_positive(y, "y")?;
    Ok(h_kernel_raw(x, y))
}

/// Second derivative of `x²ψ'(x)`: `2ψ'(x) + 4xψ''(x) + x²ψ'''(x)`.
pub fn xsq_trigamma_convexity(x: f64) -> Result<f64> {
    check_positive(x, "x")?;
    Ok(convexity_raw(x))
}

/// `x_i` uniform on `[margin, 1 − margin]`, mirrored so that `x_i + x_{N−1−i} = 1` exactly.
pub fn uniform_x_grid(points: usize, margin: f64) -> Vec<f64> {
    if points == 1 {
        return vec![0.5];
    }
    let span = 1.0 - 2.0 * margin;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| margin + span * i as f64 / (points - 1) as f64)
        .collect();
    for i in 0..points / 2 {
        grid[points - 1 - i] = 1.0 - grid[i];
    }
    if points % 2 == 1 {
        grid[points / 2] = 0.5;
    }
    grid
}

/// `points` geometrically spaced values on `[lo, hi]`, endpoints exact.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    let mut grid: Vec<f64> = (0..points)
        .map(|i| lo * (ratio * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid[points - 1] = hi;
    grid
}

/// 101 points on `(0,1)` with a `1e-3` margin.
pub fn default_x_grid() -> Vec<f64> {
    uniform_x_grid(101, 1e-3)
}

/// 33 geometric points on `[0.1, 50]`.
pub fn default_y_grid() -> Vec<f64> {
    geometric_grid(0.1, 50.0, 33)
}

/// `(y₁, y₂)` pairs exercised by the `f₁` checks.
pub fn default_pair_grid() -> Vec<(f64, f64)> {
    vec![
        (0.5, 1.0),
        (1.0, 2.0),
        (1.0, 10.0),
        (2.0, 3.0),
        (4.0, 5.0),
        (9.0, 10.0),
        (19.0, 20.0),
        (0.1, 50.0),
        (30.0, 49.0),
    ]
}

/// 64 geometric points on `[1, 64]`, plus `2` and `∞`.
pub fn default_p_grid() -> Vec<Exponent> {
    let mut values = geometric_grid(1.0, 64.0, 64);
    values.push(2.0);
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut grid: Vec<Exponent> = values.into_iter().map(Exponent::Finite).collect();
    grid.push(Exponent::Infinite);
    grid
}

/// 81 geometric points on `[0.01, 100]`.
pub fn default_log_grid() -> Vec<f64> {
    geometric_grid(0.01, 100.0, 81)
}

/// Pointwise monotonicity and sign claims of the reduction, together with the
/// finite-difference identities linking `ln f₁`, `F`, `G` and `H`.
pub fn monotonicity_report(
    x_grid: &[f64],
    y_grid: &[f64],
    pair_grid: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<GridReport> {
    for &x in x_grid {
        check_open_unit(x)?;
    }
    for &y in y_grid {
        check_positive(y, "y")?;
    }
    for &(y1, y2) in pair_grid {
        check_pair(y1, y2)?;
    }
    let rounding = tol.strict_rounding;
    let mut report = GridReport::new(
        "ln f1 increasing on (0,1/2); F decreasing in y; dH/dy > 0; sign of G; FD identities",
        tol.finite_difference,
    );
    let left: Vec<f64> = x_grid.iter().copied().filter(|&x| x < 0.5).collect();

    for &(y1, y2) in pair_grid {
        for w in left.windows(2) {
            let (a, b) = (ln_f1(w[0], y1, y2), ln_f1(w[1], y1, y2));
            if !strictly_less(a, b, rounding) {
                report.violation("ln f1 increasing", vec![w[1], y1, y2], b - a);
            }
        }
        for &x in x_grid {
            let value = ln_f1(x, y1, y2);
            report.record(vec![x, y1, y2], value);
            let numeric = central_difference(|t| ln_f1(t, y1, y2), x, x_scale(x));
            let analytic = f_kernel_raw(x, y1) - f_kernel_raw(x, y2);
            report.residual(
                "(ln f1)' = F(x,y1) - F(x,y2)",
                vec![x, y1, y2],
                numeric,
                analytic,
            );
        }
    }

    for &x in x_grid {
        if x < 0.5 {
            for w in y_grid.windows(2) {
                let (a, b) = (f_kernel_raw(x, w[0]), f_kernel_raw(x, w[1]));
                if !strictly_less(b, a, rounding) {
                    report.violation("F decreasing in y", vec![x, w[1]], b - a);
                }
            }
        }
        for &y in y_grid {
            let g = g_kernel_raw(x, y);
            let sign_ok = if x < 0.5 {
                g < 0.0
            } else if x > 0.5 {
                g > 0.0
            } else {
                true
            };
            if !sign_ok {
                report.violation("sign of G", vec![x, y], g);
            }

            let dfdy = central_difference(|t| f_kernel_raw(x, t), y, y);
            report.residual("G = dF/dy", vec![x, y], dfdy, g);

            let dgdx = central_difference(|t| g_kernel_raw(t, y), x, x_scale(x));
            let h_diff = h_kernel_raw(x, y + 2.0) - h_kernel_raw(x, y);
            report.residual("dG/dx = H(x,y+2) - H(x,y)", vec![x, y], dgdx, h_diff);

            let dhdy = central_difference(|t| h_kernel_raw(x, t), y, y);
            if !(dhdy > 0.0) {
                report.violation("dH/dy > 0", vec![x, y], dhdy);
            }
            let analytic = convexity_raw(y * x) + convexity_raw(y * (1.0 - x));
            report.residual("dH/dy = u''(yx) + u''(y(1-x))", vec![x, y], dhdy, analytic);
            report.record(vec![x, y], g);
        }
    }
    Ok(report)
}

/// Reflection symmetries: `f₁(x) = f₁(1−x)`, `G(x,y) = −G(1−x,y)`,
/// `H(x,y) = H(1−x,y)`, `G(1/2,y) = 0`, and the endpoint values of `f₁`.
pub fn symmetry_report(
    x_grid: &[f64],
    y_grid: &[f64],
    pair_grid: &[(f64, f64)],
) -> Result<GridReport> {
    for &x in x_grid {
        check_open_unit(x)?;
    }
    let mut report = GridReport::new("reflection symmetries about x = 1/2", 0.0);
    for &(y1, y2) in pair_grid {
        check_pair(y1, y2)?;
        for &x in x_grid {
            let d = f1_eval(x, y1, y2)? - f1_eval(1.0 - x, y1, y2)?;
            report.record(vec![x, y1, y2], d);
            if d.abs() > 1e-12 {
                report.violation("f1(x) = f1(1-x)", vec![x, y1, y2], d);
            }
        }
        let (f0, f1, fh) = (
            f1_eval(0.0, y1, y2)?,
            f1_eval(1.0, y1, y2)?,
            f1_eval(0.5, y1, y2)?,
        );
        let endpoint = (y1 + 1.0) * (y1 + 2.0) / ((y2 + 1.0) * (y2 + 2.0));
        if f0 != f1 || (f0 - endpoint).abs() > 1e-12 * endpoint || !(f0 < fh) {
            report.violation("f1(0) = f1(1) < f1(1/2)", vec![y1, y2], fh - f0);
        }
        let collapse = (y1 + 2.0).powi(2) / (y2 + 2.0).powi(2);
        if (fh - collapse).abs() > 1e-12 * collapse {
            report.violation("f1(1/2) = (y1+2)^2/(y2+2)^2", vec![y1, y2], fh - collapse);
        }
    }
    for &y in y_grid {
        check_positive(y, "y")?;
        let g_mid = g_kernel_raw(0.5, y);
        if g_mid != 0.0 {
            report.violation("G(1/2,y) = 0", vec![0.5, y], g_mid);
        }
        for &x in x_grid {
            let g_sum = g_kernel_raw(x, y) + g_kernel_raw(1.0 - x, y);
            let g_scale = g_kernel_raw(x, y).abs().max(1.0);
            if g_sum.abs() > 1e-10 * g_scale {
                report.violation("G(x,y) = -G(1-x,y)", vec![x, y], g_sum);
            }
            let h_diff = h_kernel_raw(x, y) - h_kernel_raw(1.0 - x, y);
            let h_scale = h_kernel_raw(x, y).abs().max(1.0);
            if h_diff.abs() > 1e-10 * h_scale {
                report.violation("H(x,y) = H(1-x,y)", vec![x, y], h_diff);
            }
        }
    }
    Ok(report)
}

/// Positivity of `(x²ψ'(x))''` on `log_grid`, plus its agreement with a
/// Richardson second difference at `fd_points`.
pub fn convexity_report(
    log_grid: &[f64],
    fd_points: &[f64],
    tol: &Tolerances,
) -> Result<GridReport> {
    let mut report = GridReport::new("x^2 psi'(x) convex: f''(x) > 0", tol.finite_difference);
    for &x in log_grid {
        let v = xsq_trigamma_convexity(x)?;
        report.record(vec![x], v);
        if !(v > 0.0) {
            report.violation("f'' > 0", vec![x], v);
        }
    }
    for &x in fd_points {
        check_positive(x, "x")?;
        // f'' ~ 1/(3x³) is small against f ~ x, so rounding needs the wider step.
        let numeric = second_difference(|t| t * t * psi1(t), x, 10.0 * x);
        report.residual(
            "f'' vs second difference",
            vec![x],
            numeric,
            convexity_raw(x),
        );
    }
    Ok(report)
}

/// Result of scanning `φ(B_p^n)` over a grid of exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub dim: usize,
    pub rows: Vec<(Exponent, f64)>,
    pub argmax: Exponent,
    pub max_phi: f64,
    /// `φ(B_2^n) = n/(n+2)²`.
    pub euclidean_phi: f64,
    /// Increasing on `[1,2]` and decreasing on `[2,∞]` along the grid (reported only).
    pub unimodal: bool,
    pub report: GridReport,
}

/// Evaluates `φ(B_p^n)` on `p_grid` and checks that the maximum sits at `p = 2`.
///
/// The grid must contain `1`, `2` and `∞`.
pub fn scan_p_argmax(n: usize, p_grid: &[Exponent], tol: &Tolerances) -> Result<ScanReport> {
    for required in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
        if !p_grid.contains(&required) {
            return Err(Error::domain(format!("p grid must contain {required}")));
        }
    }
    let mut report = GridReport::new(format!("argmax of phi(B_p^{n}) over p is 2"), tol.exact);
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        rows.push((p, exact::phi_pball(n, p)?.phi));
    }
    let phi_two = exact::phi_pball(n, Exponent::TWO)?.phi;
    let euclidean = exact::phi_euclidean(n);
    if (phi_two - euclidean).abs() > tol.exact * euclidean {
        report.violation(
            "phi(B_2^n) = n/(n+2)^2",
            vec![n as f64],
            phi_two - euclidean,
        );
    }
    let (mut argmax, mut max_phi) = rows[0];
    for &(p, phi) in &rows {
        report.record(vec![p.value()], phi);
        if phi > max_phi {
            argmax = p;
            max_phi = phi;
        }
        if phi > euclidean + tol.exact {
            report.violation("phi <= n/(n+2)^2", vec![p.value()], phi - euclidean);
        }
        if p != Exponent::TWO && !strictly_less(phi, phi_two, tol.strict_rounding) {
            report.violation("phi(2) - phi(p) > 0", vec![p.value()], phi_two - phi);
        }
    }
    if argmax != Exponent::TWO {
        report.violation("argmax at p = 2", vec![argmax.value()], max_phi);
    }
    let phi_one = exact::phi_pball(n, Exponent::ONE)?.phi;
    let phi_inf = exact::phi_pball(n, Exponent::Infinite)?.phi;
    report.max_residual = (phi_one - phi_inf).abs() / phi_one;

    let mut ordered = rows.clone();
    ordered.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
    let unimodal = ordered.windows(2).all(|w| {
        if w[1].0.value() <= 2.0 {
            w[0].1 < w[1].1
        } else {
            w[0].1 > w[1].1
        }
    });

    Ok(ScanReport {
        dim: n,
        rows,
        argmax,
        max_phi,
        euclidean_phi: euclidean,
        unimodal,
        report,
    })
}
