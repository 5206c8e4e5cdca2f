//! Bodies of revolution `K = {(t, x) ∈ [−1,1] × R^{n−1} : |x| ≤ r₁(t)}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ln_euclidean_ball_volume, phi_euclidean};
use crate::quadrature;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const BRACKET: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-12;
const CONCAVITY_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-11;
const QUAD_MAX_INTERVALS: usize = 20_000;

/// A radial profile on `[−1, 1]`.
pub trait Profile: Send + Sync {
    fn radius(&self, t: f64) -> f64;

    /// Interior points where the profile may be non-smooth.
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }

    /// Knots `(t, r)` when the profile is exactly piecewise linear.
    fn knots(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    /// `max_{|t|≤1} (t·s + r(t)·rho)` for `rho ≥ 0`: the gauge of the polar body
    /// at `(s, y)` with `|y| = rho`.
    fn support(&self, s: f64, rho: f64) -> f64 {
        if let Some(knots) = self.knots() {
            return knots
                .iter()
                .map(|&(t, r)| t * s + r * rho)
                .fold(f64::NEG_INFINITY, f64::max);
        }
        let g = |t: f64| t * s + self.radius(t) * rho;
        let t = golden_section(|t| -g(t), -1.0, 1.0);
        [g(t), g(-1.0), g(1.0), g(0.0)]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A validated profile with `r(0) = 1`, even and concave.
#[derive(Debug, Clone, PartialEq)]
pub enum RevolutionProfile {
    /// `√(1 − t²)`
    Ball,
    /// `1`
    Cylinder,
    /// `1 − |t|`
    Cone,
    /// `(1 − |t|^P)^{1/P}`
    PBall(f64),
    Grid(GridProfile),
}

/// Piecewise-linear profile through validated knots.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    knots: Vec<(f64, f64)>,
}

impl GridProfile {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Profile("grid needs at least two knots".into()));
        }
        if knots.iter().any(|&(t, r)| !t.is_finite() || !r.is_finite()) {
            return Err(Error::Profile("grid entries must be finite".into()));
        }
        if knots[0].0 != -1.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(Error::Profile("grid must span [-1, 1] exactly".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Profile(
                "grid t values must be strictly increasing".into(),
            ));
        }
        if let Some(&(t, r)) = knots.iter().find(|&&(_, r)| r < 0.0) {
            return Err(Error::Profile(format!("negative radius {r} at t = {t}")));
        }
        let n = knots.len();
        for i in 0..n / 2 {
            let (a, b) = (knots[i], knots[n - 1 - i]);
            if (a.0 + b.0).abs() > NORMALIZATION_TOL || (a.1 - b.1).abs() > NORMALIZATION_TOL {
                return Err(Error::Profile(format!(
                    "profile is not even: r({}) = {} but r({}) = {}",
                    a.0, a.1, b.0, b.1
                )));
            }
        }
        for w in knots.windows(3) {
            let left = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let right = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            if right - left > CONCAVITY_TOL {
                return Err(Error::Profile(format!(
                    "profile is not concave at t = {}",
                    w[1].0
                )));
            }
        }
        let grid = GridProfile { knots };
        let r0 = grid.radius(0.0);
        if (r0 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Profile(format!(
                "r(0) = {r0} but must equal 1; rescale by dividing every r by {r0}"
            )));
        }
        Ok(grid)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn radius(&self, t: f64) -> f64 {
        interpolate(&self.knots, t)
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    if !(t >= knots[0].0 && t <= knots[knots.len() - 1].0) {
        return 0.0;
    }
    let i = knots.partition_point(|&(k, _)| k <= t);
    if i == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (t0, r0) = knots[i - 1];
    let (t1, r1) = knots[i];
    let w = (t - t0) / (t1 - t0);
    (r0 + w * (r1 - r0)).max(0.0)
}

impl RevolutionProfile {
    pub fn pball(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::Profile(format!(
                "pball profile needs a finite P >= 1, got {p} (use \"cylinder\" for P = inf)"
            )));
        }
        Ok(RevolutionProfile::PBall(p))
    }

    pub fn grid(knots: Vec<(f64, f64)>) -> Result<Self> {
        GridProfile::new(knots).map(RevolutionProfile::Grid)
    }

    /// Re-checks invariants for values built directly from the enum.
    pub fn validate(&self) -> Result<()> {
        match self {
            RevolutionProfile::PBall(p) => RevolutionProfile::pball(*p).map(|_| ()),
            RevolutionProfile::Grid(g) => GridProfile::new(g.knots.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }
}

impl Profile for RevolutionProfile {
    fn radius(&self, t: f64) -> f64 {
        let a = t.abs();
        if a > 1.0 || t.is_nan() {
            return 0.0;
        }
        match self {
            RevolutionProfile::Ball => ((1.0 - a) * (1.0 + a)).sqrt(),
            RevolutionProfile::Cylinder => 1.0,
            RevolutionProfile::Cone => 1.0 - a,
            RevolutionProfile::PBall(p) => (1.0 - a.powf(*p)).max(0.0).powf(1.0 / p),
            RevolutionProfile::Grid(g) => g.radius(t),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            RevolutionProfile::Cylinder => Vec::new(),
            RevolutionProfile::Grid(g) => g.knots.iter().map(|k| k.0).collect(),
            _ => vec![0.0],
        }
    }

    fn knots(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            RevolutionProfile::Cylinder => Some(vec![(-1.0, 1.0), (1.0, 1.0)]),
            RevolutionProfile::Cone => Some(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]),
            RevolutionProfile::Grid(g) => Some(g.knots.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for RevolutionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RevolutionProfile::Ball => f.write_str("ball"),
            RevolutionProfile::Cylinder => f.write_str("cylinder"),
            RevolutionProfile::Cone => f.write_str("cone"),
            RevolutionProfile::PBall(p) => write!(f, "pball:{p}"),
            RevolutionProfile::Grid(g) => write!(f, "grid[{} knots]", g.knots.len()),
        }
    }
}

impl FromStr for RevolutionProfile {
    type Err = Error;

    /// Named kinds, or a JSON document `{"grid": [[t, r], ...]}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') || s.starts_with('"') {
            let doc: ProfileDoc = serde_json::from_str(s).map_err(|e| Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            return doc.try_into();
        }
        match s {
            "ball" => Ok(RevolutionProfile::Ball),
            "cylinder" => Ok(RevolutionProfile::Cylinder),
            "cone" => Ok(RevolutionProfile::Cone),
            _ => match s.strip_prefix("pball:") {
                Some(p) => {
                    let p: f64 = p
                        .parse()
                        .map_err(|_| Error::Profile(format!("cannot parse exponent in '{s}'")))?;
                    RevolutionProfile::pball(p)
                }
                None => Err(Error::Profile(format!(
                    "unknown profile '{s}' (expected ball, cylinder, cone, pball:<P> or a grid)"
                ))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProfileDoc {
    Named(String),
    Grid { grid: Vec<[f64; 2]> },
}

impl TryFrom<ProfileDoc> for RevolutionProfile {
    type Error = Error;

    fn try_from(doc: ProfileDoc) -> Result<Self> {
        match doc {
            ProfileDoc::Named(s) if s.trim_start().starts_with(['{', '"']) => {
                Err(Error::Profile(format!("unknown profile '{s}'")))
            }
            ProfileDoc::Named(s) => s.parse(),
            ProfileDoc::Grid { grid } => {
                RevolutionProfile::grid(grid.into_iter().map(|[t, r]| (t, r)).collect())
            }
        }
    }
}

impl Serialize for RevolutionProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RevolutionProfile::Grid(g) => ProfileDoc::Grid {
                grid: g.knots.iter().map(|&(t, r)| [t, r]).collect(),
            }
            .serialize(s),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for RevolutionProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ProfileDoc::deserialize(d)?;
        RevolutionProfile::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Minimizes a quasi-convex function on `[lo, hi]` down to a `1e-12` bracket.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > BRACKET {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of a quasi-convex function on `[−1, 1]`. When the minimizer sits
/// near an endpoint the search is repeated in `log(distance to endpoint)`,
/// which resolves square-root behaviour down to the last representable point.
fn minimize_on_unit_interval(f: impl Fn(f64) -> f64) -> f64 {
    let t = golden_section(&f, -1.0, 1.0);
    let mut best = [f(t), f(-1.0), f(1.0), f(0.0)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    for e in [-1.0f64, 1.0] {
        if (t - e).abs() < 1e-3 {
            let at = |v: f64| e - e.signum() * v.exp();
            let v = golden_section(|v| f(at(v)), (1e-17f64).ln(), (1e-3f64).ln());
            best = best.min(f(at(v)));
        }
    }
    best
}

/// `r₂(s) = min_t (1 − ts)/r₁(t)`: the profile of the polar body.
pub struct PolarProfile<'a> {
    base: &'a dyn Profile,
    knots: Option<Vec<(f64, f64)>>,
}

pub fn polar_profile(r1: &dyn Profile) -> PolarProfile<'_> {
    let knots = r1.knots().map(|k| polar_knots(&k));
    PolarProfile { base: r1, knots }
}

// The polar of a polygonal profile is polygonal: each edge between consecutive
// knots with positive radius maps to a vertex where their lines meet. With
// r(0) = 1 and concavity, a radius below the normalization tolerance can only
// sit at t = ±1 and is rounding noise; its near-vertical line would otherwise
// swallow the neighbouring vertex at s = ±1.
fn polar_knots(knots: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let lines: Vec<(f64, f64)> = knots
        .iter()
        .copied()
        .filter(|&(_, r)| r > NORMALIZATION_TOL)
        .collect();
    let envelope = |s: f64| {
        lines
            .iter()
            .map(|&(t, r)| (1.0 - t * s) / r)
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    };
    let mut candidates = vec![-1.0, 1.0];
    for w in lines.windows(2) {
        let ((ta, ra), (tb, rb)) = (w[0], w[1]);
        let den = tb * ra - ta * rb;
        if den != 0.0 {
            let s = (ra - rb) / den;
            if s > -1.0 && s < 1.0 {
                candidates.push(s);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    candidates.into_iter().map(|s| (s, envelope(s))).collect()
}

impl Profile for PolarProfile<'_> {
    fn radius(&self, s: f64) -> f64 {
        if !(s.abs() <= 1.0) {
            return 0.0;
        }
        if let Some(knots) = &self.knots {
            return interpolate(knots, s);
        }
        let objective = |t: f64| {
            let r = self.base.radius(t);
            if r > 0.0 {
                (1.0 - t * s) / r
            } else {
                f64::INFINITY
            }
        };
        minimize_on_unit_interval(objective).max(0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.knots {
            Some(k) => k.iter().map(|k| k.0).collect(),
            None => vec![0.0],
        }
    }

    fn knots(&self) -> Option<Vec<(f64, f64)>> {
        self.knots.clone()
    }
}

/// `(∫ r^{n−1}, ∫ t² r^{n−1}, ∫ r^{n+1})` over `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileMoments {
    pub m0: f64,
    pub m2: f64,
    pub mplus: f64,
    pub quadrature_error: f64,
}

pub fn profile_integrals(r: &dyn Profile, n: usize) -> Result<ProfileMoments> {
    profile_integrals_to(r, n, QUAD_TOL)
}

/// [`profile_integrals`] with an explicit absolute tolerance.
pub fn profile_integrals_to(r: &dyn Profile, n: usize, abs_tol: f64) -> Result<ProfileMoments> {
    if !(abs_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    if n < 2 {
        return Err(Error::domain("bodies of revolution need dimension n >= 2"));
    }
    let mut points = vec![-1.0, 1.0];
    points.extend(r.breakpoints().into_iter().filter(|&b| b > -1.0 && b < 1.0));
    points.sort_by(f64::total_cmp);
    points.dedup();
    let k = n as i32 - 1;
    let q = quadrature::integrate(
        |t| {
            let rad = r.radius(t);
            let base = rad.powi(k);
            [base, t * t * base, base * rad * rad]
        },
        &points,
        abs_tol,
        QUAD_MAX_INTERVALS,
    )?;
    Ok(ProfileMoments {
        m0: q.values[0],
        m2: q.values[1],
        mplus: q.values[2],
        quadrature_error: q.error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevolutionReport {
    pub dim: usize,
    pub phi: f64,
    pub first_summand: f64,
    pub second_summand: f64,
    /// `φ(B_2^{n−1}) = (n−1)/(n+1)²`.
    pub second_summand_bound: f64,
    /// `|K̂ ∩ e₁⊥|² ∫_{K̂} t²` for `K̂ = K/|K|^{1/n}`.
    pub hensley_product_sq: f64,
    /// `|K||K°|/|B_2^n|²`.
    pub santalo_ratio: f64,
    pub n_phi: f64,
    pub n2_first_summand: f64,
    pub euclidean_phi: f64,
    pub primal: ProfileMoments,
    pub polar: ProfileMoments,
}

pub fn phi_revolution(r1: &RevolutionProfile, n: usize) -> Result<RevolutionReport> {
    r1.validate()?;
    phi_revolution_of(r1, n, QUAD_TOL)
}

/// The decomposition for any profile satisfying the validated invariants,
/// with moments integrated to `quad_tol`.
pub fn phi_revolution_of(r1: &dyn Profile, n: usize, quad_tol: f64) -> Result<RevolutionReport> {
    let a = profile_integrals_to(r1, n, quad_tol)?;
    let r2 = polar_profile(r1);
    let b = profile_integrals_to(&r2, n, quad_tol)?;
    let den = a.m0 * b.m0;
    let first = a.m2 * b.m2 / den;
    let bound = phi_euclidean(n - 1);
    let second = a.mplus * b.mplus / den * bound;
    let phi = first + second;
    let euclidean_phi = phi_euclidean(n);
    let ln_slice = ln_euclidean_ball_volume(n - 1);
    let santalo_ratio =
        (2.0 * ln_slice + a.m0.ln() + b.m0.ln() - 2.0 * ln_euclidean_ball_volume(n)).exp();
    let report = RevolutionReport {
        dim: n,
        phi,
        first_summand: first,
        second_summand: second,
        second_summand_bound: bound,
        hensley_product_sq: a.m2 / (a.m0 * a.m0 * a.m0),
        santalo_ratio,
        n_phi: n as f64 * phi,
        n2_first_summand: (n * n) as f64 * first,
        euclidean_phi,
        primal: a,
        polar: b,
    };
    if phi > euclidean_phi + 1e-9 {
        return Err(Error::ConjectureViolation {
            dim: n,
            phi,
            bound: euclidean_phi,
        });
    }
    Ok(report)
}

impl RevolutionReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.second_summand > self.second_summand_bound + 1e-10 {
            out.push(format!(
                "second summand {} exceeds (n-1)/(n+1)^2 = {}",
                self.second_summand, self.second_summand_bound
            ));
        }
        if !(self.hensley_product_sq >= 1.0 / 12.0 - 1e-9 && self.hensley_product_sq <= 0.5 + 1e-9)
        {
            out.push(format!(
                "hensley product {} outside [1/12, 1/2]",
                self.hensley_product_sq
            ));
        }
        if self.santalo_ratio > 1.0 + 1e-9 {
            out.push(format!("santalo ratio {} exceeds 1", self.santalo_ratio));
        }
        out
    }
}

/// [`phi_revolution`] plus the bound assertions.
pub fn decomposition_report(r1: &RevolutionProfile, n: usize) -> Result<RevolutionReport> {
    r1.validate()?;
    decomposition_report_of(r1, n, QUAD_TOL)
}

pub fn decomposition_report_of(
    r1: &dyn Profile,
    n: usize,
    quad_tol: f64,
) -> Result<RevolutionReport> {
    let report = phi_revolution_of(r1, n, quad_tol)?;
    let v = report.violations();
    if v.is_empty() {
        Ok(report)
    } else {
        Err(Error::Invariant(v.join("; ")))
    }
}

/// `sup |r(t) − polar(polar(r))(t)|` over a uniform grid.
pub fn involution_error(r1: &dyn Profile, points: usize) -> f64 {
    let r2 = polar_profile(r1);
    let r3 = polar_profile(&r2);
    (0..points)
        .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
        .map(|t| (r1.radius(t) - r3.radius(t)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{phi_combine, PHI_INTERVAL};
    use crate::exponent::Exponent;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn parse_profiles() {
        assert_eq!(
            "ball".parse::<RevolutionProfile>().unwrap(),
            RevolutionProfile::Ball
        );
        assert_eq!(
            "pball:1.5".parse::<RevolutionProfile>().unwrap(),
            RevolutionProfile::PBall(1.5)
        );
        assert!("pball:0.5".parse::<RevolutionProfile>().is_err());
        assert!("sphere".parse::<RevolutionProfile>().is_err());
        let g: RevolutionProfile = r#"{"grid": [[-1, 0.5], [0, 1], [1, 0.5]]}"#.parse().unwrap();
        assert_eq!(g.radius(0.5), 0.75);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"grid":[[-1.0,0.5],[0.0,1.0],[1.0,0.5]]}"#);
        let back: RevolutionProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn grid_validation() {
        let bad = [
            vec![(-1.0, 0.5), (0.0, 1.0), (0.9, 0.5)],
            vec![(-1.0, 0.5), (0.0, 1.0), (1.0, 0.6)],
            vec![(-1.0, 0.5), (-0.5, 0.6), (0.0, 1.0), (0.5, 0.6), (1.0, 0.5)],
            vec![(-1.0, 1.0), (0.0, 1.1), (1.0, 1.0)],
            vec![(-1.0, -0.1), (0.0, 1.0), (1.0, -0.1)],
            vec![(-1.0, 0.5), (0.0, 1.0), (0.0, 1.0), (1.0, 0.5)],
        ];
        for k in bad {
            assert!(RevolutionProfile::grid(k.clone()).is_err(), "{k:?}");
        }
        let err = RevolutionProfile::grid(vec![(-1.0, 1.0), (0.0, 2.0), (1.0, 1.0)]).unwrap_err();
        assert!(err.to_string().contains("rescale"));
    }

    #[test]
    fn polar_examples() {
        let cyl = polar_profile(&RevolutionProfile::Cylinder);
        let ball = polar_profile(&RevolutionProfile::Ball);
        let cone = polar_profile(&RevolutionProfile::Cone);
        for i in 0..=40 {
            let s = -1.0 + i as f64 / 20.0;
            assert!(close(cyl.radius(s), 1.0 - s.abs(), 1e-14), "s={s}");
            assert!(
                close(ball.radius(s), (1.0 - s * s).max(0.0).sqrt(), 1e-8),
                "s={s}"
            );
            assert!(close(cone.radius(s), 1.0, 1e-14), "s={s}");
        }
    }

    #[test]
    fn pball_profiles_are_dual() {
        let r = RevolutionProfile::PBall(3.0);
        let polar = polar_profile(&r);
        let dual = RevolutionProfile::PBall(1.5);
        for i in 0..=40 {
            let s = -1.0 + i as f64 / 20.0;
            assert!(close(polar.radius(s), dual.radius(s), 1e-8), "s={s}");
        }
    }

    #[test]
    fn integral_examples() {
        for n in [2, 3, 7] {
            let m = profile_integrals(&RevolutionProfile::Cylinder, n).unwrap();
            assert!(
                close(m.m0, 2.0, 1e-13)
                    && close(m.m2, 2.0 / 3.0, 1e-13)
                    && close(m.mplus, 2.0, 1e-13)
            );
        }
        let m = profile_integrals(&RevolutionProfile::Ball, 3).unwrap();
        assert!(close(m.m0, 4.0 / 3.0, 1e-11));
        assert!(close(m.m2, 4.0 / 15.0, 1e-11));
        assert!(close(m.mplus, 16.0 / 15.0, 1e-11));
        let m = profile_integrals(&RevolutionProfile::Cone, 2).unwrap();
        assert!(
            close(m.m0, 1.0, 1e-12) && close(m.m2, 1.0 / 6.0, 1e-12) && close(m.mplus, 0.5, 1e-12)
        );
        assert!(profile_integrals(&RevolutionProfile::Cone, 1).is_err());
    }

    #[test]
    fn phi_examples() {
        let r = phi_revolution(&RevolutionProfile::Ball, 3).unwrap();
        assert!(close(r.phi, 3.0 / 25.0, 1e-9));
        assert!(close(r.second_summand, 2.0 / 25.0, 1e-9));
        let r = phi_revolution(&RevolutionProfile::Cylinder, 2).unwrap();
        assert!(close(r.first_summand, 1.0 / 18.0, 1e-13));
        assert!(close(r.second_summand, 1.0 / 18.0, 1e-13));
        assert!(close(r.hensley_product_sq, 1.0 / 12.0, 1e-13));
        let r = phi_revolution(&RevolutionProfile::PBall(1.5), 4).unwrap();
        let want =
            phi_combine(phi_euclidean(3), 3, PHI_INTERVAL, 1, Exponent::Finite(1.5)).unwrap();
        assert!(close(r.phi, want, 1e-6), "{} vs {want}", r.phi);
    }

    #[test]
    fn decomposition_bounds_hold() {
        let profiles = [
            RevolutionProfile::Ball,
            RevolutionProfile::Cylinder,
            RevolutionProfile::Cone,
            RevolutionProfile::PBall(1.2),
            RevolutionProfile::PBall(4.0),
        ];
        for p in &profiles {
            for n in [2, 3, 6] {
                let r = decomposition_report(p, n).unwrap();
                assert!(close(r.phi, r.first_summand + r.second_summand, 1e-15));
            }
        }
    }

    #[test]
    fn involution_on_named_profiles() {
        for p in [
            RevolutionProfile::Ball,
            RevolutionProfile::Cylinder,
            RevolutionProfile::Cone,
            RevolutionProfile::PBall(1.5),
            RevolutionProfile::PBall(3.0),
        ] {
            let e = involution_error(&p, 201);
            assert!(e <= 1e-8, "{p}: {e}");
        }
    }

    #[test]
    fn rounding_noise_at_the_tips() {
        let eps = 8.3e-17;
        let g = RevolutionProfile::grid(vec![
            (-1.0, eps),
            (-0.9, 0.2),
            (0.0, 1.0),
            (0.9, 0.2),
            (1.0, eps),
        ])
        .unwrap();
        let e = involution_error(&g, 401);
        assert!(e <= 1e-8, "{e}");
        // The polar keeps the vertex where the t = 0.9 line meets s = 1.
        assert!(close(polar_profile(&g).radius(1.0), 0.1 / 0.2, 1e-12));
    }
}
