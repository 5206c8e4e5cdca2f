//! Convex bodies described by a small JSON grammar, with membership oracles
//! for the body and its polar.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::revolution::{Profile, RevolutionProfile};

/// Matrices with a larger condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Polar,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Primal => Side::Polar,
            Side::Polar => Side::Primal,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Primal => "primal",
            Side::Polar => "polar",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodySpec {
    PBall {
        dim: usize,
        p: Exponent,
    },
    /// `A ×ₚ B`, whose gauge is the ℓ_p combination of the factor gauges.
    Product {
        p: Exponent,
        left: Box<BodySpec>,
        right: Box<BodySpec>,
    },
    Revolution {
        dim: usize,
        profile: RevolutionProfile,
    },
    Linear(LinearImage),
    Simplex(Simplex),
    Interval,
    /// A body whose polar has no closed description in the grammar.
    Polar(Box<BodySpec>),
}

/// `T K` for an invertible `T`.
#[derive(Debug, Clone)]
pub struct LinearImage {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    condition: f64,
    ln_abs_det: f64,
    inner: Box<BodySpec>,
}

impl PartialEq for LinearImage {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.inner == other.inner
    }
}

impl LinearImage {
    pub fn new(matrix: DMatrix<f64>, inner: BodySpec) -> Result<Self> {
        let n = inner.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Body("matrix entries must be finite".into()));
        }
        let sv = matrix.clone().svd(false, false).singular_values;
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::NonInvertible { condition });
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or(Error::NonInvertible { condition })?;
        let ln_abs_det = sv.iter().map(|s| s.ln()).sum();
        Ok(LinearImage {
            matrix,
            inverse,
            condition,
            ln_abs_det,
            inner: Box::new(inner),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn ln_abs_det(&self) -> f64 {
        self.ln_abs_det
    }

    pub fn inner(&self) -> &BodySpec {
        &self.inner
    }

    /// `T x` on the primal side, `T⁻ᵀ y` on the polar side: carries points of
    /// the inner body (or its polar) to the image.
    pub fn push_forward(&self, side: Side, x: &[f64]) -> Vec<f64> {
        match side {
            Side::Primal => mul(&self.matrix, x, false),
            Side::Polar => mul(&self.inverse, x, true),
        }
    }

    /// `T⁻¹ x` on the primal side, `Tᵀ y` on the polar side.
    pub fn pull_back(&self, side: Side, x: &[f64]) -> Vec<f64> {
        match side {
            Side::Primal => mul(&self.inverse, x, false),
            Side::Polar => mul(&self.matrix, x, true),
        }
    }

    fn polar(&self) -> LinearImage {
        LinearImage {
            matrix: self.inverse.transpose(),
            inverse: self.matrix.transpose(),
            condition: self.condition,
            ln_abs_det: -self.ln_abs_det,
            inner: Box::new(self.inner.polar()),
        }
    }
}

fn mul(m: &DMatrix<f64>, x: &[f64], transpose: bool) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if transpose { m[(j, i)] } else { m[(i, j)] } * x[j])
                .sum()
        })
        .collect()
}

/// The regular simplex with unit vertices and centroid at the origin.
#[derive(Debug, Clone)]
pub struct Simplex {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
    }
}

impl Simplex {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Body("dimension must be a positive integer".into()));
        }
        Ok(Simplex {
            dim,
            vertices: simplex_vertices(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n + 1` unit vectors with pairwise inner product `−1/n`.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }
}

fn simplex_vertices(n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let nf = n as f64;
    let scale = (1.0 - 1.0 / (nf * nf)).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    out.push(first);
    for w in simplex_vertices(n - 1) {
        let mut v = Vec::with_capacity(n);
        v.push(-1.0 / nf);
        v.extend(w.iter().map(|c| scale * c));
        out.push(v);
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclidean_norm(x: &[f64]) -> f64 {
    p_norm(x, Exponent::TWO)
}

/// `‖x‖_p`, scaled by the largest coordinate so no power overflows.
pub fn p_norm(x: &[f64], p: Exponent) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        _ if m == 0.0 || !m.is_finite() => m,
        Exponent::Infinite => m,
        Exponent::Finite(1.0) => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) => {
            m * x
                .iter()
                .map(|v| (v.abs() / m).powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }
}

fn combine(a: f64, b: f64, p: Exponent) -> f64 {
    p_norm(&[a, b], p)
}

impl BodySpec {
    pub fn pball(dim: usize, p: Exponent) -> Result<Self> {
        check_dim(dim)?;
        Ok(BodySpec::PBall { dim, p })
    }

    pub fn product(p: Exponent, left: BodySpec, right: BodySpec) -> Result<Self> {
        for factor in [&left, &right] {
            if !factor.is_symmetric() {
                return Err(Error::Body(
                    "product factors must be origin-symmetric".into(),
                ));
            }
        }
        Ok(BodySpec::Product {
            p,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn revolution(dim: usize, profile: RevolutionProfile) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Body("bodies of revolution need dim >= 2".into()));
        }
        profile.validate()?;
        Ok(BodySpec::Revolution { dim, profile })
    }

    pub fn linear(matrix: DMatrix<f64>, inner: BodySpec) -> Result<Self> {
        LinearImage::new(matrix, inner).map(BodySpec::Linear)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        Simplex::new(dim).map(BodySpec::Simplex)
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::PBall { dim, .. } | BodySpec::Revolution { dim, .. } => *dim,
            BodySpec::Product { left, right, .. } => left.dim() + right.dim(),
            BodySpec::Linear(l) => l.inner.dim(),
            BodySpec::Simplex(s) => s.dim,
            BodySpec::Interval => 1,
            BodySpec::Polar(inner) => inner.dim(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            BodySpec::Simplex(_) => false,
            BodySpec::Product { .. } => true,
            BodySpec::Linear(l) => l.inner.is_symmetric(),
            BodySpec::Polar(inner) => inner.is_symmetric(),
            _ => true,
        }
    }

    /// The polar body, resolved structurally.
    pub fn polar(&self) -> BodySpec {
        match self {
            BodySpec::PBall { dim, p } => BodySpec::PBall {
                dim: *dim,
                p: p.dual(),
            },
            BodySpec::Interval => BodySpec::Interval,
            BodySpec::Product { p, left, right } => BodySpec::Product {
                p: p.dual(),
                left: Box::new(left.polar()),
                right: Box::new(right.polar()),
            },
            BodySpec::Linear(l) => BodySpec::Linear(l.polar()),
            BodySpec::Polar(inner) => (**inner).clone(),
            other => BodySpec::Polar(Box::new(other.clone())),
        }
    }

    /// The body on the given side.
    pub fn resolve(&self, side: Side) -> BodySpec {
        match side {
            Side::Primal => self.clone(),
            Side::Polar => self.polar(),
        }
    }

    /// The gauge (Minkowski functional) of the body or of its polar.
    pub fn gauge(&self, side: Side, x: &[f64]) -> f64 {
        match (self, side) {
            (BodySpec::PBall { p, .. }, Side::Primal) => p_norm(x, *p),
            (BodySpec::PBall { p, .. }, Side::Polar) => p_norm(x, p.dual()),
            (BodySpec::Interval, _) => x[0].abs(),
            (BodySpec::Product { p, left, right }, _) => {
                let n = left.dim();
                let exponent = if side == Side::Primal { *p } else { p.dual() };
                combine(
                    left.gauge(side, &x[..n]),
                    right.gauge(side, &x[n..]),
                    exponent,
                )
            }
            (BodySpec::Revolution { profile, .. }, Side::Primal) => revolution_gauge(profile, x),
            (BodySpec::Revolution { profile, .. }, Side::Polar) => {
                profile.support(x[0], euclidean_norm(&x[1..]))
            }
            (BodySpec::Linear(l), _) => l.inner.gauge(side, &l.pull_back(side, x)),
            (BodySpec::Simplex(s), Side::Primal) => {
                let n = s.dim as f64;
                s.vertices
                    .iter()
                    .map(|v| -n * dot(x, v))
                    .fold(0.0, f64::max)
            }
            (BodySpec::Simplex(s), Side::Polar) => {
                s.vertices.iter().map(|v| dot(x, v)).fold(0.0, f64::max)
            }
            (BodySpec::Polar(inner), _) => inner.gauge(side.flip(), x),
        }
    }

    fn contains(&self, side: Side, x: &[f64]) -> bool {
        match (self, side) {
            (BodySpec::Revolution { profile, .. }, Side::Primal) => {
                x[0].abs() <= 1.0 && euclidean_norm(&x[1..]) <= profile.radius(x[0])
            }
            (BodySpec::Linear(l), _) => l.inner.contains(side, &l.pull_back(side, x)),
            (BodySpec::Polar(inner), _) => inner.contains(side.flip(), x),
            _ => self.gauge(side, x) <= 1.0,
        }
    }

    /// Whether `point` lies in the body (primal) or its polar. Boundary
    /// points are inside.
    pub fn membership(&self, side: Side, point: &[f64]) -> Result<bool> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(self.contains(side, point))
    }

    /// A radius `R` with the body inside the Euclidean ball of radius `R`.
    pub fn bounding_radius(&self, side: Side) -> f64 {
        match (self, side) {
            (BodySpec::PBall { dim, p }, _) => {
                let e = if side == Side::Primal { *p } else { p.dual() };
                let inv = e.reciprocal();
                if inv >= 0.5 {
                    1.0
                } else {
                    (*dim as f64).powf(0.5 - inv)
                }
            }
            (BodySpec::Interval, _) => 1.0,
            (BodySpec::Product { left, right, .. }, _) => left
                .bounding_radius(side)
                .hypot(right.bounding_radius(side)),
            (BodySpec::Revolution { .. }, _) => std::f64::consts::SQRT_2,
            (BodySpec::Linear(l), _) => {
                let m = match side {
                    Side::Primal => &l.matrix,
                    Side::Polar => &l.inverse,
                };
                operator_norm(m) * l.inner.bounding_radius(side)
            }
            (BodySpec::Simplex(_), Side::Primal) => 1.0,
            (BodySpec::Simplex(s), Side::Polar) => s.dim as f64,
            (BodySpec::Polar(inner), _) => inner.bounding_radius(side.flip()),
        }
    }

    /// Parses a body description.
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_value(&value, "$")
    }

    /// The canonical compact encoding: sorted keys, shortest round-trip numbers.
    pub fn to_canonical_string(&self) -> String {
        self.to_value().to_string()
    }

    pub fn to_value(&self) -> Value {
        match self {
            BodySpec::PBall { dim, p } => json!({"type": "pball", "dim": dim, "p": p}),
            BodySpec::Product { p, left, right } => json!({
                "type": "product",
                "p": p,
                "left": left.to_value(),
                "right": right.to_value(),
            }),
            BodySpec::Revolution { dim, profile } => {
                json!({"type": "revolution", "dim": dim, "profile": profile})
            }
            BodySpec::Linear(l) => {
                let rows: Vec<Vec<f64>> = (0..l.matrix.nrows())
                    .map(|i| l.matrix.row(i).iter().copied().collect())
                    .collect();
                json!({"type": "linear", "matrix": rows, "inner": l.inner.to_value()})
            }
            BodySpec::Simplex(s) => json!({"type": "simplex", "dim": s.dim}),
            BodySpec::Interval => json!({"type": "interval"}),
            BodySpec::Polar(inner) => json!({"type": "polar", "body": inner.to_value()}),
        }
    }

    pub fn from_value(value: &Value, path: &str) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Body(format!("{path}: expected an object")))?;
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Body(format!("{path}: missing string field \"type\"")))?;
        let allowed: &[&str] = match kind {
            "pball" => &["type", "dim", "p"],
            "product" => &["type", "dim", "p", "left", "right"],
            "revolution" => &["type", "dim", "profile"],
            "linear" => &["type", "dim", "matrix", "inner"],
            "simplex" => &["type", "dim"],
            "interval" => &["type", "dim"],
            "polar" => &["type", "dim", "body"],
            other => {
                return Err(Error::Body(format!(
                    "{path}: unknown body type \"{other}\""
                )))
            }
        };
        if let Some(key) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Body(format!(
                "{path}: unknown field \"{key}\" for type \"{kind}\""
            )));
        }
        let body = match kind {
            "pball" => BodySpec::PBall {
                dim: required_dim(obj, path)?,
                p: exponent(obj, path)?,
            },
            "product" => {
                let left = Self::from_value(field(obj, "left", path)?, &format!("{path}.left"))?;
                let right = Self::from_value(field(obj, "right", path)?, &format!("{path}.right"))?;
                BodySpec::product(exponent(obj, path)?, left, right)
                    .map_err(|e| Error::Body(format!("{path}: {}", strip_prefix(&e))))?
            }
            "revolution" => {
                let profile: RevolutionProfile =
                    serde_json::from_value(field(obj, "profile", path)?.clone())
                        .map_err(|e| Error::Profile(format!("{path}.profile: {e}")))?;
                BodySpec::revolution(required_dim(obj, path)?, profile)?
            }
            "linear" => {
                let inner = Self::from_value(field(obj, "inner", path)?, &format!("{path}.inner"))?;
                BodySpec::linear(matrix(field(obj, "matrix", path)?, path)?, inner)?
            }
            "simplex" => BodySpec::simplex(required_dim(obj, path)?)?,
            "interval" => BodySpec::Interval,
            _ => BodySpec::Polar(Box::new(Self::from_value(
                field(obj, "body", path)?,
                &format!("{path}.body"),
            )?)),
        };
        if obj.contains_key("dim") {
            let dim = required_dim(obj, path)?;
            if dim != body.dim() {
                return Err(Error::DimensionMismatch {
                    expected: body.dim(),
                    got: dim,
                });
            }
        }
        Ok(body)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::Body("dimension must be a positive integer".into()))
    } else {
        Ok(())
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Body(m) => m.clone(),
        other => other.to_string(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Body(format!("{path}: missing field \"{key}\"")))
}

fn required_dim(obj: &Map<String, Value>, path: &str) -> Result<usize> {
    let v = field(obj, "dim", path)?;
    match v.as_u64() {
        Some(d) if d >= 1 => Ok(d as usize),
        _ => Err(Error::Body(format!(
            "{path}: dimension must be a positive integer, got {v}"
        ))),
    }
}

fn exponent(obj: &Map<String, Value>, path: &str) -> Result<Exponent> {
    Exponent::deserialize(field(obj, "p", path)?).map_err(|e| Error::Body(format!("{path}.p: {e}")))
}

fn matrix(v: &Value, path: &str) -> Result<DMatrix<f64>> {
    let bad = || {
        Error::Body(format!(
            "{path}.matrix: expected a square array of number rows"
        ))
    };
    let rows = v.as_array().ok_or_else(bad)?;
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        let row = row.as_array().ok_or_else(bad)?;
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        for x in row {
            data.push(x.as_f64().ok_or_else(bad)?);
        }
    }
    if n == 0 {
        return Err(bad());
    }
    Ok(DMatrix::from_row_slice(n, n, &data))
}

fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |a: f64, &b| a.max(b))
}

// λ ↦ [x/λ ∈ K] is monotone; K contains the double cone |x| ≤ 1 − |t| and
// lies in |t|, |x| ≤ 1, which brackets the gauge.
fn revolution_gauge(profile: &RevolutionProfile, x: &[f64]) -> f64 {
    let t = x[0].abs();
    let rho = euclidean_norm(&x[1..]);
    let mut lo = t.max(rho);
    let mut hi = t + rho;
    if hi == 0.0 {
        return 0.0;
    }
    let inside = |lambda: f64| t <= lambda && rho <= lambda * profile.radius(t / lambda);
    if inside(lo) {
        return lo;
    }
    while hi - lo > 1e-16 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl Serialize for BodySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BodySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        BodySpec::from_value(&v, "$").map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for BodySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BodySpec::parse(s)
    }
}
