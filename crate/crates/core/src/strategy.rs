//! Interchangeable evaluators of φ, registered by name.

use serde::Serialize;

use crate::bodies::BodySpec;
use crate::error::{Error, Result};
use crate::exact::{self, PhiBreakdown, PHI_INTERVAL};
use crate::exponent::Exponent;
use crate::revolution::{self, RevolutionReport};
use crate::sampler::{self, MCEstimate};

/// Monte Carlo is refused above this dimension.
pub const MC_MAX_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            samples: 200_000,
            seed: 0,
        }
    }
}

/// Volumes and φ of a body built from closed-form pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactRecord {
    pub ln_volume: f64,
    pub ln_polar_volume: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    PBall(PhiBreakdown),
    Exact(ExactRecord),
    Revolution(RevolutionReport),
    MonteCarlo(MCEstimate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiEvaluation {
    pub method: &'static str,
    pub dim: usize,
    pub phi: f64,
    /// Standard error, for stochastic methods.
    pub stderr: Option<f64>,
    pub detail: Detail,
}

pub trait PhiStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn supports(&self, body: &BodySpec) -> bool;
    fn evaluate(&self, body: &BodySpec, opts: &EvalOptions) -> Result<PhiEvaluation>;
}

// φ is invariant under linear maps and polarity, so evaluators look through
// those wrappers.
fn core_body(body: &BodySpec) -> &BodySpec {
    match body {
        BodySpec::Linear(l) => core_body(l.inner()),
        BodySpec::Polar(inner) => core_body(inner),
        other => other,
    }
}

/// `φ(A ×ₚ B)` from the factors, recursively.
pub struct ProductRecursion;

impl ProductRecursion {
    fn record(body: &BodySpec) -> Result<ExactRecord> {
        match body {
            BodySpec::PBall { dim, p } => {
                let b = exact::phi_pball(*dim, *p)?;
                Ok(ExactRecord {
                    ln_volume: b.ln_volume,
                    ln_polar_volume: b.ln_polar_volume,
                    phi: b.phi,
                })
            }
            BodySpec::Interval => Ok(ExactRecord {
                ln_volume: std::f64::consts::LN_2,
                ln_polar_volume: std::f64::consts::LN_2,
                phi: PHI_INTERVAL,
            }),
            BodySpec::Product { p, left, right } => {
                let (a, b) = (Self::record(left)?, Self::record(right)?);
                let (n, m) = (left.dim(), right.dim());
                Ok(ExactRecord {
                    ln_volume: exact::ln_product_volume(n, a.ln_volume, m, b.ln_volume, *p),
                    ln_polar_volume: exact::ln_product_volume(
                        n,
                        a.ln_polar_volume,
                        m,
                        b.ln_polar_volume,
                        p.dual(),
                    ),
                    phi: exact::phi_combine(a.phi, n, b.phi, m, *p)?,
                })
            }
            BodySpec::Linear(l) => {
                let r = Self::record(l.inner())?;
                Ok(ExactRecord {
                    ln_volume: r.ln_volume + l.ln_abs_det(),
                    ln_polar_volume: r.ln_polar_volume - l.ln_abs_det(),
                    phi: r.phi,
                })
            }
            BodySpec::Polar(inner) => {
                let r = Self::record(inner)?;
                Ok(ExactRecord {
                    ln_volume: r.ln_polar_volume,
                    ln_polar_volume: r.ln_volume,
                    phi: r.phi,
                })
            }
            other => Err(Error::Unsupported(format!(
                "method f cannot evaluate {}",
                other.to_canonical_string()
            ))),
        }
    }
}

impl PhiStrategy for ProductRecursion {
    fn name(&self) -> &'static str {
        "f"
    }

    fn description(&self) -> &'static str {
        "closed-form recursion over p-products of p-balls and intervals"
    }

    fn supports(&self, body: &BodySpec) -> bool {
        match body {
            BodySpec::PBall { .. } | BodySpec::Interval => true,
            BodySpec::Product { left, right, .. } => self.supports(left) && self.supports(right),
            BodySpec::Linear(l) => self.supports(l.inner()),
            BodySpec::Polar(inner) => self.supports(inner),
            _ => false,
        }
    }

    fn evaluate(&self, body: &BodySpec, _opts: &EvalOptions) -> Result<PhiEvaluation> {
        let detail = match body {
            BodySpec::PBall { dim, p } => Detail::PBall(exact::phi_pball(*dim, *p)?),
            _ => Detail::Exact(Self::record(body)?),
        };
        let phi = match &detail {
            Detail::PBall(b) => b.phi,
            Detail::Exact(r) => r.phi,
            _ => unreachable!(),
        };
        Ok(PhiEvaluation {
            method: self.name(),
            dim: body.dim(),
            phi,
            stderr: None,
            detail,
        })
    }
}

/// Volumes and cross integrals tracked separately, `p ∈ (1, ∞)` only.
pub struct MomentRecursion;

impl PhiStrategy for MomentRecursion {
    fn name(&self) -> &'static str {
        "moments"
    }

    fn description(&self) -> &'static str {
        "triple recursion on volumes and second moments of p-balls, 1 < p < inf"
    }

    fn supports(&self, body: &BodySpec) -> bool {
        matches!(core_body(body), BodySpec::PBall { p: Exponent::Finite(p), .. } if *p > 1.0)
    }

    fn evaluate(&self, body: &BodySpec, _opts: &EvalOptions) -> Result<PhiEvaluation> {
        match core_body(body) {
            BodySpec::PBall { dim, p } if self.supports(body) => {
                let b = exact::phi_via_moments(*dim, *p)?;
                Ok(PhiEvaluation {
                    method: self.name(),
                    dim: *dim,
                    phi: b.phi,
                    stderr: None,
                    detail: Detail::PBall(b),
                })
            }
            _ => Err(Error::Unsupported(
                "method moments needs a p-ball with 1 < p < inf".into(),
            )),
        }
    }
}

/// One-dimensional quadrature of the profile and its polar.
pub struct RevolutionQuadrature;

impl PhiStrategy for RevolutionQuadrature {
    fn name(&self) -> &'static str {
        "revolution"
    }

    fn description(&self) -> &'static str {
        "adaptive quadrature of the profile of a body of revolution and of its polar"
    }

    fn supports(&self, body: &BodySpec) -> bool {
        matches!(core_body(body), BodySpec::Revolution { .. })
    }

    fn evaluate(&self, body: &BodySpec, _opts: &EvalOptions) -> Result<PhiEvaluation> {
        match core_body(body) {
            BodySpec::Revolution { dim, profile } => {
                let r = revolution::phi_revolution(profile, *dim)?;
                Ok(PhiEvaluation {
                    method: self.name(),
                    dim: *dim,
                    phi: r.phi,
                    stderr: None,
                    detail: Detail::Revolution(r),
                })
            }
            _ => Err(Error::Unsupported(
                "method revolution needs a body of revolution".into(),
            )),
        }
    }
}

pub struct MonteCarlo;

impl PhiStrategy for MonteCarlo {
    fn name(&self) -> &'static str {
        "mc"
    }

    fn description(&self) -> &'static str {
        "Monte Carlo over independent uniform pairs from the body and its polar"
    }

    fn supports(&self, body: &BodySpec) -> bool {
        body.dim() <= MC_MAX_DIM
    }

    fn evaluate(&self, body: &BodySpec, opts: &EvalOptions) -> Result<PhiEvaluation> {
        if !self.supports(body) {
            return Err(Error::Unsupported(format!(
                "Monte Carlo is limited to dimension {MC_MAX_DIM}, got {}",
                body.dim()
            )));
        }
        let e = sampler::estimate_phi(body, opts.samples, opts.seed)?;
        Ok(PhiEvaluation {
            method: self.name(),
            dim: body.dim(),
            phi: e.estimate,
            stderr: Some(e.stderr),
            detail: Detail::MonteCarlo(e),
        })
    }
}

/// Strategies in registration order; `auto` picks the first that applies.
pub struct StrategyRegistry {
    strategies: Vec<Box<dyn PhiStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            strategies: Vec::new(),
        }
    }

    pub fn register(&mut self, s: Box<dyn PhiStrategy>) -> Result<()> {
        if s.name() == "auto" || self.get(s.name()).is_some() {
            return Err(Error::domain(format!(
                "strategy name '{}' is taken",
                s.name()
            )));
        }
        self.strategies.push(s);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn PhiStrategy> {
        self.strategies
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn PhiStrategy> {
        self.strategies.iter().map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn select(&self, body: &BodySpec) -> Option<&dyn PhiStrategy> {
        self.iter().find(|s| s.supports(body))
    }

    pub fn evaluate(
        &self,
        method: &str,
        body: &BodySpec,
        opts: &EvalOptions,
    ) -> Result<PhiEvaluation> {
        let s = if method == "auto" {
            self.select(body).ok_or_else(|| {
                Error::Unsupported("no registered method supports this body".into())
            })?
        } else {
            self.get(method).ok_or_else(|| {
                Error::domain(format!(
                    "unknown method '{method}' (known: auto, {})",
                    self.names().join(", ")
                ))
            })?
        };
        if !s.supports(body) {
            return Err(Error::Unsupported(format!(
                "method '{}' does not support this body",
                s.name()
            )));
        }
        s.evaluate(body, opts)
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry::empty();
        r.register(Box::new(ProductRecursion)).unwrap();
        r.register(Box::new(MomentRecursion)).unwrap();
        r.register(Box::new(RevolutionQuadrature)).unwrap();
        r.register(Box::new(MonteCarlo)).unwrap();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revolution::RevolutionProfile;

    fn body(text: &str) -> BodySpec {
        BodySpec::parse(text).unwrap()
    }

    #[test]
    fn registry_order_and_lookup() {
        let r = StrategyRegistry::default();
        assert_eq!(r.names(), ["f", "moments", "revolution", "mc"]);
        assert!(r.get("nope").is_none());
        let mut r = r;
        assert!(r.register(Box::new(MonteCarlo)).is_err());
    }

    #[test]
    fn auto_selection() {
        let r = StrategyRegistry::default();
        let pick = |t: &str| r.select(&body(t)).unwrap().name();
        assert_eq!(pick(r#"{"type":"pball","dim":3,"p":2}"#), "f");
        assert_eq!(
            pick(r#"{"type":"revolution","dim":3,"profile":"cone"}"#),
            "revolution"
        );
        assert_eq!(pick(r#"{"type":"simplex","dim":3}"#), "mc");
    }

    #[test]
    fn methods_agree_on_pballs() {
        let r = StrategyRegistry::default();
        let b = body(r#"{"type":"pball","dim":4,"p":3}"#);
        let f = r.evaluate("f", &b, &EvalOptions::default()).unwrap().phi;
        let m = r
            .evaluate("moments", &b, &EvalOptions::default())
            .unwrap()
            .phi;
        assert!((f - m).abs() <= 1e-10 * f);
        assert!(r
            .evaluate("revolution", &b, &EvalOptions::default())
            .is_err());
    }

    #[test]
    fn product_record_volumes() {
        let r = StrategyRegistry::default();
        // The square as [−1,1] ×_∞ [−1,1], sheared: volume 4, polar volume 2.
        let b = body(
            r#"{"type":"linear","matrix":[[1,1],[0,1]],"inner":{"type":"product","p":"inf","left":{"type":"interval"},"right":{"type":"interval"}}}"#,
        );
        let e = r.evaluate("f", &b, &EvalOptions::default()).unwrap();
        match e.detail {
            Detail::Exact(rec) => {
                assert!((rec.ln_volume.exp() - 4.0).abs() < 1e-13);
                assert!((rec.ln_polar_volume.exp() - 2.0).abs() < 1e-13);
                assert!((rec.phi - 1.0 / 9.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn revolution_agrees_with_product_recursion() {
        let r = StrategyRegistry::default();
        let rev = BodySpec::revolution(3, RevolutionProfile::PBall(3.0)).unwrap();
        let prod = body(
            r#"{"type":"product","p":3,"left":{"type":"pball","dim":2,"p":2},"right":{"type":"interval"}}"#,
        );
        let a = r
            .evaluate("auto", &rev, &EvalOptions::default())
            .unwrap()
            .phi;
        let b = r
            .evaluate("auto", &prod, &EvalOptions::default())
            .unwrap()
            .phi;
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn mc_dimension_cap() {
        let r = StrategyRegistry::default();
        let b = body(r#"{"type":"pball","dim":11,"p":2}"#);
        assert!(matches!(
            r.evaluate("mc", &b, &EvalOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
