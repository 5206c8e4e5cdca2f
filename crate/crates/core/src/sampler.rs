//! Uniform sampling from bodies and the Monte Carlo estimate of φ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{BodySpec, Side};
use crate::error::{Error, Result};
use crate::exponent::Exponent;

/// Rejection gives up on a single point after this many proposals, i.e. once
/// the observed acceptance rate is below `1e-6`.
pub const MAX_ATTEMPTS: u64 = 1_000_000;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub primal_acceptance: f64,
    pub polar_acceptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    /// Proposals consumed, `1` for direct methods.
    pub attempts: u64,
}

/// The stream for sample `index` under `seed`; streams never overlap.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Decimal, or hexadecimal with a `0x` prefix.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| {
        Error::domain(format!(
            "invalid seed '{t}' (expected decimal or 0x-prefixed hex)"
        ))
    })
}

/// A uniform point in `B_p^n`.
///
/// With `|g_i| = U_i G_i^{1/p}`, `G_i ~ Gamma(1 + 1/p)`, the coordinates have
/// density `∝ exp(−|t|^p)`; dividing by `(Σ|g_i|^p + E)^{1/p}` with
/// `E ~ Exp(1)` gives the uniform law on the ball.
pub fn sample_pball<R: Rng + ?Sized>(n: usize, p: Exponent, rng: &mut R) -> Vec<f64> {
    match p {
        Exponent::Infinite => (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        Exponent::Finite(p) => {
            let gamma = Gamma::new(1.0 + 1.0 / p, 1.0).expect("shape is positive");
            let mut g: Vec<f64> = (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    sign * u * gamma.sample(rng).powf(1.0 / p)
                })
                .collect();
            let e: f64 = Exp1.sample(rng);
            let s = g.iter().map(|v| v.abs().powf(p)).sum::<f64>() + e;
            let scale = s.powf(-1.0 / p);
            for v in &mut g {
                *v *= scale;
            }
            g
        }
    }
}

/// A uniform point in the body (primal) or its polar.
pub fn sample_body<R: Rng + ?Sized>(body: &BodySpec, side: Side, rng: &mut R) -> Result<Sample> {
    match (body, side) {
        (BodySpec::PBall { dim, p }, _) => {
            let e = if side == Side::Primal { *p } else { p.dual() };
            Ok(Sample {
                point: sample_pball(*dim, e, rng),
                attempts: 1,
            })
        }
        (BodySpec::Interval, _) => Ok(Sample {
            point: vec![rng.random_range(-1.0..=1.0)],
            attempts: 1,
        }),
        // Linear maps carry uniform measure to uniform measure.
        (BodySpec::Linear(l), _) => {
            let s = sample_body(l.inner(), side, rng)?;
            Ok(Sample {
                point: l.push_forward(side, &s.point),
                attempts: s.attempts,
            })
        }
        (BodySpec::Polar(inner), _) => sample_body(inner, side.flip(), rng),
        _ => reject(body, side, rng),
    }
}

fn reject<R: Rng + ?Sized>(body: &BodySpec, side: Side, rng: &mut R) -> Result<Sample> {
    let n = body.dim();
    let r = body.bounding_radius(side);
    let mut point = vec![0.0; n];
    for attempt in 1..=MAX_ATTEMPTS {
        for v in point.iter_mut() {
            *v = rng.random_range(-r..=r);
        }
        if body.membership(side, &point)? {
            return Ok(Sample {
                point,
                attempts: attempt,
            });
        }
    }
    Err(Error::EnvelopeFailure {
        rate: 1.0 / MAX_ATTEMPTS as f64,
        attempts: MAX_ATTEMPTS,
    })
}

/// Fixed-order pairwise sum.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[derive(Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
    attempts_x: u64,
    attempts_y: u64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        let count = self.count + o.count;
        let delta = o.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * o.count / count,
            m2: self.m2 + o.m2 + delta * delta * self.count * o.count / count,
            attempts_x: self.attempts_x + o.attempts_x,
            attempts_y: self.attempts_y + o.attempts_y,
        }
    }
}

fn chunk(body: &BodySpec, seed: u64, lo: u64, hi: u64) -> Result<Moments> {
    let mut values = Vec::with_capacity((hi - lo) as usize);
    let (mut ax, mut ay) = (0, 0);
    for i in lo..hi {
        let mut rng = sample_stream(seed, i);
        let x = sample_body(body, Side::Primal, &mut rng)?;
        let y = sample_body(body, Side::Polar, &mut rng)?;
        let d: f64 = x.point.iter().zip(&y.point).map(|(a, b)| a * b).sum();
        values.push(d * d);
        ax += x.attempts;
        ay += y.attempts;
    }
    let count = values.len() as f64;
    let mean = pairwise_sum(&values) / count;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    Ok(Moments {
        count,
        mean,
        m2: pairwise_sum(&dev),
        attempts_x: ax,
        attempts_y: ay,
    })
}

/// Mean of `⟨x, y⟩²` over independent uniform pairs `x ∈ K`, `y ∈ K°`.
///
/// Sample `i` draws from [`sample_stream`]`(seed, i)`, and chunk results are
/// merged in index order, so the result does not depend on the thread count.
pub fn estimate_phi(body: &BodySpec, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 samples"));
    }
    let chunks = samples.div_ceil(CHUNK as u64);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            chunk(
                body,
                seed,
                k * CHUNK as u64,
                ((k + 1) * CHUNK as u64).min(samples),
            )
        })
        .collect::<Result<_>>()?;
    let total = parts
        .into_iter()
        .reduce(Moments::merge)
        .expect("at least one chunk");
    let variance = total.m2 / (total.count - 1.0);
    Ok(MCEstimate {
        estimate: total.mean,
        stderr: (variance / total.count).sqrt(),
        samples,
        seed,
        primal_acceptance: samples as f64 / total.attempts_x as f64,
        polar_acceptance: samples as f64 / total.attempts_y as f64,
    })
}
