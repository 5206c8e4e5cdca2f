//! Globally adaptive Gauss–Kronrod (7/15) quadrature for vector-valued
//! integrands on a finite interval with known breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<const N: usize> {
    pub values: [f64; N],
    /// Sum of per-interval `|Kronrod − Gauss|`, maximized over components.
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

struct Segment<const N: usize> {
    lo: f64,
    hi: f64,
    values: [f64; N],
    errors: [f64; N],
}

impl<const N: usize> Segment<N> {
    fn worst(&self) -> f64 {
        worst(&self.errors)
    }
}

// NaN counts as an infinitely bad estimate.
fn worst(errors: &[f64]) -> f64 {
    errors
        .iter()
        .map(|&e| if e.is_nan() { f64::INFINITY } else { e })
        .fold(0.0, f64::max)
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<const N: usize> Eq for Segment<N> {}

impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst().total_cmp(&other.worst())
    }
}

fn kronrod<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], lo: f64, hi: f64) -> Segment<N> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let mid = f(center);
    for c in 0..N {
        k[c] = WGK[7] * mid[c];
        g[c] = WG[3] * mid[c];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let a = f(center - dx);
        let b = f(center + dx);
        for c in 0..N {
            let s = a[c] + b[c];
            k[c] += WGK[j] * s;
            if j % 2 == 1 {
                g[c] += WG[j / 2] * s;
            }
        }
    }
    let mut values = [0.0; N];
    let mut errors = [0.0; N];
    for c in 0..N {
        values[c] = k[c] * half;
        errors[c] = ((k[c] - g[c]) * half).abs();
    }
    Segment {
        lo,
        hi,
        values,
        errors,
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints.last()]`, starting from
/// one segment per pair of consecutive breakpoints and bisecting the
/// segment with the largest error estimate until the summed estimate drops
/// below `abs_tol` for every component.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    breakpoints: &[f64],
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature<N>> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(
            "quadrature breakpoints must be strictly increasing",
        ));
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        heap.push(kronrod(&mut f, w[0], w[1]));
    }
    let totals = |heap: &BinaryHeap<Segment<N>>| {
        let mut err = [0.0; N];
        for s in heap.iter() {
            for (e, v) in err.iter_mut().zip(&s.errors) {
                *e += v;
            }
        }
        worst(&err)
    };
    let mut error = totals(&heap);
    while !(error <= abs_tol) {
        if !error.is_finite() || heap.len() >= max_intervals {
            return Err(Error::NonConvergence {
                achieved: error,
                requested: abs_tol,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::NonConvergence {
                achieved: error,
                requested: abs_tol,
            });
        }
        heap.push(kronrod(&mut f, worst.lo, mid));
        heap.push(kronrod(&mut f, mid, worst.hi));
        error = totals(&heap);
    }
    let mut segments = heap.into_vec();
    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut values = [0.0; N];
    for s in &segments {
        for (total, v) in values.iter_mut().zip(&s.values) {
            *total += v;
        }
    }
    Ok(Quadrature {
        values,
        error,
        intervals: segments.len(),
        evaluations: segments.len() * 15,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|t| [1.0, t * t, t.powi(10)], &[-1.0, 1.0], 1e-13, 10).unwrap();
        assert!((q.values[0] - 2.0).abs() < 1e-15);
        assert!((q.values[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.values[2] - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn kink_and_endpoint_singularity() {
        let q = integrate(
            |t: f64| [(1.0 - t.abs()).powi(3), (1.0 - t * t).sqrt()],
            &[-1.0, 0.0, 1.0],
            1e-11,
            2000,
        )
        .unwrap();
        assert!((q.values[0] - 0.5).abs() < 1e-12);
        assert!((q.values[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate(|t: f64| [1.0 / t.abs().sqrt()], &[-1.0, 1.0], 1e-14, 8).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate(|_| [1.0], &[0.0], 1e-10, 10).is_err());
        assert!(integrate(|_| [1.0], &[1.0, 0.0], 1e-10, 10).is_err());
    }
}
