//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control.
//!
//! Semi-infinite and whole-line integrals are mapped onto finite intervals
//! (`x = a + t/(1-t)` and `x = t/(1-t²)`), so only interior nodes are ever
//! evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Result};

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
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_or_zero(f(center));
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = finite_or_zero(f(center - dx)) + finite_or_zero(f(center + dx));
        kron += wk * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 {
            return Err(domain(
                "Quadrature::new",
                "tolerances must be positive and max_subdivisions >= 1",
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]` (finite endpoints).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadResult {
        if b < a {
            let r = self.integrate_with_breaks(f, &[b, a]);
            return QuadResult {
                value: -r.value,
                ..r
            };
        }
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over consecutive intervals of `breaks` (ascending, finite).
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> QuadResult {
        let mut heap = BinaryHeap::new();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                heap.push(kronrod(&f, w[0], w[1]));
            }
        }
        let mut subdivisions = heap.len();
        let mut total: f64 = heap.iter().map(|s| s.value).sum();
        let mut err: f64 = heap.iter().map(|s| s.error).sum();
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol || subdivisions >= self.max_subdivisions || heap.is_empty() {
                let value: f64 = heap.iter().map(|s| s.value).sum();
                let abs_error: f64 = heap.iter().map(|s| s.error).sum();
                return QuadResult {
                    value,
                    abs_error,
                    subdivisions,
                    converged: abs_error <= self.abs_tol.max(self.rel_tol * value.abs()),
                };
            }
            let worst = heap.pop().expect("non-empty heap");
            if worst.error == 0.0 {
                heap.push(worst);
                err = 0.0;
                continue;
            }
            let mid = 0.5 * (worst.a + worst.b);
            // Intervals too small to split further are frozen.
            if mid <= worst.a || mid >= worst.b {
                err -= worst.error;
                heap.push(Segment {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            let left = kronrod(&f, worst.a, mid);
            let right = kronrod(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            subdivisions += 1;
        }
    }

    /// Integrates `f` over `[a, ∞)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> QuadResult {
        let g = move |t: f64| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        };
        self.integrate(g, 0.0, 1.0)
    }

    /// Integrates `f` over the whole real line.
    pub fn integrate_real_line<F: Fn(f64) -> f64>(&self, f: F) -> QuadResult {
        let g = move |t: f64| {
            let s = 1.0 - t * t;
            f(t / s) * (1.0 + t * t) / (s * s)
        };
        self.integrate_with_breaks(g, &[-1.0, 0.0, 1.0])
    }
}
