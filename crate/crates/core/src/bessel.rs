//! Modified Bessel functions of the first kind, orders 0 and 1.
//!
//! Two independent routes are provided: the power series, and composite
//! trapezoid quadrature of the integral representation
//! `Iₙ(κ) = (1/2π) ∫₀^{2π} cos(n t) e^{κ cos t} dt`. The trapezoid rule is
//! spectrally accurate on periodic analytic integrands.

use std::f64::consts::PI;

/// Default node count for trapezoid quadrature.
pub const QUAD_NODES: usize = 512;

const SERIES_MAX_TERMS: usize = 200;
const SERIES_REL_CUTOFF: f64 = 1e-17;

/// `Iₙ(κ)` for integer order `n ≥ 0` by the power series
/// `Σₘ (κ/2)^{2m+n} / (m! (m+n)!)`.
pub fn bessel_i_series(order: u32, kappa: f64) -> f64 {
    let half = 0.5 * kappa;
    let quarter_sq = half * half;
    let mut term = (0..order).fold(1.0, |acc, k| acc * half / (k + 1) as f64);
    let mut sum = term;
    for m in 1..SERIES_MAX_TERMS {
        term *= quarter_sq / (m as f64 * (m as u32 + order) as f64);
        sum += term;
        if term.abs() < SERIES_REL_CUTOFF * sum.abs() {
            break;
        }
    }
    sum
}

pub fn i0_series(kappa: f64) -> f64 {
    bessel_i_series(0, kappa)
}

pub fn i1_series(kappa: f64) -> f64 {
    bessel_i_series(1, kappa)
}

/// `(I₀(κ), I₁(κ))` by `nodes`-point trapezoid quadrature.
pub fn i0_i1_quadrature(kappa: f64, nodes: usize) -> (f64, f64) {
    let step = 2.0 * PI / nodes as f64;
    let (mut s0, mut s1) = (0.0, 0.0);
    for k in 0..nodes {
        let c = (k as f64 * step).cos();
        let e = (kappa * c).exp();
        s0 += e;
        s1 += c * e;
    }
    (s0 / nodes as f64, s1 / nodes as f64)
}

/// `∫₀^{2π} e^{a cos t + b sin t} dt` by `nodes`-point trapezoid quadrature.
pub fn exp_trig_integral(a: f64, b: f64, nodes: usize) -> f64 {
    let step = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|k| {
            let t = k as f64 * step;
            (a * t.cos() + b * t.sin()).exp()
        })
        .sum();
    sum * step
}

/// `∫₀^{2π} (cos t, sin t) e^{a cos t + b sin t} dt`, trapezoid rule.
pub fn exp_trig_first_moments(a: f64, b: f64, nodes: usize) -> (f64, f64) {
    let step = 2.0 * PI / nodes as f64;
    let (mut mc, mut ms) = (0.0, 0.0);
    for k in 0..nodes {
        let t = k as f64 * step;
        let (s, c) = t.sin_cos();
        let e = (a * c + b * s).exp();
        mc += c * e;
        ms += s * e;
    }
    (mc * step, ms * step)
}
