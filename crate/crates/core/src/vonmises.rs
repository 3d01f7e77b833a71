//! Maximum-likelihood estimation for the von Mises distribution.
//!
//! In natural parameters `θ = (κ cos μ, κ sin μ)` the negative likelihood is,
//! up to a monotone transform, the function
//!
//! `L(θ) = e^{−c̄θ₁ − s̄θ₂} ∫₀^{2π} e^{θ₁ cos t + θ₂ sin t} dt = e^{−m·θ} 2π I₀(‖θ‖)`
//!
//! with `m = (c̄, s̄)` the sample means of `cos x` and `sin x`.
//!
//! # Pfaffian system
//!
//! `g(θ) = 2π I₀(κ)`, `κ = ‖θ‖`, is annihilated by `∂₁² + ∂₂² − 1` and
//! `θ₁∂₂ − θ₂∂₁`: it is radial and solves the modified Bessel equation. For
//! `G = (g, dg/dκ) = 2π (I₀(κ), I₁(κ))` the chain rule `∂ᵢ = (θᵢ/κ) d/dκ`
//! together with `I₀′ = I₁` and `I₁′ = I₀ − I₁/κ` gives
//!
//! `∂ᵢ G = (θᵢ/κ) A(κ) G`, `A(κ) = [[0, 1], [1, −1/κ]]`.
//!
//! Multiplying by the positive factor `e^{−m·θ}` shifts every coefficient
//! matrix by `−mᵢ I`, so `F = e^{−m·θ} G = (L, e^{−m·θ} 2π I₁(κ))` satisfies
//! `∂ᵢF = Qᵢ F` with
//!
//! `Qᵢ(θ) = (θᵢ/κ) A(κ) − mᵢ I`.
//!
//! Writing `uᵢ = θᵢ/κ`, the derivatives needed for Hessians are
//!
//! `∂Qᵢ/∂θⱼ = ((δᵢⱼ − uᵢuⱼ)/κ) A(κ) + (uᵢuⱼ/κ²) E₂₂`
//!
//! where `E₂₂` has a single one in the bottom-right corner. The system is
//! singular only at `θ = 0`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bessel::{exp_trig_integral, i0_i1_quadrature, QUAD_NODES};
use crate::error::{Error, Result};
use crate::optimizer::{
    newton_direction, IterationRecord, IterationTrace, Minimum, OptimizerConfig, Status,
};
use crate::pfaffian::{norm, HolonomicObjective, PfaffianSystem, StateVector};

/// A sample of angles in radians, normalized into `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleData {
    angles: Vec<f64>,
}

impl AngleData {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::Parse(format!("non-finite angle {bad}")));
        }
        let angles = angles
            .into_iter()
            .map(|a| a.rem_euclid(TAU))
            .map(|a| if a >= TAU { 0.0 } else { a })
            .collect();
        Ok(Self { angles })
    }

    /// Parses the plain-text format: one radian value per line, blank lines
    /// and lines starting with `#` ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut angles = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}: {line:?}", lineno + 1)))?;
            angles.push(v);
        }
        Self::new(angles)
    }

    /// Serializes in the format read by [`AngleData::parse`]. Values are
    /// written with round-trip precision.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.angles.len() * 22);
        for a in &self.angles {
            out.push_str(&format!("{a:?}\n"));
        }
        out
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Sample means of `cos x` and `sin x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub c_bar: f64,
    pub s_bar: f64,
    pub n: usize,
}

impl SufficientStats {
    pub fn new(c_bar: f64, s_bar: f64, n: usize) -> Result<Self> {
        if c_bar * c_bar + s_bar * s_bar > 1.0 + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "mean resultant ({c_bar}, {s_bar}) lies outside the unit disc"
            )));
        }
        Ok(Self { c_bar, s_bar, n })
    }

    /// Mean resultant length `‖(c̄, s̄)‖`.
    pub fn resultant_length(&self) -> f64 {
        self.c_bar.hypot(self.s_bar)
    }

    /// Circular mean direction in `[0, 2π)`.
    pub fn mean_direction(&self) -> f64 {
        self.s_bar.atan2(self.c_bar).rem_euclid(TAU)
    }
}

pub fn sufficient_stats(data: &AngleData) -> Result<SufficientStats> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = data.len();
    let (c, s) = data
        .angles
        .iter()
        .fold((0.0, 0.0), |(c, s), a| (c + a.cos(), s + a.sin()));
    SufficientStats::new(c / n as f64, s / n as f64, n)
}

/// Von Mises parameters in either coordinate system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VmParams {
    Natural { theta1: f64, theta2: f64 },
    Polar { kappa: f64, mu: f64 },
}

impl VmParams {
    pub fn natural(theta1: f64, theta2: f64) -> Self {
        VmParams::Natural { theta1, theta2 }
    }

    pub fn polar(kappa: f64, mu: f64) -> Self {
        VmParams::Polar { kappa, mu }
    }

    /// `(θ₁, θ₂) = (κ cos μ, κ sin μ)`.
    pub fn to_natural(self) -> [f64; 2] {
        match self {
            VmParams::Natural { theta1, theta2 } => [theta1, theta2],
            VmParams::Polar { kappa, mu } => [kappa * mu.cos(), kappa * mu.sin()],
        }
    }

    /// `(κ, μ)` with `μ ∈ [0, 2π)`; `μ = 0` when `κ = 0`.
    pub fn to_polar(self) -> (f64, f64) {
        match self {
            VmParams::Natural { theta1, theta2 } => {
                (theta1.hypot(theta2), theta2.atan2(theta1).rem_euclid(TAU))
            }
            VmParams::Polar { kappa, mu } => (kappa, mu.rem_euclid(TAU)),
        }
    }
}

impl From<[f64; 2]> for VmParams {
    fn from(t: [f64; 2]) -> Self {
        VmParams::natural(t[0], t[1])
    }
}

/// `L(θ)` by trapezoid quadrature of the defining integral.
pub fn vm_objective_oracle(theta: VmParams, stats: &SufficientStats) -> f64 {
    let [t1, t2] = theta.to_natural();
    (-stats.c_bar * t1 - stats.s_bar * t2).exp() * exp_trig_integral(t1, t2, QUAD_NODES)
}

/// The rank-2 Pfaffian system of `L` in the gauged radial basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesSystem {
    pub stats: SufficientStats,
}

pub fn vm_pfaffian_system(stats: SufficientStats) -> VonMisesSystem {
    VonMisesSystem { stats }
}

impl VonMisesSystem {
    fn m(&self) -> [f64; 2] {
        [self.stats.c_bar, self.stats.s_bar]
    }
}

impl PfaffianSystem for VonMisesSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rank(&self) -> usize {
        2
    }

    fn matrices(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let kappa = x[0].hypot(x[1]);
        let m = self.m();
        (0..2)
            .map(|i| {
                let u = x[i] / kappa;
                DMatrix::from_row_slice(2, 2, &[-m[i], u, u, -u / kappa - m[i]])
            })
            .collect()
    }

    fn matrix_derivative(&self, x: &[f64], i: usize, j: usize) -> Option<DMatrix<f64>> {
        let kappa = x[0].hypot(x[1]);
        let (ui, uj) = (x[i] / kappa, x[j] / kappa);
        let delta = if i == j { 1.0 } else { 0.0 };
        let a = (delta - ui * uj) / kappa;
        let corner = ui * uj / (kappa * kappa);
        Some(DMatrix::from_row_slice(
            2,
            2,
            &[0.0, a, a, -a / kappa + corner],
        ))
    }

    fn is_singular(&self, x: &[f64]) -> bool {
        x[0] == 0.0 && x[1] == 0.0
    }

    fn singular_distance(&self, x: &[f64]) -> f64 {
        x[0].hypot(x[1])
    }

    fn directional_matrix(&self, x: &[f64], d: &[f64], out: &mut DMatrix<f64>) {
        let kappa = x[0].hypot(x[1]);
        let s = (x[0] * d[0] + x[1] * d[1]) / kappa;
        let shift = self.stats.c_bar * d[0] + self.stats.s_bar * d[1];
        out[(0, 0)] = -shift;
        out[(0, 1)] = s;
        out[(1, 0)] = s;
        out[(1, 1)] = -s / kappa - shift;
    }
}

impl HolonomicObjective for VonMisesSystem {
    /// `(L(θ), e^{−m·θ} 2π I₁(‖θ‖))`, both by quadrature.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: x.len(),
            });
        }
        let theta = VmParams::natural(x[0], x[1]);
        let gauge = (-self.stats.c_bar * x[0] - self.stats.s_bar * x[1]).exp();
        let (_, i1) = i0_i1_quadrature(x[0].hypot(x[1]), QUAD_NODES);
        Ok(vec![
            vm_objective_oracle(theta, &self.stats),
            gauge * TAU * i1,
        ])
    }
}

/// The state vector at `theta0`, the single direct evaluation an HGD run
/// needs.
pub fn vm_initial_state(theta0: VmParams, stats: &SufficientStats) -> Result<StateVector> {
    vm_pfaffian_system(*stats).initial_state(&theta0.to_natural())
}

/// Draws `n` angles from the von Mises distribution with the Best–Fisher
/// wrapped-Cauchy rejection sampler, seeded deterministically.
pub fn vm_sample(kappa: f64, mu: f64, n: usize, seed: u64) -> Result<AngleData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vm_sample_with(kappa, mu, n, &mut rng)
}

pub fn vm_sample_with<R: Rng + ?Sized>(
    kappa: f64,
    mu: f64,
    n: usize,
    rng: &mut R,
) -> Result<AngleData> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "kappa must be finite and non-negative, got {kappa}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let sampler = BestFisher::new(kappa);
    AngleData::new((0..n).map(|_| sampler.draw(mu, rng)).collect())
}

struct BestFisher {
    kappa: f64,
    r: f64,
}

impl BestFisher {
    fn new(kappa: f64) -> Self {
        let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
        Self {
            kappa,
            r: (1.0 + rho * rho) / (2.0 * rho),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> f64 {
        if self.kappa < 1e-8 {
            return rng.random::<f64>() * TAU;
        }
        let f = loop {
            let z = (PI * rng.random::<f64>()).cos();
            let f = (1.0 + self.r * z) / (self.r + z);
            let c = self.kappa * (self.r - f);
            let u2: f64 = rng.random();
            if c * (2.0 - c) > u2 || (c / u2).ln() + 1.0 - c >= 0.0 {
                break f.clamp(-1.0, 1.0);
            }
        };
        let offset = f.acos();
        let x = if rng.random::<f64>() > 0.5 {
            mu + offset
        } else {
            mu - offset
        };
        x.rem_euclid(TAU)
    }
}

/// `(L, ∇L, ∇²L)` at `theta` from fresh quadrature: `L` from the defining
/// integral, derivatives from quadrature values of `I₀` and `I₁` through
/// `∇(2πI₀) = 2πI₁ u` and `∇²(2πI₀) = 2π((I₁/κ) I + I₂ uuᵀ)`.
pub fn vm_direct_derivatives(
    theta: [f64; 2],
    stats: &SufficientStats,
) -> (f64, [f64; 2], DMatrix<f64>) {
    let m = [stats.c_bar, stats.s_bar];
    let kappa = theta[0].hypot(theta[1]);
    let (i0, i1) = i0_i1_quadrature(kappa, QUAD_NODES);
    let l = vm_objective_oracle(theta.into(), stats);
    let gauge = (-m[0] * theta[0] - m[1] * theta[1]).exp();

    let g = TAU * i0;
    let (u, i1_over_kappa, i2) = if kappa > 1e-12 {
        (
            [theta[0] / kappa, theta[1] / kappa],
            i1 / kappa,
            i0 - 2.0 * i1 / kappa,
        )
    } else {
        ([0.0, 0.0], 0.5, 0.0)
    };
    let dg = [TAU * i1 * u[0], TAU * i1 * u[1]];

    let grad = [gauge * (dg[0] - m[0] * g), gauge * (dg[1] - m[1] * g)];
    let mut hess = DMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let d2g = TAU * (i1_over_kappa * delta + i2 * u[i] * u[j]);
            hess[(i, j)] = gauge * (d2g - m[i] * dg[j] - dg[i] * m[j] + m[i] * m[j] * g);
        }
    }
    (l, grad, hess)
}

/// Newton-Raphson on `L` with every value, gradient and Hessian taken from
/// fresh quadrature. The Pfaffian system is not used.
///
/// The returned state carries `(L, e^{−m·θ} 2π I₁)` at the final point so the
/// result is interchangeable with an HGD [`Minimum`].
pub fn mle_direct_newton(
    stats: &SufficientStats,
    x0: VmParams,
    cfg: &OptimizerConfig,
) -> Result<Minimum> {
    cfg.validate()?;
    let mut theta = x0.to_natural();
    let mut trace = IterationTrace::default();
    let mut best: Option<([f64; 2], f64)> = None;
    let record = |k: usize, theta: [f64; 2], l: f64, grad_norm: f64| IterationRecord {
        k,
        point: theta.to_vec(),
        objective: l,
        grad_norm,
        alpha: 0.0,
        penalty: None,
        feasible: true,
        direction: vec![0.0; 2],
    };
    let finish = |theta: [f64; 2], status, k, trace| -> Result<Minimum> {
        let values = vm_pfaffian_system(*stats).evaluate(&theta)?;
        Ok(Minimum {
            state: StateVector::new(theta.to_vec(), values),
            status,
            iterations: k,
            trace,
        })
    };

    let mut k = 0;
    loop {
        let (l, grad, hess) = vm_direct_derivatives(theta, stats);
        let grad_norm = norm(&grad);
        if best.is_none_or(|(_, b)| l < b) {
            best = Some((theta, l));
        }
        if grad_norm <= cfg.grad_tol {
            trace.records.push(record(k, theta, l, grad_norm));
            return finish(theta, Status::GradientTolerance, k, trace);
        }
        if k == cfg.max_iters {
            trace.records.push(record(k, theta, l, grad_norm));
            let best = best.map_or(theta, |b| b.0);
            return finish(best, Status::MaxItersExceeded, k, trace);
        }
        let d = newton_direction(&grad, &hess, cfg.damping)?;
        let mut rec = record(k, theta, l, grad_norm);
        rec.alpha = 1.0;
        rec.direction = d.clone();
        trace.records.push(rec);
        theta = [theta[0] + d[0], theta[1] + d[1]];
        k += 1;
        if norm(&d) <= cfg.step_tol {
            let (l, grad, _) = vm_direct_derivatives(theta, stats);
            trace.records.push(record(k, theta, l, norm(&grad)));
            return finish(theta, Status::StepTolerance, k, trace);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::{i0_series, i1_series};
    use crate::pfaffian::{check_integrability, gradient, hessian};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn zero_stats() -> SufficientStats {
        SufficientStats::new(0.0, 0.0, 1).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = sufficient_stats(&AngleData::new(vec![0.0, PI / 2.0]).unwrap()).unwrap();
        assert_relative_eq!(s.c_bar, 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.s_bar, 0.5, epsilon = 1e-15);

        let s = sufficient_stats(&AngleData::new(vec![FRAC_PI_4; 7]).unwrap()).unwrap();
        assert_relative_eq!(s.c_bar, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(s.s_bar, 0.5f64.sqrt(), epsilon = 1e-15);

        let s = sufficient_stats(&AngleData::new(vec![0.0, PI]).unwrap()).unwrap();
        assert_relative_eq!(s.c_bar, 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.s_bar, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_data_is_rejected() {
        assert_eq!(AngleData::new(vec![]), Err(Error::EmptyData));
        assert_eq!(AngleData::parse("# nothing\n\n"), Err(Error::EmptyData));
    }

    #[test]
    fn parse_normalizes_and_skips_comments() {
        let d = AngleData::parse("# header\n0.5\n\n-1.0\n  7.0  \n").unwrap();
        assert_eq!(d.len(), 3);
        assert_relative_eq!(d.angles()[1], TAU - 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.angles()[2], 7.0 - TAU, epsilon = 1e-15);
        assert!(matches!(
            AngleData::parse("0.1\nabc\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let d = vm_sample(5.0, FRAC_PI_4, 50, 3).unwrap();
        assert_eq!(AngleData::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn params_convert() {
        let p = VmParams::polar(5.0, FRAC_PI_4);
        let [t1, t2] = p.to_natural();
        assert_relative_eq!(t1, 3.5355339059327378, epsilon = 1e-14);
        let (k, m) = VmParams::natural(t1, t2).to_polar();
        assert_relative_eq!(k, 5.0, epsilon = 1e-14);
        assert_relative_eq!(m, FRAC_PI_4, epsilon = 1e-14);
        assert_eq!(VmParams::natural(0.0, -1.0).to_polar().1, 1.5 * PI);
    }

    #[test]
    fn oracle_examples() {
        assert_relative_eq!(
            vm_objective_oracle(VmParams::natural(0.0, 0.0), &zero_stats()),
            TAU,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            vm_objective_oracle(VmParams::natural(1.0, 0.0), &zero_stats()),
            TAU * i0_series(1.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            vm_objective_oracle(VmParams::natural(3.0, 4.0), &zero_stats()),
            TAU * i0_series(5.0),
            max_relative = 1e-10
        );
    }

    #[test]
    fn initial_state_examples() {
        let s = vm_initial_state(VmParams::natural(1.0, 0.0), &zero_stats()).unwrap();
        assert_relative_eq!(s.values[0], TAU * i0_series(1.0), max_relative = 1e-12);
        assert_relative_eq!(s.values[1], TAU * i1_series(1.0), max_relative = 1e-12);
        assert!(matches!(
            vm_initial_state(VmParams::natural(0.0, 0.0), &zero_stats()),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn matrices_on_the_axis() {
        let stats = SufficientStats::new(0.3, -0.2, 10).unwrap();
        let q = vm_pfaffian_system(stats).matrices(&[2.0, 0.0]);
        assert_eq!(
            q[0],
            DMatrix::from_row_slice(2, 2, &[-0.3, 1.0, 1.0, -0.5 - 0.3])
        );
        assert_eq!(q[1], DMatrix::from_row_slice(2, 2, &[0.2, 0.0, 0.0, 0.2]));
    }

    #[test]
    fn directional_matrix_matches_sum() {
        let sys = vm_pfaffian_system(SufficientStats::new(0.4, 0.5, 10).unwrap());
        let (x, d) = ([1.3, -0.7], [0.25, 2.0]);
        let q = sys.matrices(&x);
        let sum = &q[0] * d[0] + &q[1] * d[1];
        let mut out = DMatrix::zeros(2, 2);
        sys.directional_matrix(&x, &d, &mut out);
        for (a, b) in out.iter().zip(sum.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn integrable_on_a_grid() {
        let sys = vm_pfaffian_system(SufficientStats::new(0.6, 0.3, 10).unwrap());
        let pts: Vec<Vec<f64>> = (0..24)
            .map(|k| {
                let a = k as f64 * 0.7;
                let r = 0.5 + k as f64 * 0.3;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        assert!(check_integrability(&sys, &pts, 1e-10).unwrap());
    }

    #[test]
    fn symmetric_stats_give_symmetric_derivatives() {
        let stats = SufficientStats::new(0.4, 0.4, 10).unwrap();
        let sys = vm_pfaffian_system(stats);
        let s = vm_initial_state(VmParams::natural(1.7, 1.7), &stats).unwrap();
        let g = gradient(&sys, &s).unwrap();
        assert_relative_eq!(g[0], g[1], max_relative = 1e-14);
        let h = hessian(&sys, &s).unwrap();
        assert_relative_eq!(h[(0, 0)], h[(1, 1)], max_relative = 1e-14);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn direct_derivatives_match_pfaffian_extraction() {
        let stats = SufficientStats::new(0.55, 0.62, 100).unwrap();
        let sys = vm_pfaffian_system(stats);
        let theta = [-2.0, 0.1];
        let s = vm_initial_state(theta.into(), &stats).unwrap();
        let (l, grad, hess) = vm_direct_derivatives(theta, &stats);
        assert_relative_eq!(l, s.values[0], max_relative = 1e-12);
        let g = gradient(&sys, &s).unwrap();
        let h = hessian(&sys, &s).unwrap();
        for i in 0..2 {
            assert_relative_eq!(grad[i], g[i], max_relative = 1e-12);
            for j in 0..2 {
                assert_relative_eq!(hess[(i, j)], h[(i, j)], max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        assert_eq!(
            vm_sample(5.0, 1.0, 100, 42).unwrap(),
            vm_sample(5.0, 1.0, 100, 42).unwrap()
        );
        assert_ne!(
            vm_sample(5.0, 1.0, 100, 42).unwrap(),
            vm_sample(5.0, 1.0, 100, 43).unwrap()
        );
    }

    #[test]
    fn sampler_uniform_limit() {
        let s = sufficient_stats(&vm_sample(0.0, 0.0, 100_000, 7).unwrap()).unwrap();
        assert!(s.resultant_length() <= 0.01);
    }

    #[test]
    fn sampler_moments() {
        let s = sufficient_stats(&vm_sample(5.0, FRAC_PI_4, 100_000, 11).unwrap()).unwrap();
        assert!((s.mean_direction() - FRAC_PI_4).abs() <= 0.01);
        let expected = i1_series(5.0) / i0_series(5.0);
        assert_relative_eq!(expected, 0.8934, epsilon = 1e-4);
        assert!((s.resultant_length() - expected).abs() <= 0.01);
    }

    #[test]
    fn direct_newton_uniform_data_collapses_to_origin() {
        let m = mle_direct_newton(
            &zero_stats(),
            VmParams::natural(-2.0, 0.1),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!(m.status.is_converged());
        assert!(norm(m.point()) < 1e-6);
    }

    #[test]
    fn direct_newton_is_deterministic() {
        let stats = sufficient_stats(&vm_sample(5.0, FRAC_PI_4, 100, 1).unwrap()).unwrap();
        let a = mle_direct_newton(
            &stats,
            VmParams::natural(-2.0, 0.1),
            &OptimizerConfig::default(),
        )
        .unwrap();
        let b = mle_direct_newton(
            &stats,
            VmParams::natural(-2.0, 0.1),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(a.trace, b.trace);
        assert!(a.status.is_converged());
    }
}
