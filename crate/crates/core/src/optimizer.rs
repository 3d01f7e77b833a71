//! Newton-Raphson minimization driven by a Pfaffian system (HGD), and its
//! constrained variant (CHGD) with an exact-penalty Armijo step rule.
//!
//! Both drivers touch the objective only through its coefficient matrices and
//! the state vector supplied at the starting point. Every later value of `F`
//! comes from [`propagate`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pfaffian::{
    gradient, hessian, norm, propagate, HolonomicObjective, IntegratorConfig, PfaffianSystem,
    StateVector,
};

/// Absolute tolerance under which an equality constraint counts as satisfied.
pub const EQUALITY_TOL: f64 = 1e-9;

const ARMIJO_ULPS: f64 = 16.0;

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A differentiable constraint function with its gradient.
pub struct Constraint {
    value: ScalarFn,
    grad: VectorFn,
}

impl Constraint {
    pub fn new<F, G>(value: F, grad: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            value: Box::new(value),
            grad: Box::new(grad),
        }
    }

    /// `aᵀx + c`.
    pub fn linear(coeffs: Vec<f64>, offset: f64) -> Self {
        let grad = coeffs.clone();
        Self::new(
            move |x| coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + offset,
            move |_| grad.clone(),
        )
    }

    /// `‖x‖² − r²`, non-positive inside the closed ball of radius `r`.
    pub fn ball(radius: f64) -> Self {
        Self::new(
            move |x| x.iter().map(|v| v * v).sum::<f64>() - radius * radius,
            |x| x.iter().map(|v| 2.0 * v).collect(),
        )
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (self.grad)(x)
    }

    // c(x) + ∇c(x)ᵀd
    fn linearized(&self, x: &[f64], d: &[f64]) -> f64 {
        self.value(x) + dot(&self.grad(x), d)
    }
}

/// Inequalities `g(x) ≤ 0` and equalities `h(x) = 0`.
#[derive(Default)]
pub struct ConstraintSet {
    pub inequalities: Vec<Constraint>,
    pub equalities: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_inequality(mut self, c: Constraint) -> Self {
        self.inequalities.push(c);
        self
    }

    pub fn with_equality(mut self, c: Constraint) -> Self {
        self.equalities.push(c);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty() && self.equalities.is_empty()
    }

    pub fn len(&self) -> usize {
        self.inequalities.len() + self.equalities.len()
    }

    /// `Σ max(0, gᵢ(x)) + Σ |hⱼ(x)|`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ineq: f64 = self.inequalities.iter().map(|g| g.value(x).max(0.0)).sum();
        let eq: f64 = self.equalities.iter().map(|h| h.value(x).abs()).sum();
        ineq + eq
    }

    /// The violation of the constraints linearized at `x`, evaluated at `x + d`.
    pub fn linearized_violation(&self, x: &[f64], d: &[f64]) -> f64 {
        let ineq: f64 = self
            .inequalities
            .iter()
            .map(|g| g.linearized(x, d).max(0.0))
            .sum();
        let eq: f64 = self
            .equalities
            .iter()
            .map(|h| h.linearized(x, d).abs())
            .sum();
        ineq + eq
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.inequalities.iter().all(|g| g.value(x) <= 0.0)
            && self
                .equalities
                .iter()
                .all(|h| h.value(x).abs() <= EQUALITY_TOL)
    }
}

/// Parameters of the exact penalty and the Armijo rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    /// Penalty weight ρ.
    pub rho: f64,
    /// Armijo sufficient-decrease fraction ξ.
    pub xi: f64,
    /// Backtracking factor applied to α after each rejected trial.
    pub shrink: f64,
    pub alpha_min: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            rho: 10.0,
            xi: 0.1,
            shrink: 0.5,
            alpha_min: 1e-10,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !(self.rho > 0.0) {
            return Err(Error::InvalidConfig("rho must be positive".into()));
        }
        if !open_unit(self.xi) {
            return Err(Error::InvalidConfig("xi must lie in (0, 1)".into()));
        }
        if !open_unit(self.shrink) {
            return Err(Error::InvalidConfig("shrink must lie in (0, 1)".into()));
        }
        if !(self.alpha_min > 0.0) {
            return Err(Error::InvalidConfig("alpha_min must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Stop once `‖∇f‖ ≤ grad_tol`.
    pub grad_tol: f64,
    /// Stop once `‖x_{k+1} − x_k‖ ≤ step_tol`.
    pub step_tol: f64,
    /// Levenberg shift added to the Hessian before solving.
    pub damping: f64,
    pub integrator: IntegratorConfig,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            grad_tol: 1e-8,
            step_tol: 1e-10,
            damping: 0.0,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) || !(self.step_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.damping >= 0.0) {
            return Err(Error::InvalidConfig("damping must be non-negative".into()));
        }
        self.integrator.validate()
    }
}

/// How a run ended. Only the first two count as convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    GradientTolerance,
    StepTolerance,
    MaxItersExceeded,
    LineSearchFailed,
}

impl Status {
    pub fn is_converged(self) -> bool {
        matches!(self, Status::GradientTolerance | Status::StepTolerance)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::GradientTolerance => "gradient_tolerance",
            Status::StepTolerance => "step_tolerance",
            Status::MaxItersExceeded => "max_iters_exceeded",
            Status::LineSearchFailed => "line_search_failed",
        }
    }
}

/// One iterate and the step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub point: Vec<f64>,
    /// `f(x_k)`, the first entry of the propagated state.
    pub objective: f64,
    pub grad_norm: f64,
    /// Step size applied to the direction; 0 for the final iterate.
    pub alpha: f64,
    /// `P(x_k; ρ)`, only for constrained runs.
    pub penalty: Option<f64>,
    pub feasible: bool,
    /// Newton direction `d_k`; zero for the final iterate.
    pub direction: Vec<f64>,
}

impl IterationRecord {
    pub fn direction_norm(&self) -> f64 {
        norm(&self.direction)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.records.iter().map(|r| r.point.as_slice())
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub state: StateVector,
    pub status: Status,
    /// Number of steps taken.
    pub iterations: usize,
    pub trace: IterationTrace,
}

impl Minimum {
    pub fn point(&self) -> &[f64] {
        &self.state.point
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_checked(m: DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.nrows();
    let lu = m.lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if !(max > 0.0) || min <= n as f64 * f64::EPSILON * max {
        return None;
    }
    let b = nalgebra::DVector::from_column_slice(rhs);
    let x = lu.solve(&b)?;
    x.iter()
        .all(|v| v.is_finite())
        .then(|| x.iter().copied().collect())
}

/// Solves `(H + λI) d = −∇f`.
///
/// If the system is singular to working precision, λ is escalated ×10 and the
/// solve retried, at most four times. A zero initial λ escalates from
/// `1e-8 · max(1, maxᵢ |Hᵢᵢ|)`.
pub fn newton_direction(grad: &[f64], hess: &DMatrix<f64>, damping: f64) -> Result<Vec<f64>> {
    let n = grad.len();
    if hess.nrows() != n || hess.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: hess.nrows(),
        });
    }
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let scale = hess.diagonal().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut lambda = damping;
    for attempt in 0..=4 {
        let shifted = hess + DMatrix::identity(n, n) * lambda;
        if let Some(d) = solve_checked(shifted, &rhs) {
            return Ok(d);
        }
        if attempt < 4 {
            lambda = if lambda > 0.0 {
                lambda * 10.0
            } else {
                1e-8 * scale
            };
        }
    }
    Err(Error::SingularHessian { damping: lambda })
}

/// `P(x; ρ) = f + ρ (Σ max(0, gᵢ(x)) + Σ |hⱼ(x)|)`.
pub fn exact_penalty(f_val: f64, x: &[f64], cons: &ConstraintSet, rho: f64) -> f64 {
    f_val + rho * cons.violation(x)
}

/// First-order model of [`exact_penalty`] at `x + d`:
/// `f + ∇fᵀd + ρ (Σ max(0, gᵢ + ∇gᵢᵀd) + Σ |hⱼ + ∇hⱼᵀd|)`.
pub fn linearized_penalty(
    f_val: f64,
    grad: &[f64],
    x: &[f64],
    d: &[f64],
    cons: &ConstraintSet,
    rho: f64,
) -> f64 {
    f_val + dot(grad, d) + rho * cons.linearized_violation(x, d)
}

/// Backtracking search for the step size along `d`.
///
/// Starting from α = 1 and shrinking geometrically, accepts the first α with
///
/// `P(x + αd) ≤ P(x) + ξ α min(0, P_l(x, d) − P(x))`
///
/// where `P_l` is the [`linearized_penalty`]. When the linear model predicts
/// no decrease the test reduces to plain non-increase of `P`. The comparison
/// allows a few ulps of `|P(x)|` for rounding in the propagated values of
/// `f`, so an exact sufficient decrease is not rejected. Trial values of
/// `f` are propagated from `state`; trial segments that come too close to the
/// singular locus count as rejected trials.
pub fn armijo_backtrack<S: PfaffianSystem + ?Sized>(
    system: &S,
    state: &StateVector,
    d: &[f64],
    cons: &ConstraintSet,
    pcfg: &PenaltyConfig,
    icfg: &IntegratorConfig,
) -> Result<(f64, StateVector)> {
    pcfg.validate()?;
    let x = &state.point;
    let grad = gradient(system, state)?;
    let p0 = exact_penalty(state.objective(), x, cons, pcfg.rho);
    let model = linearized_penalty(state.objective(), &grad, x, d, cons, pcfg.rho);
    let predicted = (model - p0).min(0.0);
    let roundoff = ARMIJO_ULPS * f64::EPSILON * p0.abs();

    let mut alpha = 1.0;
    let mut trial = vec![0.0; x.len()];
    while alpha >= pcfg.alpha_min {
        for (t, (xi, di)) in trial.iter_mut().zip(x.iter().zip(d)) {
            *t = xi + alpha * di;
        }
        match propagate(system, state, &trial, icfg) {
            Ok(next) => {
                let p = exact_penalty(next.objective(), &trial, cons, pcfg.rho);
                if p <= p0 + pcfg.xi * alpha * predicted + roundoff {
                    return Ok((alpha, next));
                }
            }
            Err(Error::SingularPath { .. } | Error::SingularPoint { .. }) => {}
            Err(e) => return Err(e),
        }
        alpha *= pcfg.shrink;
    }
    Err(Error::LineSearchFailed {
        alpha_min: pcfg.alpha_min,
    })
}

/// Gradient and Newton direction at `state`, from the unpenalized objective.
pub fn hgd_direction<S: PfaffianSystem + ?Sized>(
    system: &S,
    state: &StateVector,
    damping: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grad = gradient(system, state)?;
    let hess = hessian(system, state)?;
    let d = newton_direction(&grad, &hess, damping)?;
    Ok((grad, d))
}

// Tracks the best iterate: feasible beats infeasible, then lower merit.
struct Best {
    state: StateVector,
    feasible: bool,
    merit: f64,
}

impl Best {
    fn offer(slot: &mut Option<Best>, state: &StateVector, feasible: bool, merit: f64) {
        let better = match slot {
            None => true,
            Some(b) => (feasible && !b.feasible) || (feasible == b.feasible && merit < b.merit),
        };
        if better {
            *slot = Some(Best {
                state: state.clone(),
                feasible,
                merit,
            });
        }
    }
}

fn start_state<S: PfaffianSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    f0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<StateVector> {
    cfg.validate()?;
    if x0.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: x0.len(),
        });
    }
    if f0.len() != system.rank() {
        return Err(Error::DimensionMismatch {
            expected: system.rank(),
            got: f0.len(),
        });
    }
    if system.is_singular(x0) {
        return Err(Error::SingularPoint { point: x0.to_vec() });
    }
    Ok(StateVector::new(x0.to_vec(), f0.to_vec()))
}

fn displaced(x: &[f64], d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + b).collect()
}

/// Holonomic gradient descent: full Newton steps, with `F` carried from one
/// iterate to the next by propagation.
///
/// `f0` must be the state vector at `x0`. Running out of iterations is
/// reported through [`Status::MaxItersExceeded`] together with the best
/// iterate seen.
pub fn hgd_minimize<S: PfaffianSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    f0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Minimum> {
    let mut state = start_state(system, x0, f0, cfg)?;
    let n = system.dim();
    let mut trace = IterationTrace::default();
    let mut best: Option<Best> = None;

    let mut k = 0;
    loop {
        let grad = gradient(system, &state)?;
        let grad_norm = norm(&grad);
        Best::offer(&mut best, &state, true, state.objective());
        let mut record = IterationRecord {
            k,
            point: state.point.clone(),
            objective: state.objective(),
            grad_norm,
            alpha: 0.0,
            penalty: None,
            feasible: true,
            direction: vec![0.0; n],
        };
        if grad_norm <= cfg.grad_tol {
            trace.records.push(record);
            return Ok(Minimum {
                state,
                status: Status::GradientTolerance,
                iterations: k,
                trace,
            });
        }
        if k == cfg.max_iters {
            trace.records.push(record);
            return Ok(Minimum {
                state: best.map_or(state, |b| b.state),
                status: Status::MaxItersExceeded,
                iterations: k,
                trace,
            });
        }

        let hess = hessian(system, &state)?;
        let d = newton_direction(&grad, &hess, cfg.damping)?;
        let target = displaced(&state.point, &d);
        let next = propagate(system, &state, &target, &cfg.integrator)?;
        let step = norm(&d);
        record.alpha = 1.0;
        record.direction = d;
        trace.records.push(record);
        state = next;
        k += 1;

        if step <= cfg.step_tol {
            let grad = gradient(system, &state)?;
            trace.records.push(IterationRecord {
                k,
                point: state.point.clone(),
                objective: state.objective(),
                grad_norm: norm(&grad),
                alpha: 0.0,
                penalty: None,
                feasible: true,
                direction: vec![0.0; n],
            });
            return Ok(Minimum {
                state,
                status: Status::StepTolerance,
                iterations: k,
                trace,
            });
        }
    }
}

/// Constrained holonomic gradient descent.
///
/// Directions are the HGD Newton directions of the unpenalized objective; the
/// constraints enter only through the exact-penalty Armijo rule of
/// [`armijo_backtrack`]. A failed line search ends the run with
/// [`Status::LineSearchFailed`]; like [`Status::MaxItersExceeded`] it returns
/// the best iterate seen, preferring feasible iterates and then lower penalty.
pub fn chgd_minimize<S: PfaffianSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    f0: &[f64],
    cons: &ConstraintSet,
    cfg: &OptimizerConfig,
    pcfg: &PenaltyConfig,
) -> Result<Minimum> {
    pcfg.validate()?;
    let mut state = start_state(system, x0, f0, cfg)?;
    let n = system.dim();
    let mut trace = IterationTrace::default();
    let mut best: Option<Best> = None;

    let mut k = 0;
    loop {
        let grad = gradient(system, &state)?;
        let grad_norm = norm(&grad);
        let penalty = exact_penalty(state.objective(), &state.point, cons, pcfg.rho);
        let feasible = cons.is_feasible(&state.point);
        Best::offer(&mut best, &state, feasible, penalty);
        let mut record = IterationRecord {
            k,
            point: state.point.clone(),
            objective: state.objective(),
            grad_norm,
            alpha: 0.0,
            penalty: Some(penalty),
            feasible,
            direction: vec![0.0; n],
        };
        if grad_norm <= cfg.grad_tol {
            trace.records.push(record);
            return Ok(Minimum {
                state,
                status: Status::GradientTolerance,
                iterations: k,
                trace,
            });
        }
        if k == cfg.max_iters {
            trace.records.push(record);
            return Ok(Minimum {
                state: best.map_or(state, |b| b.state),
                status: Status::MaxItersExceeded,
                iterations: k,
                trace,
            });
        }

        let hess = hessian(system, &state)?;
        let d = newton_direction(&grad, &hess, cfg.damping)?;
        let (alpha, next) = match armijo_backtrack(system, &state, &d, cons, pcfg, &cfg.integrator)
        {
            Ok(accepted) => accepted,
            Err(Error::LineSearchFailed { .. }) => {
                record.direction = d;
                trace.records.push(record);
                return Ok(Minimum {
                    state: best.map_or(state, |b| b.state),
                    status: Status::LineSearchFailed,
                    iterations: k,
                    trace,
                });
            }
            Err(e) => return Err(e),
        };
        let step = alpha * norm(&d);
        record.alpha = alpha;
        record.direction = d;
        trace.records.push(record);
        state = next;
        k += 1;

        if step <= cfg.step_tol {
            let grad = gradient(system, &state)?;
            trace.records.push(IterationRecord {
                k,
                point: state.point.clone(),
                objective: state.objective(),
                grad_norm: norm(&grad),
                alpha: 0.0,
                penalty: Some(exact_penalty(
                    state.objective(),
                    &state.point,
                    cons,
                    pcfg.rho,
                )),
                feasible: cons.is_feasible(&state.point),
                direction: vec![0.0; n],
            });
            return Ok(Minimum {
                state,
                status: Status::StepTolerance,
                iterations: k,
                trace,
            });
        }
    }
}

/// [`hgd_minimize`] starting from a direct evaluation of `F(x0)`, the only
/// direct evaluation of the objective in the run.
pub fn hgd_fit<M: HolonomicObjective + ?Sized>(
    model: &M,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Minimum> {
    let start = model.initial_state(x0)?;
    hgd_minimize(model, &start.point, &start.values, cfg)
}

/// [`chgd_minimize`] starting from a direct evaluation of `F(x0)`.
pub fn chgd_fit<M: HolonomicObjective + ?Sized>(
    model: &M,
    x0: &[f64],
    cons: &ConstraintSet,
    cfg: &OptimizerConfig,
    pcfg: &PenaltyConfig,
) -> Result<Minimum> {
    let start = model.initial_state(x0)?;
    chgd_minimize(model, &start.point, &start.values, cons, cfg, pcfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfaffian::FnPfaffianSystem;
    use approx::assert_relative_eq;

    // f(x) = x² as a rank-3 system on F = (x², 2x, 2).
    fn square() -> FnPfaffianSystem {
        FnPfaffianSystem::constant(vec![DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        )])
    }

    // f(x, y) = (x − 1)² + 2(y + 0.5)² + xy on F = (f, f_x, f_y, 1).
    fn quadratic() -> (FnPfaffianSystem, impl Fn(&[f64]) -> Vec<f64>) {
        let state = |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            vec![
                (x - 1.0).powi(2) + 2.0 * (y + 0.5).powi(2) + x * y,
                2.0 * (x - 1.0) + y,
                4.0 * (y + 0.5) + x,
                1.0,
            ]
        };
        // ∂F/∂x = (f_x, 2, 1, 0), ∂F/∂y = (f_y, 1, 4, 0)
        let p1 = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 2.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        let p2 = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 4.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        (FnPfaffianSystem::constant(vec![p1, p2]), state)
    }

    #[test]
    fn newton_direction_identity() {
        let d = newton_direction(&[2.0, 0.0], &DMatrix::identity(2, 2), 0.0).unwrap();
        assert_eq!(d, vec![-2.0, 0.0]);
    }

    #[test]
    fn newton_direction_zero_gradient() {
        let h = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let d = newton_direction(&[0.0, 0.0], &h, 0.0).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn newton_direction_with_damping() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let d = newton_direction(&[1.0, 1.0], &h, 1.0).unwrap();
        assert_relative_eq!(d[0], -1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(d[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn newton_direction_escalates_damping_on_singular_hessian() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let d = newton_direction(&[1.0, 0.0], &h, 0.0).unwrap();
        assert!(d.iter().all(|v| v.is_finite()));
        assert!(d[0] < 0.0);
    }

    #[test]
    fn newton_direction_gives_up_on_nan_hessian() {
        let h = DMatrix::from_element(2, 2, f64::NAN);
        assert!(matches!(
            newton_direction(&[1.0, 1.0], &h, 0.0),
            Err(Error::SingularHessian { .. })
        ));
    }

    #[test]
    fn penalty_examples() {
        let cons = ConstraintSet::new().with_inequality(Constraint::linear(vec![1.0, -1.0], 0.0));
        assert_eq!(exact_penalty(5.0, &[2.0, 1.0], &cons, 10.0), 15.0);
        assert_eq!(exact_penalty(5.0, &[1.0, 2.0], &cons, 10.0), 5.0);

        let eq = ConstraintSet::new().with_equality(Constraint::linear(vec![1.0, 0.0], -1.0));
        assert_eq!(exact_penalty(0.0, &[3.0, 7.0], &eq, 2.0), 4.0);
    }

    #[test]
    fn linearized_penalty_without_constraints() {
        let none = ConstraintSet::new();
        let v = linearized_penalty(1.0, &[2.0, -1.0], &[0.0, 0.0], &[0.5, 3.0], &none, 10.0);
        assert_eq!(v, 1.0 + 1.0 - 3.0);
    }

    #[test]
    fn armijo_halves_overshooting_step() {
        let sys = square();
        let state = StateVector::new(vec![1.0], vec![1.0, 2.0, 2.0]);
        let pcfg = PenaltyConfig {
            xi: 0.5,
            shrink: 0.5,
            ..PenaltyConfig::default()
        };
        let (alpha, next) = armijo_backtrack(
            &sys,
            &state,
            &[-2.0],
            &ConstraintSet::new(),
            &pcfg,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(alpha, 0.5);
        assert_eq!(next.point, vec![0.0]);
    }

    #[test]
    fn armijo_fails_on_ascent_direction() {
        let sys = square();
        let state = StateVector::new(vec![1.0], vec![1.0, 2.0, 2.0]);
        let res = armijo_backtrack(
            &sys,
            &state,
            &[1.0],
            &ConstraintSet::new(),
            &PenaltyConfig::default(),
            &IntegratorConfig::default(),
        );
        assert!(matches!(res, Err(Error::LineSearchFailed { .. })));
    }

    #[test]
    fn hgd_solves_quadratic_in_one_step() {
        let (sys, state) = quadratic();
        let x0 = [3.0, -4.0];
        let m = hgd_minimize(&sys, &x0, &state(&x0), &OptimizerConfig::default()).unwrap();
        assert!(m.status.is_converged());
        // ∇f = 0: 2x + y = 2, x + 4y = −2
        let (x, y) = (10.0 / 7.0, -6.0 / 7.0);
        assert_relative_eq!(m.point()[0], x, epsilon = 1e-10);
        assert_relative_eq!(m.point()[1], y, epsilon = 1e-10);
        assert!(m.iterations <= 2);
    }

    #[test]
    fn stationary_start_takes_no_steps() {
        let (sys, state) = quadratic();
        let x0 = [10.0 / 7.0, -6.0 / 7.0];
        let cfg = OptimizerConfig {
            grad_tol: 1e-6,
            ..OptimizerConfig::default()
        };
        let m = hgd_minimize(&sys, &x0, &state(&x0), &cfg).unwrap();
        assert_eq!(m.iterations, 0);
        assert_eq!(m.trace.len(), 1);
        assert_eq!(m.point(), &x0);
    }

    #[test]
    fn max_iters_is_flagged() {
        let (sys, state) = quadratic();
        let x0 = [3.0, -4.0];
        let cfg = OptimizerConfig {
            max_iters: 0,
            ..OptimizerConfig::default()
        };
        let m = hgd_minimize(&sys, &x0, &state(&x0), &cfg).unwrap();
        assert_eq!(m.status, Status::MaxItersExceeded);
        assert_eq!(m.trace.len(), 1);
    }

    #[test]
    fn chgd_stops_on_linear_constraint() {
        let (sys, state) = quadratic();
        let x0 = [0.0, 0.0];
        // x ≤ 1 cuts off the unconstrained minimizer at x = 10/7.
        let cons = ConstraintSet::new().with_inequality(Constraint::linear(vec![1.0, 0.0], -1.0));
        let m = chgd_minimize(
            &sys,
            &x0,
            &state(&x0),
            &cons,
            &OptimizerConfig::default(),
            &PenaltyConfig::default(),
        )
        .unwrap();
        assert!(cons.is_feasible(m.point()));
        assert!(m.point()[0] > 0.99);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = PenaltyConfig {
            xi: 1.0,
            ..PenaltyConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            grad_tol: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
