//! Pfaffian systems and the numerical machinery built on them.
//!
//! A holonomic objective `f: Rⁿ → R` is represented by a vector
//! `F = (f, s₂f, …, sₜf)` satisfying `∂F/∂xᵢ = Pᵢ(x) F`. Given `F` at one
//! point, the value at any other point is obtained by integrating this system
//! along a path, and the gradient and Hessian of `f` fall out of `F` and the
//! coefficient matrices without ever evaluating `f` itself.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A holonomic function described by its Pfaffian coefficient matrices.
///
/// Implementations must be pure: the same point always yields the same
/// matrices. The matrices only need to be defined away from the singular
/// locus.
pub trait PfaffianSystem {
    /// Number of variables `n`.
    fn dim(&self) -> usize;

    /// Holonomic rank `t`, the length of the state vector.
    fn rank(&self) -> usize;

    /// The `n` matrices `[P₁(x), …, Pₙ(x)]`, each `t×t`.
    fn matrices(&self, x: &[f64]) -> Vec<DMatrix<f64>>;

    /// Analytic `∂Pᵢ/∂xⱼ`, if the system knows it.
    fn matrix_derivative(&self, _x: &[f64], _i: usize, _j: usize) -> Option<DMatrix<f64>> {
        None
    }

    /// Whether `x` lies on the singular locus.
    fn is_singular(&self, x: &[f64]) -> bool;

    /// Distance from `x` to the singular locus. Systems that cannot measure
    /// it report 0 on the locus and infinity elsewhere.
    fn singular_distance(&self, x: &[f64]) -> f64 {
        if self.is_singular(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Writes `Σᵢ dᵢ Pᵢ(x)` into `out` (already sized `t×t`).
    ///
    /// This is the generator of the flow along direction `d` and is called
    /// in the integrator's inner loop, so closed-form systems should override
    /// it to avoid building every matrix.
    fn directional_matrix(&self, x: &[f64], d: &[f64], out: &mut DMatrix<f64>) {
        out.fill(0.0);
        for (p, &di) in self.matrices(x).iter().zip(d) {
            if di != 0.0 {
                *out += p * di;
            }
        }
    }
}

/// A Pfaffian system that can also evaluate its state vector directly.
///
/// Direct evaluation is assumed to be expensive or inaccurate; the optimizers
/// call it exactly once, at the initial point.
pub trait HolonomicObjective: PfaffianSystem {
    /// Computes `F(x)` without propagation.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn initial_state(&self, x: &[f64]) -> Result<StateVector> {
        if self.is_singular(x) {
            return Err(Error::SingularPoint { point: x.to_vec() });
        }
        let values = self.evaluate(x)?;
        Ok(StateVector::new(x.to_vec(), values))
    }
}

/// A point paired with the state vector `F` evaluated there.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
}

impl StateVector {
    pub fn new(point: Vec<f64>, values: Vec<f64>) -> Self {
        Self { point, values }
    }

    /// The objective value `f(point)`, i.e. the first entry of `F`.
    pub fn objective(&self) -> f64 {
        self.values[0]
    }
}

/// Fixed-step RK4 settings for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// RK4 steps per unit of path length.
    pub substeps_per_unit: usize,
    /// Lower bound on the number of steps for short segments.
    pub min_substeps: usize,
    /// Minimum distance every sampled path point must keep from the
    /// singular locus.
    pub singular_clearance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            substeps_per_unit: 200,
            min_substeps: 20,
            singular_clearance: 1e-3,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.substeps_per_unit == 0 || self.min_substeps == 0 {
            return Err(Error::InvalidConfig(
                "integrator step counts must be positive".into(),
            ));
        }
        if !(self.singular_clearance > 0.0) {
            return Err(Error::InvalidConfig(
                "singular_clearance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of RK4 steps used for a segment of the given length.
    pub fn steps_for(&self, length: f64) -> usize {
        let by_length = (length * self.substeps_per_unit as f64).ceil() as usize;
        by_length.max(self.min_substeps)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dims<S: PfaffianSystem + ?Sized>(system: &S, state: &StateVector) -> Result<()> {
    if state.point.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: state.point.len(),
        });
    }
    if state.values.len() != system.rank() {
        return Err(Error::DimensionMismatch {
            expected: system.rank(),
            got: state.values.len(),
        });
    }
    Ok(())
}

fn check_point<S: PfaffianSystem + ?Sized>(system: &S, x: &[f64]) -> Result<()> {
    if system.is_singular(x) {
        Err(Error::SingularPoint { point: x.to_vec() })
    } else {
        Ok(())
    }
}

// out = m * v
fn mat_vec(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    let t = v.len();
    for (r, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for c in 0..t {
            acc += m[(r, c)] * v[c];
        }
        *o = acc;
    }
}

/// Transports `state` to `target` by integrating `dF/dτ = (Σ dᵢ Pᵢ(x(τ))) F`
/// along the straight segment `x(τ) = start + τ d`, `τ ∈ [0, 1]`, with
/// classical RK4.
///
/// Every point at which the matrices are sampled must keep
/// `cfg.singular_clearance` from the singular locus; otherwise the segment is
/// rejected with [`Error::SingularPath`] and the caller has to pick another
/// route or a shorter step.
pub fn propagate<S: PfaffianSystem + ?Sized>(
    system: &S,
    state: &StateVector,
    target: &[f64],
    cfg: &IntegratorConfig,
) -> Result<StateVector> {
    check_dims(system, state)?;
    if target.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: target.len(),
        });
    }
    cfg.validate()?;
    check_point(system, &state.point)?;

    let n = system.dim();
    let t = system.rank();
    let start = &state.point;
    let d: Vec<f64> = target.iter().zip(start).map(|(b, a)| b - a).collect();
    let length = norm(&d);
    if length == 0.0 {
        return Ok(state.clone());
    }
    check_point(system, target)?;

    let steps = cfg.steps_for(length);
    let h = 1.0 / steps as f64;

    let path_error = || Error::SingularPath {
        from: start.clone(),
        to: target.to_vec(),
        clearance: cfg.singular_clearance,
    };

    let mut x = vec![0.0; n];
    let mut eval = |tau: f64, out: &mut DMatrix<f64>| -> Result<()> {
        for k in 0..n {
            x[k] = start[k] + tau * d[k];
        }
        if system.singular_distance(&x) < cfg.singular_clearance {
            return Err(path_error());
        }
        system.directional_matrix(&x, &d, out);
        Ok(())
    };

    let mut a_start = DMatrix::zeros(t, t);
    let mut a_mid = DMatrix::zeros(t, t);
    let mut a_end = DMatrix::zeros(t, t);
    let mut f = state.values.clone();
    let mut k1 = vec![0.0; t];
    let mut k2 = vec![0.0; t];
    let mut k3 = vec![0.0; t];
    let mut k4 = vec![0.0; t];
    let mut tmp = vec![0.0; t];

    eval(0.0, &mut a_start)?;
    for s in 0..steps {
        let tau = s as f64 * h;
        let tau_end = if s + 1 == steps { 1.0 } else { tau + h };
        eval(tau + 0.5 * h, &mut a_mid)?;
        eval(tau_end, &mut a_end)?;

        mat_vec(&a_start, &f, &mut k1);
        for k in 0..t {
            tmp[k] = f[k] + 0.5 * h * k1[k];
        }
        mat_vec(&a_mid, &tmp, &mut k2);
        for k in 0..t {
            tmp[k] = f[k] + 0.5 * h * k2[k];
        }
        mat_vec(&a_mid, &tmp, &mut k3);
        for k in 0..t {
            tmp[k] = f[k] + h * k3[k];
        }
        mat_vec(&a_end, &tmp, &mut k4);
        for k in 0..t {
            f[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        std::mem::swap(&mut a_start, &mut a_end);
    }

    Ok(StateVector::new(target.to_vec(), f))
}

/// `∇f` from the first rows of `Pᵢ F`.
pub fn gradient<S: PfaffianSystem + ?Sized>(system: &S, state: &StateVector) -> Result<Vec<f64>> {
    check_dims(system, state)?;
    check_point(system, &state.point)?;
    Ok(system
        .matrices(&state.point)
        .iter()
        .map(|p| first_entry(p, &state.values))
        .collect())
}

fn first_entry(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    (0..v.len()).map(|c| m[(0, c)] * v[c]).sum()
}

/// Step used for finite-difference matrix derivatives at `x`.
pub fn matrix_fd_step(x: &[f64]) -> f64 {
    1e-5 * norm(x).max(1.0)
}

/// All `∂Pᵢ/∂xⱼ`, indexed `[i][j]`. Analytic derivatives are used where the
/// system provides them, central differences otherwise.
pub fn matrix_jacobian<S: PfaffianSystem + ?Sized>(
    system: &S,
    x: &[f64],
) -> Vec<Vec<DMatrix<f64>>> {
    let n = system.dim();
    let t = system.rank();
    let mut jac = vec![vec![DMatrix::zeros(t, t); n]; n];
    let step = matrix_fd_step(x);
    for j in 0..n {
        let mut fd = None;
        for i in 0..n {
            jac[i][j] = match system.matrix_derivative(x, i, j) {
                Some(m) => m,
                None => {
                    let (plus, minus) = fd.get_or_insert_with(|| {
                        let mut xp = x.to_vec();
                        let mut xm = x.to_vec();
                        xp[j] += step;
                        xm[j] -= step;
                        (system.matrices(&xp), system.matrices(&xm))
                    });
                    (&plus[i] - &minus[i]) / (2.0 * step)
                }
            };
        }
    }
    jac
}

/// `∇²f` with entries `((∂Pᵢ/∂xⱼ + PᵢPⱼ) F)₁`, symmetrized as `(H + Hᵀ)/2`.
pub fn hessian<S: PfaffianSystem + ?Sized>(
    system: &S,
    state: &StateVector,
) -> Result<DMatrix<f64>> {
    check_dims(system, state)?;
    check_point(system, &state.point)?;
    let n = system.dim();
    let x = &state.point;
    let mats = system.matrices(x);
    let jac = matrix_jacobian(system, x);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let m = &jac[i][j] + &mats[i] * &mats[j];
            h[(i, j)] = first_entry(&m, &state.values);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Checks `∂Pⱼ/∂xᵢ + PⱼPᵢ = ∂Pᵢ/∂xⱼ + PᵢPⱼ` at every point.
///
/// Entries are compared with the mixed tolerance
/// `|lhs − rhs| ≤ tol · (1 + max(|lhs|, |rhs|))`.
pub fn check_integrability<S: PfaffianSystem + ?Sized>(
    system: &S,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<bool> {
    let n = system.dim();
    for x in points {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        check_point(system, x)?;
    }
    if n < 2 {
        return Ok(true);
    }
    for x in points {
        let mats = system.matrices(x);
        let jac = matrix_jacobian(system, x);
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = &jac[j][i] + &mats[j] * &mats[i];
                let rhs = &jac[i][j] + &mats[i] * &mats[j];
                let ok = lhs
                    .iter()
                    .zip(rhs.iter())
                    .all(|(a, b)| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())));
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

type MatrixFn = Box<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;
type DerivativeFn = Box<dyn Fn(&[f64], usize, usize) -> DMatrix<f64> + Send + Sync>;
type SingularFn = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A Pfaffian system assembled from closures, for user-supplied objectives.
pub struct FnPfaffianSystem {
    dim: usize,
    rank: usize,
    matrices: MatrixFn,
    derivatives: Option<DerivativeFn>,
    singular: Option<SingularFn>,
}

impl FnPfaffianSystem {
    pub fn new<M>(dim: usize, rank: usize, matrices: M) -> Self
    where
        M: Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        Self {
            dim,
            rank,
            matrices: Box::new(matrices),
            derivatives: None,
            singular: None,
        }
    }

    /// A system with constant coefficient matrices.
    pub fn constant(matrices: Vec<DMatrix<f64>>) -> Self {
        let dim = matrices.len();
        let rank = matrices.first().map_or(0, |m| m.nrows());
        Self::new(dim, rank, move |_| matrices.clone())
    }

    pub fn with_derivatives<D>(mut self, derivatives: D) -> Self
    where
        D: Fn(&[f64], usize, usize) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.derivatives = Some(Box::new(derivatives));
        self
    }

    pub fn with_singular_locus<P>(mut self, singular: P) -> Self
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.singular = Some(Box::new(singular));
        self
    }
}

impl PfaffianSystem for FnPfaffianSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn matrices(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        (self.matrices)(x)
    }

    fn matrix_derivative(&self, x: &[f64], i: usize, j: usize) -> Option<DMatrix<f64>> {
        self.derivatives.as_ref().map(|d| d(x, i, j))
    }

    fn is_singular(&self, x: &[f64]) -> bool {
        self.singular.as_ref().is_some_and(|s| s(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // f(x, y) = exp(a x + b y): rank 1, P = [a], [b].
    fn exponential(a: f64, b: f64) -> FnPfaffianSystem {
        FnPfaffianSystem::constant(vec![
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, b),
        ])
    }

    #[test]
    fn zero_length_path_is_identity() {
        let sys = exponential(0.3, -0.2);
        let s = StateVector::new(vec![1.0, 2.0], vec![4.2]);
        let out = propagate(&sys, &s, &[1.0, 2.0], &IntegratorConfig::default()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn propagates_exponential() {
        let sys = exponential(0.3, -0.2);
        let s = StateVector::new(vec![0.0, 0.0], vec![1.0]);
        let out = propagate(&sys, &s, &[2.0, 1.0], &IntegratorConfig::default()).unwrap();
        assert_relative_eq!(out.values[0], (0.6f64 - 0.2).exp(), max_relative = 1e-12);
        assert_eq!(out.point, vec![2.0, 1.0]);
    }

    #[test]
    fn gradient_and_hessian_of_exponential() {
        let sys = exponential(0.3, -0.2);
        let s = StateVector::new(vec![0.5, 0.5], vec![2.0]);
        let g = gradient(&sys, &s).unwrap();
        assert_relative_eq!(g[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(g[1], -0.4, epsilon = 1e-15);
        let h = hessian(&sys, &s).unwrap();
        assert_relative_eq!(h[(0, 0)], 0.18, epsilon = 1e-12);
        assert_relative_eq!(h[(0, 1)], -0.12, epsilon = 1e-12);
        assert_relative_eq!(h[(1, 1)], 0.08, epsilon = 1e-12);
    }

    #[test]
    fn zero_state_has_zero_gradient() {
        let sys = exponential(0.3, -0.2);
        let s = StateVector::new(vec![0.5, 0.5], vec![0.0]);
        assert_eq!(gradient(&sys, &s).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn swap_matrix_without_partner_is_integrable() {
        // P₂ = 0 commutes with everything, so the identity holds trivially.
        let p1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p2 = DMatrix::zeros(2, 2);
        let sys = FnPfaffianSystem::constant(vec![p1, p2]);
        assert!(check_integrability(&sys, &[vec![0.0, 0.0]], 1e-9).unwrap());
    }

    #[test]
    fn noncommuting_constants_are_not_integrable() {
        let p1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let sys = FnPfaffianSystem::constant(vec![p1, p2]);
        assert!(!check_integrability(&sys, &[vec![0.3, 0.1]], 1e-6).unwrap());
    }

    #[test]
    fn one_dimensional_system_is_vacuously_integrable() {
        let sys = FnPfaffianSystem::new(1, 2, |x: &[f64]| {
            vec![DMatrix::from_row_slice(2, 2, &[x[0], 1.0, 2.0, -x[0]])]
        });
        assert!(check_integrability(&sys, &[vec![0.5], vec![-3.0]], 1e-12).unwrap());
    }

    #[test]
    fn singular_point_is_rejected() {
        let sys = exponential(1.0, 1.0).with_singular_locus(|x| x[0] == 0.0);
        let s = StateVector::new(vec![0.0, 1.0], vec![1.0]);
        assert!(matches!(
            gradient(&sys, &s),
            Err(Error::SingularPoint { .. })
        ));
        assert!(matches!(
            hessian(&sys, &s),
            Err(Error::SingularPoint { .. })
        ));
        assert!(matches!(
            check_integrability(&sys, &[vec![0.0, 2.0]], 1e-6),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn finite_difference_derivative_matches_analytic() {
        // P₁ = [[x², 0], [0, y]], P₂ = [[0, xy], [1, 0]]
        let m = |x: &[f64]| {
            vec![
                DMatrix::from_row_slice(2, 2, &[x[0] * x[0], 0.0, 0.0, x[1]]),
                DMatrix::from_row_slice(2, 2, &[0.0, x[0] * x[1], 1.0, 0.0]),
            ]
        };
        let fd = FnPfaffianSystem::new(2, 2, m);
        let exact = FnPfaffianSystem::new(2, 2, m).with_derivatives(|x, i, j| match (i, j) {
            (0, 0) => DMatrix::from_row_slice(2, 2, &[2.0 * x[0], 0.0, 0.0, 0.0]),
            (0, 1) => DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
            (1, 0) => DMatrix::from_row_slice(2, 2, &[0.0, x[1], 0.0, 0.0]),
            _ => DMatrix::from_row_slice(2, 2, &[0.0, x[0], 0.0, 0.0]),
        });
        let s = StateVector::new(vec![0.7, -1.3], vec![1.5, -0.25]);
        let a = hessian(&fd, &s).unwrap();
        let b = hessian(&exact, &s).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            assert_relative_eq!(u, v, epsilon = 1e-8);
        }
    }
}
