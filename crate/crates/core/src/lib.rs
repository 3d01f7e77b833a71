//! Holonomic gradient descent.
//!
//! Minimizes functions that are cheap to describe by a Pfaffian system
//! `∂F/∂xᵢ = Pᵢ(x) F` but expensive to evaluate directly. The objective is
//! evaluated once at the starting point; afterwards values, gradients and
//! Hessians are read off the state vector `F`, which is carried between
//! iterates by numerical integration.
//!
//! * [`pfaffian`]: systems, propagation, gradient and Hessian extraction.
//! * [`optimizer`]: Newton iteration (HGD) and its exact-penalty constrained
//!   variant (CHGD).
//! * [`vonmises`]: the von Mises likelihood as a concrete system, with
//!   quadrature oracles, a sampler, and a direct Newton baseline.
//! * [`bessel`]: `I₀`, `I₁` by series and by quadrature.
//! * [`bench`]: per-method fitting of the von Mises model and the paired
//!   runtime benchmark.

// Config checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bessel;
pub mod error;
pub mod optimizer;
pub mod pfaffian;
pub mod vonmises;

pub use bench::{fit_vm, run_benchmark, BenchReport, BenchSpec, Method, VmConstraint};
pub use error::{Error, Result};
pub use optimizer::{
    armijo_backtrack, chgd_fit, chgd_minimize, exact_penalty, hgd_direction, hgd_fit, hgd_minimize,
    linearized_penalty, newton_direction, Constraint, ConstraintSet, IterationRecord,
    IterationTrace, Minimum, OptimizerConfig, PenaltyConfig, Status,
};
pub use pfaffian::{
    check_integrability, gradient, hessian, propagate, FnPfaffianSystem, HolonomicObjective,
    IntegratorConfig, PfaffianSystem, StateVector,
};
pub use vonmises::{
    mle_direct_newton, sufficient_stats, vm_initial_state, vm_objective_oracle, vm_pfaffian_system,
    vm_sample, AngleData, SufficientStats, VmParams, VonMisesSystem,
};
