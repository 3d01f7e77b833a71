//! Fitting entry points for the von Mises model and the paired runtime
//! benchmark.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::optimizer::{
    chgd_fit, hgd_fit, Constraint, ConstraintSet, Minimum, OptimizerConfig, PenaltyConfig, Status,
};
use crate::vonmises::{
    mle_direct_newton, sufficient_stats, vm_pfaffian_system, vm_sample, SufficientStats, VmParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hgd,
    Chgd,
    Newton,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hgd => "hgd",
            Method::Chgd => "chgd",
            Method::Newton => "newton",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hgd" => Ok(Method::Hgd),
            "chgd" => Ok(Method::Chgd),
            "newton" => Ok(Method::Newton),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Constraints on `θ` understood by the command line.
///
/// * `linear a b c` is `a θ₁ + b θ₂ + c ≤ 0`
/// * `disk r` is `θ₁² + θ₂² ≤ r²`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VmConstraint {
    Linear { a: f64, b: f64, c: f64 },
    Disk { radius: f64 },
}

impl VmConstraint {
    pub fn to_constraint(self) -> Constraint {
        match self {
            VmConstraint::Linear { a, b, c } => Constraint::linear(vec![a, b], c),
            VmConstraint::Disk { radius } => Constraint::ball(radius),
        }
    }
}

impl fmt::Display for VmConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VmConstraint::Linear { a, b, c } => write!(f, "linear {a} {b} {c}"),
            VmConstraint::Disk { radius } => write!(f, "disk {radius}"),
        }
    }
}

impl FromStr for VmConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let kind = words.next().unwrap_or_default();
        let nums: Vec<f64> = words
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{w:?} in constraint {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!(
                "non-finite coefficient in constraint {s:?}"
            )));
        }
        match (kind, nums.as_slice()) {
            ("linear", &[a, b, c]) => {
                if a == 0.0 && b == 0.0 {
                    return Err(Error::Parse(format!("degenerate linear constraint {s:?}")));
                }
                Ok(VmConstraint::Linear { a, b, c })
            }
            ("disk", &[radius]) if radius > 0.0 => Ok(VmConstraint::Disk { radius }),
            ("disk", &[_]) => Err(Error::Parse(format!(
                "disk radius must be positive in {s:?}"
            ))),
            _ => Err(Error::Parse(format!(
                "expected `linear a b c` or `disk r`, got {s:?}"
            ))),
        }
    }
}

pub fn constraint_set(constraints: &[VmConstraint]) -> ConstraintSet {
    constraints.iter().fold(ConstraintSet::new(), |set, c| {
        set.with_inequality(c.to_constraint())
    })
}

/// Fits the von Mises model with the chosen method.
///
/// `chgd` requires at least one constraint; `hgd` and `newton` accept none.
pub fn fit_vm(
    method: Method,
    stats: &SufficientStats,
    x0: [f64; 2],
    constraints: &[VmConstraint],
    cfg: &OptimizerConfig,
    pcfg: &PenaltyConfig,
) -> Result<Minimum> {
    match (method, constraints.is_empty()) {
        (Method::Chgd, true) => Err(Error::InvalidConfig(
            "chgd needs at least one constraint".into(),
        )),
        (Method::Hgd | Method::Newton, false) => Err(Error::InvalidConfig(format!(
            "{method} does not take constraints"
        ))),
        (Method::Hgd, true) => hgd_fit(&vm_pfaffian_system(*stats), &x0, cfg),
        (Method::Newton, true) => mle_direct_newton(stats, VmParams::from(x0), cfg),
        (Method::Chgd, false) => {
            let cons = constraint_set(constraints);
            chgd_fit(&vm_pfaffian_system(*stats), &x0, &cons, cfg, pcfg)
        }
    }
}

/// A paired benchmark: every trial draws one sample and fits it with every
/// method.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub trials: usize,
    pub methods: Vec<Method>,
    pub kappa: f64,
    pub mu: f64,
    pub n: usize,
    /// Trial `i` samples with seed `seed + i`.
    pub seed: u64,
    pub x0: [f64; 2],
    /// Constraints for `chgd`; ignored by the other methods.
    pub constraints: Vec<VmConstraint>,
    pub optimizer: OptimizerConfig,
    pub penalty: PenaltyConfig,
}

impl Default for BenchSpec {
    fn default() -> Self {
        let theta = 2.12f64;
        Self {
            trials: 500,
            methods: vec![Method::Hgd, Method::Chgd, Method::Newton],
            kappa: theta.hypot(theta),
            mu: std::f64::consts::FRAC_PI_4,
            n: 100,
            seed: 0,
            x0: [-2.0, 0.1],
            constraints: vec![VmConstraint::Disk { radius: 10.0 }],
            optimizer: OptimizerConfig::default(),
            penalty: PenaltyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    /// Wall time of the fit call alone.
    pub seconds: f64,
    pub estimate: Option<[f64; 2]>,
    pub iterations: Option<usize>,
    pub status: Option<Status>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_seconds: f64,
    pub mean_estimate: [f64; 2],
    pub succeeded: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub summaries: Vec<MethodSummary>,
    pub trials: Vec<TrialRecord>,
}

impl BenchReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn failures(&self) -> usize {
        self.summaries.iter().map(|s| s.failures).sum()
    }
}

pub fn run_benchmark(spec: &BenchSpec) -> Result<BenchReport> {
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if spec.methods.is_empty() {
        return Err(Error::InvalidConfig("no methods to benchmark".into()));
    }
    if spec.methods.contains(&Method::Chgd) && spec.constraints.is_empty() {
        return Err(Error::InvalidConfig(
            "chgd needs at least one constraint".into(),
        ));
    }
    spec.optimizer.validate()?;
    spec.penalty.validate()?;

    let mut trials = Vec::with_capacity(spec.trials * spec.methods.len());
    for trial in 0..spec.trials {
        let seed = spec.seed.wrapping_add(trial as u64);
        let stats = sufficient_stats(&vm_sample(spec.kappa, spec.mu, spec.n, seed)?)?;
        for &method in &spec.methods {
            let constraints: &[VmConstraint] = if method == Method::Chgd {
                &spec.constraints
            } else {
                &[]
            };
            let start = Instant::now();
            let result = fit_vm(
                method,
                &stats,
                spec.x0,
                constraints,
                &spec.optimizer,
                &spec.penalty,
            );
            let seconds = start.elapsed().as_secs_f64();
            let record = match result {
                Ok(m) => TrialRecord {
                    trial,
                    seed,
                    method,
                    seconds,
                    estimate: Some([m.point()[0], m.point()[1]]),
                    iterations: Some(m.iterations),
                    status: Some(m.status),
                    error: None,
                },
                Err(e) => TrialRecord {
                    trial,
                    seed,
                    method,
                    seconds,
                    estimate: None,
                    iterations: None,
                    status: None,
                    error: Some(e.to_string()),
                },
            };
            trials.push(record);
        }
    }

    let summaries = spec
        .methods
        .iter()
        .map(|&method| summarize(method, &trials))
        .collect();
    Ok(BenchReport { summaries, trials })
}

fn summarize(method: Method, trials: &[TrialRecord]) -> MethodSummary {
    let mine: Vec<&TrialRecord> = trials.iter().filter(|t| t.method == method).collect();
    let ok: Vec<[f64; 2]> = mine.iter().filter_map(|t| t.estimate).collect();
    let mean_seconds = mine.iter().map(|t| t.seconds).sum::<f64>() / mine.len().max(1) as f64;
    let mean_estimate = if ok.is_empty() {
        [f64::NAN, f64::NAN]
    } else {
        let k = ok.len() as f64;
        [
            ok.iter().map(|e| e[0]).sum::<f64>() / k,
            ok.iter().map(|e| e[1]).sum::<f64>() / k,
        ]
    };
    MethodSummary {
        method,
        mean_seconds,
        mean_estimate,
        succeeded: ok.len(),
        failures: mine.len() - ok.len(),
    }
}
