//! Numerical adjudication of a solution: continuity, irrotationality, the
//! momentum residual, consistency as `t -> 0`, harmonicity of the potential,
//! the mean-value identity, and refinement sweeps.
//!
//! Hypothesis checks (the wave-number constraint, unit mass of `h`,
//! harmonicity of `g`) run alongside the conclusion checks, so deliberately
//! broken inputs ([`Defect`]) are traced back to the hypothesis they break.

mod checks;
mod defects;
mod report;
mod sweep;

use rand::{Rng, SeedableRng};

pub use checks::{
    constraint_check, continuity_and_curl, divergence_and_curl_at, harmonicity_check, initial_condition_check,
    mean_value_check, mean_value_envelope, momentum_check, momentum_residual, normalization_check, t0_check,
    t0_consistency, ResidualMode, T0Expectation, T0Fit,
};
pub use defects::{build_with_defect, Defect};
pub use report::{Check, CheckResult, Offender, ResidualReport, WORST_OFFENDERS};
pub use sweep::{
    convergence_sweep, decreases_to_floor, refinement_invariant, sweep_solution, SweepAxis, SweepRow, MIN_SWEEP_LEVELS,
};

use crate::quadrature::QuadratureError;
use crate::solution::{NSSolution, SolutionError};
use crate::vecfield::{FieldError, Vec3};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("sample grid is invalid: {0}")]
    Grid(String),
    #[error("t values must be positive, strictly decreasing and at least 3, got {0:?}")]
    TimeValues(Vec<f64>),
    #[error("a sweep needs at least {MIN_SWEEP_LEVELS} levels, got {0}")]
    Levels(usize),
    #[error("invalid sweep level {level} for axis {axis}")]
    Level { axis: &'static str, level: f64 },
    #[error("{0} is unavailable for this solution")]
    Missing(&'static str),
}

/// Pass thresholds per check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub continuity: f64,
    pub curl: f64,
    pub momentum: f64,
    /// On `|Lap g| / (1 + |g|)`.
    pub harmonicity: f64,
    /// On `|zeta^2 - alpha^2 - beta^2| / zeta^2`.
    pub constraint: f64,
    /// On `|int h - 1|`.
    pub normalization: f64,
    /// On `|u(., 0) - u0| / (1 + |u0|)`.
    pub initial: f64,
    /// Scaled `t -> 0` differences below which a radial `h` counts as exact.
    pub t0_identical: f64,
    /// Round-off floor for declaring `t -> 0` differences identically zero.
    pub t0_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            continuity: 1e-6,
            curl: 1e-6,
            momentum: 1e-6,
            harmonicity: 1e-8,
            constraint: 1e-12,
            normalization: 1e-10,
            initial: 1e-10,
            t0_identical: 1e-8,
            t0_floor: 1e-14,
        }
    }
}

/// Spatial sample points crossed with sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<Vec3>,
    pub times: Vec<f64>,
    pub seed: u64,
}

impl Default for SampleGrid {
    /// `[-1, 1]^3` at 4 points per axis, `t` in `{0, 0.1, 0.5, 1}`.
    fn default() -> Self {
        Self::tensor(1.0, 4, vec![0.0, 0.1, 0.5, 1.0]).expect("valid default grid")
    }
}

impl SampleGrid {
    pub fn new(points: Vec<Vec3>, times: Vec<f64>) -> Result<Self, VerifyError> {
        let g = Self { points, times, seed: 0 };
        g.validate()?;
        Ok(g)
    }

    /// Tensor grid on `[-extent, extent]^3` with `resolution` points per axis.
    pub fn tensor(extent: f64, resolution: usize, times: Vec<f64>) -> Result<Self, VerifyError> {
        if !(extent.is_finite() && extent > 0.0) || resolution == 0 {
            return Err(VerifyError::Grid(format!("extent {extent} and resolution {resolution} must be positive")));
        }
        let coord = |i: usize| if resolution == 1 { 0.0 } else { -extent + 2.0 * extent * i as f64 / (resolution - 1) as f64 };
        let mut points = Vec::with_capacity(resolution.pow(3));
        for i in 0..resolution {
            for j in 0..resolution {
                for k in 0..resolution {
                    points.push(Vec3::new(coord(i), coord(j), coord(k)));
                }
            }
        }
        Self::new(points, times)
    }

    /// `count` uniform points in `[-extent, extent]^3` from a seeded ChaCha stream.
    pub fn random(extent: f64, count: usize, times: Vec<f64>, seed: u64) -> Result<Self, VerifyError> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(VerifyError::Grid(format!("extent {extent} must be positive")));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = || rng.random_range(-extent..=extent);
        let points = (0..count).map(|_| Vec3::new(c(), c(), c())).collect();
        let mut g = Self::new(points, times)?;
        g.seed = seed;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.points.is_empty() || self.times.is_empty() {
            return Err(VerifyError::Grid("needs at least one point and one time".into()));
        }
        if !self.points.iter().all(|p| p.is_finite()) || !self.times.iter().all(|t| t.is_finite()) {
            return Err(VerifyError::Grid("coordinates and times must be finite".into()));
        }
        Ok(())
    }

    /// All `(x, t)` pairs, time-major.
    pub fn samples(&self) -> Vec<(Vec3, f64)> {
        self.times.iter().flat_map(|&t| self.points.iter().map(move |&x| (x, t))).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub mode: ResidualMode,
    /// Decreasing positive times for the `t -> 0` fit.
    pub t0_times: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), mode: ResidualMode::Analytic, t0_times: vec![1e-1, 1e-2, 1e-3] }
    }
}

/// Runs a single check. Checks whose inputs the solution lacks (for
/// example harmonicity without a potential) report [`VerifyError::Missing`].
pub fn run_check(sol: &NSSolution, grid: &SampleGrid, check: Check, opts: &VerifyOptions) -> Result<CheckResult, VerifyError> {
    let tol = &opts.tolerances;
    match check {
        Check::Constraint => {
            let w = sol.waves.ok_or(VerifyError::Missing("wave numbers"))?;
            Ok(constraint_check(w.alpha, w.beta, w.zeta, tol))
        }
        Check::Normalization => {
            let h = sol.mollifier.as_ref().ok_or(VerifyError::Missing("mollifier"))?;
            normalization_check(h, h.nodes(), tol)
        }
        Check::Harmonicity => {
            let g = sol.initial_potential.as_ref().ok_or(VerifyError::Missing("initial potential"))?;
            harmonicity_check(g.as_ref(), grid, tol)
        }
        Check::Continuity => Ok(continuity_and_curl(sol, grid, tol)?[0].clone()),
        Check::Curl => Ok(continuity_and_curl(sol, grid, tol)?[1].clone()),
        Check::Momentum => momentum_check(sol, grid, opts.mode, tol),
        Check::InitialCondition => {
            let u0 = sol.initial_velocity.as_ref().ok_or(VerifyError::Missing("initial velocity"))?;
            initial_condition_check(sol.velocity.as_ref(), u0.as_ref(), grid, tol)
        }
        Check::T0Consistency => {
            let u0 = sol.initial_velocity.as_ref().ok_or(VerifyError::Missing("initial velocity"))?;
            let fit = t0_consistency(sol.velocity.as_ref(), u0.as_ref(), grid, &opts.t0_times, tol.t0_floor)?;
            let kind = sol.mollifier.as_ref().map(|h| h.kind());
            Ok(t0_check(&fit, T0Expectation::for_kind(kind), tol))
        }
    }
}

/// The full suite: every check the solution has inputs for.
pub fn verify(sol: &NSSolution, grid: &SampleGrid, opts: &VerifyOptions) -> Result<ResidualReport, VerifyError> {
    grid.validate()?;
    let tol = &opts.tolerances;
    let mut checks = Vec::new();
    if let Some(w) = sol.waves {
        checks.push(constraint_check(w.alpha, w.beta, w.zeta, tol));
    }
    if let Some(h) = &sol.mollifier {
        checks.push(normalization_check(h, h.nodes(), tol)?);
    }
    if let Some(g) = &sol.initial_potential {
        checks.push(harmonicity_check(g.as_ref(), grid, tol)?);
    }
    checks.extend(continuity_and_curl(sol, grid, tol)?);
    checks.push(momentum_check(sol, grid, opts.mode, tol)?);
    if sol.initial_velocity.is_some() {
        checks.push(run_check(sol, grid, Check::InitialCondition, opts)?);
        checks.push(run_check(sol, grid, Check::T0Consistency, opts)?);
    }
    Ok(ResidualReport { checks, settings: settings(sol, grid, opts) })
}

fn settings(sol: &NSSolution, grid: &SampleGrid, opts: &VerifyOptions) -> Vec<(String, String)> {
    let mut s = vec![
        ("grid points".to_string(), grid.points.len().to_string()),
        ("grid times".to_string(), format!("{:?}", grid.times)),
        ("grid seed".to_string(), grid.seed.to_string()),
        ("nu".to_string(), sol.nu.to_string()),
        ("t0 times".to_string(), format!("{:?}", opts.t0_times)),
    ];
    s.push((
        "derivatives".to_string(),
        match opts.mode {
            ResidualMode::Analytic => "analytic".to_string(),
            ResidualMode::PureFd(f) => format!("fd step {} order {} {:?}", f.space_step, f.order, f.scaling),
        },
    ));
    if let Some(p) = &sol.provenance {
        s.push(("alpha beta zeta".into(), format!("{} {} {}", p.alpha, p.beta, p.zeta)));
        s.push(("psi a b".into(), format!("{} {}", p.psi.a, p.psi.b)));
        s.push(("phi".into(), format!("{} radius {}", p.phi.kind.name(), p.phi.radius)));
        s.push(("h".into(), format!("{} axes {} center {}", p.h.kind.name(), p.h.semi_axes(), p.h.center)));
        s.push(("forcing".into(), p.forcing.name().to_string()));
        s.push(("phi nodes".into(), p.phi_nodes.to_string()));
        s.push(("h nodes".into(), p.h_nodes.to_string()));
    }
    s
}
