//! Pointwise residuals and the grid checks built on them.

use rayon::prelude::*;

use crate::mollifier::{make_radial_density, MollifierKind};
use crate::quadrature::{integrate_1d, integrate_radial_exp, QuadratureError, QuadratureSpec};
use crate::solution::{constraint_violation, NSSolution};
use crate::vecfield::{
    fd_derivative, jet_jacobian, jet_value, Dir, FdSpec, FieldError, Order, Polynomial, ScalarField, Vec3, VectorField,
};

use super::{Check, CheckResult, Offender, SampleGrid, Tolerances, VerifyError};

/// How derivatives enter the momentum residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResidualMode {
    /// Each field's own derivatives (analytic, under the integral).
    Analytic,
    /// Finite differences of field values only, for cross-validation.
    PureFd(FdSpec),
}

/// `d_t u - nu Lap u + (u . grad) u + grad p - grad F` at `(x, t)`.
pub fn momentum_residual(sol: &NSSolution, x: Vec3, t: f64, mode: ResidualMode) -> Result<Vec3, FieldError> {
    match mode {
        ResidualMode::Analytic => analytic_residual(sol, x, t),
        ResidualMode::PureFd(spec) => fd_residual(sol, x, t, &spec),
    }
}

fn analytic_residual(sol: &NSSolution, x: Vec3, t: f64) -> Result<Vec3, FieldError> {
    let full = Order { space: 2, time: true };
    let (u, dt) = if sol.velocity.capability().covers(full) {
        let u = sol.velocity.jets(x, t, full)?;
        let dt = [u[0].dt, u[1].dt, u[2].dt];
        (u, dt)
    } else {
        let u = sol.velocity.jets(x, t, Order::HESS)?;
        let d = sol.velocity.jets(x, t, Order::with_time(0))?;
        (u, [d[0].dt, d[1].dt, d[2].dt])
    };
    let p = sol.pressure.jet(x, t, Order::GRAD)?;
    let f = sol.forcing.jet(x, t, Order::GRAD)?;
    let v = jet_value(&u);
    let jac = jet_jacobian(&u);
    let mut r = Vec3::ZERO;
    for i in 0..3 {
        let mut advective = 0.0;
        for j in 0..3 {
            advective += v[j] * jac[i][j];
        }
        r[i] = dt[i] - sol.nu * u[i].laplacian() + advective + p.grad[i] - f.grad[i];
    }
    Ok(r)
}

fn fd_residual(sol: &NSSolution, x: Vec3, t: f64, spec: &FdSpec) -> Result<Vec3, FieldError> {
    let u = |y: Vec3, s: f64| sol.velocity.value(y, s);
    let p = |y: Vec3, s: f64| sol.pressure.value(y, s);
    let f = |y: Vec3, s: f64| sol.forcing.value(y, s);
    let v = u(x, t)?;
    let dt: Vec3 = fd_derivative(&u, x, t, &[Dir::Time], spec)?;
    let mut lap = Vec3::ZERO;
    let mut advective = Vec3::ZERO;
    let mut grad_p = Vec3::ZERO;
    let mut grad_f = Vec3::ZERO;
    for j in 0..3 {
        let d = Dir::Space(j);
        lap += fd_derivative(&u, x, t, &[d, d], spec)?;
        advective += fd_derivative::<Vec3, _, _>(&u, x, t, &[d], spec)? * v[j];
        grad_p[j] = fd_derivative(&p, x, t, &[d], spec)?;
        grad_f[j] = fd_derivative(&f, x, t, &[d], spec)?;
    }
    Ok(dt - lap * sol.nu + advective + grad_p - grad_f)
}

/// Evaluates `f` at every grid sample in parallel; output keeps grid order.
pub(crate) fn sample<T, F>(grid: &SampleGrid, f: F) -> Result<Vec<(Vec3, f64, T)>, VerifyError>
where
    T: Send,
    F: Fn(Vec3, f64) -> Result<T, VerifyError> + Sync,
{
    grid.samples().par_iter().map(|&(x, t)| f(x, t).map(|v| (x, t, v))).collect()
}

fn offenders<T>(samples: &[(Vec3, f64, T)], pick: impl Fn(&T) -> f64) -> Vec<Offender> {
    samples.iter().map(|(x, t, v)| Offender { x: *x, t: *t, value: pick(v) }).collect()
}

/// `|div u|` and `|curl u|_inf` at one point.
pub fn divergence_and_curl_at(u: &dyn VectorField, x: Vec3, t: f64) -> Result<(f64, f64), FieldError> {
    let jac = jet_jacobian(&u.jets(x, t, Order::GRAD)?);
    let div = jac[0][0] + jac[1][1] + jac[2][2];
    let curl = Vec3::new(jac[2][1] - jac[1][2], jac[0][2] - jac[2][0], jac[1][0] - jac[0][1]);
    Ok((div.abs(), curl.max_abs()))
}

/// Max/mean of `|div u|` and `|curl u|` over the grid.
pub fn continuity_and_curl(sol: &NSSolution, grid: &SampleGrid, tol: &Tolerances) -> Result<[CheckResult; 2], VerifyError> {
    let s = sample(grid, |x, t| Ok(divergence_and_curl_at(sol.velocity.as_ref(), x, t)?))?;
    Ok([
        CheckResult::from_samples(Check::Continuity, offenders(&s, |v| v.0), tol.continuity),
        CheckResult::from_samples(Check::Curl, offenders(&s, |v| v.1), tol.curl),
    ])
}

/// Componentwise sup of the momentum residual over the grid.
pub fn momentum_check(sol: &NSSolution, grid: &SampleGrid, mode: ResidualMode, tol: &Tolerances) -> Result<CheckResult, VerifyError> {
    let s = sample(grid, |x, t| Ok(momentum_residual(sol, x, t, mode)?.max_abs()))?;
    let mode = match mode {
        ResidualMode::Analytic => "analytic".to_string(),
        ResidualMode::PureFd(f) => format!("pure finite differences (step {}, order {})", f.space_step, f.order),
    };
    Ok(CheckResult::from_samples(Check::Momentum, offenders(&s, |v| *v), tol.momentum).with_note(format!("derivatives: {mode}")))
}

/// `max |Lap g| / (1 + |g|)` over the grid's spatial points.
pub fn harmonicity_check(g: &dyn ScalarField, grid: &SampleGrid, tol: &Tolerances) -> Result<CheckResult, VerifyError> {
    let points = SampleGrid { times: vec![0.0], ..grid.clone() };
    let s = sample(&points, |x, t| {
        let j = g.jet(x, t, Order::HESS)?;
        Ok(j.laplacian().abs() / (1.0 + j.value.abs()))
    })?;
    Ok(CheckResult::from_samples(Check::Harmonicity, offenders(&s, |v| *v), tol.harmonicity))
}

/// `|u(x, 0) - u0(x)| / (1 + |u0(x)|)` over the grid's spatial points.
pub fn initial_condition_check(u: &dyn VectorField, u0: &dyn VectorField, grid: &SampleGrid, tol: &Tolerances) -> Result<CheckResult, VerifyError> {
    let points = SampleGrid { times: vec![0.0], ..grid.clone() };
    let s = sample(&points, |x, _| {
        let want = u0.value(x, 0.0)?;
        Ok((u.value(x, 0.0)? - want).max_abs() / (1.0 + want.max_abs()))
    })?;
    Ok(CheckResult::from_samples(Check::InitialCondition, offenders(&s, |v| *v), tol.initial))
}

/// Relative violation of `zeta^2 = alpha^2 + beta^2`.
pub fn constraint_check(alpha: f64, beta: f64, zeta: f64, tol: &Tolerances) -> CheckResult {
    CheckResult::scalar(Check::Constraint, constraint_violation(alpha, beta, zeta), tol.constraint)
        .with_note(format!("alpha={alpha}, beta={beta}, zeta={zeta}"))
}

/// `|int h - 1|`, re-integrated at `nodes` per axis.
pub fn normalization_check(h: &crate::mollifier::Mollifier, nodes: usize, tol: &Tolerances) -> Result<CheckResult, VerifyError> {
    let mass = h.mass(nodes)?;
    Ok(CheckResult::scalar(Check::Normalization, (mass - 1.0).abs(), tol.normalization).with_note(format!("int h = {mass:.16e}")))
}

/// What `u(., t) -> u0` should look like for a given mollifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T0Expectation {
    /// Radial `h`: `u(., t) = u0` for every `t` (mean-value property).
    Identical,
    /// Even `h`: the first moment vanishes, the error is `O(t^2)`.
    SecondOrder,
    /// Generic `h`: `O(t)`.
    FirstOrder,
}

impl T0Expectation {
    pub fn for_kind(kind: Option<MollifierKind>) -> Self {
        match kind {
            Some(MollifierKind::StandardBump3d) => T0Expectation::Identical,
            Some(MollifierKind::AnisotropicBump3d) => T0Expectation::SecondOrder,
            _ => T0Expectation::FirstOrder,
        }
    }

    fn min_slope(self) -> f64 {
        match self {
            T0Expectation::FirstOrder => 0.9,
            _ => 1.9,
        }
    }
}

/// Log-log fit of `||u(., t) - u0|| / (1 + ||u0||)` against `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct T0Fit {
    pub times: Vec<f64>,
    pub diffs: Vec<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Every difference at or below the round-off floor.
    pub identically_consistent: bool,
}

/// Fits the decay of `u(., t) - u0` as `t -> 0`. Differences are sup norms
/// over `grid`'s spatial points, scaled by `1 + sup |u0|` so the round-off
/// floor does not depend on the field's magnitude.
pub fn t0_consistency(
    u: &dyn VectorField,
    u0: &dyn VectorField,
    grid: &SampleGrid,
    t_values: &[f64],
    floor: f64,
) -> Result<T0Fit, VerifyError> {
    if t_values.len() < 3 || t_values.iter().any(|t| !(t.is_finite() && *t > 0.0)) || t_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(VerifyError::TimeValues(t_values.to_vec()));
    }
    let times: Vec<f64> = t_values.to_vec();
    let points = SampleGrid { times: times.clone(), ..grid.clone() };
    let s = sample(&points, |x, t| {
        let want = u0.value(x, 0.0)?;
        Ok(((u.value(x, t)? - want).max_abs(), want.max_abs()))
    })?;
    let scale = 1.0 + s.iter().map(|v| v.2 .1).fold(0.0, f64::max);
    let diffs: Vec<f64> = times
        .iter()
        .map(|&t| s.iter().filter(|v| v.1 == t).map(|v| v.2 .0).fold(0.0, f64::max) / scale)
        .collect();
    if diffs.iter().all(|&d| d <= floor) {
        return Ok(T0Fit { times, diffs, slope: None, intercept: None, identically_consistent: true });
    }
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = diffs.iter().map(|d| d.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(T0Fit { times, diffs, slope: Some(slope), intercept: Some(my - slope * mx), identically_consistent: false })
}

/// Judges a fit against what the mollifier predicts.
pub fn t0_check(fit: &T0Fit, expect: T0Expectation, tol: &Tolerances) -> CheckResult {
    let max = fit.diffs.iter().copied().fold(0.0, f64::max);
    let mean = fit.diffs.iter().sum::<f64>() / fit.diffs.len().max(1) as f64;
    let passed = fit.identically_consistent
        || (expect == T0Expectation::Identical && max <= tol.t0_identical)
        || fit.slope.is_some_and(|s| s >= expect.min_slope());
    let fit_note = match (fit.identically_consistent, fit.slope) {
        (true, _) => "identically consistent".to_string(),
        (false, Some(s)) => format!("slope {s:.6}, intercept {:.6}", fit.intercept.unwrap_or(f64::NAN)),
        (false, None) => "no fit".to_string(),
    };
    let tolerance = if expect == T0Expectation::Identical { tol.t0_identical } else { f64::INFINITY };
    CheckResult {
        check: Check::T0Consistency,
        max,
        mean,
        tolerance,
        passed,
        worst: Vec::new(),
        note: Some(format!("expected {expect:?}; {fit_note}; diffs {:?} at t {:?}", fit.diffs, fit.times)),
    }
}

/// `(g * rho)_R(x0) - g(x0)` for the radial density `rho = c3 exp(-2 pi |y|)`
/// truncated to the ball of radius `R`.
pub fn mean_value_check(g: &dyn ScalarField, x0: Vec3, radius: f64, nodes: usize) -> Result<f64, VerifyError> {
    Ok(integrate_radial_exp(g, x0, radius, nodes)? - g.value(x0, 0.0)?)
}

/// Bound on the truncation gap for a harmonic polynomial:
/// `4 pi c3 int_R^inf P(|x0| + r) r^2 exp(-2 pi r) dr`, with `P` the sum of
/// absolute coefficients per degree.
pub fn mean_value_envelope(g: &Polynomial, x0: Vec3, radius: f64) -> Result<f64, QuadratureError> {
    let rho = make_radial_density();
    let base = x0.x.abs() + x0.y.abs() + x0.z.abs();
    let bound = |r: f64| -> f64 {
        g.terms().iter().map(|m| m.coef.abs() * (base + r).powi(m.powers.iter().sum::<u32>() as i32)).sum()
    };
    // exp(-2 pi r) has dropped below 1e-40 of its start past R + 15.
    let spec = QuadratureSpec::interval(96, radius, radius + 15.0);
    Ok(4.0 * std::f64::consts::PI * integrate_1d(|r| bound(r) * r * r * rho.value(r), &spec)?)
}
