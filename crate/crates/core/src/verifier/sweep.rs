//! Refinement sweeps: residual maxima per quadrature node count, FD step
//! or truncation radius. Genuine solutions should improve until round-off;
//! defective ones should not move.

use crate::solution::SolutionSpec;
use crate::vecfield::{FdSpec, ScalarField, Vec3};

use super::{build_with_defect, mean_value_check, run_check, Check, Defect, ResidualMode, SampleGrid, VerifyError, VerifyOptions};

pub const MIN_SWEEP_LEVELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// 1-D node count of the potential's inner integral.
    QuadNodes,
    /// Step of a pure finite-difference momentum residual.
    FdStep,
    /// Truncation radius of the mean-value convolution.
    TruncRadius,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::QuadNodes => "quad-nodes",
            SweepAxis::FdStep => "fd-step",
            SweepAxis::TruncRadius => "trunc-radius",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [SweepAxis::QuadNodes, SweepAxis::FdStep, SweepAxis::TruncRadius]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown sweep axis '{s}' (expected quad-nodes, fd-step or trunc-radius)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub level: f64,
    pub residual: f64,
}

/// Evaluates `residual` at each level, in order.
pub fn convergence_sweep(levels: &[f64], residual: impl Fn(f64) -> Result<f64, VerifyError>) -> Result<Vec<SweepRow>, VerifyError> {
    if levels.len() < MIN_SWEEP_LEVELS {
        return Err(VerifyError::Levels(levels.len()));
    }
    levels.iter().map(|&level| Ok(SweepRow { level, residual: residual(level)? })).collect()
}

/// Strictly decreasing until the residual reaches `floor`.
pub fn decreases_to_floor(rows: &[SweepRow], floor: f64) -> bool {
    rows.windows(2).all(|w| w[0].residual <= floor || w[1].residual < w[0].residual)
}

/// All residuals within a factor `1 + spread` of each other.
pub fn refinement_invariant(rows: &[SweepRow], spread: f64) -> bool {
    let max = rows.iter().map(|r| r.residual).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    min > 0.0 && max <= min * (1.0 + spread)
}

fn node_level(axis: SweepAxis, level: f64) -> Result<usize, VerifyError> {
    if level.fract() == 0.0 && (2.0..=4096.0).contains(&level) {
        Ok(level as usize)
    } else {
        Err(VerifyError::Level { axis: axis.name(), level })
    }
}

/// Sweeps a (possibly defective) solution along `axis`.
///
/// * `quad-nodes` rebuilds with that many inner-integral nodes and reports
///   `check` (default: the defect's expected check, else harmonicity);
/// * `fd-step` reports the pure-FD momentum residual at that step;
/// * `trunc-radius` reports the largest mean-value gap of `g` over the
///   grid's points with `radial_nodes` radial nodes.
#[allow(clippy::too_many_arguments)]
pub fn sweep_solution(
    spec: &SolutionSpec,
    defect: Defect,
    grid: &SampleGrid,
    axis: SweepAxis,
    levels: &[f64],
    opts: &VerifyOptions,
    check: Option<Check>,
    mean_value_g: &dyn ScalarField,
    radial_nodes: usize,
) -> Result<Vec<SweepRow>, VerifyError> {
    if levels.len() < MIN_SWEEP_LEVELS {
        return Err(VerifyError::Levels(levels.len()));
    }
    match axis {
        SweepAxis::QuadNodes => {
            let check = check.or(defect.expected_check()).unwrap_or(Check::Harmonicity);
            convergence_sweep(levels, |level| {
                let spec = SolutionSpec { phi_nodes: node_level(axis, level)?, ..spec.clone() };
                let sol = build_with_defect(&spec, defect)?;
                Ok(run_check(&sol, grid, check, opts)?.max)
            })
        }
        SweepAxis::FdStep => {
            let sol = build_with_defect(spec, defect)?;
            convergence_sweep(levels, |level| {
                let fd = FdSpec::absolute(level, 4).map_err(|_| VerifyError::Level { axis: axis.name(), level })?;
                let opts = VerifyOptions { mode: ResidualMode::PureFd(fd), ..opts.clone() };
                Ok(run_check(&sol, grid, Check::Momentum, &opts)?.max)
            })
        }
        SweepAxis::TruncRadius => convergence_sweep(levels, |level| {
            if !(level.is_finite() && level > 0.0) {
                return Err(VerifyError::Level { axis: axis.name(), level });
            }
            grid.points
                .iter()
                .map(|&x0: &Vec3| mean_value_check(mean_value_g, x0, level, radial_nodes).map(f64::abs))
                .try_fold(0.0, |m: f64, v| v.map(|v| m.max(v)))
        }),
    }
}
