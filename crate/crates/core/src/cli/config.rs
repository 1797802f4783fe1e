//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored; everything else
//! must be `key = value` with a known key, at most once per file. Vectors
//! and lists are comma separated. Every error names the offending line.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::mollifier::{MollifierError, MollifierKind, MollifierSpec};
use crate::solution::{Forcing, PsiSpec, SolutionError, SolutionSpec};
use crate::vecfield::{FdSpec, Polynomial, Vec3};
use crate::verifier::{Check, Defect, ResidualMode, SampleGrid, SweepAxis, Tolerances, VerifyOptions};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}' repeats line {first}")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("{}key '{key}': {message}", line_prefix(*line))]
    Value { line: Option<usize>, key: &'static str, message: String },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Harmonic polynomials for mean-value checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanValueG {
    One,
    X,
    Saddle,
    Xyz,
}

impl MeanValueG {
    pub const ALL: [MeanValueG; 4] = [MeanValueG::One, MeanValueG::X, MeanValueG::Saddle, MeanValueG::Xyz];

    pub fn name(self) -> &'static str {
        match self {
            MeanValueG::One => "one",
            MeanValueG::X => "x",
            MeanValueG::Saddle => "x2-y2",
            MeanValueG::Xyz => "xyz",
        }
    }

    pub fn polynomial(self) -> Polynomial {
        match self {
            MeanValueG::One => Polynomial::constant(1.0),
            MeanValueG::X => Polynomial::new([(1.0, [1, 0, 0])]),
            MeanValueG::Saddle => Polynomial::new([(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]),
            MeanValueG::Xyz => Polynomial::new([(1.0, [1, 1, 1])]),
        }
    }
}

impl FromStr for MeanValueG {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MeanValueG::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| format!("unknown mean-value g '{s}' (expected one, x, x2-y2 or xyz)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Tensor,
    Random,
}

/// Every knob of a run. Defaults reproduce the reference solution
/// (`alpha = 3, beta = 4, zeta = 5`, `Psi = cosh`, radial `h`).
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
    pub psi_a: f64,
    pub psi_b: f64,
    pub phi_radius: f64,
    pub phi_offset: f64,
    pub h_kind: MollifierKind,
    pub h_radius: f64,
    pub h_offset: Vec3,
    pub h_axes: Vec3,
    pub nu: f64,
    pub forcing: String,
    pub phi_nodes: usize,
    pub h_nodes: usize,
    pub grid_kind: GridKind,
    pub grid_extent: f64,
    pub grid_resolution: usize,
    pub grid_points: usize,
    pub times: Vec<f64>,
    pub t0_times: Vec<f64>,
    pub fd_mode: String,
    pub fd_step: f64,
    pub fd_order: u8,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub threads: usize,
    pub defect: Defect,
    pub sweep_axis: SweepAxis,
    pub sweep_levels: Vec<f64>,
    pub sweep_check: Option<Check>,
    pub mean_value_g: MeanValueG,
    pub radial_nodes: usize,
    pub field_csv: String,
    pub report_txt: String,
    pub report_csv: String,
    pub sweep_csv: String,
    /// Line each key was set on, for error messages.
    lines: HashMap<&'static str, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self {
            alpha: 3.0,
            beta: 4.0,
            zeta: 5.0,
            psi_a: 0.5,
            psi_b: 0.5,
            phi_radius: 1.0,
            phi_offset: 0.0,
            h_kind: MollifierKind::StandardBump3d,
            h_radius: 1.0,
            h_offset: Vec3::ZERO,
            h_axes: Vec3::splat(1.0),
            nu: 1.0,
            forcing: "zero".into(),
            phi_nodes: 128,
            h_nodes: 24,
            grid_kind: GridKind::Tensor,
            grid_extent: 1.0,
            grid_resolution: 4,
            grid_points: 64,
            times: vec![0.0, 0.1, 0.5, 1.0],
            t0_times: vec![1e-1, 1e-2, 1e-3],
            fd_mode: "analytic".into(),
            fd_step: 1e-3,
            fd_order: 4,
            tolerances: tol,
            seed: 0,
            threads: 0,
            defect: Defect::None,
            sweep_axis: SweepAxis::QuadNodes,
            sweep_levels: vec![8.0, 16.0, 32.0],
            sweep_check: None,
            mean_value_g: MeanValueG::Saddle,
            radial_nodes: 48,
            field_csv: "field.csv".into(),
            report_txt: "report.txt".into(),
            report_csv: "report.csv".into(),
            sweep_csv: "sweep.csv".into(),
            lines: HashMap::new(),
        }
    }
}

/// Recognised keys, in the order the template lists them.
pub const KEYS: &[&str] = &[
    "alpha", "beta", "zeta", "psi_a", "psi_b", "phi_radius", "phi_offset", "h_kind", "h_radius", "h_offset", "h_axes",
    "nu", "forcing", "phi_nodes", "h_nodes", "grid_kind", "grid_extent", "grid_resolution", "grid_points", "times",
    "t0_times", "fd_mode", "fd_step", "fd_order", "tol_continuity", "tol_curl", "tol_momentum", "tol_harmonicity",
    "tol_constraint", "tol_normalization", "tol_initial", "tol_t0_identical", "tol_t0_floor", "seed", "threads",
    "defect", "sweep_axis", "sweep_levels", "sweep_check", "mean_value_g", "radial_nodes", "field_csv", "report_txt",
    "report_csv", "sweep_csv",
];

fn parse_num<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("'{v}' is not valid here: {e}"))
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|s| parse_num::<f64>(s.trim())).collect()
}

fn parse_vec3(v: &str) -> Result<Vec3, String> {
    match parse_list(v)?.as_slice() {
        &[x, y, z] => Ok(Vec3::new(x, y, z)),
        other => Err(format!("expected three comma-separated numbers, got {}", other.len())),
    }
}

fn parse_finite(v: &str) -> Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{v}' is not a finite number"))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: body.to_string() });
            };
            let (k, v) = (k.trim(), v.trim());
            let Some(&key) = KEYS.iter().find(|&&known| known == k) else {
                return Err(ConfigError::UnknownKey { line, key: k.to_string() });
            };
            if let Some(&first) = cfg.lines.get(key) {
                return Err(ConfigError::Duplicate { line, key: key.to_string(), first });
            }
            cfg.lines.insert(key, line);
            cfg.set(key, v).map_err(|message| ConfigError::Value { line: Some(line), key, message })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &'static str, v: &str) -> Result<(), String> {
        let t = &mut self.tolerances;
        match key {
            "alpha" => self.alpha = parse_finite(v)?,
            "beta" => self.beta = parse_finite(v)?,
            "zeta" => self.zeta = parse_finite(v)?,
            "psi_a" => self.psi_a = parse_finite(v)?,
            "psi_b" => self.psi_b = parse_finite(v)?,
            "phi_radius" => self.phi_radius = parse_finite(v)?,
            "phi_offset" => self.phi_offset = parse_finite(v)?,
            "h_kind" => self.h_kind = v.parse()?,
            "h_radius" => self.h_radius = parse_finite(v)?,
            "h_offset" => self.h_offset = parse_vec3(v)?,
            "h_axes" => self.h_axes = parse_vec3(v)?,
            "nu" => self.nu = parse_finite(v)?,
            "forcing" => {
                v.parse::<Forcing>()?;
                self.forcing = v.to_string();
            }
            "phi_nodes" => self.phi_nodes = parse_num(v)?,
            "h_nodes" => self.h_nodes = parse_num(v)?,
            "grid_kind" => {
                self.grid_kind = match v {
                    "tensor" => GridKind::Tensor,
                    "random" => GridKind::Random,
                    _ => return Err(format!("unknown grid kind '{v}' (expected tensor or random)")),
                }
            }
            "grid_extent" => self.grid_extent = parse_finite(v)?,
            "grid_resolution" => self.grid_resolution = parse_num(v)?,
            "grid_points" => self.grid_points = parse_num(v)?,
            "times" => self.times = parse_list(v)?,
            "t0_times" => self.t0_times = parse_list(v)?,
            "fd_mode" => {
                if !matches!(v, "analytic" | "fd") {
                    return Err(format!("unknown fd mode '{v}' (expected analytic or fd)"));
                }
                self.fd_mode = v.to_string();
            }
            "fd_step" => self.fd_step = parse_finite(v)?,
            "fd_order" => self.fd_order = parse_num(v)?,
            "tol_continuity" => t.continuity = parse_finite(v)?,
            "tol_curl" => t.curl = parse_finite(v)?,
            "tol_momentum" => t.momentum = parse_finite(v)?,
            "tol_harmonicity" => t.harmonicity = parse_finite(v)?,
            "tol_constraint" => t.constraint = parse_finite(v)?,
            "tol_normalization" => t.normalization = parse_finite(v)?,
            "tol_initial" => t.initial = parse_finite(v)?,
            "tol_t0_identical" => t.t0_identical = parse_finite(v)?,
            "tol_t0_floor" => t.t0_floor = parse_finite(v)?,
            "seed" => self.seed = parse_num(v)?,
            "threads" => self.threads = parse_num(v)?,
            "defect" => self.defect = v.parse()?,
            "sweep_axis" => self.sweep_axis = v.parse()?,
            "sweep_levels" => self.sweep_levels = parse_list(v)?,
            "sweep_check" => self.sweep_check = Some(v.parse()?),
            "mean_value_g" => self.mean_value_g = v.parse()?,
            "radial_nodes" => self.radial_nodes = parse_num(v)?,
            "field_csv" => self.field_csv = v.to_string(),
            "report_txt" => self.report_txt = v.to_string(),
            "report_csv" => self.report_csv = v.to_string(),
            "sweep_csv" => self.sweep_csv = v.to_string(),
            _ => unreachable!("key list and setter out of sync: {key}"),
        }
        Ok(())
    }

    fn value_error(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        ConfigError::Value { line: self.lines.get(key).copied(), key, message: message.into() }
    }

    /// The solution spec, validated. Errors point at the key responsible.
    pub fn solution_spec(&self) -> Result<SolutionSpec, ConfigError> {
        let h = match self.h_kind {
            MollifierKind::StandardBump3d => MollifierSpec { center: self.h_offset, ..MollifierSpec::standard(self.h_radius) },
            MollifierKind::ShiftedBump3d => MollifierSpec::shifted(self.h_radius, self.h_offset),
            MollifierKind::AnisotropicBump3d => MollifierSpec { center: self.h_offset, ..MollifierSpec::anisotropic(self.h_axes) },
            MollifierKind::EvenBump1d => return Err(self.value_error("h_kind", "h must be a 3-D bump, got even-bump-1d")),
        };
        let spec = SolutionSpec {
            alpha: self.alpha,
            beta: self.beta,
            zeta: self.zeta,
            psi: PsiSpec::new(self.psi_a, self.psi_b),
            phi: MollifierSpec { center: Vec3::new(self.phi_offset, 0.0, 0.0), ..MollifierSpec::even_1d(self.phi_radius) },
            h,
            nu: self.nu,
            forcing: self.forcing.parse().map_err(|m: String| self.value_error("forcing", m))?,
            phi_nodes: self.phi_nodes,
            h_nodes: self.h_nodes,
        };
        spec.validate().map_err(|e| {
            let key = match &e {
                SolutionError::Constraint { .. } => "zeta",
                SolutionError::Parameter { name: "alpha", .. } => "alpha",
                SolutionError::Parameter { name: "beta", .. } => "beta",
                SolutionError::Parameter { name: "zeta", .. } => "zeta",
                SolutionError::Parameter { .. } => "psi_a",
                SolutionError::PhiNotEven(_) => "phi_offset",
                SolutionError::Mollifier(MollifierError::Offset { kind: MollifierKind::EvenBump1d }) => "phi_offset",
                SolutionError::Mollifier(MollifierError::Radius(_)) if self.phi_radius <= 0.0 || !self.phi_radius.is_finite() => "phi_radius",
                SolutionError::Mollifier(MollifierError::Offset { .. }) => "h_offset",
                SolutionError::Mollifier(_) => if self.h_kind == MollifierKind::AnisotropicBump3d { "h_axes" } else { "h_radius" },
                SolutionError::Viscosity(_) => "nu",
                SolutionError::Nodes { what: "phi", .. } => "phi_nodes",
                SolutionError::Nodes { .. } => "h_nodes",
                _ => "h_kind",
            };
            self.value_error(key, e.to_string())
        })?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<SampleGrid, ConfigError> {
        let grid = match self.grid_kind {
            GridKind::Tensor => SampleGrid::tensor(self.grid_extent, self.grid_resolution, self.times.clone()),
            GridKind::Random => SampleGrid::random(self.grid_extent, self.grid_points, self.times.clone(), self.seed),
        };
        grid.map_err(|e| self.value_error("grid_kind", e.to_string()))
    }

    pub fn fd_spec(&self) -> Result<FdSpec, ConfigError> {
        FdSpec::absolute(self.fd_step, self.fd_order).map_err(|e| self.value_error("fd_step", e.to_string()))
    }

    pub fn verify_options(&self) -> Result<VerifyOptions, ConfigError> {
        let mode = match self.fd_mode.as_str() {
            "fd" => ResidualMode::PureFd(self.fd_spec()?),
            _ => ResidualMode::Analytic,
        };
        let t0 = &self.t0_times;
        if t0.len() < 3 || t0.iter().any(|t| *t <= 0.0) || t0.windows(2).any(|w| w[1] >= w[0]) {
            return Err(self.value_error("t0_times", "need at least 3 positive, strictly decreasing times"));
        }
        Ok(VerifyOptions { tolerances: self.tolerances, mode, t0_times: t0.clone() })
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_vectors() {
        let cfg = RunConfig::parse("# solution\nalpha = 0.6\nbeta=0.8\n\nzeta = 1\nh_kind = shifted-bump-3d\nh_offset = 0.3, 0, 0\ntimes = 0.5, 2\n").unwrap();
        assert_eq!((cfg.alpha, cfg.beta, cfg.zeta), (0.6, 0.8, 1.0));
        assert_eq!(cfg.h_offset, Vec3::new(0.3, 0.0, 0.0));
        assert_eq!(cfg.times, vec![0.5, 2.0]);
        assert_eq!(cfg.line_of("zeta"), Some(5));
        assert_eq!(cfg.solution_spec().unwrap().h.kind, MollifierKind::ShiftedBump3d);
    }

    #[test]
    fn errors_name_the_line() {
        let e = RunConfig::parse("alpha = 1\nbogus = 2\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: unknown key 'bogus'");
        let e = RunConfig::parse("\nnu = fast\n").unwrap_err();
        assert!(e.to_string().starts_with("line 2: key 'nu': "), "{e}");
        let e = RunConfig::parse("seed = 1\nseed = 2\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: key 'seed' repeats line 1");
        assert!(matches!(RunConfig::parse("just words").unwrap_err(), ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn semantic_errors_point_at_the_key() {
        let cfg = RunConfig::parse("alpha = 3\nbeta = 4\nzeta = 6\n").unwrap();
        let e = cfg.solution_spec().unwrap_err().to_string();
        assert!(e.starts_with("line 3: key 'zeta': "), "{e}");
        assert!(e.contains("zeta^2 = alpha^2 + beta^2"));
        let cfg = RunConfig::parse("phi_offset = 0.25\n").unwrap();
        let e = cfg.solution_spec().unwrap_err().to_string();
        assert!(e.starts_with("line 1: key 'phi_offset': ") && e.contains("must be even"), "{e}");
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = RunConfig::default();
        cfg.solution_spec().unwrap();
        assert_eq!(cfg.grid().unwrap().len(), 256);
        cfg.verify_options().unwrap();
    }
}
