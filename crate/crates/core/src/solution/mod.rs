//! Explicit curl-free, divergence-free Navier-Stokes solutions.
//!
//! The pipeline is `g -> u0 = grad g -> (u, phi_t) -> p`:
//!
//! * `g` is a harmonic potential periodic in (x, y) ([`make_harmonic_potential`]);
//! * `u(x, t) = int u0(x - t y) h(y) dy` for a normalized bump `h`
//!   ([`convolve_in_time`]), and `phi_t` is the same convolution of `g`;
//! * `p` is the unsteady Bernoulli pressure of `phi_t` ([`recover_pressure`]).
//!
//! Since `u = grad phi_t` with `phi_t` harmonic at every `t`, the fields are
//! solenoidal and irrotational, `nu Lap u = 0`, and the Bernoulli pressure
//! closes the momentum equation exactly.

mod convolution;
mod potential;
mod pressure;

use std::str::FromStr;
use std::sync::Arc;

pub use convolution::{
    convolve_in_time, potential_of_time, ConvolutionRule, TimeConvolvedPotential, TimeConvolvedVelocity, T_ZERO,
};
pub use potential::{
    constraint_violation, make_harmonic_potential, HarmonicPotential, PsiSpec, CONSTRAINT_TOLERANCE,
};
pub use pressure::{recover_pressure, BernoulliPressure};

use crate::mollifier::{make_mollifier, Mollifier, MollifierError, MollifierKind, MollifierSpec};
use crate::quadrature::QuadratureError;
use crate::vecfield::{gradient, FieldError, Gradient, Order, Polynomial, ScalarField, Vec3, VectorField};

#[derive(Debug, thiserror::Error)]
pub enum SolutionError {
    #[error("{name} must be finite and nonzero, got {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("constraint zeta^2 = alpha^2 + beta^2 violated: alpha={alpha}, beta={beta}, zeta={zeta}")]
    Constraint { alpha: f64, beta: f64, zeta: f64 },
    #[error("phi must be the even 1-D bump (even-bump-1d), got {0}")]
    PhiNotEven(&'static str),
    #[error("h must be a 3-D bump, got {0}")]
    HNot3d(&'static str),
    #[error("viscosity must be finite and >= 0, got {0}")]
    Viscosity(f64),
    #[error("{what} needs at least 2 quadrature nodes, got {nodes}")]
    Nodes { what: &'static str, nodes: usize },
    #[error(transparent)]
    Mollifier(#[from] MollifierError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SolutionError>,
    },
}

impl SolutionError {
    /// The innermost error, past any stage annotations.
    pub fn root(&self) -> &SolutionError {
        match self {
            SolutionError::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

trait AtStage<T> {
    fn stage(self, stage: &'static str) -> Result<T, SolutionError>;
}

impl<T, E: Into<SolutionError>> AtStage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, SolutionError> {
        self.map_err(|e| SolutionError::Stage { stage, source: Box::new(e.into()) })
    }
}

/// Potential `F` of the conservative body force `f = grad F`.
#[derive(Clone, Debug, Default)]
pub enum Forcing {
    #[default]
    Zero,
    /// `F = x - y/2 + z/4`, a uniform force.
    Linear,
    /// `F = -|x|^2 / 2`, a restoring force `f = -x`.
    QuadraticPotential,
    Custom(Arc<dyn ScalarField>),
}

impl Forcing {
    pub fn name(&self) -> &'static str {
        match self {
            Forcing::Zero => "zero",
            Forcing::Linear => "linear",
            Forcing::QuadraticPotential => "quadratic-potential",
            Forcing::Custom(_) => "custom",
        }
    }

    pub fn field(&self) -> Arc<dyn ScalarField> {
        match self {
            Forcing::Zero => Arc::new(Polynomial::zero()),
            Forcing::Linear => Arc::new(Polynomial::linear(Vec3::new(1.0, -0.5, 0.25), 0.0)),
            Forcing::QuadraticPotential => {
                Arc::new(Polynomial::new([(-0.5, [2, 0, 0]), (-0.5, [0, 2, 0]), (-0.5, [0, 0, 2])]))
            }
            Forcing::Custom(f) => f.clone(),
        }
    }
}

impl FromStr for Forcing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zero" => Ok(Forcing::Zero),
            "linear" => Ok(Forcing::Linear),
            "quadratic-potential" => Ok(Forcing::QuadraticPotential),
            other => Err(format!("unknown forcing '{other}' (expected zero, linear or quadratic-potential)")),
        }
    }
}

/// Everything needed to build a solution, including quadrature settings.
#[derive(Clone, Debug)]
pub struct SolutionSpec {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
    pub psi: PsiSpec,
    pub phi: MollifierSpec,
    pub h: MollifierSpec,
    pub nu: f64,
    pub forcing: Forcing,
    /// Gauss-Legendre nodes for the 1-D inner integral of `g`.
    pub phi_nodes: usize,
    /// Gauss-Legendre nodes per axis for normalizing `h` and for the time
    /// convolution. Using one count for both keeps the discrete mass at 1.
    pub h_nodes: usize,
}

impl Default for SolutionSpec {
    fn default() -> Self {
        Self {
            alpha: 3.0,
            beta: 4.0,
            zeta: 5.0,
            psi: PsiSpec::cosh(),
            phi: MollifierSpec::even_1d(1.0),
            h: MollifierSpec::standard(1.0),
            nu: 1.0,
            forcing: Forcing::Zero,
            phi_nodes: 128,
            h_nodes: 24,
        }
    }
}

impl SolutionSpec {
    pub fn validate(&self) -> Result<(), SolutionError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("zeta", self.zeta)] {
            if !v.is_finite() || v == 0.0 {
                return Err(SolutionError::Parameter { name, value: v });
            }
        }
        if constraint_violation(self.alpha, self.beta, self.zeta) > CONSTRAINT_TOLERANCE {
            return Err(SolutionError::Constraint { alpha: self.alpha, beta: self.beta, zeta: self.zeta });
        }
        if !(self.psi.a.is_finite() && self.psi.b.is_finite()) {
            return Err(SolutionError::Parameter { name: "psi", value: f64::NAN });
        }
        if self.phi.kind != MollifierKind::EvenBump1d {
            return Err(SolutionError::PhiNotEven(self.phi.kind.name()));
        }
        self.phi.validate()?;
        if !self.h.kind.is_3d() {
            return Err(SolutionError::HNot3d(self.h.kind.name()));
        }
        self.h.validate()?;
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(SolutionError::Viscosity(self.nu));
        }
        for (what, nodes) in [("phi", self.phi_nodes), ("h", self.h_nodes)] {
            if nodes < 2 {
                return Err(SolutionError::Nodes { what, nodes });
            }
        }
        Ok(())
    }
}

/// Wave numbers actually used by a built potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveNumbers {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
}

/// A velocity/pressure pair together with the pieces it was built from.
///
/// Fields other than `velocity`, `pressure`, `forcing` and `nu` are
/// optional so hand-made fields can be fed to the verifier too.
#[derive(Clone, Debug)]
pub struct NSSolution {
    pub velocity: Arc<dyn VectorField>,
    pub pressure: Arc<dyn ScalarField>,
    pub forcing: Arc<dyn ScalarField>,
    pub nu: f64,
    /// `phi_t` with `u = grad phi_t`.
    pub potential: Option<Arc<dyn ScalarField>>,
    pub initial_velocity: Option<Arc<dyn VectorField>>,
    /// `g` with `u0 = grad g`.
    pub initial_potential: Option<Arc<dyn ScalarField>>,
    pub mollifier: Option<Mollifier>,
    pub waves: Option<WaveNumbers>,
    pub provenance: Option<SolutionSpec>,
}

impl NSSolution {
    /// A bare solution candidate, e.g. a manufactured or deliberately wrong one.
    pub fn from_fields(velocity: Arc<dyn VectorField>, pressure: Arc<dyn ScalarField>, forcing: Arc<dyn ScalarField>, nu: f64) -> Self {
        Self {
            velocity,
            pressure,
            forcing,
            nu,
            potential: None,
            initial_velocity: None,
            initial_potential: None,
            mollifier: None,
            waves: None,
            provenance: None,
        }
    }
}

/// `u0 = grad g`; `g` must offer second derivatives.
pub fn make_initial_velocity(g: Arc<dyn ScalarField>) -> Result<Gradient, FieldError> {
    g.capability().require(Order::HESS)?;
    gradient(g)
}

/// Validates `spec` and builds the full solution.
pub fn build_solution(spec: &SolutionSpec) -> Result<NSSolution, SolutionError> {
    spec.validate().stage("spec")?;
    let g = make_harmonic_potential(spec.alpha, spec.beta, spec.zeta, spec.psi, &spec.phi, spec.phi_nodes)
        .stage("harmonic potential")?;
    let h = make_mollifier(&spec.h, spec.h_nodes).stage("mollifier")?;
    let waves = WaveNumbers { alpha: spec.alpha, beta: spec.beta, zeta: spec.zeta };
    assemble_solution(spec, Arc::new(g), Some(waves), h)
}

/// Runs the `u0 -> (u, phi_t) -> p` part of the pipeline for an arbitrary
/// potential `g` and bump `h`. No harmonicity or normalization is checked,
/// which is what lets defective inputs reach the verifier.
pub fn assemble_solution(
    spec: &SolutionSpec,
    g: Arc<dyn ScalarField>,
    waves: Option<WaveNumbers>,
    h: Mollifier,
) -> Result<NSSolution, SolutionError> {
    let u0: Arc<dyn VectorField> = Arc::new(make_initial_velocity(g.clone()).stage("initial velocity")?);
    let rule = Arc::new(ConvolutionRule::new(&h, spec.h_nodes).stage("convolution")?);
    let velocity: Arc<dyn VectorField> = Arc::new(convolve_in_time(u0.clone(), rule.clone()));
    let potential: Arc<dyn ScalarField> = Arc::new(potential_of_time(g.clone(), rule));
    let forcing = spec.forcing.field();
    let pressure: Arc<dyn ScalarField> = Arc::new(recover_pressure(potential.clone(), forcing.clone()).stage("pressure")?);
    Ok(NSSolution {
        velocity,
        pressure,
        forcing,
        nu: spec.nu,
        potential: Some(potential),
        initial_velocity: Some(u0),
        initial_potential: Some(g),
        mollifier: Some(h),
        waves,
        provenance: Some(spec.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_gradient_examples() {
        let u0 = make_initial_velocity(Arc::new(Polynomial::linear(Vec3::E1, 0.0))).unwrap();
        assert_eq!(u0.value(Vec3::new(3.0, 1.0, -2.0), 0.0).unwrap(), Vec3::E1);
        let saddle = make_initial_velocity(Arc::new(Polynomial::new([(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]))).unwrap();
        assert_eq!(saddle.value(Vec3::new(0.5, 2.0, 1.0), 0.0).unwrap(), Vec3::new(1.0, -4.0, 0.0));
    }

    #[test]
    fn zero_amplitude_gives_rest_state() {
        let spec = SolutionSpec { psi: PsiSpec::new(0.0, 0.0), forcing: Forcing::QuadraticPotential, h_nodes: 8, ..Default::default() };
        let sol = build_solution(&spec).unwrap();
        let x = Vec3::new(0.3, -0.7, 0.2);
        assert_eq!(sol.velocity.value(x, 0.5).unwrap(), Vec3::ZERO);
        assert_eq!(sol.pressure.value(x, 0.5).unwrap(), sol.forcing.value(x, 0.0).unwrap());
    }

    #[test]
    fn broken_constraint_is_rejected_with_stage() {
        let spec = SolutionSpec { zeta: 5.1, ..Default::default() };
        let err = build_solution(&spec).unwrap_err();
        assert!(matches!(err.root(), SolutionError::Constraint { .. }));
        assert!(err.to_string().starts_with("spec: "));
        assert!(err.to_string().contains("zeta^2 = alpha^2 + beta^2"));
    }

    #[test]
    fn odd_phi_is_rejected() {
        let mut spec = SolutionSpec::default();
        spec.phi.center = Vec3::new(0.2, 0.0, 0.0);
        assert!(matches!(build_solution(&spec).unwrap_err().root(), SolutionError::Mollifier(MollifierError::Offset { .. })));
        spec.phi = MollifierSpec::standard(1.0);
        assert!(matches!(build_solution(&spec).unwrap_err().root(), SolutionError::PhiNotEven(_)));
    }

    #[test]
    fn forcing_names_round_trip() {
        for f in [Forcing::Zero, Forcing::Linear, Forcing::QuadraticPotential] {
            assert_eq!(f.name().parse::<Forcing>().unwrap().name(), f.name());
        }
        assert!("cubic".parse::<Forcing>().is_err());
    }
}
