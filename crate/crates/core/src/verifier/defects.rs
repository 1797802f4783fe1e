//! Deliberately broken solutions. A verifier that cannot fail is not
//! evidence, so each hypothesis of the construction has a defect that
//! violates exactly that hypothesis.

use std::sync::Arc;

use crate::mollifier::make_mollifier;
use crate::solution::{assemble_solution, build_solution, HarmonicPotential, NSSolution, SolutionError, SolutionSpec, WaveNumbers};
use crate::vecfield::{Polynomial, ScalarField, SumField};

use super::Check;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Defect {
    #[default]
    None,
    /// `p + x` in place of `p`.
    CorruptPressure,
    /// `g + x^2 / 2` in place of `g`.
    NonHarmonicPotential,
    /// `zeta` scaled by 1.1 after validation.
    BrokenConstraint,
    /// `h` scaled to mass 2.
    UnnormalizedMollifier,
}

impl Defect {
    pub const ALL: [Defect; 5] = [
        Defect::None,
        Defect::CorruptPressure,
        Defect::NonHarmonicPotential,
        Defect::BrokenConstraint,
        Defect::UnnormalizedMollifier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Defect::None => "none",
            Defect::CorruptPressure => "corrupt-pressure",
            Defect::NonHarmonicPotential => "non-harmonic-g",
            Defect::BrokenConstraint => "broken-constraint",
            Defect::UnnormalizedMollifier => "unnormalized-h",
        }
    }

    /// The check that should be named as the dominant failure.
    pub fn expected_check(self) -> Option<Check> {
        match self {
            Defect::None => None,
            Defect::CorruptPressure => Some(Check::Momentum),
            Defect::NonHarmonicPotential => Some(Check::Harmonicity),
            Defect::BrokenConstraint => Some(Check::Constraint),
            Defect::UnnormalizedMollifier => Some(Check::Normalization),
        }
    }
}

impl std::str::FromStr for Defect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Defect::ALL.into_iter().find(|d| d.name() == s).ok_or_else(|| {
            let names: Vec<_> = Defect::ALL.iter().map(|d| d.name()).collect();
            format!("unknown defect '{s}' (expected one of {})", names.join(", "))
        })
    }
}

/// Builds the solution for a valid `spec`, then applies `defect`.
pub fn build_with_defect(spec: &SolutionSpec, defect: Defect) -> Result<NSSolution, SolutionError> {
    let waves = WaveNumbers { alpha: spec.alpha, beta: spec.beta, zeta: spec.zeta };
    match defect {
        Defect::None => build_solution(spec),
        Defect::CorruptPressure => {
            let mut sol = build_solution(spec)?;
            let x: Arc<dyn ScalarField> = Arc::new(Polynomial::new([(1.0, [1, 0, 0])]));
            sol.pressure = Arc::new(SumField::new(sol.pressure.clone(), x));
            Ok(sol)
        }
        Defect::NonHarmonicPotential => {
            spec.validate()?;
            let g = HarmonicPotential::new_unchecked(spec.alpha, spec.beta, spec.zeta, spec.psi, &spec.phi, spec.phi_nodes)?;
            let bent: Arc<dyn ScalarField> = Arc::new(SumField::new(Arc::new(g), Arc::new(Polynomial::new([(0.5, [2, 0, 0])]))));
            assemble_solution(spec, bent, Some(waves), make_mollifier(&spec.h, spec.h_nodes)?)
        }
        Defect::BrokenConstraint => {
            spec.validate()?;
            let zeta = spec.zeta * 1.1;
            let g = HarmonicPotential::new_unchecked(spec.alpha, spec.beta, zeta, spec.psi, &spec.phi, spec.phi_nodes)?;
            let h = make_mollifier(&spec.h, spec.h_nodes)?;
            assemble_solution(spec, Arc::new(g), Some(WaveNumbers { zeta, ..waves }), h)
        }
        Defect::UnnormalizedMollifier => {
            spec.validate()?;
            let g = HarmonicPotential::new_unchecked(spec.alpha, spec.beta, spec.zeta, spec.psi, &spec.phi, spec.phi_nodes)?;
            let h = make_mollifier(&spec.h, spec.h_nodes)?.rescaled(2.0);
            assemble_solution(spec, Arc::new(g), Some(waves), h)
        }
    }
}
