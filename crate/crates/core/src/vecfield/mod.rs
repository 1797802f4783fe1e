//! Ambient geometry and differential vector calculus on space-time fields.

mod fd;
mod fields;
mod jet;
mod ops;
mod vec3;

pub use fd::{fd_derivative, fd_jet, Dir, FdScalarField, FdSpec, FdSpecError, FdValue, StepScaling};
pub use fields::{common_capability, Components, Monomial, Polynomial, SumField};
pub use jet::{
    jet_dt, jet_jacobian, jet_laplacian, jet_value, Capability, DerivativeMode, FieldError, Jet, Mat3, Order,
    ScalarField, Tensor3, VectorField, VectorJet,
};
pub use ops::{
    advective_term, curl, divergence, gradient, lamb_identity_gap, laplacian, scalar_laplacian, Advective, Curl,
    Divergence, Gradient, Laplacian, ScalarLaplacian,
};
pub use vec3::Vec3;
