//! Exact smooth solutions of the incompressible Navier-Stokes equations in
//! three dimensions, built from curl-free and divergence-free initial data
//! by a mollified convolution in time, together with the tooling to verify
//! them numerically.
//!
//! The pieces, bottom-up:
//!
//! * [`vecfield`]: points, fields with derivative jets, grad/div/curl/Laplacian.
//! * [`quadrature`]: Gauss-Legendre rules and the radial exponential rule.
//! * [`mollifier`]: compactly supported bump weights and the radial density.
//! * [`solution`]: harmonic potentials, the convolved velocity, Bernoulli pressure.
//! * [`verifier`]: residual checks, t -> 0 fits, mean-value checks, sweeps.
//! * [`cli`]: configuration, CSV export and the `generate`/`verify`/`sweep` commands.

pub mod cli;
pub mod mollifier;
pub mod quadrature;
pub mod solution;
pub mod vecfield;
pub mod verifier;

pub use vecfield::Vec3;
