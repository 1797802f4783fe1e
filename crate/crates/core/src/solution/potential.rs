//! The periodic harmonic potential
//! `g(x, y, z) = I(z) cos(alpha x + beta y)` with
//! `I(z) = int phi(z - r) Psi(zeta r) dr`, `Psi'' = Psi` and
//! `zeta^2 = alpha^2 + beta^2`.

use crate::mollifier::{make_mollifier, Mollifier, MollifierKind, MollifierSpec};
use crate::quadrature::{integrate_1d, QuadratureSpec};
use crate::vecfield::{Capability, FieldError, Jet, Order, ScalarField, Vec3};

use super::SolutionError;

/// `Psi(s) = a e^s + b e^-s`, the general solution of `Psi'' = Psi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiSpec {
    pub a: f64,
    pub b: f64,
}

impl PsiSpec {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub const fn cosh() -> Self {
        Self::new(0.5, 0.5)
    }

    pub const fn sinh() -> Self {
        Self::new(0.5, -0.5)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.a * s.exp() + self.b * (-s).exp()
    }

    /// k-th derivative.
    pub fn derivative(&self, s: f64, k: u32) -> f64 {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.a * s.exp() + sign * self.b * (-s).exp()
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

/// Relative tolerance on `zeta^2 = alpha^2 + beta^2`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

/// Relative violation `|zeta^2 - alpha^2 - beta^2| / zeta^2`.
pub fn constraint_violation(alpha: f64, beta: f64, zeta: f64) -> f64 {
    (zeta * zeta - alpha * alpha - beta * beta).abs() / (zeta * zeta)
}

/// Periodic-in-(x, y) harmonic potential.
///
/// The inner integral is evaluated with Gauss-Legendre nodes over the
/// support of `phi`. Writing `s = z - r`,
/// `I(z) = a e^{zeta z} M+_0 + b e^{-zeta z} M-_0` with moments
/// `M+-_k = int phi^(k)(s) e^{-+zeta s} ds`, so one set of quadrature sums
/// serves every `z`. The first z-derivative is taken on `phi` under the
/// integral; higher ones fall on `Psi`.
#[derive(Clone, Debug)]
pub struct HarmonicPotential {
    alpha: f64,
    beta: f64,
    zeta: f64,
    psi: PsiSpec,
    phi: Mollifier,
    nodes: usize,
    /// `[M+_0, M+_1]`
    plus: [f64; 2],
    /// `[M-_0, M-_1]`
    minus: [f64; 2],
}

/// Builds the potential after checking `zeta^2 = alpha^2 + beta^2` and that
/// `phi` is the even 1-D bump. `nodes` is the 1-D Gauss-Legendre node
/// count used both for normalizing `phi` and for the inner integral.
pub fn make_harmonic_potential(
    alpha: f64,
    beta: f64,
    zeta: f64,
    psi: PsiSpec,
    phi: &MollifierSpec,
    nodes: usize,
) -> Result<HarmonicPotential, SolutionError> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("zeta", zeta)] {
        if !v.is_finite() || v == 0.0 {
            return Err(SolutionError::Parameter { name, value: v });
        }
    }
    if constraint_violation(alpha, beta, zeta) > CONSTRAINT_TOLERANCE {
        return Err(SolutionError::Constraint { alpha, beta, zeta });
    }
    HarmonicPotential::new_unchecked(alpha, beta, zeta, psi, phi, nodes)
}

impl HarmonicPotential {
    /// Same as [`make_harmonic_potential`] but without the
    /// `zeta^2 = alpha^2 + beta^2` check, so a broken constraint can be
    /// fed to the verifier on purpose.
    pub fn new_unchecked(
        alpha: f64,
        beta: f64,
        zeta: f64,
        psi: PsiSpec,
        phi: &MollifierSpec,
        nodes: usize,
    ) -> Result<Self, SolutionError> {
        if phi.kind != MollifierKind::EvenBump1d {
            return Err(SolutionError::PhiNotEven(phi.kind.name()));
        }
        if !(psi.a.is_finite() && psi.b.is_finite()) {
            return Err(SolutionError::Parameter { name: "psi", value: f64::NAN });
        }
        let phi = make_mollifier(phi, nodes)?;
        let rho = phi.spec().radius;
        let spec = QuadratureSpec::interval(nodes, -rho, rho);
        let moment = |k: usize, sign: f64| integrate_1d(|s| phi.derivative_1d(s, k) * (sign * zeta * s).exp(), &spec);
        let plus = [moment(0, -1.0)?, moment(1, -1.0)?];
        let minus = [moment(0, 1.0)?, moment(1, 1.0)?];
        Ok(Self { alpha, beta, zeta, psi, phi, nodes, plus, minus })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn psi(&self) -> PsiSpec {
        self.psi
    }

    pub fn phi(&self) -> &Mollifier {
        &self.phi
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// k-th derivative of the inner integral `I` at `z` (k <= 3).
    pub fn inner(&self, z: f64, k: u32) -> f64 {
        let ep = self.psi.a * (self.zeta * z).exp();
        let em = self.psi.b * (-self.zeta * z).exp();
        if k == 0 {
            return ep * self.plus[0] + em * self.minus[0];
        }
        let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.zeta.powi(k as i32 - 1) * (ep * self.plus[1] + sign * em * self.minus[1])
    }

    /// Phase `alpha x + beta y` of the cosine factor.
    pub fn phase(&self, x: Vec3) -> f64 {
        self.alpha * x.x + self.beta * x.y
    }

    /// Bound `||phi||_1 max_{|r - z| <= rho} |Psi(zeta r)|` on `|g|` at height `z`.
    pub fn growth_envelope(&self, z: f64) -> f64 {
        let rho = self.phi.spec().radius;
        // |a e^u + b e^-u| attains its maximum over an interval at an endpoint.
        let ends = [self.zeta * (z - rho), self.zeta * (z + rho)];
        ends.iter().map(|&u| self.psi.eval(u).abs()).fold(0.0, f64::max) * self.phi.scale_l1()
    }
}

impl Mollifier {
    /// L1 norm of a nonnegative bump.
    fn scale_l1(&self) -> f64 {
        self.mass(self.nodes()).unwrap_or(1.0).abs()
    }
}

fn trig(theta_cos: f64, theta_sin: f64, n: u32) -> f64 {
    match n % 4 {
        0 => theta_cos,
        1 => -theta_sin,
        2 => -theta_cos,
        _ => theta_sin,
    }
}

impl ScalarField for HarmonicPotential {
    fn capability(&self) -> Capability {
        Capability::steady(3)
    }

    fn eval_jet(&self, x: Vec3, _t: f64, order: Order) -> Result<Jet, FieldError> {
        let theta = self.phase(x);
        let (s, c) = theta.sin_cos();
        let inner: [f64; 4] = std::array::from_fn(|k| if k as u8 <= order.space { self.inner(x.z, k as u32) } else { 0.0 });
        let partial = |idx: [u32; 3]| {
            self.alpha.powi(idx[0] as i32) * self.beta.powi(idx[1] as i32) * trig(c, s, idx[0] + idx[1]) * inner[idx[2] as usize]
        };
        let counts = |axes: &[usize]| {
            let mut idx = [0u32; 3];
            for &a in axes {
                idx[a] += 1;
            }
            idx
        };
        let mut j = Jet::constant(partial([0, 0, 0]));
        if order.space >= 1 {
            for i in 0..3 {
                j.grad[i] = partial(counts(&[i]));
            }
        }
        if order.space >= 2 {
            for i in 0..3 {
                for k in 0..3 {
                    j.hess[i][k] = partial(counts(&[i, k]));
                }
            }
        }
        if order.space >= 3 {
            for i in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        j.third[i][k][l] = partial(counts(&[i, k, l]));
                    }
                }
            }
        }
        Ok(j)
    }
}
