//! Smooth compactly supported weights and the exponential radial density.
//!
//! Every bump is built on the profile `b(q) = exp(-1 / (1 - q))` for
//! `q < 1` and `0` otherwise, where `q` is a squared scaled distance. The
//! profile is C-infinity, so every derivative vanishes at the support
//! boundary.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::quadrature::{integrate_1d, integrate_3d_box, QuadratureError, QuadratureSpec};
use crate::vecfield::{Capability, FieldError, Jet, Order, ScalarField, Vec3};

/// Node count per axis used to normalize 3-D bumps unless told otherwise.
pub const DEFAULT_NORMALIZATION_NODES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MollifierKind {
    /// Radial bump centered at the origin.
    StandardBump3d,
    /// Radial bump centered at a nonzero offset; not even.
    ShiftedBump3d,
    /// Ellipsoidal bump centered at the origin; even but not radial.
    AnisotropicBump3d,
    /// Even bump on the real line.
    EvenBump1d,
}

impl MollifierKind {
    pub fn is_3d(self) -> bool {
        !matches!(self, MollifierKind::EvenBump1d)
    }

    pub fn name(self) -> &'static str {
        match self {
            MollifierKind::StandardBump3d => "standard-bump-3d",
            MollifierKind::ShiftedBump3d => "shifted-bump-3d",
            MollifierKind::AnisotropicBump3d => "anisotropic-bump-3d",
            MollifierKind::EvenBump1d => "even-bump-1d",
        }
    }
}

impl std::str::FromStr for MollifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            MollifierKind::StandardBump3d,
            MollifierKind::ShiftedBump3d,
            MollifierKind::AnisotropicBump3d,
            MollifierKind::EvenBump1d,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown mollifier kind '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierSpec {
    pub kind: MollifierKind,
    /// Support radius (isotropic kinds).
    pub radius: f64,
    /// Center of the support; zero for the even kinds. Only `x` is used in 1-D.
    pub center: Vec3,
    /// Semi-axes of the support (anisotropic kind only).
    pub axes: Vec3,
}

impl MollifierSpec {
    pub fn standard(radius: f64) -> Self {
        Self { kind: MollifierKind::StandardBump3d, radius, center: Vec3::ZERO, axes: Vec3::splat(radius) }
    }

    pub fn shifted(radius: f64, center: Vec3) -> Self {
        Self { kind: MollifierKind::ShiftedBump3d, radius, center, axes: Vec3::splat(radius) }
    }

    pub fn anisotropic(axes: Vec3) -> Self {
        let radius = axes.x.max(axes.y).max(axes.z);
        Self { kind: MollifierKind::AnisotropicBump3d, radius, center: Vec3::ZERO, axes }
    }

    pub fn even_1d(radius: f64) -> Self {
        Self { kind: MollifierKind::EvenBump1d, radius, center: Vec3::ZERO, axes: Vec3::splat(radius) }
    }

    /// Semi-axes actually used for the profile.
    pub fn semi_axes(&self) -> Vec3 {
        match self.kind {
            MollifierKind::AnisotropicBump3d => self.axes,
            _ => Vec3::splat(self.radius),
        }
    }

    pub fn validate(&self) -> Result<(), MollifierError> {
        let a = self.semi_axes();
        if !(a.is_finite() && a.x > 0.0 && a.y > 0.0 && a.z > 0.0) {
            return Err(MollifierError::Radius(self.radius));
        }
        if !self.center.is_finite() {
            return Err(MollifierError::Offset { kind: self.kind });
        }
        let centered = self.center == Vec3::ZERO;
        match self.kind {
            MollifierKind::ShiftedBump3d => Ok(()),
            _ if centered => Ok(()),
            kind => Err(MollifierError::Offset { kind }),
        }
    }

    /// Axis-aligned box containing the support.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let a = self.semi_axes();
        (self.center - a, self.center + a)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum MollifierError {
    #[error("support radius must be finite and positive, got {0}")]
    Radius(f64),
    #[error("{} must be even: its center offset has to be zero", kind.name())]
    Offset { kind: MollifierKind },
    #[error("mollifier normalization failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("bump integral {0} is not positive")]
    Normalization(f64),
}

/// `b(q)` and its first three q-derivatives.
fn profile(q: f64) -> [f64; 4] {
    if q >= 1.0 {
        return [0.0; 4];
    }
    let w = 1.0 / (1.0 - q);
    let b = (-w).exp();
    if b == 0.0 {
        return [0.0; 4];
    }
    let w2 = w * w;
    let w3 = w2 * w;
    let w4 = w2 * w2;
    [
        b,
        -b * w2,
        b * (w4 - 2.0 * w3),
        b * (-w4 * w2 + 6.0 * w4 * w - 6.0 * w4),
    ]
}

/// A normalized bump, evaluable as a time-independent field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mollifier {
    spec: MollifierSpec,
    /// Integral of the unnormalized profile.
    integral: f64,
    nodes: usize,
    scale: f64,
}

/// Builds and normalizes a bump. The profile integral is computed with
/// `nodes` Gauss-Legendre nodes per axis over the support's bounding box.
pub fn make_mollifier(spec: &MollifierSpec, nodes: usize) -> Result<Mollifier, MollifierError> {
    spec.validate()?;
    let (lo, hi) = spec.bounding_box();
    let mut m = Mollifier { spec: *spec, integral: 1.0, nodes, scale: 1.0 };
    let integral = if spec.kind.is_3d() {
        integrate_3d_box(|y| m.raw_profile_3d(y)[0], &QuadratureSpec::cube(nodes, lo, hi))?
    } else {
        integrate_1d(|s| m.raw_profile_1d(s)[0], &QuadratureSpec::interval(nodes, lo.x, hi.x))?
    };
    // Negated so NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(integral > 0.0) {
        return Err(MollifierError::Normalization(integral));
    }
    m.integral = integral;
    Ok(m)
}

impl Mollifier {
    pub fn spec(&self) -> &MollifierSpec {
        &self.spec
    }

    pub fn kind(&self) -> MollifierKind {
        self.spec.kind
    }

    /// Integral of the unnormalized profile, as stored at construction.
    pub fn normalization(&self) -> f64 {
        self.integral
    }

    /// Node count per axis the normalization was computed with.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Same bump multiplied by `factor`; `factor != 1` breaks unit mass.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self { scale: self.scale * factor, ..self.clone() }
    }

    fn amplitude(&self) -> f64 {
        self.scale / self.integral
    }

    fn raw_profile_1d(&self, s: f64) -> [f64; 4] {
        let rho = self.spec.radius;
        let u = (s - self.spec.center.x) / rho;
        let [b0, b1, b2, b3] = profile(u * u);
        let dq = 2.0 * u / rho;
        let d2q = 2.0 / (rho * rho);
        [b0, b1 * dq, b2 * dq * dq + b1 * d2q, b3 * dq * dq * dq + 3.0 * b2 * dq * d2q]
    }

    /// 1-D bump derivative of order `k` (0..=3) at `s`.
    pub fn derivative_1d(&self, s: f64, k: usize) -> f64 {
        self.raw_profile_1d(s)[k] * self.amplitude()
    }

    /// Profile value, gradient and Hessian in 3-D (unnormalized).
    fn raw_profile_3d(&self, y: Vec3) -> [f64; 4] {
        let a = self.spec.semi_axes();
        let d = y - self.spec.center;
        let q = (d.x / a.x).powi(2) + (d.y / a.y).powi(2) + (d.z / a.z).powi(2);
        profile(q)
    }

    fn jet_3d(&self, y: Vec3, order: Order) -> Jet {
        let a = self.spec.semi_axes();
        let d = y - self.spec.center;
        let q = (d.x / a.x).powi(2) + (d.y / a.y).powi(2) + (d.z / a.z).powi(2);
        let [b0, b1, b2, _] = profile(q);
        let s = self.amplitude();
        let mut j = Jet::constant(b0 * s);
        if order.space >= 1 {
            let dq = Vec3::new(2.0 * d.x / (a.x * a.x), 2.0 * d.y / (a.y * a.y), 2.0 * d.z / (a.z * a.z));
            j.grad = dq * (b1 * s);
            if order.space >= 2 {
                for i in 0..3 {
                    for k in 0..3 {
                        j.hess[i][k] = b2 * dq[i] * dq[k] * s;
                    }
                    j.hess[i][i] += b1 * 2.0 / (a[i] * a[i]) * s;
                }
            }
        }
        j
    }

    /// Normalized value at a point; 1-D bumps read the `x` coordinate.
    pub fn eval(&self, y: Vec3) -> f64 {
        if self.spec.kind.is_3d() {
            self.raw_profile_3d(y)[0] * self.amplitude()
        } else {
            self.derivative_1d(y.x, 0)
        }
    }

    /// Re-integrates the normalized bump with `nodes` per axis.
    pub fn mass(&self, nodes: usize) -> Result<f64, QuadratureError> {
        let (lo, hi) = self.spec.bounding_box();
        if self.spec.kind.is_3d() {
            integrate_3d_box(|y| self.eval(y), &QuadratureSpec::cube(nodes, lo, hi))
        } else {
            integrate_1d(|s| self.derivative_1d(s, 0), &QuadratureSpec::interval(nodes, lo.x, hi.x))
        }
    }

    /// First moment `int y h(y) dy` (3-D kinds).
    pub fn first_moment(&self, nodes: usize) -> Result<Vec3, QuadratureError> {
        let (lo, hi) = self.spec.bounding_box();
        let spec = QuadratureSpec::cube(nodes, lo, hi);
        Ok(Vec3::new(
            integrate_3d_box(|y| y.x * self.eval(y), &spec)?,
            integrate_3d_box(|y| y.y * self.eval(y), &spec)?,
            integrate_3d_box(|y| y.z * self.eval(y), &spec)?,
        ))
    }
}

impl ScalarField for Mollifier {
    fn capability(&self) -> Capability {
        if self.spec.kind.is_3d() {
            Capability::steady(2)
        } else {
            Capability::steady(3)
        }
    }

    fn eval_jet(&self, x: Vec3, _t: f64, order: Order) -> Result<Jet, FieldError> {
        if self.spec.kind.is_3d() {
            return Ok(self.jet_3d(x, order));
        }
        let p = self.raw_profile_1d(x.x);
        let s = self.amplitude();
        let mut j = Jet::constant(p[0] * s);
        j.grad.x = p[1] * s;
        j.hess[0][0] = p[2] * s;
        j.third[0][0][0] = p[3] * s;
        Ok(j)
    }
}

/// `c_n = pi^((n+1)/2) / Gamma((n+1)/2)`, the amplitude making
/// `c_n exp(-2 pi |x|)` a probability density on R^n.
pub fn exp_density_amplitude(n: u32) -> f64 {
    let h = 0.5 * (n as f64 + 1.0);
    PI.powf(h) / gamma(h)
}

/// The radial density `c3 exp(-2 pi |x|)` on R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialDensity {
    pub amplitude: f64,
    pub rate: f64,
}

pub fn make_radial_density() -> RadialDensity {
    RadialDensity { amplitude: exp_density_amplitude(3), rate: 2.0 * PI }
}

impl RadialDensity {
    pub fn value(&self, r: f64) -> f64 {
        self.amplitude * (-self.rate * r).exp()
    }

    pub fn value_at(&self, x: Vec3) -> f64 {
        self.value(x.norm())
    }

    /// Closed-form mass outside the ball of radius `r`:
    /// `4 pi c int_r^inf s^2 exp(-a s) ds`.
    pub fn tail_mass(&self, r: f64) -> f64 {
        let a = self.rate;
        4.0 * PI * self.amplitude * (-a * r).exp() * (r * r / a + 2.0 * r / (a * a) + 2.0 / (a * a * a))
    }

    pub fn total_mass(&self) -> f64 {
        self.tail_mass(0.0)
    }

    pub fn mass_within(&self, r: f64) -> f64 {
        self.total_mass() - self.tail_mass(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference derivatives of exp(-1/(1-s^2)) from symbolic differentiation.
    const AT_03: [f64; 4] = [0.33323707715622380374, -0.24144698260322941944, -0.94827444723250390272, -1.4989783639714991051];
    const AT_07: [f64; 4] = [0.14074798704123069240, -0.75758239853026900947, -1.1638149990054168284, 10.611571952349461259];
    // exp(-1/(1-(s/2)^2)) at s = -1.3
    const R2_AT_M13: [f64; 4] = [0.17700067522205192651, 0.34497236227007365599, -0.36957719116129273169, -0.36748184150515199621];

    #[test]
    fn one_dimensional_derivatives_match_symbolic() {
        let m = make_mollifier(&MollifierSpec::even_1d(1.0), 64).unwrap();
        let z = m.normalization();
        for (s, want) in [(0.3, AT_03), (0.7, AT_07)] {
            for k in 0..4 {
                let got = m.derivative_1d(s, k) * z;
                assert!((got - want[k]).abs() < 1e-13 * want[k].abs().max(1.0), "s={s} k={k}: {got} vs {}", want[k]);
            }
        }
        let m2 = make_mollifier(&MollifierSpec::even_1d(2.0), 64).unwrap();
        for k in 0..4 {
            let got = m2.derivative_1d(-1.3, k) * m2.normalization();
            assert!((got - R2_AT_M13[k]).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn anisotropic_shifted_jet_matches_symbolic() {
        // exp(-1/(1-((x-0.3)^2 + y^2/0.49 + z^2/0.25))) at (0.5, 0.2, -0.2); the
        // anisotropic kind is centered, so shift the point instead.
        let m = make_mollifier(&MollifierSpec::anisotropic(Vec3::new(1.0, 0.7, 0.5)), 8).unwrap();
        let z = m.normalization();
        let j = m.jet(Vec3::new(0.2, 0.2, -0.2), 0.0, Order::HESS).unwrap().scaled(z);
        assert!((j.value - 0.24856635311369630188).abs() < 1e-14);
        let g = [-0.19266781179816142201, -0.39319961591461514695, 0.77067124719264568803];
        let h = [
            [-1.0285609945059001069, -0.13310599084712856505, 0.26088774206037198750],
            [-0.13310599084712856505, -2.2376429588529299491, 0.53242396338851426019],
            [0.26088774206037198750, 0.53242396338851426019, -4.8969072042047163901],
        ];
        for i in 0..3 {
            assert!((j.grad[i] - g[i]).abs() < 1e-13);
            for k in 0..3 {
                assert!((j.hess[i][k] - h[i][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compact_support_is_exact() {
        let m = make_mollifier(&MollifierSpec::standard(1.0), 24).unwrap();
        for p in [Vec3::E1, Vec3::new(0.6, 0.8, 0.0), Vec3::new(2.0, -3.0, 0.1), Vec3::new(0.0, 0.0, -1.0)] {
            assert_eq!(m.eval(p), 0.0);
            let j = m.jet(p, 0.0, Order::HESS).unwrap();
            assert_eq!(j.grad, Vec3::ZERO);
        }
        assert!(m.eval(Vec3::ZERO) > 0.0);
        let phi = make_mollifier(&MollifierSpec::even_1d(0.5), 32).unwrap();
        assert_eq!(phi.derivative_1d(0.5, 0), 0.0);
        assert_eq!(phi.derivative_1d(-0.7, 2), 0.0);
    }

    #[test]
    fn boundary_limits_vanish() {
        let m = make_mollifier(&MollifierSpec::standard(1.0), 24).unwrap();
        let p = Vec3::new(0.0, 0.0, 1.0 - 1e-3);
        let j = m.jet(p, 0.0, Order::HESS).unwrap();
        assert!(j.value.abs() <= 1e-10);
        assert!(j.grad.max_abs() <= 1e-10);
        assert!(j.hess.iter().flatten().all(|v| v.abs() <= 1e-10));
        let phi = make_mollifier(&MollifierSpec::even_1d(1.0), 64).unwrap();
        for k in 0..4 {
            assert!(phi.derivative_1d(-1.0 + 1e-3, k).abs() <= 1e-10);
        }
    }

    #[test]
    fn normalization_round_trips() {
        for spec in [
            MollifierSpec::standard(1.0),
            MollifierSpec::standard(0.4),
            MollifierSpec::shifted(1.0, Vec3::new(0.3, 0.0, 0.0)),
            MollifierSpec::anisotropic(Vec3::new(1.0, 0.6, 0.35)),
        ] {
            let m = make_mollifier(&spec, 24).unwrap();
            assert!((m.mass(24).unwrap() - 1.0).abs() < 1e-10, "{spec:?}");
        }
        let phi = make_mollifier(&MollifierSpec::even_1d(1.0), 64).unwrap();
        assert!((phi.mass(64).unwrap() - 1.0).abs() < 1e-12);
        let raw = integrate_1d(|s| phi.derivative_1d(s, 0) * phi.normalization(), &QuadratureSpec::interval(64, -1.0, 1.0)).unwrap();
        assert!((raw - phi.normalization()).abs() < 1e-12);
    }

    #[test]
    fn shifted_bump_has_nonzero_first_moment() {
        let m = make_mollifier(&MollifierSpec::shifted(1.0, Vec3::new(0.3, 0.0, 0.0)), 24).unwrap();
        assert!((m.mass(24).unwrap() - 1.0).abs() < 1e-10);
        let mom = m.first_moment(24).unwrap();
        assert!((mom.x - 0.3).abs() < 1e-10, "{mom}");
        assert!(mom.y.abs() < 1e-14 && mom.z.abs() < 1e-14);
        let even = make_mollifier(&MollifierSpec::standard(1.0), 24).unwrap();
        assert!(even.first_moment(24).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn evenness_is_exact() {
        let phi = make_mollifier(&MollifierSpec::even_1d(0.8), 64).unwrap();
        for i in 0..200 {
            let s = -1.0 + 0.01 * i as f64;
            assert_eq!(phi.derivative_1d(s, 0), phi.derivative_1d(-s, 0));
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(matches!(make_mollifier(&MollifierSpec::standard(0.0), 24), Err(MollifierError::Radius(_))));
        assert!(matches!(make_mollifier(&MollifierSpec::even_1d(-1.0), 24), Err(MollifierError::Radius(_))));
        let mut odd = MollifierSpec::even_1d(1.0);
        odd.center = Vec3::new(0.2, 0.0, 0.0);
        let err = make_mollifier(&odd, 24).unwrap_err();
        assert!(err.to_string().contains("must be even"));
        assert!(make_mollifier(&MollifierSpec::standard(1.0), 1).is_err());
    }

    #[test]
    fn fd_derivatives_agree_with_analytic() {
        use crate::vecfield::{fd_jet, FdSpec};
        let m = make_mollifier(&MollifierSpec::shifted(0.9, Vec3::new(0.1, -0.2, 0.05)), 24).unwrap();
        let spec = FdSpec::absolute(1e-3, 4).unwrap();
        let p = Vec3::new(0.3, 0.1, -0.25);
        let f = |y: Vec3, _t: f64| -> Result<f64, FieldError> { Ok(m.eval(y)) };
        let fd = fd_jet(&f, p, 0.0, Order::HESS, &spec).unwrap();
        let an = m.jet(p, 0.0, Order::HESS).unwrap();
        assert!((fd.grad - an.grad).max_abs() < 1e-8);
        for i in 0..3 {
            for k in 0..3 {
                assert!((fd.hess[i][k] - an.hess[i][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn radial_density_values() {
        let d = make_radial_density();
        assert!((d.amplitude - PI * PI).abs() < 1e-12);
        assert!((d.value(0.0) - 9.869604401089358).abs() < 1e-12);
        assert!((d.value(1.0) - PI * PI * (-2.0 * PI).exp()).abs() < 1e-15);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let a = 12.0 * PI;
        let tail = (-a).exp() * (1.0 + a + 72.0 * PI * PI);
        assert!((d.tail_mass(6.0) - tail).abs() < 1e-25);
        assert!((d.mass_within(6.0) - 1.0).abs() < 1e-10);
    }
}
