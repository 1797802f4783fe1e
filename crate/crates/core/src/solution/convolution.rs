//! Mollified time convolution `u(x, t) = int u0(x - t y) h(y) dy` and its
//! scalar counterpart for the potential.
//!
//! Derivatives are taken under the integral: space derivatives land on the
//! integrand, and `d/dt` gives `int (-y . grad) u0(x - t y) h(y) dy`.

use std::sync::Arc;

use crate::mollifier::Mollifier;
use crate::quadrature::{box_rule, QuadratureError, QuadratureSpec};
use crate::vecfield::{Capability, FieldError, Jet, Order, ScalarField, Vec3, VectorField, VectorJet};

/// Below this `|t|` the convolution is replaced by direct substitution.
pub const T_ZERO: f64 = 1e-12;

/// Tensor Gauss-Legendre rule for `int f(y) h(y) dy` with the weights
/// `w_k h(y_k)` folded together. Nodes where `h` vanishes are dropped.
#[derive(Clone, Debug)]
pub struct ConvolutionRule {
    points: Vec<(Vec3, f64)>,
    mass: f64,
    first_moment: Vec3,
}

impl ConvolutionRule {
    pub fn new(h: &Mollifier, nodes: usize) -> Result<Self, QuadratureError> {
        let (lo, hi) = h.spec().bounding_box();
        let points: Vec<_> = box_rule(&QuadratureSpec::cube(nodes, lo, hi))?
            .into_iter()
            .filter_map(|(y, w)| {
                let v = h.eval(y);
                (v > 0.0).then_some((y, w * v))
            })
            .collect();
        let mass = points.iter().map(|p| p.1).sum();
        let first_moment = points.iter().fold(Vec3::ZERO, |acc, &(y, w)| acc + y * w);
        Ok(Self { points, mass, first_moment })
    }

    pub fn points(&self) -> &[(Vec3, f64)] {
        &self.points
    }

    /// Discrete `int h`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Discrete `int y h(y) dy`.
    pub fn first_moment(&self) -> Vec3 {
        self.first_moment
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Capability of a convolution whose integrand offers `c`.
fn convolved_capability(c: Capability) -> Capability {
    Capability { space: c.space, time: c.space >= 1, mixed: u8::from(c.space >= 2) }
}

/// Integrand order needed to produce `order` after convolution.
fn integrand_order(order: Order) -> Order {
    let need = if order.time { 1 + u8::from(order.space >= 1) } else { 0 };
    Order::space(order.space.max(need))
}

/// `y . v` in a fixed summation order.
fn along(y: Vec3, v: [f64; 3]) -> f64 {
    y.x * v[0] + y.y * v[1] + y.z * v[2]
}

/// Adds `w` times the convolved contribution of the integrand jet `src`
/// at offset `y`. Time derivatives follow from the chain rule.
fn accumulate(acc: &mut Jet, src: &Jet, w: f64, y: Vec3, order: Order) {
    acc.value += w * src.value;
    if order.space >= 1 {
        for i in 0..3 {
            acc.grad[i] += w * src.grad[i];
        }
    }
    if order.space >= 2 {
        for i in 0..3 {
            for k in 0..3 {
                acc.hess[i][k] += w * src.hess[i][k];
            }
        }
    }
    if order.space >= 3 {
        for i in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    acc.third[i][k][l] += w * src.third[i][k][l];
                }
            }
        }
    }
    if order.time {
        acc.dt += w * -along(y, [src.grad.x, src.grad.y, src.grad.z]);
        if order.space >= 1 {
            for j in 0..3 {
                acc.dt_grad[j] += w * -along(y, [src.hess[0][j], src.hess[1][j], src.hess[2][j]]);
            }
        }
    }
}

/// Convolves the jets produced by `at`, which evaluates the integrand at a
/// spatial point. At `|t| < T_ZERO` the integrand is read at `x` directly
/// and time derivatives use the rule's first moment.
fn convolve<const N: usize>(
    rule: &ConvolutionRule,
    x: Vec3,
    t: f64,
    order: Order,
    at: impl Fn(Vec3) -> Result<[Jet; N], FieldError>,
) -> Result<[Jet; N], FieldError> {
    let mut out = [Jet::default(); N];
    if t.abs() < T_ZERO {
        let src = at(x)?;
        for (o, s) in out.iter_mut().zip(&src) {
            // Integrand weight at t = 0 is the whole mass of h.
            accumulate(o, s, rule.mass(), rule.first_moment() / rule.mass(), order);
        }
        return Ok(out);
    }
    for &(y, w) in rule.points() {
        let src = at(x - y * t)?;
        for (o, s) in out.iter_mut().zip(&src) {
            accumulate(o, s, w, y, order);
        }
    }
    Ok(out)
}

/// `u(x, t) = int u0(x - t y) h(y) dy` for a time-independent `u0`.
#[derive(Clone, Debug)]
pub struct TimeConvolvedVelocity {
    u0: Arc<dyn VectorField>,
    rule: Arc<ConvolutionRule>,
}

/// Wraps `u0` in the time convolution defined by `rule`.
pub fn convolve_in_time(u0: Arc<dyn VectorField>, rule: Arc<ConvolutionRule>) -> TimeConvolvedVelocity {
    TimeConvolvedVelocity { u0, rule }
}

impl TimeConvolvedVelocity {
    pub fn rule(&self) -> &ConvolutionRule {
        &self.rule
    }
}

impl VectorField for TimeConvolvedVelocity {
    fn capability(&self) -> Capability {
        convolved_capability(self.u0.capability())
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        let inner = integrand_order(order);
        convolve(&self.rule, x, t, order, |p| self.u0.jets(p, 0.0, inner))
    }
}

/// `phi_t(x) = int g(x - t y) h(y) dy`, the potential of the convolved
/// velocity.
#[derive(Clone, Debug)]
pub struct TimeConvolvedPotential {
    g: Arc<dyn ScalarField>,
    rule: Arc<ConvolutionRule>,
}

pub fn potential_of_time(g: Arc<dyn ScalarField>, rule: Arc<ConvolutionRule>) -> TimeConvolvedPotential {
    TimeConvolvedPotential { g, rule }
}

impl ScalarField for TimeConvolvedPotential {
    fn capability(&self) -> Capability {
        convolved_capability(self.g.capability())
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        let inner = integrand_order(order);
        let [j] = convolve(&self.rule, x, t, order, |p| Ok([self.g.jet(p, 0.0, inner)?]))?;
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollifier::{make_mollifier, MollifierSpec};
    use crate::vecfield::{gradient, Components, Polynomial};
    use rand::{Rng, SeedableRng};

    fn rule(spec: MollifierSpec, nodes: usize) -> Arc<ConvolutionRule> {
        Arc::new(ConvolutionRule::new(&make_mollifier(&spec, nodes).unwrap(), nodes).unwrap())
    }

    #[test]
    fn rule_has_unit_mass_at_matching_nodes() {
        let r = rule(MollifierSpec::standard(1.0), 16);
        assert!((r.mass() - 1.0).abs() < 1e-13);
        assert!(r.first_moment().max_abs() < 1e-15);
        let s = rule(MollifierSpec::shifted(1.0, Vec3::new(0.3, 0.0, 0.0)), 16);
        assert!((s.first_moment().x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn constant_field_is_preserved() {
        let u0 = Components::from_polynomials([Polynomial::constant(1.0), Polynomial::constant(-2.0), Polynomial::constant(0.5)]);
        let u = convolve_in_time(Arc::new(u0), rule(MollifierSpec::shifted(0.8, Vec3::new(0.1, 0.2, 0.0)), 12));
        for t in [0.0, 0.3, -1.0, 4.0] {
            let v = u.value(Vec3::new(0.2, -0.4, 1.0), t).unwrap();
            assert!((v - Vec3::new(1.0, -2.0, 0.5)).max_abs() < 1e-13, "t={t}: {v}");
        }
    }

    #[test]
    fn linear_potential_with_even_h_is_static() {
        let g: Arc<dyn ScalarField> = Arc::new(Polynomial::linear(Vec3::E1, 0.0));
        let phi = potential_of_time(g, rule(MollifierSpec::anisotropic(Vec3::new(1.0, 0.6, 0.4)), 12));
        for t in [0.1, 1.0, 3.0] {
            let x = Vec3::new(0.7, -0.2, 0.4);
            assert!((phi.value(x, t).unwrap() - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn t_zero_is_direct_substitution() {
        let g = Polynomial::new([(1.0, [2, 1, 0]), (-0.5, [0, 0, 3])]);
        let u0 = Arc::new(gradient(Arc::new(g.clone())).unwrap());
        let u = convolve_in_time(u0.clone(), rule(MollifierSpec::shifted(1.0, Vec3::new(0.3, 0.0, 0.0)), 12));
        let x = Vec3::new(0.3, 0.1, -0.6);
        assert_eq!(u.value(x, 0.0).unwrap(), u0.value(x, 0.0).unwrap() * u.rule().mass());
    }

    #[test]
    fn under_integral_derivatives_match_finite_differences() {
        let g: Arc<dyn ScalarField> = Arc::new(Polynomial::new([(1.0, [2, 1, 0]), (-0.5, [0, 0, 3]), (0.3, [1, 1, 1])]));
        let r = rule(MollifierSpec::shifted(0.9, Vec3::new(0.2, -0.1, 0.1)), 10);
        let phi = potential_of_time(g, r);
        let (x, t, e) = (Vec3::new(0.4, -0.3, 0.2), 0.7, 1e-5);
        let j = phi.jet(x, t, Order::with_time(1)).unwrap();
        let fd_t = (phi.value(x, t + e).unwrap() - phi.value(x, t - e).unwrap()) / (2.0 * e);
        assert!((fd_t - j.dt).abs() < 1e-8, "{fd_t} vs {}", j.dt);
        for i in 0..3 {
            let d = Vec3::axis(i) * e;
            let fd = (phi.value(x + d, t).unwrap() - phi.value(x - d, t).unwrap()) / (2.0 * e);
            assert!((fd - j.grad[i]).abs() < 1e-8);
            let fd_mixed = (phi.jet(x, t + e, Order::GRAD).unwrap().grad[i] - phi.jet(x, t - e, Order::GRAD).unwrap().grad[i]) / (2.0 * e);
            assert!((fd_mixed - j.dt_grad[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn potential_gradient_matches_velocity() {
        let g: Arc<dyn ScalarField> = Arc::new(Polynomial::new([(1.0, [3, 0, 0]), (-3.0, [1, 2, 0]), (0.7, [0, 1, 1])]));
        let r = rule(MollifierSpec::standard(1.0), 10);
        let u = convolve_in_time(Arc::new(gradient(g.clone()).unwrap()), r.clone());
        let phi = potential_of_time(g, r);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let t = rng.random_range(0.0..2.0);
            let d = u.value(x, t).unwrap() - phi.jet(x, t, Order::GRAD).unwrap().grad;
            assert!(d.max_abs() < 1e-8);
        }
    }
}
