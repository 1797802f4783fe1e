//! Deterministic quadrature: Gauss-Legendre on intervals and boxes, and a
//! truncated shell rule against the exponential radial density.
//!
//! Node tables are built once per node count and shared.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::mollifier::exp_density_amplitude;
use crate::vecfield::{FieldError, ScalarField, Vec3};

#[derive(Debug, Clone, thiserror::Error)]
pub enum QuadratureError {
    #[error("quadrature needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("integration bounds must be finite and ordered (lo={lo}, hi={hi})")]
    Bounds { lo: f64, hi: f64 },
    #[error("truncation radius must be finite and positive, got {0}")]
    Radius(f64),
    #[error("spherical rule needs >= 1 polar and >= 8 azimuthal nodes, got {polar} x {azimuth}")]
    Spherical { polar: usize, azimuth: usize },
    #[error("expected a {expected} region")]
    Region { expected: &'static str },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Shared table for `n` nodes.
    pub fn get(n: usize) -> Result<Arc<GaussLegendre>, QuadratureError> {
        if n < 2 {
            return Err(QuadratureError::TooFewNodes(n));
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(map.entry(n).or_insert_with(|| Arc::new(Self::compute(n))).clone())
    }

    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec3, hi: Vec3 },
    /// Ball about the origin; used by the radial rule.
    Ball { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per axis (radial nodes for a ball).
    pub nodes: usize,
    pub region: Region,
}

fn check_bounds(lo: f64, hi: f64) -> Result<(), QuadratureError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(QuadratureError::Bounds { lo, hi })
    }
}

impl QuadratureSpec {
    pub fn interval(nodes: usize, lo: f64, hi: f64) -> Self {
        Self { nodes, region: Region::Interval { lo, hi } }
    }

    pub fn cube(nodes: usize, lo: Vec3, hi: Vec3) -> Self {
        Self { nodes, region: Region::Box { lo, hi } }
    }

    pub fn ball(nodes: usize, radius: f64) -> Self {
        Self { nodes, region: Region::Ball { radius } }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.nodes < 2 {
            return Err(QuadratureError::TooFewNodes(self.nodes));
        }
        match self.region {
            Region::Interval { lo, hi } => check_bounds(lo, hi),
            Region::Box { lo, hi } => (0..3).try_for_each(|i| check_bounds(lo[i], hi[i])),
            Region::Ball { radius } if radius.is_finite() && radius > 0.0 => Ok(()),
            Region::Ball { radius } => Err(QuadratureError::Radius(radius)),
        }
    }
}

fn finite(v: f64, at: impl FnOnce() -> String) -> Result<f64, QuadratureError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { at: at() })
    }
}

/// Gauss-Legendre approximation of `int f` over the spec's interval.
/// Exact for polynomials of degree `<= 2 * nodes - 1`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64, QuadratureError> {
    spec.validate()?;
    let Region::Interval { lo, hi } = spec.region else {
        return Err(QuadratureError::Region { expected: "interval" });
    };
    let rule = GaussLegendre::get(spec.nodes)?;
    let mut sum = 0.0;
    for (x, w) in rule.mapped(lo, hi) {
        sum += w * finite(f(x), || format!("x={x}"))?;
    }
    Ok(sum)
}

/// Tensor-product nodes and weights over the spec's box, ordered with the
/// first axis outermost.
pub fn box_rule(spec: &QuadratureSpec) -> Result<Vec<(Vec3, f64)>, QuadratureError> {
    spec.validate()?;
    let Region::Box { lo, hi } = spec.region else {
        return Err(QuadratureError::Region { expected: "box" });
    };
    let rule = GaussLegendre::get(spec.nodes)?;
    let axes: [Vec<(f64, f64)>; 3] = std::array::from_fn(|a| rule.mapped(lo[a], hi[a]).collect());
    let mut out = Vec::with_capacity(spec.nodes.pow(3));
    for &(x, wx) in &axes[0] {
        for &(y, wy) in &axes[1] {
            for &(z, wz) in &axes[2] {
                out.push((Vec3::new(x, y, z), wx * wy * wz));
            }
        }
    }
    Ok(out)
}

/// Tensor-product Gauss-Legendre approximation of `int f` over a box.
pub fn integrate_3d_box(f: impl Fn(Vec3) -> f64, spec: &QuadratureSpec) -> Result<f64, QuadratureError> {
    let mut sum = 0.0;
    for (p, w) in box_rule(spec)? {
        sum += w * finite(f(p), || format!("x={p}"))?;
    }
    Ok(sum)
}

/// Angular part of the shell rule: Gauss-Legendre in `cos(theta)` times
/// the trapezoid rule in azimuth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphericalRule {
    pub polar: usize,
    pub azimuth: usize,
}

impl Default for SphericalRule {
    /// Exact for spherical harmonics of degree <= 7.
    fn default() -> Self {
        Self { polar: 4, azimuth: 8 }
    }
}

impl SphericalRule {
    fn validate(&self) -> Result<(), QuadratureError> {
        if self.polar < 1 || self.azimuth < 8 {
            return Err(QuadratureError::Spherical { polar: self.polar, azimuth: self.azimuth });
        }
        Ok(())
    }

    /// Unit directions with weights summing to 4 pi.
    pub fn directions(&self) -> Result<Vec<(Vec3, f64)>, QuadratureError> {
        self.validate()?;
        let polar: Vec<(f64, f64)> = if self.polar == 1 {
            vec![(0.0, 2.0)]
        } else {
            GaussLegendre::get(self.polar)?.mapped(-1.0, 1.0).collect()
        };
        let dphi = 2.0 * PI / self.azimuth as f64;
        let mut out = Vec::with_capacity(polar.len() * self.azimuth);
        for &(mu, wmu) in &polar {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for k in 0..self.azimuth {
                let phi = dphi * k as f64;
                out.push((Vec3::new(s * phi.cos(), s * phi.sin(), mu), wmu * dphi));
            }
        }
        Ok(out)
    }
}

/// Points `y` and weights for `int_{|y| <= R} f(y) c3 exp(-2 pi |y|) dy`.
pub fn radial_exp_rule(
    radius: f64,
    nodes: usize,
    sphere: SphericalRule,
) -> Result<Vec<(Vec3, f64)>, QuadratureError> {
    let spec = QuadratureSpec::ball(nodes, radius);
    spec.validate()?;
    let amplitude = exp_density_amplitude(3);
    let dirs = sphere.directions()?;
    let mut out = Vec::with_capacity(nodes * dirs.len());
    for (r, wr) in GaussLegendre::get(nodes)?.mapped(0.0, radius) {
        let shell = wr * r * r * amplitude * (-2.0 * PI * r).exp();
        for &(d, wd) in &dirs {
            out.push((d * r, shell * wd));
        }
    }
    Ok(out)
}

/// Truncated convolution `int_{|y| <= R} g(center - y) c3 exp(-2 pi |y|) dy`
/// with the default spherical rule.
pub fn integrate_radial_exp(
    g: &dyn ScalarField,
    center: Vec3,
    radius: f64,
    nodes: usize,
) -> Result<f64, QuadratureError> {
    integrate_radial_exp_with(g, center, radius, nodes, SphericalRule::default())
}

pub fn integrate_radial_exp_with(
    g: &dyn ScalarField,
    center: Vec3,
    radius: f64,
    nodes: usize,
    sphere: SphericalRule,
) -> Result<f64, QuadratureError> {
    center.ensure_finite()?;
    let mut sum = 0.0;
    for (y, w) in radial_exp_rule(radius, nodes, sphere)? {
        sum += w * g.value(center - y, 0.0)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecfield::Polynomial;

    #[test]
    fn two_point_rule_is_exact_for_cubics() {
        let v = integrate_1d(|x| x * x, &QuadratureSpec::interval(2, 0.0, 1.0)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let c = integrate_1d(|x| 4.0 * x.powi(3) - x + 2.0, &QuadratureSpec::interval(2, -1.0, 2.0)).unwrap();
        // antiderivative x^4 - x^2/2 + 2x on [-1, 2]
        let exact = (16.0 - 2.0 + 4.0) - (1.0 - 0.5 - 2.0);
        assert!((c - exact).abs() < 1e-13);
    }

    #[test]
    fn sine_to_ten_digits() {
        let v = integrate_1d(f64::sin, &QuadratureSpec::interval(16, 0.0, PI)).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial_exactness_across_node_counts() {
        for n in [2usize, 3, 5, 8, 13, 24, 64] {
            let deg = 2 * n as i32 - 1;
            let v = integrate_1d(|x| x.powi(deg) + x.powi(deg - 1), &QuadratureSpec::interval(n, 0.0, 1.0)).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0) + 1.0 / deg as f64;
            assert!(((v - exact) / exact).abs() < 1e-13, "n={n}: {v} vs {exact}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [2usize, 7, 24, 128, 256] {
            let gl = GaussLegendre::get(n).unwrap();
            let s: f64 = gl.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            assert!(gl.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn box_examples() {
        let unit = QuadratureSpec::cube(2, Vec3::ZERO, Vec3::splat(1.0));
        assert!((integrate_3d_box(|_| 1.0, &unit).unwrap() - 1.0).abs() < 1e-15);
        let v = integrate_3d_box(|p| p.x * p.y * p.z, &unit).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            integrate_1d(|x| x, &QuadratureSpec::interval(1, 0.0, 1.0)),
            Err(QuadratureError::TooFewNodes(1))
        ));
        assert!(integrate_1d(|x| x, &QuadratureSpec::interval(4, 1.0, 0.0)).is_err());
        assert!(integrate_3d_box(|_| 1.0, &QuadratureSpec::interval(4, 0.0, 1.0)).is_err());
        assert!(radial_exp_rule(0.0, 8, SphericalRule::default()).is_err());
        assert!(radial_exp_rule(1.0, 8, SphericalRule { polar: 4, azimuth: 6 }).is_err());
        assert!(integrate_1d(|_| f64::NAN, &QuadratureSpec::interval(4, 0.0, 1.0)).is_err());
    }

    #[test]
    fn spherical_rule_integrates_low_degree_harmonics() {
        let dirs = SphericalRule::default().directions().unwrap();
        let total: f64 = dirs.iter().map(|(_, w)| w).sum();
        assert!((total - 4.0 * PI).abs() < 1e-13);
        // int x^2 dS = 4 pi / 3 and int x^4 y^2 dS = 4 pi / 35 on the unit sphere
        let x2: f64 = dirs.iter().map(|(d, w)| w * d.x * d.x).sum();
        assert!((x2 - 4.0 * PI / 3.0).abs() < 1e-13);
        let x4y2: f64 = dirs.iter().map(|(d, w)| w * d.x.powi(4) * d.y.powi(2)).sum();
        assert!((x4y2 - 4.0 * PI / 35.0).abs() < 1e-13);
    }

    #[test]
    fn radial_mass_and_symmetry() {
        let one = Polynomial::constant(1.0);
        let r = 6.0;
        let m = integrate_radial_exp(&one, Vec3::new(0.2, -0.4, 1.0), r, 48).unwrap();
        let a = 2.0 * PI * r;
        let tail = (-a).exp() * (1.0 + a + 0.5 * a * a);
        assert!((1.0 - m).abs() <= tail + 1e-14, "mass {m}");
        let x = Polynomial::linear(Vec3::E1, 0.0);
        assert!(integrate_radial_exp(&x, Vec3::ZERO, r, 48).unwrap().abs() < 1e-15);
    }

    #[test]
    fn deterministic() {
        let g = Polynomial::new([(1.0, [1, 1, 1]), (0.3, [2, 0, 0])]);
        let a = integrate_radial_exp(&g, Vec3::new(1.0, 1.0, 1.0), 6.0, 48).unwrap();
        let b = integrate_radial_exp(&g, Vec3::new(1.0, 1.0, 1.0), 6.0, 48).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
