//! Central finite-difference stencils of order 2 and 4.
//!
//! Used for fields that only expose values, and as an independent
//! cross-check of analytic derivatives.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use super::{Capability, DerivativeMode, FieldError, Jet, Order, ScalarField, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepScaling {
    /// Step is `base * (1 + |coordinate|)`.
    Relative,
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdSpec {
    pub space_step: f64,
    pub time_step: f64,
    /// Stencil order: 2 or 4.
    pub order: u8,
    pub scaling: StepScaling,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum FdSpecError {
    #[error("finite-difference steps must be positive and finite (space {space}, time {time})")]
    Step { space: f64, time: f64 },
    #[error("unsupported stencil order {0}; expected 2 or 4")]
    Order(u8),
}

impl Default for FdSpec {
    fn default() -> Self {
        Self {
            space_step: 1e-3,
            time_step: 1e-3,
            order: 4,
            scaling: StepScaling::Relative,
        }
    }
}

impl FdSpec {
    pub fn new(space_step: f64, time_step: f64, order: u8, scaling: StepScaling) -> Result<Self, FdSpecError> {
        let spec = Self { space_step, time_step, order, scaling };
        spec.validate()?;
        Ok(spec)
    }

    /// Fixed steps, independent of the evaluation point.
    pub fn absolute(step: f64, order: u8) -> Result<Self, FdSpecError> {
        Self::new(step, step, order, StepScaling::Absolute)
    }

    pub fn validate(&self) -> Result<(), FdSpecError> {
        let ok = |h: f64| h.is_finite() && h > 0.0;
        if !ok(self.space_step) || !ok(self.time_step) {
            return Err(FdSpecError::Step { space: self.space_step, time: self.time_step });
        }
        if self.order != 2 && self.order != 4 {
            return Err(FdSpecError::Order(self.order));
        }
        Ok(())
    }

    pub fn space_step_at(&self, x: Vec3) -> f64 {
        match self.scaling {
            StepScaling::Relative => self.space_step * (1.0 + x.norm()),
            StepScaling::Absolute => self.space_step,
        }
    }

    pub fn time_step_at(&self, t: f64) -> f64 {
        match self.scaling {
            StepScaling::Relative => self.time_step * (1.0 + t.abs()),
            StepScaling::Absolute => self.time_step,
        }
    }

    fn first(&self) -> &'static [(f64, f64)] {
        if self.order == 2 {
            &[(-1.0, -0.5), (1.0, 0.5)]
        } else {
            &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)]
        }
    }

    fn second(&self) -> &'static [(f64, f64)] {
        if self.order == 2 {
            &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)]
        } else {
            &[
                (-2.0, -1.0 / 12.0),
                (-1.0, 16.0 / 12.0),
                (0.0, -30.0 / 12.0),
                (1.0, 16.0 / 12.0),
                (2.0, -1.0 / 12.0),
            ]
        }
    }
}

/// Values that finite differences can combine.
pub trait FdValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl FdValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl FdValue for Vec3 {
    fn zero() -> Self {
        Vec3::ZERO
    }
}

/// A differentiation direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Space(usize),
    Time,
}

fn shift(x: Vec3, t: f64, dir: Dir, amount: f64) -> (Vec3, f64) {
    match dir {
        Dir::Space(i) => {
            let mut y = x;
            y[i] += amount;
            (y, t)
        }
        Dir::Time => (x, t + amount),
    }
}

fn step(spec: &FdSpec, x: Vec3, t: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Space(_) => spec.space_step_at(x),
        Dir::Time => spec.time_step_at(t),
    }
}

/// Finite-difference derivative of `f` at `(x, t)` along one or two
/// directions. Two equal directions use the pure second-derivative
/// stencil; two distinct directions use the tensor product of first
/// derivative stencils.
pub fn fd_derivative<T, E, F>(f: &F, x: Vec3, t: f64, dirs: &[Dir], spec: &FdSpec) -> Result<T, E>
where
    T: FdValue,
    F: Fn(Vec3, f64) -> Result<T, E>,
{
    match *dirs {
        [] => f(x, t),
        [d] => {
            let h = step(spec, x, t, d);
            let mut acc = T::zero();
            for &(o, w) in spec.first() {
                let (y, s) = shift(x, t, d, o * h);
                acc = acc + f(y, s)? * w;
            }
            Ok(acc * (1.0 / h))
        }
        [a, b] if a == b => {
            let h = step(spec, x, t, a);
            let mut acc = T::zero();
            for &(o, w) in spec.second() {
                let (y, s) = shift(x, t, a, o * h);
                acc = acc + f(y, s)? * w;
            }
            Ok(acc * (1.0 / (h * h)))
        }
        [a, b] => {
            let ha = step(spec, x, t, a);
            let hb = step(spec, x, t, b);
            let mut acc = T::zero();
            for &(oa, wa) in spec.first() {
                let (y, s) = shift(x, t, a, oa * ha);
                for &(ob, wb) in spec.first() {
                    let (z, r) = shift(y, s, b, ob * hb);
                    acc = acc + f(z, r)? * (wa * wb);
                }
            }
            Ok(acc * (1.0 / (ha * hb)))
        }
        _ => panic!("fd_derivative supports at most two directions"),
    }
}

/// Jet of a value-only function by finite differences, up to spatial
/// order 2 and the mixed time-space order 1.
pub fn fd_jet<E, F>(f: &F, x: Vec3, t: f64, order: Order, spec: &FdSpec) -> Result<Jet, E>
where
    F: Fn(Vec3, f64) -> Result<f64, E>,
{
    let mut j = Jet::constant(f(x, t)?);
    if order.space >= 1 {
        for i in 0..3 {
            j.grad[i] = fd_derivative(f, x, t, &[Dir::Space(i)], spec)?;
        }
    }
    if order.space >= 2 {
        for i in 0..3 {
            for k in i..3 {
                let v = fd_derivative(f, x, t, &[Dir::Space(i), Dir::Space(k)], spec)?;
                j.hess[i][k] = v;
                j.hess[k][i] = v;
            }
        }
    }
    if order.time {
        j.dt = fd_derivative(f, x, t, &[Dir::Time], spec)?;
        if order.space >= 1 {
            for i in 0..3 {
                j.dt_grad[i] = fd_derivative(f, x, t, &[Dir::Time, Dir::Space(i)], spec)?;
            }
        }
    }
    Ok(j)
}

type ValueFn = dyn Fn(Vec3, f64) -> f64 + Send + Sync;

/// A scalar field that only knows its values; derivatives come from
/// finite differences with a recorded [`FdSpec`].
#[derive(Clone)]
pub struct FdScalarField {
    f: Arc<ValueFn>,
    spec: FdSpec,
    label: String,
}

impl FdScalarField {
    pub fn new(label: impl Into<String>, spec: FdSpec, f: impl Fn(Vec3, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), spec, label: label.into() }
    }

    pub fn spec(&self) -> &FdSpec {
        &self.spec
    }
}

impl fmt::Debug for FdScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdScalarField").field("label", &self.label).field("spec", &self.spec).finish()
    }
}

impl ScalarField for FdScalarField {
    fn capability(&self) -> Capability {
        Capability::new(2, true, 1)
    }

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::FiniteDifference(self.spec)
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        let f = |y: Vec3, s: f64| -> Result<f64, FieldError> {
            let v = (self.f)(y, s);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FieldError::NonFinite { x: y, t: s })
            }
        };
        fd_jet(&f, x, t, order, &self.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(x: Vec3, t: f64) -> Result<f64, FieldError> {
        Ok((x.x * 1.3).sin() * (0.7 * x.y).exp() * (x.z * t + 0.5).cos())
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FdSpec::absolute(0.0, 4).is_err());
        assert!(FdSpec::absolute(1e-3, 3).is_err());
        assert!(FdSpec::absolute(f64::NAN, 2).is_err());
        assert!(FdSpec::absolute(1e-3, 2).is_ok());
    }

    #[test]
    fn polynomial_is_differentiated_exactly_at_fourth_order() {
        // Fourth-order central stencils are exact for cubics up to rounding.
        let f = |x: Vec3, t: f64| -> Result<f64, FieldError> { Ok(x.x.powi(3) + x.x * x.y * x.z + t * x.y) };
        let spec = FdSpec::absolute(1e-2, 4).unwrap();
        let p = Vec3::new(0.4, -0.2, 0.9);
        let j = fd_jet(&f, p, 0.3, Order::with_time(2), &spec).unwrap();
        assert!((j.grad.x - (3.0 * 0.16 + (-0.2 * 0.9))).abs() < 1e-10);
        assert!((j.hess[0][0] - 6.0 * 0.4).abs() < 1e-8);
        assert!((j.hess[1][2] - 0.4).abs() < 1e-9);
        assert!((j.dt - (-0.2)).abs() < 1e-10);
        assert!((j.dt_grad.y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_convergence_rate() {
        let p = Vec3::new(0.3, 0.2, -0.4);
        let t = 0.8;
        // exact d/dx
        let exact = 1.3 * (0.39f64).cos() * (0.14f64).exp() * (-0.32f64 + 0.5).cos();
        let err = |h: f64| {
            let spec = FdSpec::absolute(h, 4).unwrap();
            let v: f64 = fd_derivative(&sample, p, t, &[Dir::Space(0)], &spec).unwrap();
            (v - exact).abs()
        };
        let (e1, e2) = (err(4e-2), err(2e-2));
        let rate = (e1 / e2).log2();
        assert!(rate > 3.5, "observed order {rate}");
    }
}
