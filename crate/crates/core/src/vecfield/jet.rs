use std::fmt;

use super::{FdSpec, Vec3};

pub type Mat3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Which derivatives a caller wants from one evaluation.
///
/// `space` is the highest total spatial order requested (0..=3). `time`
/// asks for the first time derivative, and together with `space >= 1` also
/// for its spatial gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Order {
    pub space: u8,
    pub time: bool,
}

impl Order {
    pub const VALUE: Order = Order::space(0);
    pub const GRAD: Order = Order::space(1);
    pub const HESS: Order = Order::space(2);

    pub const fn space(space: u8) -> Self {
        Self { space, time: false }
    }

    pub const fn with_time(space: u8) -> Self {
        Self { space, time: true }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "space order {}", self.space)?;
        if self.time {
            write!(f, " + time order 1")?;
        }
        Ok(())
    }
}

/// The derivatives a field is able to supply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capability {
    /// Highest spatial order available.
    pub space: u8,
    /// Whether the first time derivative is available.
    pub time: bool,
    /// Highest spatial order available for the time derivative (0 or 1).
    pub mixed: u8,
}

impl Capability {
    pub const fn new(space: u8, time: bool, mixed: u8) -> Self {
        Self { space, time, mixed }
    }

    /// Capability of a field that does not depend on time: its time
    /// derivative is identically zero at every spatial order.
    pub const fn steady(space: u8) -> Self {
        Self { space, time: true, mixed: 1 }
    }

    pub fn covers(&self, req: Order) -> bool {
        req.space <= self.space
            && (!req.time || (self.time && (req.space == 0 || self.mixed >= 1)))
    }

    pub fn require(&self, req: Order) -> Result<(), FieldError> {
        if self.covers(req) {
            Ok(())
        } else {
            Err(FieldError::Capability { requested: req, available: *self })
        }
    }

    /// Capability left after one spatial differentiation.
    pub fn after_gradient(&self) -> Option<Self> {
        if self.space == 0 {
            return None;
        }
        // d/dt of a spatial derivative needs the mixed derivative.
        let time = self.time && self.mixed >= 1;
        let mixed = if self.mixed >= 2 { 1 } else { 0 };
        Some(Self { space: self.space - 1, time, mixed })
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "space order {}", self.space)?;
        if self.time {
            write!(f, ", time order 1 (mixed space order {})", self.mixed)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference(FdSpec),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum FieldError {
    #[error("derivative unavailable: requested {requested}, field offers {available}")]
    Capability { requested: Order, available: Capability },
    #[error("non-finite input at x={x}, t={t}")]
    NonFiniteInput { x: Vec3, t: f64 },
    #[error("field evaluation produced a non-finite value at x={x}, t={t}")]
    NonFinite { x: Vec3, t: f64 },
    #[error("multi-index {index:?} with time order {time} is outside the order-(3,1) contract")]
    UnsupportedPartial { index: [u8; 3], time: u8 },
}

/// Value plus derivatives of a scalar field at one space-time point.
///
/// Entries beyond the requested [`Order`] are left at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec3,
    pub hess: Mat3,
    pub third: Tensor3,
    pub dt: f64,
    pub dt_grad: Vec3,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self { value, ..Self::default() }
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1] + self.hess[2][2]
    }

    /// Gradient of the Laplacian, from the third derivatives.
    pub fn grad_laplacian(&self) -> Vec3 {
        let t = &self.third;
        Vec3::from_array(std::array::from_fn(|i| t[i][0][0] + t[i][1][1] + t[i][2][2]))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut j = *self;
        j.scale_in_place(s);
        j
    }

    fn scale_in_place(&mut self, s: f64) {
        self.value *= s;
        self.grad = self.grad * s;
        for row in self.hess.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        for m in self.third.iter_mut() {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v *= s;
                }
            }
        }
        self.dt *= s;
        self.dt_grad = self.dt_grad * s;
    }

    /// `self += s * other`, over every stored entry.
    pub fn add_scaled(&mut self, other: &Jet, s: f64) {
        self.value += s * other.value;
        self.grad += other.grad * s;
        for i in 0..3 {
            for j in 0..3 {
                self.hess[i][j] += s * other.hess[i][j];
                for k in 0..3 {
                    self.third[i][j][k] += s * other.third[i][j][k];
                }
            }
        }
        self.dt += s * other.dt;
        self.dt_grad += other.dt_grad * s;
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.is_finite()
            && self.hess.iter().flatten().all(|v| v.is_finite())
            && self.third.iter().flatten().flatten().all(|v| v.is_finite())
            && self.dt.is_finite()
            && self.dt_grad.is_finite()
    }

    /// Extracts one partial derivative. `index` counts spatial
    /// differentiations per axis; `time` is 0 or 1.
    pub fn partial(&self, index: [u8; 3], time: u8) -> Result<f64, FieldError> {
        let total: u8 = index.iter().sum();
        let mut axes = Vec::with_capacity(total as usize);
        for (axis, &n) in index.iter().enumerate() {
            axes.extend(std::iter::repeat_n(axis, n as usize));
        }
        match (time, axes.as_slice()) {
            (0, []) => Ok(self.value),
            (0, [i]) => Ok(self.grad[*i]),
            (0, [i, j]) => Ok(self.hess[*i][*j]),
            (0, [i, j, k]) => Ok(self.third[*i][*j][*k]),
            (1, []) => Ok(self.dt),
            (1, [i]) => Ok(self.dt_grad[*i]),
            _ => Err(FieldError::UnsupportedPartial { index, time }),
        }
    }
}

/// Three component jets of a vector field.
pub type VectorJet = [Jet; 3];

pub fn jet_value(j: &VectorJet) -> Vec3 {
    Vec3::new(j[0].value, j[1].value, j[2].value)
}

/// Jacobian entry `[i][k] = d u_i / d x_k`.
pub fn jet_jacobian(j: &VectorJet) -> Mat3 {
    std::array::from_fn(|i| j[i].grad.to_array())
}

pub fn jet_dt(j: &VectorJet) -> Vec3 {
    Vec3::new(j[0].dt, j[1].dt, j[2].dt)
}

pub fn jet_laplacian(j: &VectorJet) -> Vec3 {
    Vec3::new(j[0].laplacian(), j[1].laplacian(), j[2].laplacian())
}

fn check_input(x: Vec3, t: f64) -> Result<(), FieldError> {
    if x.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(FieldError::NonFiniteInput { x, t })
    }
}

/// A real-valued function of space and time with derivative access.
///
/// Implementors provide [`ScalarField::eval_jet`]; callers use
/// [`ScalarField::jet`], which also enforces the capability contract and
/// rejects NaN/Inf on the way in and out.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn capability(&self) -> Capability;

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }

    /// Raw evaluation. May assume `order` is covered by `capability()`.
    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError>;

    fn jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        check_input(x, t)?;
        self.capability().require(order)?;
        let j = self.eval_jet(x, t, order)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(FieldError::NonFinite { x, t })
        }
    }

    fn value(&self, x: Vec3, t: f64) -> Result<f64, FieldError> {
        self.jet(x, t, Order::VALUE).map(|j| j.value)
    }

    fn partial(&self, index: [u8; 3], time: u8, x: Vec3, t: f64) -> Result<f64, FieldError> {
        let space: u8 = index.iter().sum();
        if time > 1 || space > 3 || (time == 1 && space > 1) {
            return Err(FieldError::UnsupportedPartial { index, time });
        }
        self.jet(x, t, Order { space, time: time == 1 })?.partial(index, time)
    }
}

/// A three-component field of space and time.
pub trait VectorField: Send + Sync + fmt::Debug {
    fn capability(&self) -> Capability;

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError>;

    fn jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        check_input(x, t)?;
        self.capability().require(order)?;
        let j = self.eval_jets(x, t, order)?;
        if j.iter().all(Jet::is_finite) {
            Ok(j)
        } else {
            Err(FieldError::NonFinite { x, t })
        }
    }

    fn value(&self, x: Vec3, t: f64) -> Result<Vec3, FieldError> {
        self.jets(x, t, Order::VALUE).map(|j| jet_value(&j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capability_mixed_rules() {
        let c = Capability::new(2, true, 0);
        assert!(c.covers(Order::with_time(0)));
        assert!(!c.covers(Order::with_time(1)));
        assert!(c.covers(Order::HESS));
        assert!(!c.covers(Order::space(3)));
        let g = Capability::new(3, true, 1).after_gradient().unwrap();
        assert_eq!(g, Capability::new(2, true, 0));
        assert!(Capability::new(0, true, 0).after_gradient().is_none());
    }

    #[test]
    fn partial_extraction() {
        let mut j = Jet::constant(1.0);
        j.hess[0][2] = 5.0;
        j.third[1][1][2] = 7.0;
        j.dt_grad.y = 3.0;
        assert_eq!(j.partial([1, 0, 1], 0).unwrap(), 5.0);
        assert_eq!(j.partial([0, 2, 1], 0).unwrap(), 7.0);
        assert_eq!(j.partial([0, 1, 0], 1).unwrap(), 3.0);
        assert!(j.partial([1, 1, 0], 1).is_err());
    }
}
