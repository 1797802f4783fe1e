//! Differential operators on fields: gradient, divergence, curl,
//! Laplacian, the advective term, and the Lamb decomposition gap.
//!
//! Each operator wraps its input and differentiates through the input's
//! jets, so the result keeps analytic accuracy whenever the input has it.

use std::sync::Arc;

use super::{
    jet_jacobian, jet_value, Capability, FieldError, Jet, Order, ScalarField, Vec3, VectorField,
    VectorJet,
};

fn reduced(cap: Capability, requested: Order) -> Result<Capability, FieldError> {
    cap.after_gradient().ok_or(FieldError::Capability { requested, available: cap })
}

fn raise(order: Order, by: u8) -> Order {
    Order { space: order.space + by, time: order.time }
}

#[derive(Clone, Debug)]
pub struct Gradient {
    g: Arc<dyn ScalarField>,
    cap: Capability,
}

/// `grad g`. Requires first derivatives of `g`.
pub fn gradient(g: Arc<dyn ScalarField>) -> Result<Gradient, FieldError> {
    let cap = reduced(g.capability(), Order::GRAD)?;
    Ok(Gradient { g, cap })
}

impl VectorField for Gradient {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        let g = self.g.jet(x, t, raise(order, 1))?;
        Ok(std::array::from_fn(|i| Jet {
            value: g.grad[i],
            grad: Vec3::from_array(g.hess[i]),
            hess: g.third[i],
            third: Default::default(),
            dt: g.dt_grad[i],
            dt_grad: Vec3::ZERO,
        }))
    }
}

#[derive(Clone, Debug)]
pub struct Divergence {
    u: Arc<dyn VectorField>,
    cap: Capability,
}

/// `div u`.
pub fn divergence(u: Arc<dyn VectorField>) -> Result<Divergence, FieldError> {
    let cap = reduced(u.capability(), Order::GRAD)?;
    Ok(Divergence { u, cap })
}

impl ScalarField for Divergence {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        let u = self.u.jets(x, t, raise(order, 1))?;
        let mut out = Jet::default();
        for (i, c) in u.iter().enumerate() {
            out.value += c.grad[i];
            out.dt += c.dt_grad[i];
            for k in 0..3 {
                out.grad[k] += c.hess[i][k];
                for l in 0..3 {
                    out.hess[k][l] += c.third[i][k][l];
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Curl {
    u: Arc<dyn VectorField>,
    cap: Capability,
}

/// `curl u`.
pub fn curl(u: Arc<dyn VectorField>) -> Result<Curl, FieldError> {
    let cap = reduced(u.capability(), Order::GRAD)?;
    Ok(Curl { u, cap })
}

const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

impl VectorField for Curl {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        let u = self.u.jets(x, t, raise(order, 1))?;
        let mut out: VectorJet = Default::default();
        for (i, j, k) in CYCLIC {
            // w_i = d_j u_k - d_k u_j
            let o = &mut out[i];
            o.value = u[k].grad[j] - u[j].grad[k];
            o.dt = u[k].dt_grad[j] - u[j].dt_grad[k];
            for m in 0..3 {
                o.grad[m] = u[k].hess[j][m] - u[j].hess[k][m];
                for n in 0..3 {
                    o.hess[m][n] = u[k].third[j][m][n] - u[j].third[k][m][n];
                }
            }
        }
        Ok(out)
    }
}

fn laplacian_capability(cap: Capability) -> Result<Capability, FieldError> {
    let once = reduced(cap, Order::HESS)?;
    reduced(once, Order::HESS)
}

fn laplacian_jet(c: &Jet) -> Jet {
    let mut o = Jet::constant(c.laplacian());
    o.grad = c.grad_laplacian();
    o
}

#[derive(Clone, Debug)]
pub struct Laplacian {
    u: Arc<dyn VectorField>,
    cap: Capability,
}

/// Componentwise Laplacian of a vector field.
pub fn laplacian(u: Arc<dyn VectorField>) -> Result<Laplacian, FieldError> {
    let cap = laplacian_capability(u.capability())?;
    Ok(Laplacian { u, cap })
}

impl VectorField for Laplacian {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        let u = self.u.jets(x, t, raise(order, 2))?;
        Ok(std::array::from_fn(|i| laplacian_jet(&u[i])))
    }
}

#[derive(Clone, Debug)]
pub struct ScalarLaplacian {
    g: Arc<dyn ScalarField>,
    cap: Capability,
}

/// Laplacian of a scalar field.
pub fn scalar_laplacian(g: Arc<dyn ScalarField>) -> Result<ScalarLaplacian, FieldError> {
    let cap = laplacian_capability(g.capability())?;
    Ok(ScalarLaplacian { g, cap })
}

impl ScalarField for ScalarLaplacian {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        Ok(laplacian_jet(&self.g.jet(x, t, raise(order, 2))?))
    }
}

#[derive(Clone, Debug)]
pub struct Advective {
    u: Arc<dyn VectorField>,
    cap: Capability,
}

/// `(u . grad) u`, with components `sum_j u_j d_j u_i`.
pub fn advective_term(u: Arc<dyn VectorField>) -> Result<Advective, FieldError> {
    let r = reduced(u.capability(), Order::GRAD)?;
    let cap = Capability { space: r.space.min(1), time: r.time, mixed: 0 };
    Ok(Advective { u, cap })
}

impl VectorField for Advective {
    fn capability(&self) -> Capability {
        self.cap
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        let u = self.u.jets(x, t, raise(order, 1))?;
        let mut out: VectorJet = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                out[i].value += u[j].value * u[i].grad[j];
                out[i].dt += u[j].dt * u[i].grad[j] + u[j].value * u[i].dt_grad[j];
                for k in 0..3 {
                    out[i].grad[k] += u[j].grad[k] * u[i].grad[j] + u[j].value * u[i].hess[j][k];
                }
            }
        }
        Ok(out)
    }
}

/// `(u . grad) u - [grad(|u|^2 / 2) - u x curl u]` at `(x, t)`.
///
/// Zero for every C^1 field; the residual measures only rounding.
pub fn lamb_identity_gap(u: &dyn VectorField, x: Vec3, t: f64) -> Result<Vec3, FieldError> {
    let jets = u.jets(x, t, Order::GRAD)?;
    let v = jet_value(&jets);
    let jac = jet_jacobian(&jets);
    let mut advective = Vec3::ZERO;
    let mut kinetic = Vec3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            advective[i] += v[j] * jac[i][j];
            kinetic[i] += v[j] * jac[j][i];
        }
    }
    let mut vorticity = Vec3::ZERO;
    for (i, j, k) in CYCLIC {
        vorticity[i] = jac[k][j] - jac[j][k];
    }
    Ok(advective - (kinetic - v.cross(vorticity)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecfield::{Components, Polynomial};

    fn poly(terms: &[(f64, [u32; 3])]) -> Arc<dyn ScalarField> {
        Arc::new(Polynomial::new(terms.iter().copied()))
    }

    fn vfield(c: [&[(f64, [u32; 3])]; 3]) -> Arc<dyn VectorField> {
        Arc::new(Components::new([poly(c[0]), poly(c[1]), poly(c[2])]))
    }

    #[test]
    fn gradient_of_saddle() {
        let g = gradient(poly(&[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])])).unwrap();
        assert_eq!(g.value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), Vec3::new(2.0, -4.0, 0.0));
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = gradient(poly(&[(4.2, [0, 0, 0])])).unwrap();
        assert_eq!(g.value(Vec3::new(-3.0, 0.5, 7.0), 1.0).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn divergence_examples() {
        let id = vfield([&[(1.0, [1, 0, 0])], &[(1.0, [0, 1, 0])], &[(1.0, [0, 0, 1])]]);
        assert_eq!(divergence(id).unwrap().value(Vec3::new(0.3, -1.0, 2.0), 0.0).unwrap(), 3.0);
        let rot = vfield([&[(-1.0, [0, 1, 0])], &[(1.0, [1, 0, 0])], &[]]);
        assert_eq!(divergence(rot).unwrap().value(Vec3::new(0.3, -1.0, 2.0), 0.0).unwrap(), 0.0);
        let saddle = gradient(poly(&[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])])).unwrap();
        assert_eq!(divergence(Arc::new(saddle)).unwrap().value(Vec3::new(1.0, 5.0, 2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn curl_examples() {
        let rot = vfield([&[(-1.0, [0, 1, 0])], &[(1.0, [1, 0, 0])], &[]]);
        assert_eq!(curl(rot).unwrap().value(Vec3::new(0.1, 0.2, 0.3), 0.0).unwrap(), Vec3::new(0.0, 0.0, 2.0));
        let shear = vfield([&[(1.0, [0, 0, 2])], &[], &[]]);
        assert_eq!(curl(shear).unwrap().value(Vec3::new(0.0, 0.0, 1.0), 0.0).unwrap(), Vec3::new(0.0, 2.0, 0.0));
    }

    #[test]
    fn laplacian_examples() {
        let r2 = poly(&[(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (1.0, [0, 0, 2])]);
        assert_eq!(scalar_laplacian(r2).unwrap().value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), 6.0);
        let xyz = poly(&[(1.0, [1, 1, 1])]);
        assert_eq!(scalar_laplacian(xyz.clone()).unwrap().value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), 0.0);
        let grad_xyz = Arc::new(gradient(xyz).unwrap());
        // gradient of a cubic keeps only order-2 access, which is enough.
        assert_eq!(laplacian(grad_xyz).unwrap().value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn advective_examples() {
        let id = vfield([&[(1.0, [1, 0, 0])], &[(1.0, [0, 1, 0])], &[(1.0, [0, 0, 1])]]);
        let a = advective_term(id).unwrap();
        assert_eq!(a.value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), Vec3::new(1.0, 2.0, 3.0));
        let c = vfield([&[(0.5, [0, 0, 0])], &[(-2.0, [0, 0, 0])], &[(1.0, [0, 0, 0])]]);
        assert_eq!(advective_term(c).unwrap().value(Vec3::new(1.0, 2.0, 3.0), 0.0).unwrap(), Vec3::ZERO);
        let rot = vfield([&[(-1.0, [0, 1, 0])], &[(1.0, [1, 0, 0])], &[]]);
        assert_eq!(advective_term(rot).unwrap().value(Vec3::new(1.0, 1.0, 0.0), 0.0).unwrap(), Vec3::new(-1.0, -1.0, 0.0));
    }

    #[test]
    fn lamb_gap_examples() {
        let rot = vfield([&[(-1.0, [0, 1, 0])], &[(1.0, [1, 0, 0])], &[]]);
        let gap = lamb_identity_gap(rot.as_ref(), Vec3::new(1.0, 1.0, 0.0), 0.0).unwrap();
        assert!(gap.max_abs() <= 1e-12);
        let c = vfield([&[(0.5, [0, 0, 0])], &[(-2.0, [0, 0, 0])], &[(1.0, [0, 0, 0])]]);
        assert_eq!(lamb_identity_gap(c.as_ref(), Vec3::new(3.0, 1.0, 0.0), 0.0).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn capability_errors() {
        let fd = crate::vecfield::FdScalarField::new("sin", Default::default(), |x: Vec3, _| x.x.sin());
        let g: Arc<dyn VectorField> = Arc::new(gradient(Arc::new(fd)).unwrap());
        assert!(matches!(laplacian(g.clone()), Err(FieldError::Capability { .. })));
        let d = divergence(g).unwrap();
        assert!(d.jet(Vec3::ZERO, 0.0, Order::GRAD).is_err());
    }
}
