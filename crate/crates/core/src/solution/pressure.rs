//! Unsteady Bernoulli pressure `p = F - d_t phi - |grad phi|^2 / 2`, gauge
//! `C(t) = 0`.

use std::sync::Arc;

use crate::vecfield::{Capability, FieldError, Jet, Order, ScalarField, Vec3};

#[derive(Clone, Debug)]
pub struct BernoulliPressure {
    potential: Arc<dyn ScalarField>,
    forcing: Arc<dyn ScalarField>,
}

/// Requires `d_t grad phi`, the Hessian of `phi`, and `grad F`.
pub fn recover_pressure(potential: Arc<dyn ScalarField>, forcing: Arc<dyn ScalarField>) -> Result<BernoulliPressure, FieldError> {
    potential.capability().require(Order::with_time(1))?;
    potential.capability().require(Order::HESS)?;
    forcing.capability().require(Order::GRAD)?;
    Ok(BernoulliPressure { potential, forcing })
}

impl ScalarField for BernoulliPressure {
    fn capability(&self) -> Capability {
        Capability::new(1, false, 0)
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        let f = self.forcing.jet(x, t, order)?;
        let phi = self.potential.jet(x, t, Order { space: order.space + 1, time: true })?;
        let mut j = Jet::constant(f.value - phi.dt - 0.5 * phi.grad.norm_squared());
        if order.space >= 1 {
            for i in 0..3 {
                let mut kinetic = 0.0;
                for k in 0..3 {
                    kinetic += phi.grad[k] * phi.hess[k][i];
                }
                j.grad[i] = f.grad[i] - phi.dt_grad[i] - kinetic;
            }
        }
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollifier::{make_mollifier, MollifierSpec};
    use crate::solution::{potential_of_time, ConvolutionRule};
    use crate::vecfield::Polynomial;

    fn phi_of(g: Polynomial) -> Arc<dyn ScalarField> {
        let h = make_mollifier(&MollifierSpec::standard(1.0), 10).unwrap();
        Arc::new(potential_of_time(Arc::new(g), Arc::new(ConvolutionRule::new(&h, 10).unwrap())))
    }

    #[test]
    fn uniform_flow_has_constant_pressure() {
        let p = recover_pressure(phi_of(Polynomial::linear(Vec3::E1, 0.0)), Arc::new(Polynomial::zero())).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let j = p.jet(Vec3::new(0.3, -1.0, 0.2), t, Order::GRAD).unwrap();
            assert!((j.value + 0.5).abs() < 1e-14);
            assert!(j.grad.max_abs() < 1e-14);
        }
    }

    #[test]
    fn still_fluid_pressure_is_forcing() {
        let f = Polynomial::new([(-0.5, [2, 0, 0]), (1.0, [0, 0, 1])]);
        let p = recover_pressure(phi_of(Polynomial::zero()), Arc::new(f.clone())).unwrap();
        let x = Vec3::new(0.4, 0.1, -0.3);
        assert_eq!(p.value(x, 1.0).unwrap(), f.value(x, 0.0).unwrap());
    }

    #[test]
    fn needs_time_derivatives() {
        let g: Arc<dyn ScalarField> = Arc::new(Polynomial::zero());
        let lap: Arc<dyn ScalarField> = Arc::new(crate::vecfield::scalar_laplacian(g.clone()).unwrap());
        assert!(!lap.capability().covers(Order::with_time(1)));
        assert!(recover_pressure(lap, g).is_err());
    }
}
