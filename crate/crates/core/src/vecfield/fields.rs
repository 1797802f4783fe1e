//! Concrete fields with exact derivatives: polynomials, sums, and
//! component bundles.

use std::sync::Arc;

use rand::Rng;

use super::{Capability, FieldError, Jet, Order, ScalarField, Vec3, VectorField, VectorJet};

/// Smallest capability shared by all inputs.
pub fn common_capability(caps: impl IntoIterator<Item = Capability>) -> Capability {
    caps.into_iter()
        .reduce(|a, b| Capability {
            space: a.space.min(b.space),
            time: a.time && b.time,
            mixed: a.mixed.min(b.mixed),
        })
        .expect("at least one capability")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub powers: [u32; 3],
}

/// A time-independent polynomial in (x, y, z).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

fn falling(p: u32, k: u32) -> f64 {
    (0..k).map(|i| p.saturating_sub(i) as f64).product()
}

impl Polynomial {
    pub fn new(terms: impl IntoIterator<Item = (f64, [u32; 3])>) -> Self {
        Self { terms: terms.into_iter().map(|(coef, powers)| Monomial { coef, powers }).collect() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new([(c, [0, 0, 0])])
    }

    /// `a . x + c`
    pub fn linear(a: Vec3, c: f64) -> Self {
        Self::new([(c, [0, 0, 0]), (a.x, [1, 0, 0]), (a.y, [0, 1, 0]), (a.z, [0, 0, 1])])
    }

    /// Random polynomial of total degree <= `degree` with coefficients
    /// uniform in [-1, 1].
    pub fn random<R: Rng>(rng: &mut R, degree: u32) -> Self {
        let mut terms = Vec::new();
        for total in 0..=degree {
            for i in 0..=total {
                for j in 0..=(total - i) {
                    let k = total - i - j;
                    terms.push((rng.random_range(-1.0..=1.0), [i, j, k]));
                }
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.powers.iter().sum()).max().unwrap_or(0)
    }

    /// Partial derivative with multi-index `d` at `x`.
    pub fn derivative(&self, d: [u32; 3], x: Vec3) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                let mut v = m.coef;
                for a in 0..3 {
                    if d[a] > m.powers[a] {
                        return 0.0;
                    }
                    v *= falling(m.powers[a], d[a]) * x[a].powi((m.powers[a] - d[a]) as i32);
                }
                v
            })
            .sum()
    }
}

fn unit(i: usize) -> [u32; 3] {
    let mut d = [0; 3];
    d[i] += 1;
    d
}

fn add_unit(mut d: [u32; 3], i: usize) -> [u32; 3] {
    d[i] += 1;
    d
}

impl ScalarField for Polynomial {
    fn capability(&self) -> Capability {
        Capability::steady(3)
    }

    fn eval_jet(&self, x: Vec3, _t: f64, order: Order) -> Result<Jet, FieldError> {
        let mut j = Jet::constant(self.derivative([0; 3], x));
        if order.space >= 1 {
            for i in 0..3 {
                j.grad[i] = self.derivative(unit(i), x);
            }
        }
        if order.space >= 2 {
            for i in 0..3 {
                for k in 0..3 {
                    j.hess[i][k] = self.derivative(add_unit(unit(i), k), x);
                }
            }
        }
        if order.space >= 3 {
            for i in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        j.third[i][k][l] = self.derivative(add_unit(add_unit(unit(i), k), l), x);
                    }
                }
            }
        }
        Ok(j)
    }
}

/// Pointwise sum of two scalar fields.
#[derive(Clone, Debug)]
pub struct SumField {
    a: Arc<dyn ScalarField>,
    b: Arc<dyn ScalarField>,
}

impl SumField {
    pub fn new(a: Arc<dyn ScalarField>, b: Arc<dyn ScalarField>) -> Self {
        Self { a, b }
    }
}

impl ScalarField for SumField {
    fn capability(&self) -> Capability {
        common_capability([self.a.capability(), self.b.capability()])
    }

    fn eval_jet(&self, x: Vec3, t: f64, order: Order) -> Result<Jet, FieldError> {
        let mut j = self.a.jet(x, t, order)?;
        j.add_scaled(&self.b.jet(x, t, order)?, 1.0);
        Ok(j)
    }
}

/// A vector field assembled from three scalar components.
#[derive(Clone, Debug)]
pub struct Components {
    parts: [Arc<dyn ScalarField>; 3],
}

impl Components {
    pub fn new(parts: [Arc<dyn ScalarField>; 3]) -> Self {
        Self { parts }
    }

    pub fn from_polynomials(p: [Polynomial; 3]) -> Self {
        let [a, b, c] = p;
        Self::new([Arc::new(a), Arc::new(b), Arc::new(c)])
    }

    pub fn component(&self, i: usize) -> &Arc<dyn ScalarField> {
        &self.parts[i]
    }
}

impl VectorField for Components {
    fn capability(&self) -> Capability {
        common_capability(self.parts.iter().map(|p| p.capability()))
    }

    fn eval_jets(&self, x: Vec3, t: f64, order: Order) -> Result<VectorJet, FieldError> {
        Ok([
            self.parts[0].jet(x, t, order)?,
            self.parts[1].jet(x, t, order)?,
            self.parts[2].jet(x, t, order)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // g = x^2 y + 3 z^3
        let g = Polynomial::new([(1.0, [2, 1, 0]), (3.0, [0, 0, 3])]);
        let p = Vec3::new(1.0, 2.0, -1.0);
        let j = g.jet(p, 0.0, Order::space(3)).unwrap();
        assert_eq!(j.value, 2.0 - 3.0);
        assert_eq!(j.grad, Vec3::new(4.0, 1.0, 9.0));
        assert_eq!(j.hess[0][0], 4.0);
        assert_eq!(j.hess[0][1], 2.0);
        assert_eq!(j.hess[2][2], -18.0);
        assert_eq!(j.third[0][0][1], 2.0);
        assert_eq!(j.third[2][2][2], 18.0);
        assert_eq!(j.third[0][1][2], 0.0);
    }

    #[test]
    fn random_cubic_has_twenty_terms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = Polynomial::random(&mut rng, 3);
        assert_eq!(p.terms().len(), 20);
        assert_eq!(p.degree(), 3);
        assert!(p.terms().iter().all(|m| m.coef.abs() <= 1.0));
    }
}
