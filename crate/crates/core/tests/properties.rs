//! Randomized vector-calculus invariants on polynomial fields.

use std::sync::Arc;

use potential_ns::vecfield::{curl, divergence, gradient, lamb_identity_gap, Components, Polynomial, ScalarField, Vec3, VectorField};
use proptest::prelude::*;
use rand::SeedableRng;

fn point() -> impl Strategy<Value = Vec3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn poly(seed: u64) -> Polynomial {
    Polynomial::random(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed), 3)
}

fn field(seed: u64) -> Components {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Components::from_polynomials(std::array::from_fn(|_| Polynomial::random(&mut rng, 3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curl_of_gradient_vanishes(seed in any::<u64>(), x in point(), t in 0.0..1.0f64) {
        let g: Arc<dyn ScalarField> = Arc::new(poly(seed));
        let c = curl(Arc::new(gradient(g).unwrap())).unwrap();
        prop_assert!(c.value(x, t).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn divergence_of_curl_vanishes(seed in any::<u64>(), x in point()) {
        let u: Arc<dyn VectorField> = Arc::new(field(seed));
        let d = divergence(Arc::new(curl(u).unwrap())).unwrap();
        prop_assert!(d.value(x, 0.0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn lamb_identity_holds(seed in any::<u64>(), x in point()) {
        let u = field(seed);
        prop_assert!(lamb_identity_gap(&u, x, 0.0).unwrap().max_abs() <= 1e-10);
    }
}
