use gaussian_complexity_core::complexity::state_complexity;
use gaussian_complexity_core::phase_space::{
    apply_transformation, purity_residual, reference_state, single_mode_squeezing,
    CovarianceMatrix, GaussianTransformation, StateKind,
};
use gaussian_complexity_core::sampling::{random_transformation, random_vector};
use gaussian_complexity_core::{DMatrix, Tolerance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn kind_strategy() -> impl Strategy<Value = StateKind> {
    prop_oneof![Just(StateKind::Boson), Just(StateKind::Fermion)]
}

fn random_affine(kind: StateKind, n: usize, rng: &mut ChaCha8Rng) -> GaussianTransformation {
    let m = random_transformation(kind, n, 0.5, rng, tol()).unwrap();
    match kind {
        StateKind::Boson => GaussianTransformation::new(
            random_vector(2 * n, 1.0, rng),
            m.matrix().clone(),
            kind,
            tol(),
        )
        .unwrap(),
        StateKind::Fermion => m,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_transformations_are_group_elements(kind in kind_strategy(), n in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_affine(kind, n, &mut rng);
        prop_assert!(t.group_residual() < 1e-10);
    }

    #[test]
    fn transformations_preserve_purity(kind in kind_strategy(), n in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = apply_transformation(&reference_state(kind, n), &random_affine(kind, n, &mut rng), tol()).unwrap();
        let s = apply_transformation(&s, &random_affine(kind, n, &mut rng), tol()).unwrap();
        prop_assert!(purity_residual(s.j()) < 1e-10);
    }

    #[test]
    fn composition_matches_sequential_application(kind in kind_strategy(), n in 1usize..=2, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = reference_state(kind, n);
        let t1 = random_affine(kind, n, &mut rng);
        let t2 = random_affine(kind, n, &mut rng);
        let sequential = apply_transformation(&apply_transformation(&s, &t1, tol()).unwrap(), &t2, tol()).unwrap();
        let composed = apply_transformation(&s, &t2.compose(&t1).unwrap(), tol()).unwrap();
        prop_assert!((sequential.j() - composed.j()).norm() < 1e-10);
        prop_assert!((sequential.displacement() - composed.displacement()).norm() < 1e-10);
    }

    #[test]
    fn squeezing_magnitude_is_the_complexity(r in 0.0f64..4.0, phi in 0.0f64..6.3) {
        let r0 = reference_state(StateKind::Boson, 1);
        let t = apply_transformation(&r0, &single_mode_squeezing(r, phi).unwrap(), tol()).unwrap();
        let c = state_complexity(&r0, &t, &CovarianceMatrix::identity(1), tol()).unwrap();
        prop_assert!((c - r).abs() < 1e-10 * (1.0 + r));
    }
}

#[test]
fn composition_follows_the_semidirect_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t1 = random_affine(StateKind::Boson, 2, &mut rng);
    let t2 = random_affine(StateKind::Boson, 2, &mut rng);
    let c = t2.compose(&t1).unwrap();
    let v = t2.matrix() * t1.displacement_vector() + t2.displacement_vector();
    let m: DMatrix<f64> = t2.matrix() * t1.matrix();
    assert!((c.displacement_vector() - v).norm() < 1e-12);
    assert!((c.matrix() - m).norm() < 1e-12);
}
