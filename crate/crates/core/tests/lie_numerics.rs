use gaussian_complexity_core::complexity::relative_complex_structure;
use gaussian_complexity_core::lie::{metric_inner, stabilizer_basis, LieAlgebra};
use gaussian_complexity_core::matfun::{matrix_exp, matrix_log_principal};
use gaussian_complexity_core::phase_space::{reference_state, CovarianceMatrix, StateKind};
use gaussian_complexity_core::sampling::{random_algebra_element, random_state};
use gaussian_complexity_core::{DMatrix, Tolerance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn algebra_strategy() -> impl Strategy<Value = LieAlgebra> {
    (1usize..=3, any::<bool>()).prop_map(|(n, boson)| {
        if boson {
            LieAlgebra::Symplectic { n_modes: n }
        } else {
            LieAlgebra::Orthogonal { n_modes: n }
        }
    })
}

fn group_residual(algebra: LieAlgebra, m: &DMatrix<f64>) -> f64 {
    let d = algebra.matrix_dim();
    match algebra {
        LieAlgebra::Symplectic { n_modes } => {
            let omega = gaussian_complexity_core::phase_space::standard_symplectic_form(n_modes);
            (m * omega.matrix() * m.transpose() - omega.matrix()).norm()
        }
        LieAlgebra::Orthogonal { .. } => {
            let ortho = (m * m.transpose() - DMatrix::identity(d, d)).norm();
            ortho + (m.determinant() - 1.0).abs()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_log_round_trip(algebra in algebra_strategy(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = random_algebra_element(algebra, 1.0, &mut rng).into_matrix();
        let norm = v.norm();
        if norm > 2.0 {
            v *= 2.0 / norm;
        }
        // Norm at most 2 keeps the spectrum inside the principal strip.
        let back = matrix_log_principal(&matrix_exp(&v).unwrap(), tol()).unwrap();
        prop_assert!((back - &v).norm() < 1e-8, "round trip failed for {}", v);
    }

    #[test]
    fn exponentials_stay_in_the_group(algebra in algebra_strategy(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_algebra_element(algebra, 1.5, &mut rng);
        let m = matrix_exp(v.matrix()).unwrap();
        prop_assert!(group_residual(algebra, &m) < 1e-9 * (1.0 + m.norm() * m.norm()));
    }

    #[test]
    fn generator_is_orthogonal_to_the_stabilizer(boson: bool, n in 1usize..=3, seed: u64) {
        let kind = if boson { StateKind::Boson } else { StateKind::Fermion };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r0 = reference_state(kind, n);
        let sigma = r0.metric_covariance(tol()).unwrap();
        let basis = stabilizer_basis(r0.complex_structure(), &sigma).unwrap();
        let t = random_state(kind, n, 0.6, &mut rng, tol()).unwrap();
        let gen = relative_complex_structure(&r0, &t, tol()).unwrap().generator();
        for v in &basis.elements {
            prop_assert!(metric_inner(gen.matrix(), v.matrix(), &sigma).abs() < 1e-9);
        }
    }
}

#[test]
fn metric_is_positive_definite_on_basis() {
    for n in 1..=3 {
        for algebra in [
            LieAlgebra::Symplectic { n_modes: n },
            LieAlgebra::Orthogonal { n_modes: n },
        ] {
            let sigma = CovarianceMatrix::identity(n);
            for b in algebra.basis() {
                assert!(metric_inner(&b, &b, &sigma) > 0.0);
            }
        }
    }
}

#[test]
fn stabilizer_and_complement_span_the_algebra() {
    for n in 1..=3 {
        for kind in [StateKind::Boson, StateKind::Fermion] {
            let r0 = reference_state(kind, n);
            let sigma = r0.metric_covariance(tol()).unwrap();
            let basis = stabilizer_basis(r0.complex_structure(), &sigma).unwrap();
            assert_eq!(
                basis.stabilizer_dim() + basis.complement_dim(),
                LieAlgebra::for_kind(kind, n).dim()
            );
            for v in &basis.elements {
                let comm = r0.j() * v.matrix() - v.matrix() * r0.j();
                assert!(comm.norm() < 1e-12);
            }
        }
    }
}
