use gaussian_complexity_core::complexity::state_complexity;
use gaussian_complexity_core::lie::stabilizer_basis;
use gaussian_complexity_core::matfun::matrix_exp;
use gaussian_complexity_core::oracle::{
    check_stabilizer_geodesic, minimize_to_target, OracleOptions, CONSTRAINT_TOL,
};
use gaussian_complexity_core::phase_space::{
    apply_transformation, reference_state, GaussianTransformation, StateKind,
};
use gaussian_complexity_core::sampling::{random_stabilizer_element, random_transformation};
use gaussian_complexity_core::Tolerance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn options(segments: usize, seed: u64) -> OracleOptions {
    OracleOptions {
        segments,
        restarts: 3,
        seed,
        ..OracleOptions::default()
    }
}

#[test]
fn oracle_never_beats_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (kind, n, count) in [
        (StateKind::Boson, 1, 4),
        (StateKind::Fermion, 2, 3),
        (StateKind::Boson, 2, 1),
    ] {
        let r0 = reference_state(kind, n);
        let sigma = r0.metric_covariance(tol()).unwrap();
        for i in 0..count {
            let m = random_transformation(kind, n, 0.5, &mut rng, tol()).unwrap();
            let t = apply_transformation(&r0, &m, tol()).unwrap();
            let closed = state_complexity(&r0, &t, &sigma, tol()).unwrap();
            let sol = minimize_to_target(&r0, &t, &options(16, i), tol()).unwrap();
            assert!(sol.converged, "{kind:?} N={n} #{i}");
            assert!(
                sol.length >= closed - 1e-6,
                "{kind:?} N={n} #{i}: {} < {closed}",
                sol.length
            );
            assert!((sol.length - closed) / closed < 0.01);
        }
    }
}

#[test]
fn refining_the_path_does_not_lengthen_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for kind in [StateKind::Boson, StateKind::Fermion] {
        let n = if kind == StateKind::Boson { 1 } else { 2 };
        let r0 = reference_state(kind, n);
        let m = random_transformation(kind, n, 0.5, &mut rng, tol()).unwrap();
        let t = apply_transformation(&r0, &m, tol()).unwrap();
        let coarse = minimize_to_target(&r0, &t, &options(8, 1), tol()).unwrap();
        let fine = minimize_to_target(&r0, &t, &options(16, 1), tol()).unwrap();
        assert!(coarse.converged && fine.converged);
        assert!(
            fine.length <= coarse.length + CONSTRAINT_TOL,
            "{} > {}",
            fine.length,
            coarse.length
        );
    }
}

#[test]
fn stabilizer_class_gives_the_same_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for (kind, n) in [(StateKind::Boson, 1), (StateKind::Fermion, 2)] {
        let r0 = reference_state(kind, n);
        let sigma = r0.metric_covariance(tol()).unwrap();
        let basis = stabilizer_basis(r0.complex_structure(), &sigma).unwrap();
        let m = random_transformation(kind, n, 0.5, &mut rng, tol()).unwrap();
        let s = matrix_exp(random_stabilizer_element(&basis, 1.0, &mut rng).matrix()).unwrap();
        let ms = GaussianTransformation::linear(m.matrix() * s, kind, tol()).unwrap();
        let a = minimize_to_target(
            &r0,
            &apply_transformation(&r0, &m, tol()).unwrap(),
            &options(16, 2),
            tol(),
        )
        .unwrap();
        let b = minimize_to_target(
            &r0,
            &apply_transformation(&r0, &ms, tol()).unwrap(),
            &options(16, 2),
            tol(),
        )
        .unwrap();
        assert!(a.converged && b.converged);
        assert!((a.length - b.length).abs() / a.length < 0.01);
    }
}

#[test]
fn identical_states_cost_nothing() {
    let r0 = reference_state(StateKind::Boson, 1);
    let sol = minimize_to_target(&r0, &r0, &options(8, 0), tol()).unwrap();
    assert!(sol.converged);
    assert!(sol.length < 1e-6);
}

#[test]
fn stabilizer_generators_are_stationary() {
    for (kind, n) in [(StateKind::Boson, 2), (StateKind::Fermion, 3)] {
        let r0 = reference_state(kind, n);
        let sigma = r0.metric_covariance(tol()).unwrap();
        let basis = stabilizer_basis(r0.complex_structure(), &sigma).unwrap();
        for (i, v) in basis.elements.iter().enumerate() {
            let report = check_stabilizer_geodesic(v, &sigma, 10, i as u64, tol()).unwrap();
            assert!(
                report.all_passed(),
                "{kind:?} generator {i}: {:e}",
                report.max_derivative()
            );
        }
    }
}
