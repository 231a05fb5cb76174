//! Seeded random algebra elements and states, for tests and the oracle.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::lie::{LieAlgebra, LieAlgebraElement, StabilizerBasis};
use crate::matfun::matrix_exp;
use crate::phase_space::{
    apply_transformation, reference_state, GaussianState, GaussianTransformation, StateKind,
};
use crate::{Result, Tolerance};

/// Algebra element with canonical coordinates uniform in `[-scale, scale]`.
pub fn random_algebra_element<R: Rng + ?Sized>(
    algebra: LieAlgebra,
    scale: f64,
    rng: &mut R,
) -> LieAlgebraElement {
    let coords: Vec<f64> = (0..algebra.dim())
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    LieAlgebraElement::new_unchecked(algebra.from_coordinates(&coords), algebra)
}

/// Random combination of the stabilizer generators.
pub fn random_stabilizer_element<R: Rng + ?Sized>(
    basis: &StabilizerBasis,
    scale: f64,
    rng: &mut R,
) -> LieAlgebraElement {
    let d = basis.algebra.matrix_dim();
    let mut m = DMatrix::zeros(d, d);
    for e in &basis.elements {
        m += e.matrix() * rng.random_range(-scale..=scale);
    }
    LieAlgebraElement::new_unchecked(m, basis.algebra)
}

/// `exp(V)` for a random algebra element `V`.
pub fn random_transformation<R: Rng + ?Sized>(
    kind: StateKind,
    n_modes: usize,
    scale: f64,
    rng: &mut R,
    tol: Tolerance,
) -> Result<GaussianTransformation> {
    let v = random_algebra_element(LieAlgebra::for_kind(kind, n_modes), scale, rng);
    GaussianTransformation::linear(matrix_exp(v.matrix())?, kind, tol)
}

/// Zero-displacement pure state `M J_R M⁻¹` for a random `M = exp(V)`.
pub fn random_state<R: Rng + ?Sized>(
    kind: StateKind,
    n_modes: usize,
    scale: f64,
    rng: &mut R,
    tol: Tolerance,
) -> Result<GaussianState> {
    let m = random_transformation(kind, n_modes, scale, rng, tol)?;
    apply_transformation(&reference_state(kind, n_modes), &m, tol)
}

/// Vector with entries uniform in `[-scale, scale]`.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.random_range(-scale..=scale)))
}
