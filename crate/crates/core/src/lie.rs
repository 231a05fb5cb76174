//! Lie-algebra machinery at the identity of the Gaussian group.
//!
//! `sp(2N, ℝ)` is enumerated as `Ω·S` over the symmetric elementary
//! matrices `S`; `so(2N)` over the elementary antisymmetric matrices. The
//! right-invariant metric at the identity is
//! `g₁(V, W) = ½ Tr(V σ_R Wᵀ σ_R⁻¹)`.

use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::linalg::{all_finite, ensure_dim};
use crate::phase_space::{ComplexStructure, CovarianceMatrix, StateKind, SymplecticForm};
use crate::{Error, Result, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LieAlgebra {
    /// `sp(2N, ℝ)`, bosons.
    Symplectic { n_modes: usize },
    /// `so(2N)`, fermions.
    Orthogonal { n_modes: usize },
}

impl LieAlgebra {
    pub fn for_kind(kind: StateKind, n_modes: usize) -> Self {
        match kind {
            StateKind::Boson => LieAlgebra::Symplectic { n_modes },
            StateKind::Fermion => LieAlgebra::Orthogonal { n_modes },
        }
    }

    pub fn n_modes(&self) -> usize {
        match *self {
            LieAlgebra::Symplectic { n_modes } | LieAlgebra::Orthogonal { n_modes } => n_modes,
        }
    }

    /// Size `2N` of the matrices.
    pub fn matrix_dim(&self) -> usize {
        2 * self.n_modes()
    }

    /// `N(2N+1)` for `sp`, `N(2N-1)` for `so`.
    pub fn dim(&self) -> usize {
        let n = self.n_modes();
        match self {
            LieAlgebra::Symplectic { .. } => n * (2 * n + 1),
            LieAlgebra::Orthogonal { .. } => n * (2 * n - 1),
        }
    }

    /// `‖VΩ + ΩVᵀ‖` or `‖V + Vᵀ‖`, relative to `max(1, ‖V‖)`.
    pub fn membership_residual(&self, v: &DMatrix<f64>) -> f64 {
        let scale = v.norm().max(1.0);
        match self {
            LieAlgebra::Symplectic { n_modes } => {
                let omega = SymplecticForm::standard(*n_modes);
                let o = omega.matrix();
                (v * o + o * v.transpose()).norm() / scale
            }
            LieAlgebra::Orthogonal { .. } => (v + v.transpose()).norm() / scale,
        }
    }

    /// Orthogonal (Frobenius) projection of an arbitrary matrix onto the
    /// algebra: `Ω·sym(Ω⁻¹M)` or `(M - Mᵀ)/2`.
    pub fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            LieAlgebra::Symplectic { n_modes } => {
                let omega = SymplecticForm::standard(*n_modes);
                let s = omega.inverse() * m;
                omega.matrix() * crate::linalg::symmetrize(&s)
            }
            LieAlgebra::Orthogonal { .. } => (m - m.transpose()) * 0.5,
        }
    }

    /// Canonical basis, in the order used by [`Self::coordinates`].
    pub fn basis(&self) -> Vec<DMatrix<f64>> {
        (0..self.dim())
            .map(|k| {
                let mut c = alloc::vec![0.0; self.dim()];
                c[k] = 1.0;
                self.from_coordinates(&c)
            })
            .collect()
    }

    /// Builds `Σ c_k B_k` from canonical coordinates.
    ///
    /// # Panics
    /// If `coords.len() != self.dim()`.
    pub fn from_coordinates(&self, coords: &[f64]) -> DMatrix<f64> {
        assert_eq!(coords.len(), self.dim(), "coordinate length");
        let d = self.matrix_dim();
        let mut k = 0;
        match self {
            LieAlgebra::Symplectic { n_modes } => {
                let mut s = DMatrix::zeros(d, d);
                for i in 0..d {
                    for j in i..d {
                        s[(i, j)] = coords[k];
                        s[(j, i)] = coords[k];
                        k += 1;
                    }
                }
                SymplecticForm::standard(*n_modes).matrix() * s
            }
            LieAlgebra::Orthogonal { .. } => {
                let mut a = DMatrix::zeros(d, d);
                for i in 0..d {
                    for j in (i + 1)..d {
                        a[(i, j)] = coords[k];
                        a[(j, i)] = -coords[k];
                        k += 1;
                    }
                }
                a
            }
        }
    }

    /// Canonical coordinates of an algebra element (inverse of
    /// [`Self::from_coordinates`] on the algebra).
    pub fn coordinates(&self, v: &DMatrix<f64>) -> Vec<f64> {
        let d = self.matrix_dim();
        let mut out = Vec::with_capacity(self.dim());
        match self {
            LieAlgebra::Symplectic { n_modes } => {
                let s = SymplecticForm::standard(*n_modes).inverse() * v;
                for i in 0..d {
                    for j in i..d {
                        out.push(0.5 * (s[(i, j)] + s[(j, i)]));
                    }
                }
            }
            LieAlgebra::Orthogonal { .. } => {
                for i in 0..d {
                    for j in (i + 1)..d {
                        out.push(0.5 * (v[(i, j)] - v[(j, i)]));
                    }
                }
            }
        }
        out
    }
}

/// A matrix known to lie in `sp(2N, ℝ)` or `so(2N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraElement {
    v: DMatrix<f64>,
    algebra: LieAlgebra,
}

impl LieAlgebraElement {
    pub fn new(v: DMatrix<f64>, algebra: LieAlgebra, tol: Tolerance) -> Result<Self> {
        ensure_dim(&v, algebra.matrix_dim())?;
        if !all_finite(&v) {
            return Err(Error::NonFinite);
        }
        let residual = algebra.membership_residual(&v);
        if residual > tol.rel {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(Self { v, algebra })
    }

    pub(crate) fn new_unchecked(v: DMatrix<f64>, algebra: LieAlgebra) -> Self {
        Self { v, algebra }
    }

    pub fn zero(algebra: LieAlgebra) -> Self {
        let d = algebra.matrix_dim();
        Self {
            v: DMatrix::zeros(d, d),
            algebra,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.v
    }

    pub fn algebra(&self) -> LieAlgebra {
        self.algebra
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            v: &self.v * s,
            algebra: self.algebra,
        }
    }
}

/// `½ Tr(V σ Wᵀ σ⁻¹)` on raw matrices.
pub fn metric_inner(v: &DMatrix<f64>, w: &DMatrix<f64>, sigma: &CovarianceMatrix) -> f64 {
    0.5 * (v * sigma.matrix() * w.transpose() * sigma.inverse()).trace()
}

/// `√g₁(V, V)`.
pub fn metric_norm(v: &DMatrix<f64>, sigma: &CovarianceMatrix) -> f64 {
    metric_inner(v, v, sigma).max(0.0).sqrt()
}

/// Right-invariant inner product at the identity.
pub fn inner_product_identity(
    v: &LieAlgebraElement,
    w: &LieAlgebraElement,
    sigma_r: &CovarianceMatrix,
) -> Result<f64> {
    let d = sigma_r.dim();
    ensure_dim(v.matrix(), d)?;
    ensure_dim(w.matrix(), d)?;
    if v.algebra() != w.algebra() {
        return Err(Error::KindMismatch);
    }
    Ok(metric_inner(v.matrix(), w.matrix(), sigma_r))
}

/// `g₁`-orthonormal bases of `sta(J_R)` and its orthogonal complement.
#[derive(Debug, Clone)]
pub struct StabilizerBasis {
    pub algebra: LieAlgebra,
    pub elements: Vec<LieAlgebraElement>,
    pub complement: Vec<LieAlgebraElement>,
}

impl StabilizerBasis {
    pub fn stabilizer_dim(&self) -> usize {
        self.elements.len()
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.len()
    }
}

/// Subtracts the `g₁`-projection onto each (orthonormal) vector, twice.
fn orthogonalize(
    mut v: DMatrix<f64>,
    against: &[LieAlgebraElement],
    sigma: &CovarianceMatrix,
) -> DMatrix<f64> {
    for _ in 0..2 {
        for e in against {
            let c = metric_inner(&v, e.matrix(), sigma);
            v -= e.matrix() * c;
        }
    }
    v
}

/// Splits the algebra into `sta(J_R) ⊕ sta_⊥(J_R)`.
///
/// The stabilizer is the null space of `V ↦ [V, J_R]` over the canonical
/// basis; both parts are orthonormalized under `g₁` by modified
/// Gram–Schmidt with a re-orthogonalization pass.
pub fn stabilizer_basis(
    j_r: &ComplexStructure,
    sigma_r: &CovarianceMatrix,
) -> Result<StabilizerBasis> {
    let algebra = LieAlgebra::for_kind(j_r.kind(), j_r.n_modes());
    let d = algebra.matrix_dim();
    ensure_dim(sigma_r.matrix(), d)?;
    let basis = algebra.basis();
    let j = j_r.matrix();

    let mut commutators = DMatrix::zeros(d * d, basis.len());
    for (k, b) in basis.iter().enumerate() {
        let c = b * j - j * b;
        commutators.column_mut(k).copy_from_slice(c.as_slice());
    }
    // Pad to a square system so the SVD returns a full right basis.
    let rows = commutators.nrows().max(basis.len());
    let mut padded = DMatrix::zeros(rows, basis.len());
    padded
        .view_mut((0, 0), (commutators.nrows(), basis.len()))
        .copy_from(&commutators);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::Singular)?;
    let smax = svd.singular_values.max().max(1.0);

    let mut elements: Vec<LieAlgebraElement> = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-9 * smax {
            continue;
        }
        let coeffs = v_t.row(k);
        let mut m = DMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(&basis) {
            m += b * *c;
        }
        let m = orthogonalize(m, &elements, sigma_r);
        let norm = metric_norm(&m, sigma_r);
        if norm > 1e-12 {
            elements.push(LieAlgebraElement::new_unchecked(m / norm, algebra));
        }
    }

    let target = algebra.dim() - elements.len();
    let mut complement: Vec<LieAlgebraElement> = Vec::with_capacity(target);
    for b in &basis {
        if complement.len() == target {
            break;
        }
        let scale = metric_norm(b, sigma_r);
        let m = orthogonalize(b.clone(), &elements, sigma_r);
        let m = orthogonalize(m, &complement, sigma_r);
        let norm = metric_norm(&m, sigma_r);
        if norm > 1e-8 * scale {
            complement.push(LieAlgebraElement::new_unchecked(m / norm, algebra));
        }
    }
    if complement.len() != target {
        return Err(Error::Singular);
    }

    Ok(StabilizerBasis {
        algebra,
        elements,
        complement,
    })
}

/// `v` minus its `g₁`-orthogonal projection onto the stabilizer.
pub fn project_onto_complement(
    v: &LieAlgebraElement,
    basis: &StabilizerBasis,
    sigma_r: &CovarianceMatrix,
) -> Result<LieAlgebraElement> {
    if v.algebra() != basis.algebra {
        return Err(Error::KindMismatch);
    }
    ensure_dim(sigma_r.matrix(), basis.algebra.matrix_dim())?;
    let mut out = v.matrix().clone();
    for e in &basis.elements {
        let c = metric_inner(&out, e.matrix(), sigma_r);
        out -= e.matrix() * c;
    }
    Ok(LieAlgebraElement::new_unchecked(out, v.algebra()))
}
