//! Pure Gaussian states and Gaussian transformations on phase space.
//!
//! A zero-mean pure state is labelled by its complex structure `J`
//! (`J² = -1`). Bosonic states may additionally carry a displacement `z`;
//! fermionic states never do. Transformations are affine maps `(v, M)`
//! with `M` symplectic (bosons) or special orthogonal (fermions), acting as
//! `J ↦ M J M⁻¹`, `z ↦ M z + v`.

use alloc::format;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::linalg::{all_finite, block_diag, ensure_dim, inverse, rel_residual, vec_finite};
use crate::{Error, Result, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Boson,
    Fermion,
}

/// Antisymmetric, non-degenerate form on a `2N`-dimensional phase space.
///
/// For bosons this is the state-independent commutator matrix `Ω^{ab}`;
/// for fermions it is the state-dependent antisymmetric covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    omega: DMatrix<f64>,
    omega_inv: DMatrix<f64>,
    n_modes: usize,
}

impl SymplecticForm {
    /// Block-diagonal `[[0, 1], [-1, 0]]` form.
    ///
    /// # Panics
    /// If `n_modes == 0`.
    pub fn standard(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "at least one mode is required");
        let block = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let omega = block_diag(&alloc::vec![block; n_modes]);
        // Ω⁻¹ = Ωᵀ = -Ω for the standard form.
        let omega_inv = -omega.clone();
        Self {
            omega,
            omega_inv,
            n_modes,
        }
    }

    pub fn new(omega: DMatrix<f64>, tol: Tolerance) -> Result<Self> {
        let dim = omega.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || omega.ncols() != dim {
            return Err(Error::InvalidSymplecticForm(format!(
                "expected a square matrix of even size, got {}x{}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        if !all_finite(&omega) {
            return Err(Error::NonFinite);
        }
        let residual = (&omega + omega.transpose()).norm() / omega.norm().max(1.0);
        if residual > tol.rel {
            return Err(Error::InvalidSymplecticForm(format!(
                "not antisymmetric (relative residual {residual:.3e})"
            )));
        }
        let omega_inv = inverse(&omega, "symplectic form")?;
        Ok(Self {
            omega,
            omega_inv,
            n_modes: dim / 2,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }

    /// `Ω_{ab}`, the matrix inverse of `Ω^{ab}`.
    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.omega_inv
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }
}

/// Symmetric positive-definite matrix `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(sigma: DMatrix<f64>, tol: Tolerance) -> Result<Self> {
        let dim = sigma.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || sigma.ncols() != dim {
            return Err(Error::InvalidCovariance(format!(
                "expected a square matrix of even size, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if !all_finite(&sigma) {
            return Err(Error::NonFinite);
        }
        let residual = rel_residual(&sigma, &sigma.transpose(), sigma.norm());
        if residual > tol.rel {
            return Err(Error::InvalidCovariance(format!(
                "not symmetric (relative residual {residual:.3e})"
            )));
        }
        let sym = crate::linalg::symmetrize(&sigma);
        let chol = sym
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidCovariance("not positive definite".into()))?;
        let sigma_inv = chol.inverse();
        Ok(Self {
            sigma: sym,
            sigma_inv,
        })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            sigma: DMatrix::identity(2 * n_modes, 2 * n_modes),
            sigma_inv: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    /// `σ⁻¹(v, v)`.
    pub fn inverse_quadratic(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.sigma_inv * v))
    }
}

/// Complex structure `J` of a pure state: `J² = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    j: DMatrix<f64>,
    kind: StateKind,
}

impl ComplexStructure {
    pub fn from_matrix(j: DMatrix<f64>, kind: StateKind, tol: Tolerance) -> Result<Self> {
        let dim = crate::linalg::ensure_square(&j)?;
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "complex structure must have even size, got {dim}"
            )));
        }
        if !all_finite(&j) {
            return Err(Error::NonFinite);
        }
        let residual = purity_residual(&j);
        if residual > tol.rel {
            return Err(Error::NotPure { residual });
        }
        Ok(Self { j, kind })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// `J⁻¹ = -J`.
    pub fn inverse(&self) -> DMatrix<f64> {
        -self.j.clone()
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn n_modes(&self) -> usize {
        self.j.nrows() / 2
    }
}

/// `‖J² + 1‖_F / max(1, ‖J‖_F²)`.
pub fn purity_residual(j: &DMatrix<f64>) -> f64 {
    let n = j.nrows();
    let sq = j * j;
    rel_residual(&sq, &(-DMatrix::identity(n, n)), j.norm_squared())
}

/// A pure Gaussian state `(J, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    j: ComplexStructure,
    z: DVector<f64>,
}

impl GaussianState {
    pub fn new(j: ComplexStructure, z: Option<DVector<f64>>) -> Result<Self> {
        let dim = j.matrix().nrows();
        let z = match z {
            None => DVector::zeros(dim),
            Some(z) => {
                if z.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: z.len(),
                    });
                }
                if !vec_finite(&z) {
                    return Err(Error::NonFinite);
                }
                if j.kind() == StateKind::Fermion && z.iter().any(|&x| x != 0.0) {
                    return Err(Error::FermionDisplacement);
                }
                z
            }
        };
        Ok(Self { j, z })
    }

    /// Builds a state from its covariance data.
    ///
    /// For bosons `covariance` is the symmetric `σ` and the standard
    /// symplectic form is used. For fermions it is the antisymmetric
    /// state-dependent covariance, and `σ` is the identity.
    pub fn from_covariance(
        kind: StateKind,
        covariance: DMatrix<f64>,
        z: Option<DVector<f64>>,
        tol: Tolerance,
    ) -> Result<Self> {
        let n_modes = covariance.nrows() / 2;
        let j = match kind {
            StateKind::Boson => {
                let sigma = CovarianceMatrix::new(covariance, tol)?;
                complex_structure_from_covariance(
                    &sigma,
                    &SymplecticForm::standard(n_modes.max(1)),
                    kind,
                    tol,
                )?
            }
            StateKind::Fermion => {
                let omega = SymplecticForm::new(covariance, tol)?;
                complex_structure_from_covariance(
                    &CovarianceMatrix::identity(omega.n_modes()),
                    &omega,
                    kind,
                    tol,
                )?
            }
        };
        Self::new(j, z)
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn j(&self) -> &DMatrix<f64> {
        self.j.matrix()
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn kind(&self) -> StateKind {
        self.j.kind()
    }

    pub fn n_modes(&self) -> usize {
        self.j.n_modes()
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes()
    }

    pub fn is_displaced(&self) -> bool {
        self.z.iter().any(|&x| x != 0.0)
    }

    /// The same complex structure with a new displacement.
    pub fn with_displacement(&self, z: DVector<f64>) -> Result<Self> {
        Self::new(self.j.clone(), Some(z))
    }

    /// The symmetric covariance `σ` this state defines.
    ///
    /// Bosons: `σ = -J Ω` in the standard basis. Fermions: the identity.
    pub fn covariance(&self) -> DMatrix<f64> {
        match self.kind() {
            StateKind::Boson => {
                let omega = SymplecticForm::standard(self.n_modes());
                crate::linalg::symmetrize(&(-(self.j() * omega.matrix())))
            }
            StateKind::Fermion => DMatrix::identity(self.dim(), self.dim()),
        }
    }

    /// Covariance as a validated [`CovarianceMatrix`], the `σ_R` of the
    /// right-invariant metric when this state is the reference.
    pub fn metric_covariance(&self, tol: Tolerance) -> Result<CovarianceMatrix> {
        match self.kind() {
            StateKind::Boson => CovarianceMatrix::new(self.covariance(), tol),
            StateKind::Fermion => Ok(CovarianceMatrix::identity(self.n_modes())),
        }
    }
}

/// Affine Gaussian transformation `(v, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTransformation {
    v: DVector<f64>,
    m: DMatrix<f64>,
    kind: StateKind,
}

impl GaussianTransformation {
    pub fn new(v: DVector<f64>, m: DMatrix<f64>, kind: StateKind, tol: Tolerance) -> Result<Self> {
        let dim = crate::linalg::ensure_square(&m)?;
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "transformation must act on an even-dimensional phase space, got {dim}"
            )));
        }
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if !all_finite(&m) || !vec_finite(&v) {
            return Err(Error::NonFinite);
        }
        let t = Self { v, m, kind };
        if kind == StateKind::Fermion && t.v.iter().any(|&x| x != 0.0) {
            return Err(Error::FermionDisplacement);
        }
        let residual = t.group_residual();
        if residual > tol.rel {
            return Err(Error::GroupViolation { residual });
        }
        if kind == StateKind::Fermion && t.m.determinant() <= 0.0 {
            return Err(Error::GroupViolation {
                residual: (t.m.determinant() - 1.0).abs(),
            });
        }
        Ok(t)
    }

    /// Linear part only, zero displacement.
    pub fn linear(m: DMatrix<f64>, kind: StateKind, tol: Tolerance) -> Result<Self> {
        let dim = m.nrows();
        Self::new(DVector::zeros(dim), m, kind, tol)
    }

    pub fn identity(kind: StateKind, n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self {
            v: DVector::zeros(dim),
            m: DMatrix::identity(dim, dim),
            kind,
        }
    }

    /// Pure bosonic displacement `(v, 1)`.
    pub fn displacement(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "displacement must have even length, got {}",
                v.len()
            )));
        }
        if !vec_finite(&v) {
            return Err(Error::NonFinite);
        }
        let dim = v.len();
        Ok(Self {
            v,
            m: DMatrix::identity(dim, dim),
            kind: StateKind::Boson,
        })
    }

    /// Direct sum of independent transformations, one per block of modes.
    pub fn block_diagonal(parts: &[GaussianTransformation]) -> Result<Self> {
        let kind = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no blocks given".into()))?
            .kind;
        if parts.iter().any(|p| p.kind != kind) {
            return Err(Error::KindMismatch);
        }
        let blocks: alloc::vec::Vec<_> = parts.iter().map(|p| p.m.clone()).collect();
        let m = block_diag(&blocks);
        let v = DVector::from_iterator(m.nrows(), parts.iter().flat_map(|p| p.v.iter().copied()));
        Ok(Self { v, m, kind })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn displacement_vector(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// `M⁻¹` from the group structure, no general inversion.
    ///
    /// Bosons: `Ω Mᵀ Ω⁻¹`. Fermions: `Mᵀ`.
    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        match self.kind {
            StateKind::Boson => {
                let omega = SymplecticForm::standard(self.dim() / 2);
                omega.matrix() * self.m.transpose() * omega.inverse()
            }
            StateKind::Fermion => self.m.transpose(),
        }
    }

    /// `‖M Ω Mᵀ - Ω‖` (bosons) or `‖M Mᵀ - 1‖` (fermions), relative to `‖M‖²`.
    pub fn group_residual(&self) -> f64 {
        let dim = self.dim();
        match self.kind {
            StateKind::Boson => {
                let omega = SymplecticForm::standard(dim / 2);
                let lhs = &self.m * omega.matrix() * self.m.transpose();
                rel_residual(&lhs, omega.matrix(), self.m.norm_squared())
            }
            StateKind::Fermion => {
                let lhs = &self.m * self.m.transpose();
                rel_residual(&lhs, &DMatrix::identity(dim, dim), self.m.norm_squared())
            }
        }
    }

    /// Semidirect-product composition: `self ∘ first = (M₂v₁ + v₂, M₂M₁)`.
    pub fn compose(&self, first: &GaussianTransformation) -> Result<Self> {
        if self.kind != first.kind {
            return Err(Error::KindMismatch);
        }
        if self.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: first.dim(),
            });
        }
        Ok(Self {
            v: &self.m * &first.v + &self.v,
            m: &self.m * &first.m,
            kind: self.kind,
        })
    }
}

pub fn standard_symplectic_form(n_modes: usize) -> SymplecticForm {
    SymplecticForm::standard(n_modes)
}

/// Reference state with `σ_R = 1` and `z = 0`; its complex structure is the
/// block-diagonal `[[0, 1], [-1, 0]]`.
pub fn reference_state(kind: StateKind, n_modes: usize) -> GaussianState {
    let omega = SymplecticForm::standard(n_modes);
    // -σΩ⁻¹ = -Ω⁻¹ = Ω for bosons and Ωσ⁻¹ = Ω for fermions.
    let j = ComplexStructure {
        j: omega.matrix().clone(),
        kind,
    };
    GaussianState {
        z: DVector::zeros(2 * n_modes),
        j,
    }
}

/// `J = -σ Ω⁻¹` (bosons) or `J = Ω σ⁻¹` (fermions).
pub fn complex_structure_from_covariance(
    sigma: &CovarianceMatrix,
    omega: &SymplecticForm,
    kind: StateKind,
    tol: Tolerance,
) -> Result<ComplexStructure> {
    ensure_dim(sigma.matrix(), omega.dim())?;
    let j = match kind {
        StateKind::Boson => -(sigma.matrix() * omega.inverse()),
        StateKind::Fermion => omega.matrix() * sigma.inverse(),
    };
    ComplexStructure::from_matrix(j, kind, tol)
}

/// `(J, z) ↦ (M J M⁻¹, M z + v)`.
pub fn apply_transformation(
    state: &GaussianState,
    t: &GaussianTransformation,
    tol: Tolerance,
) -> Result<GaussianState> {
    if state.kind() != t.kind() {
        return Err(Error::KindMismatch);
    }
    if state.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: t.dim(),
        });
    }
    let residual = t.group_residual();
    if residual > tol.rel {
        return Err(Error::GroupViolation { residual });
    }
    let j = t.matrix() * state.j() * t.inverse_matrix();
    let z = t.matrix() * state.displacement() + t.displacement_vector();
    let j = ComplexStructure::from_matrix(j, state.kind(), tol)?;
    GaussianState::new(j, Some(z))
}

/// Single-mode squeezing `S(r, φ) = exp(r [[cos φ, sin φ], [sin φ, -cos φ]])`.
///
/// The generator squares to `r²·1`, so the exponential is
/// `cosh r · 1 + sinh r · [[cos φ, sin φ], [sin φ, -cos φ]]`.
pub fn single_mode_squeezing(r: f64, phi: f64) -> Result<GaussianTransformation> {
    if !(r.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite);
    }
    if r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squeezing magnitude must be nonnegative, got {r}"
        )));
    }
    let (s, c) = phi.sin_cos();
    let (ch, sh) = (r.cosh(), r.sinh());
    let m = DMatrix::from_row_slice(2, 2, &[ch + sh * c, sh * s, sh * s, ch - sh * c]);
    Ok(GaussianTransformation {
        v: DVector::zeros(2),
        m,
        kind: StateKind::Boson,
    })
}

/// Independent single-mode squeezings `S(r₁, φ₁) ⊕ … ⊕ S(r_N, φ_N)`.
pub fn multimode_squeezing(params: &[(f64, f64)]) -> Result<GaussianTransformation> {
    let parts = params
        .iter()
        .map(|&(r, phi)| single_mode_squeezing(r, phi))
        .collect::<Result<alloc::vec::Vec<_>>>()?;
    GaussianTransformation::block_diagonal(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn standard_form_single_mode() {
        let omega = standard_symplectic_form(1);
        assert_eq!(
            omega.matrix(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
    }

    #[test]
    fn standard_form_is_block_diagonal_and_antisymmetric() {
        for n in [2, 3] {
            let omega = standard_symplectic_form(n);
            let m = omega.matrix();
            assert_eq!((m + m.transpose()).norm(), 0.0);
            assert_relative_eq!(m.determinant().abs(), 1.0, epsilon = 1e-14);
            for i in 0..2 * n {
                for k in 0..2 * n {
                    if i / 2 != k / 2 {
                        assert_eq!(m[(i, k)], 0.0);
                    }
                }
            }
            assert_eq!(m[(2, 3)], 1.0);
            assert_eq!(m[(3, 2)], -1.0);
        }
    }

    #[test]
    fn reference_states() {
        let jr = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let b = reference_state(StateKind::Boson, 1);
        assert_eq!(b.j(), &jr);
        assert_eq!(b.displacement(), &DVector::zeros(2));
        let f = reference_state(StateKind::Fermion, 1);
        assert_eq!(f.j(), &jr);
        assert!(!f.is_displaced());
        let b2 = reference_state(StateKind::Boson, 2);
        assert!(purity_residual(b2.j()) < 1e-15);
        assert_eq!(b2.covariance(), DMatrix::identity(4, 4));
    }

    #[test]
    fn complex_structure_from_identity_covariance() {
        let sigma = CovarianceMatrix::identity(1);
        let j = complex_structure_from_covariance(
            &sigma,
            &SymplecticForm::standard(1),
            StateKind::Boson,
            tol(),
        )
        .unwrap();
        assert_eq!(
            j.matrix(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
        // r = 0 squeezed covariance is the same state.
        let r: f64 = 0.0;
        let sq = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![
            (2.0 * r).exp(),
            (-2.0 * r).exp()
        ]));
        let j0 = complex_structure_from_covariance(
            &CovarianceMatrix::new(sq, tol()).unwrap(),
            &SymplecticForm::standard(1),
            StateKind::Boson,
            tol(),
        )
        .unwrap();
        assert_eq!(j0.matrix(), j.matrix());
    }

    #[test]
    fn thermal_covariance_is_rejected() {
        let sigma = CovarianceMatrix::new(DMatrix::identity(2, 2) * 2.0, tol()).unwrap();
        let err = complex_structure_from_covariance(
            &sigma,
            &SymplecticForm::standard(1),
            StateKind::Boson,
            tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotPure { .. }));
    }

    #[test]
    fn non_positive_covariance_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m, tol()),
            Err(Error::InvalidCovariance(_))
        ));
    }

    #[test]
    fn fermion_displacement_is_rejected() {
        let r = reference_state(StateKind::Fermion, 1);
        assert_eq!(
            r.with_displacement(DVector::from_vec(alloc::vec![1.0, 0.0])),
            Err(Error::FermionDisplacement)
        );
    }

    #[test]
    fn squeezing_special_cases() {
        for phi in [0.0, 1.0, 4.0] {
            let s = single_mode_squeezing(0.0, phi).unwrap();
            assert_relative_eq!(s.matrix(), &DMatrix::identity(2, 2), epsilon = 1e-15);
        }
        let r = 0.7_f64;
        let s = single_mode_squeezing(r, 0.0).unwrap();
        assert_relative_eq!(s.matrix()[(0, 0)], r.exp(), epsilon = 1e-14);
        assert_relative_eq!(s.matrix()[(1, 1)], (-r).exp(), epsilon = 1e-14);
        assert_eq!(s.matrix()[(0, 1)], 0.0);
        let s = single_mode_squeezing(r, PI / 2.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[r.cosh(), r.sinh(), r.sinh(), r.cosh()]);
        assert_relative_eq!(s.matrix(), &expected, epsilon = 1e-14);
        assert!(s.group_residual() < 1e-15);
        assert!(single_mode_squeezing(-0.1, 0.0).is_err());
    }

    #[test]
    fn apply_identity_and_displacement() {
        let refb = reference_state(StateKind::Boson, 1);
        let same = apply_transformation(
            &refb,
            &GaussianTransformation::identity(StateKind::Boson, 1),
            tol(),
        )
        .unwrap();
        assert_eq!(same, refb);
        let shifted = apply_transformation(
            &refb,
            &GaussianTransformation::displacement(DVector::from_vec(alloc::vec![1.0, 0.0]))
                .unwrap(),
            tol(),
        )
        .unwrap();
        assert_eq!(shifted.j(), refb.j());
        assert_eq!(shifted.displacement().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn apply_squeezing_gives_squeezed_complex_structure() {
        let r = 0.4_f64;
        let refb = reference_state(StateKind::Boson, 1);
        let out =
            apply_transformation(&refb, &single_mode_squeezing(r, 0.0).unwrap(), tol()).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[0.0, (2.0 * r).exp(), -(-2.0 * r).exp(), 0.0]);
        assert_relative_eq!(out.j(), &expected, epsilon = 1e-14);
    }

    #[test]
    fn apply_rejects_mismatches() {
        let refb = reference_state(StateKind::Boson, 1);
        let f = GaussianTransformation::identity(StateKind::Fermion, 1);
        assert_eq!(
            apply_transformation(&refb, &f, tol()),
            Err(Error::KindMismatch)
        );
        let bad = GaussianTransformation {
            v: DVector::zeros(2),
            m: DMatrix::identity(2, 2) * 2.0,
            kind: StateKind::Boson,
        };
        assert!(matches!(
            apply_transformation(&refb, &bad, tol()),
            Err(Error::GroupViolation { .. })
        ));
    }

    #[test]
    fn fermion_transformation_requires_special_orthogonal() {
        let reflect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            GaussianTransformation::linear(reflect, StateKind::Fermion, tol()),
            Err(Error::GroupViolation { .. })
        ));
        let (s, c) = 0.3_f64.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!(GaussianTransformation::linear(rot, StateKind::Fermion, tol()).is_ok());
    }

    #[test]
    fn fermion_state_from_antisymmetric_covariance() {
        let gamma = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let s =
            GaussianState::from_covariance(StateKind::Fermion, gamma.clone(), None, tol()).unwrap();
        assert_eq!(s.j(), &gamma);
        let not_pure = gamma * 0.5;
        assert!(matches!(
            GaussianState::from_covariance(StateKind::Fermion, not_pure, None, tol()),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn boson_covariance_round_trip() {
        let r = 0.3_f64;
        let sigma = DMatrix::from_row_slice(2, 2, &[(2.0 * r).exp(), 0.0, 0.0, (-2.0 * r).exp()]);
        let s =
            GaussianState::from_covariance(StateKind::Boson, sigma.clone(), None, tol()).unwrap();
        assert_relative_eq!(s.covariance(), sigma, epsilon = 1e-14);
    }
}
