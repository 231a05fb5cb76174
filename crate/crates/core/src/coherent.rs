//! Complexity and optimal circuits for displaced bosonic targets.
//!
//! The circuit is `M(τ) = exp(τ log(Δ)/2)` together with
//! `z(τ) = (M(τ) - 1)(M(1) - 1)⁻¹ z_T`, and the complexity is
//! `½ √(Tr|log Δ|²/2 + z_Tᵀ G z_T)` with `G = Nᵀ σ_R⁻¹ N` and
//! `N = log Δ (√Δ - 1)⁻¹`.
//!
//! `N` and `z(τ)` are evaluated on the eigenbasis of `Δ` through the scalar
//! functions `ℓ / (e^{ℓ/2} - 1)` and `(e^{τℓ/2} - 1)/(e^{ℓ/2} - 1)`, whose
//! removable singularities at `ℓ = 0` are filled with their limits `2` and
//! `τ`. Unit eigenvalues of `√Δ` (for instance `Δ = 1`, or a target that
//! only squeezes some of the modes) therefore need no special treatment.

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::complexity::{relative_complex_structure, RelativeComplexStructure};
use crate::linalg::{ensure_dim, symmetrize};
use crate::phase_space::{
    CovarianceMatrix, GaussianState, GaussianTransformation, StateKind, SymplecticForm,
};
use crate::{Error, Result, Tolerance};

/// Below this `‖Δ - 1‖` the analytic identity limit is used directly.
pub const NEAR_IDENTITY: f64 = 1e-8;

fn n_factor(l: f64) -> f64 {
    if l.abs() < 1e-300 {
        2.0
    } else {
        l / (0.5 * l).exp_m1()
    }
}

fn path_factor(l: f64, tau: f64) -> f64 {
    if l.abs() < 1e-300 {
        tau
    } else {
        (0.5 * tau * l).exp_m1() / (0.5 * l).exp_m1()
    }
}

/// Data of the optimal circuit from an undisplaced reference to a displaced
/// target.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentGeodesic {
    delta: RelativeComplexStructure,
    n_matrix: DMatrix<f64>,
    z_target: DVector<f64>,
    g_form: DMatrix<f64>,
    sigma_r: CovarianceMatrix,
    near_identity: bool,
}

impl CoherentGeodesic {
    pub fn delta(&self) -> &RelativeComplexStructure {
        &self.delta
    }

    pub fn n_matrix(&self) -> &DMatrix<f64> {
        &self.n_matrix
    }

    pub fn z_target(&self) -> &DVector<f64> {
        &self.z_target
    }

    pub fn g_form(&self) -> &DMatrix<f64> {
        &self.g_form
    }

    pub fn sigma_r(&self) -> &CovarianceMatrix {
        &self.sigma_r
    }

    /// `(M(τ) - 1)(M(1) - 1)⁻¹`, continuously extended.
    fn displacement_map(&self, tau: f64) -> DMatrix<f64> {
        let dim = self.n_matrix.nrows();
        match (&self.delta.spectrum, self.near_identity) {
            (Some(s), false) => s.apply(|l| path_factor(l, tau)),
            _ => DMatrix::identity(dim, dim) * tau,
        }
    }
}

/// Builds `Δ`, `N` and `G` for a bosonic pair with undisplaced reference.
pub fn coherent_geodesic(
    reference: &GaussianState,
    target: &GaussianState,
    sigma_r: &CovarianceMatrix,
    tol: Tolerance,
) -> Result<CoherentGeodesic> {
    if reference.kind() != StateKind::Boson || target.kind() != StateKind::Boson {
        return Err(Error::KindMismatch);
    }
    if reference.is_displaced() {
        return Err(Error::DisplacementPresent);
    }
    ensure_dim(sigma_r.matrix(), reference.dim())?;
    let delta = relative_complex_structure(reference, target, tol)?;
    let dim = reference.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let near_identity = (delta.delta() - &id).norm() < NEAR_IDENTITY;
    let n_matrix = match (&delta.spectrum, near_identity) {
        (Some(s), false) => s.apply(n_factor),
        _ => id * 2.0,
    };
    let g_form = symmetrize(&(n_matrix.transpose() * sigma_r.inverse() * &n_matrix));
    let z_target = target.displacement().clone();
    Ok(CoherentGeodesic {
        delta,
        n_matrix,
        z_target,
        g_form,
        sigma_r: sigma_r.clone(),
        near_identity,
    })
}

/// `½ √(Tr|log Δ|²/2 + z_Tᵀ G z_T)`.
pub fn coherent_complexity(geo: &CoherentGeodesic) -> f64 {
    let t = geo.delta.trace_log_squared(&geo.sigma_r).max(0.0);
    let z = &geo.z_target;
    let q = z.dot(&(&geo.g_form * z)).max(0.0);
    0.5 * (0.5 * t + q).sqrt()
}

/// Point `(z(τ), M(τ))` on the optimal circuit, `τ ∈ [0, 1]`.
pub fn coherent_geodesic_point(
    geo: &CoherentGeodesic,
    tau: f64,
    tol: Tolerance,
) -> Result<GaussianTransformation> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(alloc::format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    let m = geo.delta.geodesic_matrix(tau)?;
    let v = geo.displacement_map(tau) * &geo.z_target;
    GaussianTransformation::new(v, m, StateKind::Boson, tol)
}

/// Coefficients of the time-independent Hamiltonian generating the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianCoefficients {
    /// `F = ½ Ω⁻¹ log Δ`
    pub quadratic: DMatrix<f64>,
    /// `α = ½ Ω⁻¹ N z_T`
    pub linear: DVector<f64>,
    /// Phase-space generator `K = Ω F = log(Δ)/2`.
    pub generator: DMatrix<f64>,
    /// Phase-space shift `b = Ω α = N z_T / 2`; the flow `ẋ = K x + b`
    /// from `x(0) = 0` traces `z(τ)`.
    pub shift: DVector<f64>,
}

pub fn hamiltonian_coefficients(
    geo: &CoherentGeodesic,
    omega: &SymplecticForm,
) -> Result<HamiltonianCoefficients> {
    ensure_dim(omega.matrix(), geo.n_matrix.nrows())?;
    let generator = geo.delta.log_delta() * 0.5;
    let shift = &geo.n_matrix * &geo.z_target * 0.5;
    Ok(HamiltonianCoefficients {
        quadratic: omega.inverse() * &generator,
        linear: omega.inverse() * &shift,
        generator,
        shift,
    })
}
