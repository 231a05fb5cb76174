//! Closed-form state complexity and geodesics for the right-invariant
//! metric, plus the standard Finsler cost functions.
//!
//! For a reference `J_R` and target `J_T` the relative complex structure is
//! `Δ = J_T J_R⁻¹`; the optimal circuit is `M(τ) = exp(τ log(Δ)/2)` and the
//! complexity is `(1/(2√2)) √Tr[log Δ σ_R (log Δ)ᵀ σ_R⁻¹]`.
//!
//! Bosonic `Δ = σ_T σ_R⁻¹` is similar to a symmetric positive-definite
//! matrix whose eigenvalues come in reciprocal pairs. Its functions are
//! evaluated on that eigenbasis, taking each pair's logarithm from the
//! eigenvalue `≥ 1` (which is computed to full relative accuracy). This
//! keeps strongly squeezed states accurate where a general-purpose log
//! would lose digits in the small eigenvalues.

use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::lie::{LieAlgebra, LieAlgebraElement};
use crate::linalg::{inverse, rel_residual, symmetrize};
use crate::matfun::{argument, eigenvalues, matrix_exp, matrix_log_principal};
use crate::phase_space::{CovarianceMatrix, GaussianState, GaussianTransformation, StateKind};
use crate::{Error, Result, Tolerance};

/// Eigen-decomposition `Δ = B diag(μ) B⁻¹` of a bosonic relative complex
/// structure, with `μ` ascending.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BosonSpectrum {
    pub basis: DMatrix<f64>,
    pub basis_inv: DMatrix<f64>,
    /// `log μ_i`, exactly antisymmetric under `i ↦ 2N-1-i`.
    pub log_eigs: Vec<f64>,
}

impl BosonSpectrum {
    /// `B diag(f(log μ)) B⁻¹`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DVector::from_iterator(self.log_eigs.len(), self.log_eigs.iter().map(|&l| f(l)));
        &self.basis * DMatrix::from_diagonal(&d) * &self.basis_inv
    }
}

/// `Δ = J_T J_R⁻¹` with its cached principal logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeComplexStructure {
    delta: DMatrix<f64>,
    log_delta: DMatrix<f64>,
    kind: StateKind,
    pub(crate) spectrum: Option<BosonSpectrum>,
}

impl RelativeComplexStructure {
    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn log_delta(&self) -> &DMatrix<f64> {
        &self.log_delta
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn n_modes(&self) -> usize {
        self.delta.nrows() / 2
    }

    pub fn algebra(&self) -> LieAlgebra {
        LieAlgebra::for_kind(self.kind, self.n_modes())
    }

    /// Geodesic generator `log(Δ)/2`.
    pub fn generator(&self) -> LieAlgebraElement {
        LieAlgebraElement::new_unchecked(&self.log_delta * 0.5, self.algebra())
    }

    /// `Tr[log Δ σ_R (log Δ)ᵀ σ_R⁻¹]`.
    pub fn trace_log_squared(&self, sigma_r: &CovarianceMatrix) -> f64 {
        let l = &self.log_delta;
        (l * sigma_r.matrix() * l.transpose() * sigma_r.inverse()).trace()
    }

    /// `(1/(2√2)) √Tr|log Δ|²`.
    pub fn complexity(&self, sigma_r: &CovarianceMatrix) -> Result<f64> {
        crate::linalg::ensure_dim(sigma_r.matrix(), self.delta.nrows())?;
        let t = self.trace_log_squared(sigma_r).max(0.0);
        Ok(t.sqrt() / (2.0 * core::f64::consts::SQRT_2))
    }

    /// Eigenvalues of `Δ`. Real and positive for bosons, unimodular for
    /// fermions.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<f64>>> {
        match &self.spectrum {
            Some(s) => Ok(s
                .log_eigs
                .iter()
                .map(|l| Complex::new(l.exp(), 0.0))
                .collect()),
            None => {
                let mut e = eigenvalues(&self.delta)?;
                e.sort_by(|a, b| {
                    argument(a)
                        .partial_cmp(&argument(b))
                        .unwrap_or(core::cmp::Ordering::Equal)
                });
                Ok(e)
            }
        }
    }

    /// `exp(τ log(Δ)/2)`.
    pub fn geodesic_matrix(&self, tau: f64) -> Result<DMatrix<f64>> {
        match &self.spectrum {
            Some(s) => Ok(s.apply(|l| (0.5 * tau * l).exp())),
            None => matrix_exp(&(&self.log_delta * (0.5 * tau))),
        }
    }
}

fn check_pair(reference: &GaussianState, target: &GaussianState) -> Result<()> {
    if reference.kind() != target.kind() {
        return Err(Error::KindMismatch);
    }
    if reference.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: target.dim(),
        });
    }
    Ok(())
}

fn boson_spectrum(
    reference: &GaussianState,
    target: &GaussianState,
    tol: Tolerance,
) -> Result<BosonSpectrum> {
    let dim = reference.dim();
    let chol = reference
        .covariance()
        .cholesky()
        .ok_or_else(|| Error::InvalidCovariance("reference covariance".into()))?;
    let c = chol.l();
    let c_inv = inverse(&c, "reference covariance factor")?;
    // C⁻¹ σ_T C⁻ᵀ is similar to Δ = σ_T σ_R⁻¹.
    let sym = symmetrize(&(&c_inv * target.covariance() * c_inv.transpose()));
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut q = DMatrix::zeros(dim, dim);
    let mut mu = Vec::with_capacity(dim);
    for (col, &k) in order.iter().enumerate() {
        q.set_column(col, &eig.eigenvectors.column(k));
        mu.push(eig.eigenvalues[k]);
    }
    if mu.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Singular);
    }
    // Reciprocal pairing: μ_i μ_{2N-1-i} = 1.
    let mut log_eigs = alloc::vec![0.0; dim];
    for i in 0..dim / 2 {
        let big = mu[dim - 1 - i].ln();
        let small = mu[i].ln();
        let mismatch = (big + small).abs() / big.abs().max(1.0);
        if mismatch > 1e-6_f64.max(tol.rel) {
            return Err(Error::InvalidArgument(alloc::format!(
                "relative complex structure is not symplectic (log-eigenvalue pair {small}, {big})"
            )));
        }
        log_eigs[dim - 1 - i] = big;
        log_eigs[i] = -big;
    }
    Ok(BosonSpectrum {
        basis: &c * &q,
        basis_inv: q.transpose() * c_inv,
        log_eigs,
    })
}

/// `Δ = J_T J_R⁻¹` and its principal logarithm.
pub fn relative_complex_structure(
    reference: &GaussianState,
    target: &GaussianState,
    tol: Tolerance,
) -> Result<RelativeComplexStructure> {
    check_pair(reference, target)?;
    let delta = target.j() * reference.complex_structure().inverse();
    let kind = reference.kind();
    let (log_delta, spectrum) = match kind {
        StateKind::Boson => {
            let s = boson_spectrum(reference, target, tol)?;
            (s.apply(|l| l), Some(s))
        }
        StateKind::Fermion => {
            let l = matrix_log_principal(&delta, tol)?;
            (
                LieAlgebra::for_kind(kind, reference.n_modes()).project(&l),
                None,
            )
        }
    };
    let back = matrix_exp(&log_delta)?;
    let residual = rel_residual(&back, &delta, delta.norm());
    if residual > tol.rel {
        return Err(Error::ResidualTooLarge { residual });
    }
    Ok(RelativeComplexStructure {
        delta,
        log_delta,
        kind,
        spectrum,
    })
}

/// Complexity of a zero-displacement target relative to `reference`.
pub fn state_complexity(
    reference: &GaussianState,
    target: &GaussianState,
    sigma_r: &CovarianceMatrix,
    tol: Tolerance,
) -> Result<f64> {
    if reference.is_displaced() || target.is_displaced() {
        return Err(Error::DisplacementPresent);
    }
    relative_complex_structure(reference, target, tol)?.complexity(sigma_r)
}

/// Point `M(τ) = exp(τ log(Δ)/2)` on the optimal circuit, `τ ∈ [0, 1]`.
pub fn geodesic_point(
    delta: &RelativeComplexStructure,
    tau: f64,
    tol: Tolerance,
) -> Result<GaussianTransformation> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(alloc::format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    let m = delta.geodesic_matrix(tau)?;
    GaussianTransformation::linear(m, delta.kind(), tol)
}

/// Cost functions on the components `Y^I` of a tangent vector.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunctionSpec {
    /// `Σ |Y^I|`
    F1,
    /// `Σ p_I |Y^I|`
    F1p(Vec<f64>),
    /// `√Σ (Y^I)²`
    F2,
    /// `√Σ q_I (Y^I)²`
    F2q(Vec<f64>),
}

impl CostFunctionSpec {
    pub fn penalized(p: Vec<f64>) -> Result<Self> {
        check_weights(&p)?;
        Ok(CostFunctionSpec::F1p(p))
    }

    pub fn weighted(q: Vec<f64>) -> Result<Self> {
        check_weights(&q)?;
        Ok(CostFunctionSpec::F2q(q))
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::InvalidArgument(
            "penalties and weights must be positive and finite".into(),
        ));
    }
    Ok(())
}

pub fn evaluate_cost_function(spec: &CostFunctionSpec, y: &[f64]) -> Result<f64> {
    let weights = |w: &Vec<f64>| -> Result<()> {
        check_weights(w)?;
        if w.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                found: w.len(),
            });
        }
        Ok(())
    };
    Ok(match spec {
        CostFunctionSpec::F1 => y.iter().map(|v| v.abs()).sum(),
        CostFunctionSpec::F1p(p) => {
            weights(p)?;
            p.iter().zip(y).map(|(p, v)| p * v.abs()).sum()
        }
        CostFunctionSpec::F2 => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
        CostFunctionSpec::F2q(q) => {
            weights(q)?;
            q.iter().zip(y).map(|(q, v)| q * v * v).sum::<f64>().sqrt()
        }
    })
}
