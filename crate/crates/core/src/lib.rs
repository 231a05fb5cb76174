//! Geometric circuit complexity of pure Gaussian states.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only numerics:
//! phase-space representations of bosonic and fermionic Gaussian states,
//! dense matrix functions, the right-invariant complexity metric with its
//! closed-form geodesics, coherent-state complexity, Weyl-deformed and
//! vector-potential (non-reversible) cost functionals, and a brute-force
//! variational oracle used to cross-check the closed forms.
//!
//! File formats and the command-line front end live in the
//! `gaussian-complexity` crate.
//!
//! All matrices are written in the quadrature ordering
//! `(Q1, P1, ..., QN, PN)`, so the standard symplectic form and the
//! reference complex structure are block diagonal.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coherent;
pub mod complexity;
mod error;
pub mod lie;
pub(crate) mod linalg;
pub mod matfun;
pub mod metric;
pub mod nonreversible;
pub mod oracle;
pub mod phase_space;
pub mod sampling;
pub mod weyl;

pub use error::{Error, ErrorClass, Result};

pub use nalgebra::{DMatrix, DVector};

/// Relative tolerance used by every invariant check.
///
/// Residuals are measured in the Frobenius norm and divided by the natural
/// scale of the operands, so the same knob works for strongly squeezed
/// states whose matrix entries are far from unity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-10;

    pub fn new(rel: f64) -> Result<Self> {
        if !(rel.is_finite() && rel > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "tolerance must be positive and finite, got {rel}"
            )));
        }
        Ok(Self { rel })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: Self::DEFAULT_REL,
        }
    }
}
