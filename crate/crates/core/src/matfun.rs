//! Dense real matrix functions: exponential, principal logarithm and
//! principal square root.
//!
//! The logarithm uses inverse scaling and squaring: repeated principal
//! square roots (scaled product-form Denman–Beavers) bring the matrix close
//! to the identity, where the `atanh` series for `log` converges quickly.
//! Every result is checked against its defining residual before it is
//! returned.

use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::linalg::{all_finite, ensure_square, rel_residual};
use crate::{Error, Result, Tolerance};

/// Eigenvalues with `|arg λ| > π - BRANCH_MARGIN` are rejected.
pub const BRANCH_MARGIN: f64 = 1e-6;

const MAX_SQRT_ITERS: usize = 100;
const MAX_SQUARE_ROOTS: usize = 64;
const NEAR_IDENTITY: f64 = 0.2;

/// `e^V` by scaling and squaring with Padé approximants.
pub fn matrix_exp(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(v)?;
    if !all_finite(v) {
        return Err(Error::NonFinite);
    }
    if v.nrows() == 0 {
        return Ok(v.clone());
    }
    let e = pade_exp(v)?;
    if !all_finite(&e) {
        return Err(Error::NonFinite);
    }
    Ok(e)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
/// Largest 1-norms for which the degree 3, 5, 7, 9 and 13 approximants are
/// accurate to double precision.
#[allow(clippy::excessive_precision)]
const THETA: [f64; 5] = [
    1.495585217958292e-2,
    2.539398330063230e-1,
    9.504178996162932e-1,
    2.097847961257068,
    5.371920351148152,
];

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(V - U)⁻¹ (V + U)` for a low-degree approximant with coefficients `b`.
fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let mut power = id.clone();
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for j in (0..b.len()).step_by(2) {
        v += &power * b[j];
        u += &power * b[j + 1];
        power = &power * &a2;
    }
    let u = a * u;
    solve_pade(u, v)
}

fn solve_pade(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let lhs = &v - &u;
    let rhs = v + u;
    lhs.lu().solve(&rhs).ok_or(Error::Singular)
}

/// Scaling and squaring with Padé approximants (Higham 2005).
fn pade_exp(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let norm = one_norm(a);
    let low: [&[f64]; 4] = [&PADE3, &PADE5, &PADE7, &PADE9];
    for (b, theta) in low.iter().zip(THETA) {
        if norm <= theta {
            return pade_low(a, b);
        }
    }
    let s = if norm > THETA[4] {
        (norm / THETA[4]).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let mut r = solve_pade(u, v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// `|λ|`
pub fn modulus(l: &Complex<f64>) -> f64 {
    l.re.hypot(l.im)
}

/// `arg λ` in `(-π, π]`.
pub fn argument(l: &Complex<f64>) -> f64 {
    l.im.atan2(l.re)
}

/// Complex eigenvalues from the real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    ensure_square(m)?;
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    Ok(m.complex_eigenvalues().iter().copied().collect())
}

/// Rejects matrices outside the domain of the principal branch.
fn check_principal_domain(m: &DMatrix<f64>) -> Result<()> {
    let eigs = eigenvalues(m)?;
    let scale = eigs.iter().map(modulus).fold(0.0, f64::max);
    for l in &eigs {
        if modulus(l) <= scale * 1e-14 || modulus(l) == 0.0 {
            return Err(Error::Singular);
        }
        if argument(l).abs() > core::f64::consts::PI - BRANCH_MARGIN {
            return Err(Error::BranchCut { re: l.re, im: l.im });
        }
    }
    Ok(())
}

/// Scaled product-form Denman–Beavers iteration for `A^{1/2}`.
fn denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = a.clone();
    let mut y = a.clone();
    let mut scaling = true;
    for _ in 0..MAX_SQRT_ITERS {
        let m_inv = m.clone().try_inverse().ok_or(Error::Singular)?;
        let mu = if scaling {
            let det = m.determinant().abs();
            if det > 0.0 && det.is_finite() {
                det.powf(-1.0 / (2.0 * n as f64))
            } else {
                1.0
            }
        } else {
            1.0
        };
        let mu2 = mu * mu;
        y = &y * (&id + &m_inv / mu2) * (0.5 * mu);
        m = (&id + (&m * mu2 + &m_inv / mu2) * 0.5) * 0.5;
        let err = (&m - &id).norm();
        if err < 1e-2 {
            scaling = false;
        }
        if !all_finite(&y) {
            return Err(Error::NonFinite);
        }
        if err <= 1e-15 * (n as f64).sqrt() {
            return Ok(y);
        }
    }
    // Stagnation at rounding level is acceptable; the caller checks the
    // residual of the result.
    Ok(y)
}

/// `log A` for `‖A - 1‖` small: `2 Σ Z^{2k+1}/(2k+1)`, `Z = (A-1)(A+1)⁻¹`.
fn log_near_identity(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let plus = (a + &id).try_inverse().ok_or(Error::Singular)?;
    let z = (a - &id) * plus;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z;
    for k in 1..200 {
        power = &power * &z2;
        let term = &power / (2 * k + 1) as f64;
        sum += &term;
        if term.norm() <= f64::EPSILON * 1e-2 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum * 2.0)
}

/// Real principal logarithm.
///
/// Fails with [`Error::BranchCut`] when an eigenvalue lies within
/// [`BRANCH_MARGIN`] of the negative real axis and with [`Error::Singular`]
/// for (numerically) singular input.
pub fn matrix_log_principal(m: &DMatrix<f64>, tol: Tolerance) -> Result<DMatrix<f64>> {
    let n = ensure_square(m)?;
    check_principal_domain(m)?;
    let id = DMatrix::<f64>::identity(n, n);
    let mut a = m.clone();
    let mut roots = 0usize;
    while (&a - &id).norm() > NEAR_IDENTITY {
        if roots == MAX_SQUARE_ROOTS {
            return Err(Error::ResidualTooLarge {
                residual: (&a - &id).norm(),
            });
        }
        a = denman_beavers(&a)?;
        roots += 1;
    }
    let log = log_near_identity(&a)? * (2.0f64).powi(roots as i32);
    let back = matrix_exp(&log)?;
    let residual = rel_residual(&back, m, m.norm());
    if !(residual <= tol.rel) {
        return Err(Error::ResidualTooLarge { residual });
    }
    Ok(log)
}

/// Real principal square root (spectrum in the open right half-plane).
pub fn matrix_sqrt_principal(m: &DMatrix<f64>, tol: Tolerance) -> Result<DMatrix<f64>> {
    ensure_square(m)?;
    check_principal_domain(m)?;
    let s = denman_beavers(m)?;
    let residual = rel_residual(&(&s * &s), m, m.norm());
    if !(residual <= tol.rel) {
        return Err(Error::ResidualTooLarge { residual });
    }
    Ok(s)
}
