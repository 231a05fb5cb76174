//! Weyl-rescaled complexity `g̃ = e^{2ω(r)} g`.
//!
//! Along the radial geodesic the rescaled length is
//! `r ∫₀¹ e^{ω(τ r)} dτ`, evaluated here by composite Simpson quadrature.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Monotone piecewise-cubic interpolant (Fritsch–Carlson). Evaluates to NaN
/// outside the tabulated range.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidArgument(
                "a table needs at least two rows".into(),
            ));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let n = x.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut slopes = alloc::vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            let d = secants[i];
            if d == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / d;
            let b = slopes[i + 1] / d;
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                slopes[i] = t * a * d;
                slopes[i + 1] = t * b * d;
            }
        }
        Ok(Self { x, y, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return f64::NAN;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i]
            + h10 * h * self.slopes[i]
            + h01 * self.y[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// The conformal factor `ω(r)`.
#[derive(Clone)]
pub enum WeylFactor {
    Constant(f64),
    /// `ω(r) = β r`
    Linear(f64),
    Tabulated(MonotoneCubic),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeylFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylFactor::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            WeylFactor::Linear(b) => f.debug_tuple("Linear").field(b).finish(),
            WeylFactor::Tabulated(t) => f.debug_tuple("Tabulated").field(t).finish(),
            WeylFactor::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl WeylFactor {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        WeylFactor::Custom(Arc::new(f))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            WeylFactor::Constant(c) => *c,
            WeylFactor::Linear(beta) => beta * r,
            WeylFactor::Tabulated(t) => t.eval(r),
            WeylFactor::Custom(f) => f(r),
        }
    }
}

fn check_inputs(r: f64, quad_steps: usize) -> Result<usize> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "radial coordinate must be nonnegative and finite, got {r}"
        )));
    }
    if quad_steps < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "quad_steps must be at least 2, got {quad_steps}"
        )));
    }
    Ok(quad_steps + quad_steps % 2)
}

/// Composite Simpson rule for `∫₀^upper e^{ω(u r)} du` with `steps` (even)
/// panels.
fn simpson(weyl: &WeylFactor, r: f64, upper: f64, steps: usize) -> Result<f64> {
    let h = upper / steps as f64;
    let mut sum = 0.0;
    for k in 0..=steps {
        let rk = k as f64 * h * r;
        let w = weyl.eval(rk).exp();
        if !w.is_finite() {
            return Err(Error::NonFiniteFactor { r: rk });
        }
        let c = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += c * w;
    }
    Ok(sum * h / 3.0)
}

/// `r ∫₀¹ e^{ω(τ r)} dτ`. Odd `quad_steps` are rounded up to the next even
/// count.
pub fn weyl_complexity(base_complexity: f64, weyl: &WeylFactor, quad_steps: usize) -> Result<f64> {
    let steps = check_inputs(base_complexity, quad_steps)?;
    Ok(base_complexity * simpson(weyl, base_complexity, 1.0, steps)?)
}

/// Affine parameter of the rescaled metric,
/// `s(τ) = ∫₀^τ e^{ω} / ∫₀¹ e^{ω}`.
pub fn weyl_affine_reparametrization(
    weyl: &WeylFactor,
    r_target: f64,
    tau: f64,
    quad_steps: usize,
) -> Result<f64> {
    let steps = check_inputs(r_target, quad_steps)?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(alloc::format!(
            "tau must lie in [0, 1], got {tau}"
        )));
    }
    let total = simpson(weyl, r_target, 1.0, steps)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let partial = simpson(weyl, r_target, tau, steps)?;
    Ok((partial / total).clamp(0.0, 1.0))
}
