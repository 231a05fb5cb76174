//! Direction-dependent path cost `∫‖γ̇‖ dt + ∫ A_i γ̇^i dt` and its
//! extremals, which obey a Lorentz-force law
//! `γ̈^i + Γ^i_jk γ̇^j γ̇^k = F^i_j γ̇^j` with `F_ij = ∂_i A_j - ∂_j A_i`.
//!
//! The cost works on any chart through [`ChartMetric`] and [`OneForm`]. The
//! geodesic integrator is specific to the single-mode `(r, φ)` chart with
//! `ds² = dr² + cosh(2r) sinh²(r) dφ²`.
//!
//! With `A = -f dr` and `f ≥ 0`, moving outwards is cheaper than moving
//! inwards; for `A = -dh` the cost of any path changes by `-(h(end) - h(start))`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Samples with `r` below this are on the chart boundary.
pub const CHART_EPS: f64 = 1e-12;
/// Default bound on `|‖γ̇‖_g - 1|` along an integrated trajectory.
pub const DEFAULT_DRIFT_TOL: f64 = 1e-6;
/// Slack allowed above `‖A‖_g = 1` before a potential is rejected.
const POTENTIAL_SLACK: f64 = 1e-12;

/// Riemannian metric on a coordinate chart.
pub trait ChartMetric {
    fn dim(&self) -> usize;

    fn metric(&self, p: &DVector<f64>) -> DMatrix<f64>;

    fn contains(&self, p: &DVector<f64>) -> bool {
        p.iter().all(|x| x.is_finite())
    }

    /// `g^{ij} a_i a_j`; infinite when `g` is degenerate and `a` is not
    /// annihilated by its kernel.
    fn dual_norm_squared(&self, p: &DVector<f64>, a: &DVector<f64>) -> f64 {
        if a.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        match self.metric(p).cholesky() {
            Some(c) => a.dot(&c.solve(a)),
            None => f64::INFINITY,
        }
    }
}

/// A 1-form `A = A_i dx^i`.
pub trait OneForm {
    fn components(&self, p: &DVector<f64>) -> DVector<f64>;
}

/// Point of the single-mode chart: squeezing magnitude `r ≥ 0` and
/// orientation `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeChart {
    pub r: f64,
    pub phi: f64,
}

impl SingleModeChart {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if r < 0.0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "radial coordinate must be nonnegative, got {r}"
            )));
        }
        Ok(Self { r, phi })
    }

    pub fn to_vector(self) -> DVector<f64> {
        DVector::from_vec(alloc::vec![self.r, self.phi])
    }

    /// `g_φφ = cosh(2r) sinh²(r)`
    pub fn g_phi_phi(r: f64) -> f64 {
        let s = r.sinh();
        (2.0 * r).cosh() * s * s
    }

    /// `∂_r g_φφ = 2 sinh(2r) sinh²(r) + cosh(2r) sinh(2r)`
    pub fn g_phi_phi_prime(r: f64) -> f64 {
        let s = r.sinh();
        let s2r = (2.0 * r).sinh();
        2.0 * s2r * s * s + (2.0 * r).cosh() * s2r
    }
}

/// Metric `dr² + cosh(2r) sinh²(r) dφ²` on points `(r, φ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SingleModeMetric;

impl ChartMetric for SingleModeMetric {
    fn dim(&self) -> usize {
        2
    }

    fn metric(&self, p: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, SingleModeChart::g_phi_phi(p[0])])
    }

    fn contains(&self, p: &DVector<f64>) -> bool {
        p.len() == 2 && p[0].is_finite() && p[1].is_finite() && p[0] >= 0.0
    }

    fn dual_norm_squared(&self, p: &DVector<f64>, a: &DVector<f64>) -> f64 {
        let g = SingleModeChart::g_phi_phi(p[0]);
        let angular = if a[1] == 0.0 {
            0.0
        } else if g > 0.0 {
            a[1] * a[1] / g
        } else {
            f64::INFINITY
        };
        a[0] * a[0] + angular
    }
}

/// Polynomial in one variable, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coeffs })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        }
    }
}

type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Vector potential on the single-mode chart, `A = -f(r, φ) dr + a_φ dφ`.
#[derive(Clone)]
pub enum VectorPotential {
    None,
    /// `f` constant.
    Constant(f64),
    /// `A = -dh`, `f = h'(r)`.
    Gradient(Polynomial),
    /// `f = f₀(r) (1 + ε cos φ)`.
    Modulated {
        f0: Polynomial,
        eps: f64,
    },
    /// Arbitrary `f(r, φ)` and optional `a_φ(r, φ)`; the field strength is
    /// taken by central differences.
    Custom {
        f: ScalarField,
        a_phi: Option<ScalarField>,
    },
}

impl fmt::Debug for VectorPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorPotential::None => f.write_str("None"),
            VectorPotential::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            VectorPotential::Gradient(h) => f.debug_tuple("Gradient").field(h).finish(),
            VectorPotential::Modulated { f0, eps } => f
                .debug_struct("Modulated")
                .field("f0", f0)
                .field("eps", eps)
                .finish(),
            VectorPotential::Custom { a_phi, .. } => f
                .debug_struct("Custom")
                .field("has_a_phi", &a_phi.is_some())
                .finish_non_exhaustive(),
        }
    }
}

fn central_difference(g: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (g(x + h) - g(x - h)) / (2.0 * h)
}

impl VectorPotential {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        VectorPotential::Custom {
            f: Arc::new(f),
            a_phi: None,
        }
    }

    /// `(a_r, a_φ)` at `(r, φ)`.
    pub fn at(&self, r: f64, phi: f64) -> (f64, f64) {
        match self {
            VectorPotential::None => (0.0, 0.0),
            VectorPotential::Constant(f) => (-f, 0.0),
            VectorPotential::Gradient(h) => (-h.derivative().eval(r), 0.0),
            VectorPotential::Modulated { f0, eps } => (-f0.eval(r) * (1.0 + eps * phi.cos()), 0.0),
            VectorPotential::Custom { f, a_phi } => {
                (-f(r, phi), a_phi.as_ref().map_or(0.0, |a| a(r, phi)))
            }
        }
    }

    /// `F_rφ = ∂_r a_φ - ∂_φ a_r`.
    pub fn field_strength(&self, r: f64, phi: f64) -> f64 {
        match self {
            VectorPotential::None | VectorPotential::Constant(_) | VectorPotential::Gradient(_) => {
                0.0
            }
            VectorPotential::Modulated { f0, eps } => -f0.eval(r) * eps * phi.sin(),
            VectorPotential::Custom { f, a_phi } => {
                let d_phi_f = central_difference(|p| f(r, p), phi);
                let d_r_aphi = a_phi
                    .as_ref()
                    .map_or(0.0, |a| central_difference(|x| a(x, phi), r));
                d_r_aphi + d_phi_f
            }
        }
    }
}

impl OneForm for VectorPotential {
    fn components(&self, p: &DVector<f64>) -> DVector<f64> {
        let (ar, ap) = self.at(p[0], p[1]);
        DVector::from_vec(alloc::vec![ar, ap])
    }
}

/// Ordered samples of a path with strictly increasing parameters in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedPath {
    params: Vec<f64>,
    points: Vec<DVector<f64>>,
}

impl DiscretizedPath {
    pub fn new(params: Vec<f64>, points: Vec<DVector<f64>>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: params.len(),
            });
        }
        if points.len() < 2 {
            return Err(Error::InvalidArgument(
                "a path needs at least two samples".into(),
            ));
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if params.iter().any(|t| !t.is_finite())
            || points.iter().any(|p| p.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        if params[0] < 0.0 || params[params.len() - 1] > 1.0 {
            return Err(Error::InvalidArgument(
                "path parameters must lie in [0, 1]".into(),
            ));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "path parameters must be strictly increasing".into(),
            ));
        }
        Ok(Self { params, points })
    }

    /// Samples at evenly spaced parameters `k / (n - 1)`.
    pub fn uniform(points: Vec<DVector<f64>>) -> Result<Self> {
        let n = points.len();
        let denom = n.saturating_sub(1).max(1) as f64;
        let params = (0..n).map(|k| k as f64 / denom).collect();
        Self::new(params, points)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// The same samples traversed backwards, `t ↦ 1 - t`.
    pub fn reversed(&self) -> Self {
        Self {
            params: self.params.iter().rev().map(|t| 1.0 - t).collect(),
            points: self.points.iter().rev().cloned().collect(),
        }
    }
}

/// Metric length and potential term of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub length: f64,
    pub potential: f64,
    /// Running total of `length + potential` at each sample.
    pub accumulated: Vec<f64>,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.length + self.potential
    }
}

fn segment_norm(metric: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    d.dot(&(metric * d)).max(0.0).sqrt()
}

/// Trapezoidal evaluation of `∫‖γ̇‖` and `∫A_i γ̇^i` over the samples.
///
/// Fails with [`Error::PotentialTooLarge`] if `‖A‖_g > 1` at any sample.
pub fn cost_breakdown<M: ChartMetric + ?Sized, A: OneForm + ?Sized>(
    path: &DiscretizedPath,
    chart: &M,
    a: &A,
) -> Result<CostBreakdown> {
    if path.dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            found: path.dim(),
        });
    }
    let mut metrics = Vec::with_capacity(path.len());
    let mut forms = Vec::with_capacity(path.len());
    for (index, p) in path.points.iter().enumerate() {
        if !chart.contains(p) {
            return Err(Error::InvalidArgument(alloc::format!(
                "sample {index} lies outside the chart"
            )));
        }
        let form = a.components(p);
        if form.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                found: form.len(),
            });
        }
        if form.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = chart.dual_norm_squared(p, &form).sqrt();
        if !(norm <= 1.0 + POTENTIAL_SLACK) {
            return Err(Error::PotentialTooLarge { norm, index });
        }
        metrics.push(chart.metric(p));
        forms.push(form);
    }
    let mut length = 0.0;
    let mut potential = 0.0;
    let mut accumulated = Vec::with_capacity(path.len());
    accumulated.push(0.0);
    for k in 0..path.len() - 1 {
        let d = &path.points[k + 1] - &path.points[k];
        length += 0.5 * (segment_norm(&metrics[k], &d) + segment_norm(&metrics[k + 1], &d));
        potential += 0.5 * (forms[k].dot(&d) + forms[k + 1].dot(&d));
        accumulated.push(length + potential);
    }
    Ok(CostBreakdown {
        length,
        potential,
        accumulated,
    })
}

/// `∫‖γ̇‖ dt + ∫A_i γ̇^i dt` along the path.
pub fn nonreversible_cost<M: ChartMetric + ?Sized, A: OneForm + ?Sized>(
    path: &DiscretizedPath,
    chart: &M,
    a: &A,
) -> Result<f64> {
    Ok(cost_breakdown(path, chart, a)?.total())
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    Complete,
    /// Reached `r ≈ 0` away from a radial launch; the path stops there.
    ChartBoundary {
        at_length: f64,
    },
}

/// Unit-speed solution of the Lorentz-force equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Samples `(r, φ)`, parameter `s / length`.
    pub path: DiscretizedPath,
    /// `(ṙ, φ̇)` at each sample, with respect to arc length.
    pub velocities: Vec<(f64, f64)>,
    pub arc_lengths: Vec<f64>,
    pub step: f64,
    pub status: TrajectoryStatus,
    /// Largest `|‖γ̇‖_g - 1|` seen.
    pub speed_drift: f64,
}

type State = [f64; 4];

/// Right-hand side of the first-order system in `(r, φ, ṙ, φ̇)`.
fn lorentz_rhs(y: &State, a: &VectorPotential) -> State {
    let [r, phi, vr, vp] = *y;
    let g = SingleModeChart::g_phi_phi(r);
    let dg = SingleModeChart::g_phi_phi_prime(r);
    let f = a.field_strength(r, phi);
    let ar = 0.5 * dg * vp * vp + f * vp;
    let ap = if vp == 0.0 && f == 0.0 {
        0.0
    } else {
        -(dg / g) * vr * vp - f * vr / g
    };
    [vr, vp, ar, ap]
}

fn rk4_step(y: &State, h: f64, a: &VectorPotential) -> State {
    let add = |y: &State, k: &State, s: f64| -> State {
        [
            y[0] + s * k[0],
            y[1] + s * k[1],
            y[2] + s * k[2],
            y[3] + s * k[3],
        ]
    };
    let k1 = lorentz_rhs(y, a);
    let k2 = lorentz_rhs(&add(y, &k1, 0.5 * h), a);
    let k3 = lorentz_rhs(&add(y, &k2, 0.5 * h), a);
    let k4 = lorentz_rhs(&add(y, &k3, h), a);
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn speed(y: &State) -> f64 {
    (y[2] * y[2] + SingleModeChart::g_phi_phi(y[0]) * y[3] * y[3]).sqrt()
}

/// Integrates the Lorentz-force equation from `start` along
/// `initial_velocity` for the given metric `length`, with `rk_steps`
/// classic RK4 steps. See [`lorentz_geodesic_with_drift`].
pub fn lorentz_geodesic(
    start: SingleModeChart,
    initial_velocity: (f64, f64),
    a: &VectorPotential,
    length: f64,
    rk_steps: usize,
) -> Result<Trajectory> {
    lorentz_geodesic_with_drift(
        start,
        initial_velocity,
        a,
        length,
        rk_steps,
        DEFAULT_DRIFT_TOL,
    )
}

/// As [`lorentz_geodesic`], failing with [`Error::StepTooCoarse`] once the
/// speed drifts from 1 by more than `drift_tol`.
///
/// A launch from `r = 0` must be purely radial; its first step keeps `φ`
/// fixed. Any later sample with `r < CHART_EPS` ends the integration with
/// [`TrajectoryStatus::ChartBoundary`].
pub fn lorentz_geodesic_with_drift(
    start: SingleModeChart,
    initial_velocity: (f64, f64),
    a: &VectorPotential,
    length: f64,
    rk_steps: usize,
    drift_tol: f64,
) -> Result<Trajectory> {
    let start = SingleModeChart::new(start.r, start.phi)?;
    if rk_steps < 8 {
        return Err(Error::InvalidArgument(alloc::format!(
            "rk_steps must be at least 8, got {rk_steps}"
        )));
    }
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "length must be nonnegative and finite, got {length}"
        )));
    }
    let (vr, vp) = initial_velocity;
    if !(vr.is_finite() && vp.is_finite()) {
        return Err(Error::NonFinite);
    }
    let at_origin = start.r < CHART_EPS;
    if at_origin && vp != 0.0 {
        return Err(Error::InvalidArgument(
            "a launch from r = 0 must have zero angular velocity".into(),
        ));
    }
    let mut y: State = [start.r, start.phi, vr, vp];
    let s0 = speed(&y);
    if !(s0 > 0.0) {
        return Err(Error::InvalidArgument(
            "initial velocity must be nonzero".into(),
        ));
    }
    y[2] /= s0;
    y[3] /= s0;

    let h = length / rk_steps as f64;
    let mut params = Vec::with_capacity(rk_steps + 1);
    let mut points = Vec::with_capacity(rk_steps + 1);
    let mut velocities = Vec::with_capacity(rk_steps + 1);
    let mut arc_lengths = Vec::with_capacity(rk_steps + 1);
    let mut record = |y: &State, k: usize| {
        params.push(k as f64 / rk_steps as f64);
        points.push(DVector::from_vec(alloc::vec![y[0], y[1]]));
        velocities.push((y[2], y[3]));
        arc_lengths.push(k as f64 * h);
    };
    record(&y, 0);
    let mut status = TrajectoryStatus::Complete;
    let mut drift: f64 = 0.0;
    for k in 1..=rk_steps {
        y = if k == 1 && at_origin {
            // φ̇ = 0 and the chart's radial lines are geodesics.
            [y[0] + h * y[2], y[1], y[2], 0.0]
        } else {
            rk4_step(&y, h, a)
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if y[0] < CHART_EPS {
            status = TrajectoryStatus::ChartBoundary {
                at_length: k as f64 * h,
            };
            break;
        }
        drift = drift.max((speed(&y) - 1.0).abs());
        if drift > drift_tol {
            return Err(Error::StepTooCoarse { drift });
        }
        record(&y, k);
    }
    if params.len() < 2 {
        // Boundary hit on the first step: keep the start plus the boundary.
        params.push(1.0);
        points.push(DVector::from_vec(alloc::vec![0.0, y[1]]));
        velocities.push((y[2], y[3]));
        arc_lengths.push(h);
    }
    let path = DiscretizedPath::new(params, points)?;
    Ok(Trajectory {
        path,
        velocities,
        arc_lengths,
        step: h,
        status,
        speed_drift: drift,
    })
}

/// Largest residual of `γ̈ + Γγ̇γ̇ - Fγ̇` over the interior samples, with
/// derivatives from fourth-order central differences of the positions.
pub fn lorentz_residual(traj: &Trajectory, a: &VectorPotential) -> Result<f64> {
    let pts = traj.path.points();
    let n = pts.len();
    if n < 5 {
        return Err(Error::InvalidArgument(
            "need at least five samples for the residual".into(),
        ));
    }
    let h = traj.step;
    let mut worst: f64 = 0.0;
    for k in 2..n - 2 {
        let d1 = |i: usize| {
            (-pts[k + 2][i] + 8.0 * pts[k + 1][i] - 8.0 * pts[k - 1][i] + pts[k - 2][i])
                / (12.0 * h)
        };
        let d2 = |i: usize| {
            (-pts[k + 2][i] + 16.0 * pts[k + 1][i] - 30.0 * pts[k][i] + 16.0 * pts[k - 1][i]
                - pts[k - 2][i])
                / (12.0 * h * h)
        };
        let (r, phi) = (pts[k][0], pts[k][1]);
        let (vr, vp) = (d1(0), d1(1));
        let [_, _, ar, ap] = lorentz_rhs(&[r, phi, vr, vp], a);
        let res_r = d2(0) - ar;
        let res_p = d2(1) - ap;
        let g = SingleModeChart::g_phi_phi(r);
        worst = worst.max((res_r * res_r + g * res_p * res_p).sqrt());
    }
    Ok(worst)
}
