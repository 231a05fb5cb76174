//! Choice of complexity geometry on the single-mode chart.

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::nonreversible::{
    nonreversible_cost, ChartMetric, DiscretizedPath, SingleModeMetric, VectorPotential,
};
use crate::weyl::WeylFactor;
use crate::Result;

/// `e^{2ω(r)} (dr² + g_φφ dφ²)`.
#[derive(Debug, Clone)]
pub struct WeylChartMetric {
    pub weyl: WeylFactor,
}

impl ChartMetric for WeylChartMetric {
    fn dim(&self) -> usize {
        2
    }

    fn metric(&self, p: &DVector<f64>) -> DMatrix<f64> {
        SingleModeMetric.metric(p) * (2.0 * self.weyl.eval(p[0])).exp()
    }

    fn contains(&self, p: &DVector<f64>) -> bool {
        SingleModeMetric.contains(p) && self.weyl.eval(p[0]).is_finite()
    }
}

#[derive(Debug, Clone)]
pub enum MetricSpec {
    RightInvariant,
    Weyl(WeylFactor),
    VectorPotential(VectorPotential),
}

impl MetricSpec {
    /// Whether every path costs the same in both directions.
    pub fn is_reversible(&self) -> bool {
        !matches!(self, MetricSpec::VectorPotential(a) if !matches!(a, VectorPotential::None))
    }

    /// Cost of a path on the single-mode chart.
    pub fn chart_cost(&self, path: &DiscretizedPath) -> Result<f64> {
        match self {
            MetricSpec::RightInvariant => {
                nonreversible_cost(path, &SingleModeMetric, &VectorPotential::None)
            }
            MetricSpec::Weyl(w) => nonreversible_cost(
                path,
                &WeylChartMetric { weyl: w.clone() },
                &VectorPotential::None,
            ),
            MetricSpec::VectorPotential(a) => nonreversible_cost(path, &SingleModeMetric, a),
        }
    }
}
