//! Trading-intensity trajectories θ(t) on [0, T].

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A closed-form intensity evaluator.
pub trait Trajectory: Send + Sync {
    fn eval(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Send + Sync> Trajectory for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

#[derive(Clone)]
pub enum StrategyPath {
    Constant {
        value: f64,
        horizon: f64,
    },
    /// `values[i]` holds on `[edges[i], edges[i+1])`; the last cell is closed at T.
    Piecewise {
        edges: Vec<f64>,
        values: Vec<f64>,
    },
    Closed {
        f: Arc<dyn Trajectory>,
        horizon: f64,
        /// True when |θ| → ∞ as t ↗ T, so T itself is outside the domain.
        singular_at_horizon: bool,
    },
}

impl fmt::Debug for StrategyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyPath::Constant { value, horizon } => f
                .debug_struct("Constant")
                .field("value", value)
                .field("horizon", horizon)
                .finish(),
            StrategyPath::Piecewise { edges, values } => f
                .debug_struct("Piecewise")
                .field("edges", edges)
                .field("values", values)
                .finish(),
            StrategyPath::Closed {
                horizon,
                singular_at_horizon,
                ..
            } => f
                .debug_struct("Closed")
                .field("horizon", horizon)
                .field("singular_at_horizon", singular_at_horizon)
                .finish_non_exhaustive(),
        }
    }
}

impl StrategyPath {
    pub fn constant(value: f64, horizon: f64) -> Self {
        StrategyPath::Constant { value, horizon }
    }

    pub fn piecewise(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::domain("piecewise strategy needs len(edges) = len(values) + 1"));
        }
        if edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("edges must start at 0 and increase strictly"));
        }
        Ok(StrategyPath::Piecewise { edges, values })
    }

    pub fn from_fn<F>(f: F, horizon: f64, singular_at_horizon: bool) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        StrategyPath::Closed {
            f: Arc::new(f),
            horizon,
            singular_at_horizon,
        }
    }

    pub fn zero(horizon: f64) -> Self {
        StrategyPath::constant(0.0, horizon)
    }

    pub fn horizon(&self) -> f64 {
        match self {
            StrategyPath::Constant { horizon, .. } | StrategyPath::Closed { horizon, .. } => {
                *horizon
            }
            StrategyPath::Piecewise { edges, .. } => edges[edges.len() - 1],
        }
    }

    pub fn singular_at_horizon(&self) -> bool {
        matches!(
            self,
            StrategyPath::Closed {
                singular_at_horizon: true,
                ..
            }
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            StrategyPath::Constant { value, .. } => *value,
            StrategyPath::Piecewise { edges, values } => {
                let i = edges.partition_point(|e| *e <= t);
                values[i.clamp(1, values.len()) - 1]
            }
            StrategyPath::Closed { f, .. } => f.eval(t),
        }
    }

    /// Interior points where θ may jump.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            StrategyPath::Piecewise { edges, .. } => &edges[1..edges.len() - 1],
            _ => &[],
        }
    }

    /// k·θ(t), keeping the representation where possible.
    pub fn scaled(&self, k: f64) -> StrategyPath {
        match self {
            StrategyPath::Constant { value, horizon } => StrategyPath::constant(k * value, *horizon),
            StrategyPath::Piecewise { edges, values } => StrategyPath::Piecewise {
                edges: edges.clone(),
                values: values.iter().map(|v| k * v).collect(),
            },
            StrategyPath::Closed {
                f,
                horizon,
                singular_at_horizon,
            } => {
                let f = f.clone();
                StrategyPath::Closed {
                    f: Arc::new(move |t: f64| k * f.eval(t)),
                    horizon: *horizon,
                    singular_at_horizon: *singular_at_horizon,
                }
            }
        }
    }

    /// Cell averages of θ on the given edges, by 8-point Gauss–Legendre per cell.
    pub fn sample_cells(&self, edges: &[f64]) -> Vec<f64> {
        let gl = crate::special_fn::quadrature::GaussLegendre::new(8);
        edges
            .windows(2)
            .map(|w| gl.integrate(|t| self.value(t), w[0], w[1]) / (w[1] - w[0]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn piecewise_lookup() {
        let s = StrategyPath::piecewise(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(s.value(0.0), 1.0);
        assert_eq!(s.value(0.49), 1.0);
        assert_eq!(s.value(0.5), 2.0);
        assert_eq!(s.value(1.0), 2.0);
        assert_eq!(s.breakpoints(), &[0.5]);
        assert_eq!(s.horizon(), 1.0);
    }

    #[test]
    fn scaling_keeps_shape() {
        let s = StrategyPath::from_fn(|t| 1.0 + t, 1.0, false).scaled(-2.0);
        assert_eq!(s.value(0.5), -3.0);
        assert!(StrategyPath::piecewise(vec![0.0, 1.0], vec![]).is_err());
    }
}

/// Nodes of a composite Gauss rule over [0, t_end], with the strategy sampled at
/// each node. Running integrals at the nodes come from the per-panel integration
/// matrix, so nested functionals need only one strategy evaluation per node.
#[derive(Debug, Clone)]
pub struct SampledPath {
    pub t: Vec<f64>,
    pub weight: Vec<f64>,
    pub theta: Vec<f64>,
    half_widths: Vec<f64>,
    rule: crate::special_fn::quadrature::RunningRule,
}

/// Panels per unit mesh before grading.
const UNIFORM_PANELS: usize = 64;
const GAUSS_NODES: usize = 8;

impl SampledPath {
    /// Mesh: `UNIFORM_PANELS` uniform panels, the first refined geometrically toward 0,
    /// plus geometric refinement over the last 1% toward T for singular strategies
    /// (ratio 0.5, 40 levels), plus every strategy breakpoint.
    pub fn new(strategy: &StrategyPath, t_end: f64) -> Result<Self> {
        let horizon = strategy.horizon();
        if !(t_end > 0.0) {
            return Err(Error::domain("sampled path needs t_end > 0"));
        }
        let singular = strategy.singular_at_horizon() && t_end > 0.5 * horizon;
        let mut edges = if singular {
            crate::special_fn::quadrature::graded_edges(0.0, t_end, UNIFORM_PANELS, 0.01, 0.5, 40)
        } else {
            (0..=UNIFORM_PANELS)
                .map(|i| t_end * i as f64 / UNIFORM_PANELS as f64)
                .collect()
        };
        let first = edges[1];
        let mut head: Vec<f64> = (1..=30).map(|k| first * libm::ldexp(1.0, -k)).collect();
        edges.append(&mut head);
        edges.extend(strategy.breakpoints().iter().copied().filter(|b| *b < t_end));
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| crate::math::abs(*a - *b) <= 1e-15 * t_end);
        Self::on_edges(strategy, &edges)
    }

    pub fn on_edges(strategy: &StrategyPath, edges: &[f64]) -> Result<Self> {
        let rule = crate::special_fn::quadrature::RunningRule::new(GAUSS_NODES);
        let n = (edges.len() - 1) * GAUSS_NODES;
        let mut t = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        let mut half_widths = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let h = 0.5 * (w[1] - w[0]);
            half_widths.push(h);
            for (x, wt) in rule.gl.nodes.iter().zip(&rule.gl.weights) {
                t.push(0.5 * (w[0] + w[1]) + h * x);
                weight.push(h * wt);
            }
        }
        let theta: Vec<f64> = t.iter().map(|&s| strategy.value(s)).collect();
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature("strategy is non-finite on the interval".into()));
        }
        Ok(SampledPath {
            t,
            weight,
            theta,
            half_widths,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn total(&self, vals: &[f64]) -> f64 {
        self.weight.iter().zip(vals).map(|(w, v)| w * v).sum()
    }

    /// ∫₀^{t_i} f at every node, given f at the nodes.
    pub fn running(&self, vals: &[f64]) -> Vec<f64> {
        let g = GAUSS_NODES;
        let mut out = Vec::with_capacity(vals.len());
        let mut base = 0.0;
        for (panel, h) in self.half_widths.iter().enumerate() {
            let f = &vals[panel * g..(panel + 1) * g];
            for row in &self.rule.s {
                let s: f64 = row.iter().zip(f).map(|(a, b)| a * b).sum();
                out.push(base + h * s);
            }
            let full: f64 = self.rule.gl.weights.iter().zip(f).map(|(a, b)| a * b).sum();
            base += h * full;
        }
        out
    }

    /// Running maximum along the nodes.
    pub fn running_max(&self, vals: &[f64]) -> Vec<f64> {
        let mut m = f64::NEG_INFINITY;
        vals.iter()
            .map(|v| {
                m = m.max(*v);
                m
            })
            .collect()
    }
}
