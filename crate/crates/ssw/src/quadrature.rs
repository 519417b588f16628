//! Adaptive trapezoid quadrature on the Brillouin zone [0, 2π).
//!
//! For a smooth 2π-periodic integrand the equally-weighted trapezoid rule
//! converges spectrally, so the strategy is plain node doubling: integrate
//! on n nodes, refine to 2n by evaluating only the odd nodes, and stop when
//! successive estimates agree to the requested tolerance. Partial sums are
//! Kahan-compensated because β-sharp integrands need O(10⁵) nodes and the
//! doubling test should see refinement error, not accumulation error.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SswError};

/// Node budget and stopping tolerance for [`integrate_periodic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Stop when |I_{2n} − I_n| ≤ tolerance · max(1, |I_{2n}|).
    pub tolerance: f64,
    /// Node count of the first estimate.
    pub initial_nodes: usize,
    /// Hard ceiling on the node count; exceeding it is a convergence error.
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            initial_nodes: 64,
            max_nodes: 1 << 20,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SswError::InvalidQuadrature(format!(
                "tolerance {} must be a positive finite number",
                self.tolerance
            )));
        }
        if self.initial_nodes < 2 {
            return Err(SswError::InvalidQuadrature(format!(
                "initial node count {} must be at least 2",
                self.initial_nodes
            )));
        }
        if self.max_nodes < 2 * self.initial_nodes {
            return Err(SswError::InvalidQuadrature(format!(
                "node ceiling {} leaves no room to refine {} initial nodes",
                self.max_nodes, self.initial_nodes
            )));
        }
        Ok(())
    }
}

/// Compensated accumulator; keeps the doubling comparison meaningful when
/// hundreds of thousands of nearly equal terms are summed.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// ∫₀^{2π} f(q) dq by trapezoid doubling.
///
/// Stops at the first refinement whose change is within tolerance
/// (relative above |I| = 1, absolute below); errors with
/// [`SswError::NonConvergence`] when the node ceiling would be exceeded.
pub fn integrate_periodic<F>(mut f: F, config: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    config.validate()?;

    let mut n = config.initial_nodes;
    let mut acc = KahanSum::default();
    for k in 0..n {
        acc.add(f(TAU * k as f64 / n as f64));
    }
    let mut integral = acc.value() * TAU / n as f64;
    let mut last_delta = f64::INFINITY;

    loop {
        let m = 2 * n;
        if m > config.max_nodes {
            return Err(SswError::NonConvergence {
                max_nodes: config.max_nodes,
                last_delta,
                tolerance: config.tolerance,
            });
        }
        // Odd nodes of the m-grid are exactly the new points.
        let mut odd = KahanSum::default();
        for k in (1..m).step_by(2) {
            odd.add(f(TAU * k as f64 / m as f64));
        }
        let refined = 0.5 * integral + odd.value() * TAU / m as f64;
        last_delta = (refined - integral).abs();
        integral = refined;
        n = m;
        if last_delta <= config.tolerance * integral.abs().max(1.0) {
            return Ok(integral);
        }
    }
}

/// Brillouin-zone average (1/2π) ∫₀^{2π} f(q) dq.
pub fn periodic_average<F>(f: F, config: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    Ok(integrate_periodic(f, config)? / TAU)
}
