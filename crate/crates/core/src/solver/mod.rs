//! Solvers for `L(K) = L_hat`.
//!
//! [`integrate_flow`] follows the negative gradient flow of the convex
//! potential in log-curvature coordinates, [`integrate_flow_radius`] the same
//! flow written in radii, and [`newton_solve`] runs damped Newton on the
//! gradient. [`estimate_rate`] fits the exponential decay of a converged
//! trajectory's residual.

mod flow;
mod newton;
mod rate;

use serde::Serialize;

use crate::pattern_graph::{KVector, RadiusVector};

pub use flow::{integrate_flow, integrate_flow_many, integrate_flow_radius};
pub use newton::{newton_solve, newton_solve_with, NewtonConfig};
pub use rate::{estimate_rate, RateError, MIN_TAIL_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Initial time step; halved whenever a step would raise the potential.
    pub step: f64,
    /// Stop once `max |L - L_hat| <= tol`.
    pub tol: f64,
    pub max_time: f64,
    /// Minimum time between captured samples; 0 captures every accepted step.
    pub capture_every: f64,
    pub integrator: Integrator,
    /// `max |K|` beyond which a stalled residual counts as divergence.
    pub escape_bound: f64,
    /// Time without a 1% residual improvement that counts as stalled.
    pub stall_window: f64,
    pub quadrature_nodes: usize,
    /// Step size below which the run gives up.
    pub min_step: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            step: 0.1,
            tol: 1e-10,
            max_time: 1e3,
            capture_every: 0.0,
            integrator: Integrator::Rk4,
            escape_bound: 50.0,
            stall_window: 10.0,
            quadrature_nodes: crate::quadrature::DEFAULT_NODES,
            min_step: 1e-12,
        }
    }
}

impl FlowConfig {
    pub(crate) fn check(&self) -> crate::Result<()> {
        let bad = |what: &str| Err(crate::Error::Config(what.to_string()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.max_time >= 0.0) {
            return bad("max_time must be non-negative");
        }
        if !(self.capture_every >= 0.0) {
            return bad("capture_every must be non-negative");
        }
        if self.quadrature_nodes == 0 {
            return bad("quadrature_nodes must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxTime,
    Diverging,
    StepUnderflow,
    MaxIterations,
    SingularJacobian,
    LineSearchFailed,
    /// Residual within tolerance at a point where the Jacobian is nearly
    /// singular, so no nearby root is certified.
    Degenerate,
}

/// Samples of one flow run. `energies[i]` is the potential at sample `i`
/// minus the potential at the last sample, so it decreases to exactly zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<KVector>,
    pub residuals: Vec<f64>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `drop` is the decrease of the potential since the previous sample.
    fn push(&mut self, t: f64, k: &[f64], residual: f64, drop: f64) {
        self.times.push(t);
        self.states
            .push(KVector::new(k.to_vec()).expect("accepted states are finite"));
        self.residuals.push(residual);
        self.energies.push(drop);
    }

    /// Turns the per-sample drops stored by `push` into energies relative to
    /// the endpoint.
    fn finish_energies(&mut self) {
        let mut below = 0.0;
        for e in self.energies.iter_mut().rev() {
            let drop = std::mem::replace(e, below);
            below += drop;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub converged: bool,
    pub k_star: KVector,
    pub r_star: RadiusVector,
    /// Accepted flow steps, or Newton iterations.
    pub steps: usize,
    pub final_residual: f64,
    /// Integrated time; zero for Newton.
    pub time: f64,
    /// Fitted decay rate of the residual, when the trajectory allows a fit.
    pub rate: Option<f64>,
    /// Smallest Jacobian eigenvalue at `k_star`.
    pub rate_predicted: Option<f64>,
    pub termination: Termination,
}

/// Largest size for which the predicted rate is computed by dense eigensolve.
pub const EIGEN_LIMIT: usize = 256;

fn predicted_rate(graph: &crate::PatternGraph, k: &KVector) -> Option<f64> {
    if graph.vertex_count() > EIGEN_LIMIT {
        return None;
    }
    crate::curvature::jacobian(graph, k)
        .ok()
        .map(|j| j.smallest_eigenvalue())
}
