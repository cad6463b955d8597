use std::f64::consts::FRAC_PI_2;

use log::debug;

use super::{
    estimate_rate, predicted_rate, FlowConfig, Integrator, SolveResult, Termination, Trajectory,
};
use crate::curvature::{energy_difference, max_norm, total_curvature_into};
use crate::error::Result;
use crate::exec::{map_slice, Execution};
use crate::pattern_graph::{log_curvature_from_radius, KVector, PatternGraph, RadiusVector};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coordinates {
    /// `dK/dt = -(L - L_hat)`
    Log,
    /// `dr/dt = (L - L_hat) sin(2r) / 2`
    Radius,
}

impl Coordinates {
    fn to_k(self, x: &[f64], out: &mut [f64]) {
        match self {
            Coordinates::Log => out.copy_from_slice(x),
            Coordinates::Radius => {
                for (o, &r) in out.iter_mut().zip(x) {
                    *o = log_curvature_from_radius(r);
                }
            }
        }
    }

    fn admissible(self, x: &[f64]) -> bool {
        match self {
            Coordinates::Log => x.iter().all(|v| v.is_finite()),
            Coordinates::Radius => x.iter().all(|&r| r > 0.0 && r < FRAC_PI_2),
        }
    }

    fn velocity(self, x: &[f64], residual: &[f64], out: &mut [f64]) {
        match self {
            Coordinates::Log => {
                for (o, r) in out.iter_mut().zip(residual) {
                    *o = -r;
                }
            }
            Coordinates::Radius => {
                for ((o, r), &x) in out.iter_mut().zip(residual).zip(x) {
                    *o = 0.5 * r * (2.0 * x).sin();
                }
            }
        }
    }
}

struct FlowRun<'a> {
    graph: &'a PatternGraph,
    coords: Coordinates,
    exec: Execution,
    k_buf: Vec<f64>,
    l_buf: Vec<f64>,
}

impl FlowRun<'_> {
    /// Residual `L - L_hat` at state `x`, with `K(x)` left in `k_buf`.
    fn residual(&mut self, x: &[f64], out: &mut [f64]) {
        self.coords.to_k(x, &mut self.k_buf);
        total_curvature_into(self.graph, &self.k_buf, self.exec, &mut self.l_buf);
        for ((o, l), t) in out.iter_mut().zip(&self.l_buf).zip(self.graph.targets()) {
            *o = l - t;
        }
    }

    fn velocity_at(&mut self, x: &[f64], out: &mut [f64]) {
        let mut res = vec![0.0; x.len()];
        self.residual(x, &mut res);
        self.coords.velocity(x, &res, out);
    }

    /// One step of size `h` from `x` whose velocity `v0` is already known.
    fn step(&mut self, integrator: Integrator, x: &[f64], v0: &[f64], h: f64) -> Vec<f64> {
        let n = x.len();
        let axpy = |a: f64, v: &[f64]| -> Vec<f64> {
            x.iter().zip(v).map(|(xi, vi)| xi + a * vi).collect()
        };
        match integrator {
            Integrator::Euler => axpy(h, v0),
            Integrator::Rk4 => {
                let mut k2 = vec![0.0; n];
                let mut k3 = vec![0.0; n];
                let mut k4 = vec![0.0; n];
                let x2 = axpy(0.5 * h, v0);
                self.velocity_at(&x2, &mut k2);
                let x3 = axpy(0.5 * h, &k2);
                self.velocity_at(&x3, &mut k3);
                let x4 = axpy(h, &k3);
                self.velocity_at(&x4, &mut k4);
                (0..n)
                    .map(|i| x[i] + h / 6.0 * (v0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                    .collect()
            }
        }
    }

    fn run(&mut self, x0: Vec<f64>, config: &FlowConfig) -> (Trajectory, SolveResult) {
        let n = x0.len();
        let rule = GaussLegendre::new(config.quadrature_nodes);
        let mut x = x0;
        let mut res = vec![0.0; n];
        self.residual(&x, &mut res);
        let mut k = self.k_buf.clone();
        let mut res_norm = max_norm(&res);
        let mut vel = vec![0.0; n];
        self.coords.velocity(&x, &res, &mut vel);

        let mut traj = Trajectory::default();
        let mut t = 0.0;
        let mut drop = 0.0;
        let mut steps = 0usize;
        let mut dt = config.step;
        traj.push(t, &k, res_norm, 0.0);
        let mut last_capture = t;
        let (mut marker_t, mut marker_res) = (t, res_norm);

        let termination = loop {
            if res_norm <= config.tol {
                break Termination::Tolerance;
            }
            if t >= config.max_time {
                break Termination::MaxTime;
            }
            if max_norm(&k) > config.escape_bound && t - marker_t > config.stall_window {
                break Termination::Diverging;
            }
            if dt < config.min_step {
                break Termination::StepUnderflow;
            }
            let h = dt.min(config.max_time - t);
            let trial = self.step(config.integrator, &x, &vel, h);
            if !self.coords.admissible(&trial) {
                dt *= 0.5;
                continue;
            }
            let mut k_trial = vec![0.0; n];
            self.coords.to_k(&trial, &mut k_trial);
            let de = energy_difference(self.graph, &k, &k_trial, &rule, self.exec);
            if !(de <= 0.0) {
                debug!("t={t:.6}: energy rose by {de:e}, halving step {dt:e}");
                dt *= 0.5;
                continue;
            }
            t += h;
            steps += 1;
            drop -= de;
            x = trial;
            k = k_trial;
            self.residual(&x, &mut res);
            res_norm = max_norm(&res);
            self.coords.velocity(&x, &res, &mut vel);
            if res_norm < 0.99 * marker_res {
                marker_t = t;
                marker_res = res_norm;
            }
            if t - last_capture >= config.capture_every || res_norm <= config.tol {
                traj.push(t, &k, res_norm, drop);
                drop = 0.0;
                last_capture = t;
            }
        };
        if traj.times.last() != Some(&t) {
            traj.push(t, &k, res_norm, drop);
        }
        traj.finish_energies();

        let converged = termination == Termination::Tolerance;
        let k_star = KVector::new(k).expect("accepted states are finite");
        let (rate, rate_predicted) = if converged {
            (
                estimate_rate(&traj).ok(),
                predicted_rate(self.graph, &k_star),
            )
        } else {
            (None, None)
        };
        let r_star = match self.coords {
            Coordinates::Log => k_star.to_radii(),
            Coordinates::Radius => RadiusVector::new(x).expect("admissible radii"),
        };
        debug!("flow finished: {termination:?} after {steps} steps, t={t}, residual={res_norm:e}");
        let result = SolveResult {
            converged,
            k_star,
            r_star,
            steps,
            final_residual: res_norm,
            time: t,
            rate,
            rate_predicted,
            termination,
        };
        (traj, result)
    }
}

fn run_flow(
    graph: &PatternGraph,
    x0: Vec<f64>,
    coords: Coordinates,
    config: &FlowConfig,
    exec: Execution,
) -> Result<(Trajectory, SolveResult)> {
    config.check()?;
    graph.check_len(x0.len())?;
    let n = x0.len();
    let mut run = FlowRun {
        graph,
        coords,
        exec,
        k_buf: vec![0.0; n],
        l_buf: vec![0.0; n],
    };
    Ok(run.run(x0, config))
}

/// Integrates `dK/dt = -(L(K) - L_hat)` from `k0`.
pub fn integrate_flow(
    graph: &PatternGraph,
    k0: &KVector,
    config: &FlowConfig,
) -> Result<(Trajectory, SolveResult)> {
    run_flow(
        graph,
        k0.as_slice().to_vec(),
        Coordinates::Log,
        config,
        Execution::default(),
    )
}

/// Integrates the radius form `dr/dt = (L - L_hat) sin(2r) / 2` from `r0`.
/// Trajectory states are still reported as log-curvatures.
pub fn integrate_flow_radius(
    graph: &PatternGraph,
    r0: &RadiusVector,
    config: &FlowConfig,
) -> Result<(Trajectory, SolveResult)> {
    run_flow(
        graph,
        r0.as_slice().to_vec(),
        Coordinates::Radius,
        config,
        Execution::default(),
    )
}

/// Independent flow runs from several initial points, in input order.
/// Each run evaluates its field sequentially; the runs themselves are spread
/// over threads under [`Execution::Parallel`].
pub fn integrate_flow_many(
    graph: &PatternGraph,
    starts: &[KVector],
    config: &FlowConfig,
    exec: Execution,
) -> Vec<Result<(Trajectory, SolveResult)>> {
    map_slice(exec, starts, |k0| {
        run_flow(
            graph,
            k0.as_slice().to_vec(),
            Coordinates::Log,
            config,
            Execution::Sequential,
        )
    })
}
