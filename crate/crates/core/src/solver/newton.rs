use log::debug;
use nalgebra::DVector;

use super::{predicted_rate, SolveResult, Termination, EIGEN_LIMIT};
use crate::curvature::{jacobian, max_norm, residual, CurvatureJacobian, DENSE_LIMIT};
use crate::error::Result;
use crate::pattern_graph::{KVector, PatternGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo constant of the backtracking search on `0.5 |L - L_hat|^2`.
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Longest step in `max |delta K|`; longer Newton steps are shortened.
    pub max_step: f64,
    /// A residual below `tol` only counts as a root when `|F| / lambda_min(J)`,
    /// the distance bound to the zero, is at most this. Runs escaping to
    /// infinity on saturated targets fail it.
    pub max_root_error: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-12,
            max_iter: 100,
            armijo: 1e-4,
            max_backtracks: 60,
            max_step: 2.0,
            max_root_error: 1e-6,
        }
    }
}

pub fn newton_solve(
    graph: &PatternGraph,
    k0: &KVector,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    newton_solve_with(
        graph,
        k0,
        &NewtonConfig {
            tol,
            max_iter,
            ..NewtonConfig::default()
        },
    )
}

/// Solves `J delta = -F` by Cholesky for small patterns and CG otherwise.
fn newton_direction(j: &CurvatureJacobian, f: &[f64]) -> Option<Vec<f64>> {
    let n = f.len();
    if n <= DENSE_LIMIT {
        let chol = j.to_dense().cholesky()?;
        let d = chol.solve(&DVector::from_iterator(n, f.iter().map(|x| -x)));
        let d: Vec<f64> = d.iter().copied().collect();
        d.iter().all(|x| x.is_finite()).then_some(d)
    } else {
        conjugate_gradient(j, f)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn conjugate_gradient(j: &CurvatureJacobian, f: &[f64]) -> Option<Vec<f64>> {
    let n = f.len();
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = f.iter().map(|v| -v).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let stop = rr * 1e-28;
    for _ in 0..(10 * n).max(100) {
        if rr <= stop {
            break;
        }
        let ap = j.apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return None;
        }
        let a = rr / pap;
        for i in 0..n {
            x[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        let rr_new = dot(&r, &r);
        let b = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + b * p[i];
        }
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Skipped above the dense eigensolve limit.
fn root_is_certified(graph: &PatternGraph, k: &KVector, f: &[f64], max_error: f64) -> Result<bool> {
    if graph.vertex_count() > EIGEN_LIMIT {
        return Ok(true);
    }
    let lambda = jacobian(graph, k)?.smallest_eigenvalue();
    Ok(dot(f, f).sqrt() <= max_error * lambda)
}

/// Damped Newton on `L(K) - L_hat = 0` with backtracking on the squared
/// residual.
pub fn newton_solve_with(
    graph: &PatternGraph,
    k0: &KVector,
    config: &NewtonConfig,
) -> Result<SolveResult> {
    let mut k = k0.clone();
    let mut f = residual(graph, &k)?;
    let mut phi = 0.5 * dot(&f, &f);
    let mut iterations = 0;

    let termination = loop {
        if max_norm(&f) <= config.tol {
            break if root_is_certified(graph, &k, &f, config.max_root_error)? {
                Termination::Tolerance
            } else {
                Termination::Degenerate
            };
        }
        if iterations >= config.max_iter {
            break Termination::MaxIterations;
        }
        let j = jacobian(graph, &k)?;
        // With J positive definite, -F also descends on phi; it stands in when
        // the factorization breaks down far from the root.
        let (mut delta, slope) = match newton_direction(&j, &f) {
            Some(d) => (d, -2.0 * phi),
            None => {
                let d: Vec<f64> = f.iter().map(|x| -x).collect();
                let slope = -dot(&f, &j.apply(&f));
                if !(slope < 0.0) {
                    break Termination::SingularJacobian;
                }
                (d, slope)
            }
        };
        let longest = max_norm(&delta);
        let shrink = if longest > config.max_step {
            config.max_step / longest
        } else {
            1.0
        };
        for d in &mut delta {
            *d *= shrink;
        }
        let slope = slope * shrink;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..config.max_backtracks {
            let trial: Vec<f64> = k
                .as_slice()
                .iter()
                .zip(&delta)
                .map(|(a, d)| a + step * d)
                .collect();
            if let Ok(trial) = KVector::new(trial) {
                let f_trial = residual(graph, &trial)?;
                let phi_trial = 0.5 * dot(&f_trial, &f_trial);
                if phi_trial <= phi + config.armijo * step * slope {
                    accepted = Some((trial, f_trial, phi_trial));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((trial, f_trial, phi_trial)) = accepted else {
            break Termination::LineSearchFailed;
        };
        debug!(
            "newton iter {iterations}: step {step}, residual {:e}",
            max_norm(&f_trial)
        );
        k = trial;
        f = f_trial;
        phi = phi_trial;
        iterations += 1;
    };

    let converged = termination == Termination::Tolerance;
    let rate_predicted = if converged {
        predicted_rate(graph, &k)
    } else {
        None
    };
    Ok(SolveResult {
        converged,
        r_star: k.to_radii(),
        k_star: k,
        steps: iterations,
        final_residual: max_norm(&f),
        time: 0.0,
        rate: None,
        rate_predicted,
        termination,
    })
}
