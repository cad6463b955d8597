//! Per-vertex quantities assembled from the bigons at each edge.
//!
//! Every sum runs over edges in input order, whether or not the per-edge
//! terms were evaluated in parallel.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bigon::{BigonInput, BigonMeasurement};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::pattern_graph::{KVector, PatternGraph, VertexId};
use crate::quadrature::GaussLegendre;

/// Below this many edges the per-edge loop always runs sequentially.
pub const PARALLEL_EDGE_THRESHOLD: usize = 256;

/// Largest pattern whose Jacobian is routinely materialized densely.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureState {
    /// `L_v`, total geodesic curvature of each circle.
    pub total: Vec<f64>,
    /// `alpha_v`, cone angle at each circle center.
    pub cone_angle: Vec<f64>,
    /// `l_v = alpha_v sin r_v`.
    pub length: Vec<f64>,
    /// `sum (pi - theta)` around each face, when faces are known.
    pub face_cone: Option<Vec<f64>>,
}

fn edge_exec(graph: &PatternGraph, exec: Execution) -> Execution {
    if graph.edge_count() >= PARALLEL_EDGE_THRESHOLD {
        exec
    } else {
        Execution::Sequential
    }
}

fn bigon_at(graph: &PatternGraph, k: &[f64], e: usize) -> BigonInput {
    let edge = &graph.edges()[e];
    let [u, w] = edge.ends;
    BigonInput::from_log_curvatures_unchecked(k[u.0], k[w.0], edge.theta)
}

fn measurements(graph: &PatternGraph, k: &[f64], exec: Execution) -> Vec<BigonMeasurement> {
    map_indexed(edge_exec(graph, exec), graph.edge_count(), |e| {
        bigon_at(graph, k, e).measure()
    })
}

fn checked<'a>(graph: &PatternGraph, k: &'a KVector) -> Result<&'a [f64]> {
    graph.check_len(k.len())?;
    Ok(k.as_slice())
}

pub fn curvatures(graph: &PatternGraph, k: &KVector) -> Result<CurvatureState> {
    curvatures_with(graph, k, Execution::default())
}

pub fn curvatures_with(
    graph: &PatternGraph,
    k: &KVector,
    exec: Execution,
) -> Result<CurvatureState> {
    let kv = checked(graph, k)?;
    let n = graph.vertex_count();
    let mut total = vec![0.0; n];
    let mut cone_angle = vec![0.0; n];
    let mut length = vec![0.0; n];
    for (edge, m) in graph.edges().iter().zip(measurements(graph, kv, exec)) {
        for (side, v) in edge.ends.iter().enumerate() {
            total[v.0] += m.curvature[side];
            cone_angle[v.0] += 2.0 * m.beta[side];
            length[v.0] += m.arc_length[side];
        }
    }
    let face_cone = graph.faces().map(|faces| {
        faces
            .iter()
            .map(|f| f.iter().map(|e| PI - graph.edges()[e.0].theta).sum())
            .collect()
    });
    Ok(CurvatureState {
        total,
        cone_angle,
        length,
        face_cone,
    })
}

/// `L(K)` into `out`, skipping everything the flow does not need.
pub(crate) fn total_curvature_into(
    graph: &PatternGraph,
    k: &[f64],
    exec: Execution,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let exec = edge_exec(graph, exec);
    if exec.is_parallel() {
        let parts = map_indexed(exec, graph.edge_count(), |e| {
            bigon_at(graph, k, e).curvatures()
        });
        for (edge, c) in graph.edges().iter().zip(parts) {
            out[edge.ends[0].0] += c[0];
            out[edge.ends[1].0] += c[1];
        }
    } else {
        for (e, edge) in graph.edges().iter().enumerate() {
            let c = bigon_at(graph, k, e).curvatures();
            out[edge.ends[0].0] += c[0];
            out[edge.ends[1].0] += c[1];
        }
    }
}

/// `L(K) - L_hat`.
pub fn residual(graph: &PatternGraph, k: &KVector) -> Result<Vec<f64>> {
    let kv = checked(graph, k)?;
    let mut out = vec![0.0; graph.vertex_count()];
    total_curvature_into(graph, kv, Execution::default(), &mut out);
    for (o, t) in out.iter_mut().zip(graph.targets()) {
        *o -= t;
    }
    Ok(out)
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `dL/dK`, kept as a diagonal plus one coupling per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureJacobian {
    diagonal: Vec<f64>,
    couplings: Vec<(VertexId, VertexId, f64)>,
}

impl CurvatureJacobian {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Per-edge off-diagonal terms `(u, w, dL_u/dK_w)` in edge order.
    pub fn couplings(&self) -> &[(VertexId, VertexId, f64)] {
        &self.couplings
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return self.diagonal[u];
        }
        self.couplings
            .iter()
            .filter(|(a, b, _)| (a.0 == u && b.0 == v) || (a.0 == v && b.0 == u))
            .map(|c| c.2)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for &(u, w, c) in &self.couplings {
            m[(u.0, w.0)] += c;
            m[(w.0, u.0)] += c;
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }

    /// `J x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for &(u, w, c) in &self.couplings {
            y[u.0] += c * x[w.0];
            y[w.0] += c * x[u.0];
        }
        y
    }

    /// Dense symmetric eigensolve; intended for desk-scale patterns.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dense())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

pub fn jacobian(graph: &PatternGraph, k: &KVector) -> Result<CurvatureJacobian> {
    jacobian_with(graph, k, Execution::default())
}

pub fn jacobian_with(
    graph: &PatternGraph,
    k: &KVector,
    exec: Execution,
) -> Result<CurvatureJacobian> {
    let kv = checked(graph, k)?;
    let mut diagonal = vec![0.0; graph.vertex_count()];
    let mut couplings = Vec::with_capacity(graph.edge_count());
    for (edge, m) in graph.edges().iter().zip(measurements(graph, kv, exec)) {
        let [u, w] = edge.ends;
        diagonal[u.0] += m.jacobian[0][0];
        diagonal[w.0] += m.jacobian[1][1];
        couplings.push((u, w, m.jacobian[0][1]));
    }
    Ok(CurvatureJacobian {
        diagonal,
        couplings,
    })
}

/// Sum over edges of the line integral of `L_1 dK_1 + L_2 dK_2` along the
/// straight segment from `from` to `to`. Target term not included.
fn edge_work(
    graph: &PatternGraph,
    from: &[f64],
    to: &[f64],
    rule: &GaussLegendre,
    exec: Execution,
) -> f64 {
    let per_edge = |e: usize| {
        let edge = &graph.edges()[e];
        let [u, w] = edge.ends;
        let (du, dw) = (to[u.0] - from[u.0], to[w.0] - from[w.0]);
        if du == 0.0 && dw == 0.0 {
            return 0.0;
        }
        rule.unit_interval()
            .map(|(s, wt)| {
                let c = BigonInput::from_log_curvatures_unchecked(
                    from[u.0] + s * du,
                    from[w.0] + s * dw,
                    edge.theta,
                )
                .curvatures();
                wt * (c[0] * du + c[1] * dw)
            })
            .sum::<f64>()
    };
    let exec = edge_exec(graph, exec);
    if exec.is_parallel() {
        map_indexed(exec, graph.edge_count(), per_edge)
            .into_iter()
            .sum()
    } else {
        (0..graph.edge_count()).map(per_edge).sum()
    }
}

/// `E(to) - E(from)` on raw slices; the flow's acceptance test.
pub(crate) fn energy_difference(
    graph: &PatternGraph,
    from: &[f64],
    to: &[f64],
    rule: &GaussLegendre,
    exec: Execution,
) -> f64 {
    let linear: f64 = graph
        .targets()
        .iter()
        .zip(from.iter().zip(to))
        .map(|(t, (a, b))| t * (b - a))
        .sum();
    edge_work(graph, from, to, rule, exec) - linear
}

/// `E(k) - E(reference)` for the convex potential whose gradient is `L - L_hat`.
pub fn potential(graph: &PatternGraph, k: &KVector, reference: &KVector) -> Result<f64> {
    potential_with(
        graph,
        k,
        reference,
        &GaussLegendre::default(),
        Execution::default(),
    )
}

pub fn potential_with(
    graph: &PatternGraph,
    k: &KVector,
    reference: &KVector,
    rule: &GaussLegendre,
    exec: Execution,
) -> Result<f64> {
    let kv = checked(graph, k)?;
    let rv = checked(graph, reference)?;
    Ok(energy_difference(graph, rv, kv, rule, exec))
}
