//! Attainability of the prescribed curvatures.
//!
//! Targets are attainable exactly when every nonempty vertex subset `X` has
//! positive slack `2 sum_{e in E(X)} theta(e) - sum_{v in X} L_hat_v`.
//! [`check_exhaustive`] enumerates all subsets and is the reference verdict.
//! [`check_flow`] decides the non-strict version with a margin `epsilon`
//! through a transportation network, which scales to large patterns.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{min_over_range, Execution};
use crate::pattern_graph::{PatternGraph, VertexId};

pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Flow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Exhaustive: the minimum slack over nonempty subsets. Flow: the exact
    /// slack of `witness`, an upper bound on that minimum.
    pub worst_slack: f64,
    pub witness: Vec<VertexId>,
    pub method: Method,
}

/// Slack of one subset, summed in edge order and vertex order.
pub fn subset_slack(graph: &PatternGraph, subset: &[VertexId]) -> Result<f64> {
    let mut member = vec![false; graph.vertex_count()];
    for &v in subset {
        graph.incident_edges(v)?;
        member[v.0] = true;
    }
    let theta_sum: f64 = graph
        .edges()
        .iter()
        .filter(|e| member[e.ends[0].0] || member[e.ends[1].0])
        .map(|e| e.theta)
        .sum();
    let target_sum: f64 = graph
        .targets()
        .iter()
        .zip(&member)
        .filter(|(_, &m)| m)
        .map(|(t, _)| t)
        .sum();
    Ok(2.0 * theta_sum - target_sum)
}

fn rounding_floor(graph: &PatternGraph) -> f64 {
    let theta: f64 = graph.edges().iter().map(|e| e.theta).sum();
    let targets: f64 = graph.targets().iter().map(|t| t.abs()).sum();
    64.0 * f64::EPSILON * (2.0 * theta + targets)
}

/// Lexicographic order of the sorted index lists encoded by two bitmasks.
fn lex_cmp(mut a: u32, mut b: u32) -> Ordering {
    loop {
        match (a, b) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {
                let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
                if ia != ib {
                    return ia.cmp(&ib);
                }
                a &= a - 1;
                b &= b - 1;
            }
        }
    }
}

fn mask_members(mask: u32) -> Vec<VertexId> {
    (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| VertexId(i as usize))
        .collect()
}

pub fn check_exhaustive(graph: &PatternGraph) -> Result<FeasibilityReport> {
    check_exhaustive_with(graph, Execution::default())
}

/// Minimum over all `2^N - 1` nonempty subsets; ties go to the
/// lexicographically smallest vertex list.
///
/// A slack within summation rounding of zero counts as saturated, so
/// targets that exactly meet a bound are reported infeasible.
pub fn check_exhaustive_with(graph: &PatternGraph, exec: Execution) -> Result<FeasibilityReport> {
    let n = graph.vertex_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooManyVertices {
            max: EXHAUSTIVE_LIMIT,
            got: n,
        });
    }
    let edge_masks: Vec<(u32, f64)> = graph
        .edges()
        .iter()
        .map(|e| ((1u32 << e.ends[0].0) | (1u32 << e.ends[1].0), e.theta))
        .collect();
    let targets = graph.targets();
    let slack = |mask: u32| {
        let theta_sum: f64 = edge_masks
            .iter()
            .filter(|(m, _)| m & mask != 0)
            .map(|(_, t)| t)
            .sum();
        let target_sum: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| targets[i])
            .sum();
        2.0 * theta_sum - target_sum
    };
    let better = |a: &(f64, u32), b: &(f64, u32)| match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => lex_cmp(a.1, b.1) == Ordering::Less,
    };
    let (worst_slack, mask) = min_over_range(
        exec,
        1,
        1u64 << n,
        |m| {
            let m = m as u32;
            (slack(m), m)
        },
        better,
    )
    .expect("a valid pattern has at least one vertex");
    Ok(FeasibilityReport {
        feasible: worst_slack > rounding_floor(graph),
        worst_slack,
        witness: mask_members(mask),
        method: Method::Exhaustive,
    })
}

/// Margin-`epsilon` check by max-flow.
///
/// Network: source to each vertex with capacity `L_hat_v`, vertex to each
/// incident edge unbounded, edge to sink with capacity `2 theta(e) - epsilon / M`.
/// The targets are routable iff every subset satisfies
/// `sum_X L_hat <= 2 sum_{E(X)} theta - epsilon |E(X)| / M`, so a feasible
/// verdict implies strict feasibility, and an infeasible verdict comes with a
/// min-cut witness whose slack is below `epsilon`.
pub fn check_flow(graph: &PatternGraph, epsilon: f64) -> Result<FeasibilityReport> {
    if !(epsilon > 0.0) {
        return Err(Error::NonPositiveMargin(epsilon));
    }
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let margin = epsilon / m as f64;
    let source = 0;
    let sink = n + m + 1;
    let mut net = FlowNetwork::new(n + m + 2);
    for (v, &t) in graph.targets().iter().enumerate() {
        net.add_arc(source, 1 + v, t);
    }
    for (i, e) in graph.edges().iter().enumerate() {
        let node = 1 + n + i;
        net.add_arc(1 + e.ends[0].0, node, f64::INFINITY);
        net.add_arc(1 + e.ends[1].0, node, f64::INFINITY);
        net.add_arc(node, sink, (2.0 * e.theta - margin).max(0.0));
    }
    let demand: f64 = graph.targets().iter().sum();
    let tol = 1e-13 * demand.max(1.0);
    let flow = net.max_flow(source, sink, tol * 1e-3);
    let feasible = flow >= demand - tol;

    let witness: Vec<VertexId> = if feasible {
        (0..n).map(VertexId).collect()
    } else {
        let reach = net.reachable(source, tol * 1e-3);
        let x: Vec<VertexId> = (0..n).filter(|&v| reach[1 + v]).map(VertexId).collect();
        if x.is_empty() {
            (0..n).map(VertexId).collect()
        } else {
            x
        }
    };
    let worst_slack = subset_slack(graph, &witness)?;
    Ok(FeasibilityReport {
        feasible,
        worst_slack,
        witness,
        method: Method::Flow,
    })
}

struct Arc {
    to: usize,
    cap: f64,
}

/// Dinic's algorithm on `f64` capacities.
struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    fn levels(&self, source: usize, tiny: f64) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        let mut queue = std::collections::VecDeque::from([source]);
        level[source] = Some(0);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > tiny && level[arc.to].is_none() {
                    level[arc.to] = Some(level[u].unwrap() + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn reachable(&self, source: usize, tiny: f64) -> Vec<bool> {
        self.levels(source, tiny)
            .iter()
            .map(Option::is_some)
            .collect()
    }

    fn augment(
        &mut self,
        u: usize,
        sink: usize,
        limit: f64,
        tiny: f64,
        level: &[Option<usize>],
        next: &mut [usize],
    ) -> f64 {
        if u == sink {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > tiny && level[to] == level[u].map(|l| l + 1) {
                let pushed = self.augment(to, sink, limit.min(cap), tiny, level, next);
                if pushed > 0.0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, source: usize, sink: usize, tiny: f64) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(source, tiny);
            if level[sink].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(source, sink, f64::INFINITY, tiny, &level, &mut next);
                if pushed <= tiny {
                    break;
                }
                total += pushed;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn k4() -> PatternGraph {
        let edges: Vec<_> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(u, w)| (u, w, FRAC_PI_3))
            .collect();
        PatternGraph::from_indices(4, &edges, &[2.0 * PI / 3.0; 4], None).unwrap()
    }

    #[test]
    fn tetrahedron_slack() {
        let r = check_exhaustive(&k4()).unwrap();
        assert!(r.feasible);
        assert!((r.worst_slack - 4.0 * PI / 3.0).abs() < 1e-12);
        let again = subset_slack(&k4(), &r.witness).unwrap();
        assert!((again - r.worst_slack).abs() < 1e-12);
        let f = check_flow(&k4(), 1e-9).unwrap();
        assert!(f.feasible);
    }

    #[test]
    fn saturated_single_edge() {
        let g = PatternGraph::from_indices(2, &[(0, 1, FRAC_PI_2)], &[FRAC_PI_2; 2], None).unwrap();
        let r = check_exhaustive(&g).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.worst_slack, 0.0);
        assert_eq!(r.witness, vec![VertexId(0), VertexId(1)]);
        for eps in [1e-12, 1e-6, 0.1] {
            let f = check_flow(&g, eps).unwrap();
            assert!(!f.feasible);
            assert_eq!(f.witness, vec![VertexId(0), VertexId(1)]);
            assert!(f.worst_slack <= eps);
        }
    }

    #[test]
    fn star_deficit_spreads_to_whole_set() {
        let theta = 0.7;
        let edges = [(0, 1, theta), (0, 2, theta), (0, 3, theta)];
        let g = PatternGraph::from_indices(4, &edges, &[6.0 * theta, 0.1, 0.1, 0.1], None).unwrap();
        let r = check_exhaustive(&g).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.witness, (0..4).map(VertexId).collect::<Vec<_>>());
        assert!((r.worst_slack + 0.3).abs() < 1e-14);
        assert!(!check_flow(&g, 1e-12).unwrap().feasible);
    }

    #[test]
    fn lexicographic_mask_order() {
        assert_eq!(lex_cmp(0b1001, 0b0010), Ordering::Less);
        assert_eq!(lex_cmp(0b0001, 0b1111), Ordering::Less);
        assert_eq!(lex_cmp(0b0110, 0b0110), Ordering::Equal);
        assert_eq!(lex_cmp(0b0100, 0b0011), Ordering::Greater);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            check_flow(&k4(), 0.0),
            Err(Error::NonPositiveMargin(_))
        ));
        let n = EXHAUSTIVE_LIMIT + 1;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        let g = PatternGraph::from_indices(n, &edges, &vec![1.0; n], None).unwrap();
        assert!(matches!(
            check_exhaustive(&g),
            Err(Error::TooManyVertices { .. })
        ));
        assert!(check_flow(&g, 1e-9).unwrap().feasible);
    }
}
