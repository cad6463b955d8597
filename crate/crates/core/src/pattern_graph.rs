//! Combinatorial data of a circle pattern.
//!
//! A [`RawPattern`] is what a pattern file parses into: string identifiers,
//! possibly inconsistent. [`validate`] lists everything wrong with it, and
//! [`PatternGraph::from_raw`] resolves a clean draft into an index-based graph
//! that the numerical modules consume. Vertex order in the draft fixes the
//! coordinate order of every per-vertex vector.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub id: String,
    pub u: String,
    pub w: String,
    pub theta: f64,
}

/// Unresolved pattern description, keyed by identifiers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawPattern {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub targets: Vec<(String, f64)>,
    /// Each face is a cyclic sequence of edge identifiers.
    pub faces: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoVertices,
    NoEdges,
    DuplicateVertex(String),
    DuplicateEdge(String),
    UnknownEndpoint { edge: String, vertex: String },
    SelfLoop { edge: String },
    ThetaOutOfRange { edge: String, theta: f64 },
    MissingTarget { vertex: String },
    DuplicateTarget { vertex: String },
    TargetForUnknownVertex { vertex: String },
    TargetNotPositive { vertex: String, value: f64 },
    IsolatedVertex { vertex: String },
    EmptyFace { face: usize },
    FaceUnknownEdge { face: usize, edge: String },
    FaceNotClosed { face: usize },
    EdgeFaceCount { edge: String, count: usize },
    EulerCharacteristic { chi: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "no vertices declared"),
            Violation::NoEdges => write!(f, "no edges declared"),
            Violation::DuplicateVertex(v) => write!(f, "duplicate vertex {v}"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge id {e}"),
            Violation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge}: unknown endpoint {vertex}")
            }
            Violation::SelfLoop { edge } => write!(f, "edge {edge}: self-loop"),
            Violation::ThetaOutOfRange { edge, theta } => {
                write!(f, "edge {edge}: theta out of (0, π/2]: {theta}")
            }
            Violation::MissingTarget { vertex } => write!(f, "vertex {vertex}: missing target"),
            Violation::DuplicateTarget { vertex } => write!(f, "vertex {vertex}: duplicate target"),
            Violation::TargetForUnknownVertex { vertex } => {
                write!(f, "target given for unknown vertex {vertex}")
            }
            Violation::TargetNotPositive { vertex, value } => {
                write!(
                    f,
                    "vertex {vertex}: target must be positive and finite, got {value}"
                )
            }
            Violation::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex}: not incident to any edge")
            }
            Violation::EmptyFace { face } => write!(f, "face {face}: empty boundary"),
            Violation::FaceUnknownEdge { face, edge } => {
                write!(f, "face {face}: unknown edge {edge}")
            }
            Violation::FaceNotClosed { face } => {
                write!(f, "face {face}: boundary is not a closed walk")
            }
            Violation::EdgeFaceCount { edge, count } => {
                write!(
                    f,
                    "edge {edge}: appears in {count} face boundaries, expected 2"
                )
            }
            Violation::EulerCharacteristic { chi } => {
                write!(f, "V - E + F = {chi} is not 2 - 2g for any genus g >= 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Accepted, but the convergence guarantee only covers the open interval.
    RightAngle { edge: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::RightAngle { edge } => write!(
                f,
                "edge {edge}: theta = π/2 is allowed, but convergence is only guaranteed for theta < π/2"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
    /// `V - E + F`, when faces were supplied and are consistent enough to count.
    pub euler_characteristic: Option<i64>,
    pub genus: Option<u64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Lists every violation of the pattern invariants. An empty violation list
/// means [`PatternGraph::from_raw`] will succeed.
pub fn validate(raw: &RawPattern) -> ValidationReport {
    let mut report = ValidationReport::default();
    let out = &mut report.violations;

    if raw.vertices.is_empty() {
        out.push(Violation::NoVertices);
    }
    if raw.edges.is_empty() {
        out.push(Violation::NoEdges);
    }

    let mut vindex: HashMap<&str, usize> = HashMap::new();
    for v in &raw.vertices {
        if vindex.insert(v.as_str(), vindex.len()).is_some() {
            out.push(Violation::DuplicateVertex(v.clone()));
        }
    }

    let mut degree = vec![0usize; raw.vertices.len()];
    let mut eindex: HashMap<&str, usize> = HashMap::new();
    for (i, e) in raw.edges.iter().enumerate() {
        if eindex.insert(e.id.as_str(), i).is_some() {
            out.push(Violation::DuplicateEdge(e.id.clone()));
        }
        for end in [&e.u, &e.w] {
            match vindex.get(end.as_str()) {
                Some(&vi) => degree[vi] += 1,
                None => out.push(Violation::UnknownEndpoint {
                    edge: e.id.clone(),
                    vertex: end.clone(),
                }),
            }
        }
        if e.u == e.w {
            out.push(Violation::SelfLoop { edge: e.id.clone() });
        }
        if !(e.theta > 0.0 && e.theta <= FRAC_PI_2) {
            out.push(Violation::ThetaOutOfRange {
                edge: e.id.clone(),
                theta: e.theta,
            });
        } else if e.theta == FRAC_PI_2 {
            report
                .warnings
                .push(Warning::RightAngle { edge: e.id.clone() });
        }
    }

    let mut seen_target = vec![false; raw.vertices.len()];
    for (v, value) in &raw.targets {
        match vindex.get(v.as_str()) {
            Some(&vi) => {
                if seen_target[vi] {
                    out.push(Violation::DuplicateTarget { vertex: v.clone() });
                }
                seen_target[vi] = true;
                if !(value.is_finite() && *value > 0.0) {
                    out.push(Violation::TargetNotPositive {
                        vertex: v.clone(),
                        value: *value,
                    });
                }
            }
            None => out.push(Violation::TargetForUnknownVertex { vertex: v.clone() }),
        }
    }
    for (vi, v) in raw.vertices.iter().enumerate() {
        if !seen_target[vi] {
            out.push(Violation::MissingTarget { vertex: v.clone() });
        }
        if degree[vi] == 0 {
            out.push(Violation::IsolatedVertex { vertex: v.clone() });
        }
    }

    if let Some(faces) = &raw.faces {
        let mut face_count = vec![0usize; raw.edges.len()];
        let mut faces_resolved = true;
        for (fi, face) in faces.iter().enumerate() {
            if face.is_empty() {
                out.push(Violation::EmptyFace { face: fi });
                faces_resolved = false;
                continue;
            }
            let mut cycle = Vec::with_capacity(face.len());
            for eid in face {
                match eindex.get(eid.as_str()) {
                    Some(&ei) => {
                        face_count[ei] += 1;
                        cycle.push(ei);
                    }
                    None => {
                        out.push(Violation::FaceUnknownEdge {
                            face: fi,
                            edge: eid.clone(),
                        });
                        faces_resolved = false;
                    }
                }
            }
            if cycle.len() == face.len() && !is_closed_walk(raw, &cycle) {
                out.push(Violation::FaceNotClosed { face: fi });
            }
        }
        if faces_resolved {
            for (ei, &count) in face_count.iter().enumerate() {
                if count != 2 {
                    out.push(Violation::EdgeFaceCount {
                        edge: raw.edges[ei].id.clone(),
                        count,
                    });
                }
            }
            let chi = raw.vertices.len() as i64 - raw.edges.len() as i64 + faces.len() as i64;
            report.euler_characteristic = Some(chi);
            if chi > 2 || chi % 2 != 0 {
                report
                    .violations
                    .push(Violation::EulerCharacteristic { chi });
            } else {
                report.genus = Some(((2 - chi) / 2) as u64);
            }
        }
    }
    report
}

fn is_closed_walk(raw: &RawPattern, cycle: &[usize]) -> bool {
    let ends = |i: usize| (raw.edges[i].u.as_str(), raw.edges[i].w.as_str());
    let (a, b) = ends(cycle[0]);
    [a, b].into_iter().any(|start| {
        let mut cur = start;
        for &e in cycle {
            let (u, w) = ends(e);
            cur = if cur == u {
                w
            } else if cur == w {
                u
            } else {
                return false;
            };
        }
        cur == start
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub ends: [VertexId; 2],
    pub theta: f64,
}

/// Validated, index-based pattern. Immutable once built.
#[derive(Debug, Clone)]
pub struct PatternGraph {
    vertex_ids: Vec<String>,
    edge_ids: Vec<String>,
    edges: Vec<Edge>,
    targets: Vec<f64>,
    faces: Option<Vec<Vec<EdgeId>>>,
    incidence: Vec<Vec<EdgeId>>,
    lookup: HashMap<String, VertexId>,
    warnings: Vec<Warning>,
    genus: Option<u64>,
}

impl PatternGraph {
    pub fn from_raw(raw: &RawPattern) -> Result<Self> {
        let report = validate(raw);
        if !report.is_valid() {
            return Err(Error::InvalidPattern(report));
        }
        let lookup: HashMap<String, VertexId> = raw
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), VertexId(i)))
            .collect();
        let edges: Vec<Edge> = raw
            .edges
            .iter()
            .map(|e| Edge {
                ends: [lookup[&e.u], lookup[&e.w]],
                theta: e.theta,
            })
            .collect();
        let mut targets = vec![0.0; raw.vertices.len()];
        for (v, value) in &raw.targets {
            targets[lookup[v].0] = *value;
        }
        let edge_lookup: HashMap<&str, EdgeId> = raw
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.as_str(), EdgeId(i)))
            .collect();
        let faces = raw.faces.as_ref().map(|faces| {
            faces
                .iter()
                .map(|f| f.iter().map(|e| edge_lookup[e.as_str()]).collect())
                .collect()
        });
        let mut incidence = vec![Vec::new(); raw.vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            for v in e.ends {
                incidence[v.0].push(EdgeId(i));
            }
        }
        Ok(PatternGraph {
            vertex_ids: raw.vertices.clone(),
            edge_ids: raw.edges.iter().map(|e| e.id.clone()).collect(),
            edges,
            targets,
            faces,
            incidence,
            lookup,
            warnings: report.warnings,
            genus: report.genus,
        })
    }

    /// Builds a graph on vertices `v0..v{n-1}` with edges `e0..`, for
    /// programmatic construction.
    pub fn from_indices(
        n: usize,
        edges: &[(usize, usize, f64)],
        targets: &[f64],
        faces: Option<&[Vec<usize>]>,
    ) -> Result<Self> {
        let vname = |i: usize| format!("v{i}");
        let raw = RawPattern {
            vertices: (0..n).map(vname).collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(u, w, theta))| EdgeSpec {
                    id: format!("e{i}"),
                    u: vname(u),
                    w: vname(w),
                    theta,
                })
                .collect(),
            targets: targets
                .iter()
                .enumerate()
                .map(|(i, &t)| (vname(i), t))
                .collect(),
            faces: faces.map(|fs| {
                fs.iter()
                    .map(|f| f.iter().map(|&e| format!("e{e}")).collect())
                    .collect()
            }),
        };
        Self::from_raw(&raw)
    }

    /// Same combinatorics and angles, new targets.
    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self> {
        let mut raw = self.to_raw();
        if targets.len() != self.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count(),
                got: targets.len(),
            });
        }
        raw.targets = raw.vertices.iter().cloned().zip(targets).collect();
        Self::from_raw(&raw)
    }

    pub fn to_raw(&self) -> RawPattern {
        RawPattern {
            vertices: self.vertex_ids.clone(),
            edges: self
                .edges
                .iter()
                .zip(&self.edge_ids)
                .map(|(e, id)| EdgeSpec {
                    id: id.clone(),
                    u: self.vertex_ids[e.ends[0].0].clone(),
                    w: self.vertex_ids[e.ends[1].0].clone(),
                    theta: e.theta,
                })
                .collect(),
            targets: self
                .vertex_ids
                .iter()
                .cloned()
                .zip(self.targets.iter().copied())
                .collect(),
            faces: self.faces.as_ref().map(|fs| {
                fs.iter()
                    .map(|f| f.iter().map(|e| self.edge_ids[e.0].clone()).collect())
                    .collect()
            }),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edge_ids
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn faces(&self) -> Option<&[Vec<EdgeId>]> {
        self.faces.as_deref()
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn genus(&self) -> Option<u64> {
        self.genus
    }

    pub fn vertex(&self, id: &str) -> Result<VertexId> {
        self.lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{}", v.0)))
        }
    }

    /// Edges with `v` as an endpoint, with multiplicity, in edge order.
    pub fn incident_edges(&self, v: VertexId) -> Result<&[EdgeId]> {
        self.check_vertex(v)?;
        Ok(&self.incidence[v.0])
    }

    /// `E(X)`: edges with at least one endpoint in `subset`, in edge order.
    pub fn boundary_edge_set(&self, subset: &[VertexId]) -> Result<Vec<EdgeId>> {
        let mut member = vec![false; self.vertex_count()];
        for &v in subset {
            self.check_vertex(v)?;
            member[v.0] = true;
        }
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| member[e.ends[0].0] || member[e.ends[1].0])
            .map(|(i, _)| EdgeId(i))
            .collect())
    }

    /// `2 * sum of theta` over the edges at `v`: the strict upper bound on `L_v`.
    pub fn curvature_bound(&self, v: VertexId) -> Result<f64> {
        Ok(self
            .incident_edges(v)?
            .iter()
            .map(|e| 2.0 * self.edges[e.0].theta)
            .sum())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.vertex_count() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.vertex_count(),
                got: len,
            })
        }
    }
}

/// Log-curvature coordinates `K_v = ln cot r_v`, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct KVector(Vec<f64>);

impl KVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(KVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        KVector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `r = arccot(exp K)`. For `|K|` beyond about 36 the result rounds to
    /// the ends of `(0, pi/2)` in double precision.
    pub fn to_radii(&self) -> RadiusVector {
        RadiusVector(
            self.0
                .iter()
                .map(|&k| radius_from_log_curvature(k))
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &KVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Circle radii, each strictly inside `(0, pi/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusVector(Vec<f64>);

impl RadiusVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value < FRAC_PI_2) {
                return Err(Error::RadiusOutOfRange { index, value });
            }
        }
        Ok(RadiusVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_k(&self) -> KVector {
        KVector(
            self.0
                .iter()
                .map(|&r| log_curvature_from_radius(r))
                .collect(),
        )
    }
}

pub fn log_curvature_from_radius(r: f64) -> f64 {
    -r.tan().ln()
}

pub fn radius_from_log_curvature(k: f64) -> f64 {
    (-k).exp().atan()
}
