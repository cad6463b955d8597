//! JSON run reports printed by the command-line tool.

use serde::Serialize;

use crate::curvature::CurvatureState;
use crate::feasibility::{FeasibilityReport, Method};
use crate::pattern_graph::PatternGraph;
use crate::solver::{SolveResult, Termination};
use crate::KVector;

#[derive(Debug, Clone, Serialize, Default)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<VertexRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<FaceRow>>,
    /// `max |L - L_hat|` at the reported radii.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<FeasibilityRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solvers: Vec<SolverRow>,
    /// `max |K_flow - K_newton|` when both methods ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn failure(command: &str, error: impl ToString) -> Self {
        RunReport {
            error: Some(error.to_string()),
            ..Self::new(command)
        }
    }

    /// Fills the per-vertex and per-face sections from an evaluated state.
    pub fn set_state(&mut self, graph: &PatternGraph, k: &KVector, state: &CurvatureState) {
        let r = k.to_radii();
        self.vertices = (0..graph.vertex_count())
            .map(|v| VertexRow {
                id: graph.vertex_ids()[v].clone(),
                r: r.as_slice()[v],
                k: k.as_slice()[v],
                total_curvature: state.total[v],
                target: graph.targets()[v],
                cone_angle: state.cone_angle[v],
                length: state.length[v],
            })
            .collect();
        self.faces = state.face_cone.as_ref().map(|cones| {
            cones
                .iter()
                .enumerate()
                .map(|(index, &cone_angle)| FaceRow { index, cone_angle })
                .collect()
        });
        self.residual = Some(
            state
                .total
                .iter()
                .zip(graph.targets())
                .fold(0.0, |m, (l, t)| f64::max(m, (l - t).abs())),
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexRow {
    pub id: String,
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub total_curvature: f64,
    #[serde(rename = "L_hat")]
    pub target: f64,
    pub cone_angle: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceRow {
    pub index: usize,
    pub cone_angle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityRow {
    pub feasible: bool,
    pub worst_slack: f64,
    pub witness: Vec<String>,
    pub method: Method,
}

impl FeasibilityRow {
    pub fn new(graph: &PatternGraph, report: &FeasibilityReport) -> Self {
        FeasibilityRow {
            feasible: report.feasible,
            worst_slack: report.worst_slack,
            witness: report
                .witness
                .iter()
                .map(|v| graph.vertex_ids()[v.0].clone())
                .collect(),
            method: report.method,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverRow {
    pub method: String,
    pub converged: bool,
    pub termination: Termination,
    pub steps: usize,
    pub time: f64,
    pub final_residual: f64,
    pub rate: Option<f64>,
    pub rate_predicted: Option<f64>,
    pub r: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
}

impl SolverRow {
    pub fn new(method: &str, result: &SolveResult) -> Self {
        SolverRow {
            method: method.to_string(),
            converged: result.converged,
            termination: result.termination,
            steps: result.steps,
            time: result.time,
            final_residual: result.final_residual,
            rate: result.rate,
            rate_predicted: result.rate_predicted,
            r: result.r_star.as_slice().to_vec(),
            k: result.k_star.as_slice().to_vec(),
        }
    }
}
