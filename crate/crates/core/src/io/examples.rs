//! Ready-to-run patterns.
//!
//! Polyhedra use `theta = pi/3` on every edge and targets
//! `L_hat_v = (2/3) theta deg(v)`. For any subset `X` the slack is then
//! `theta (2/3 e_in + 4/3 e_cross)` with `e_in`, `e_cross` the edges inside and
//! leaving `X`, which is positive, so every example is strictly feasible. For
//! the tetrahedron this is exactly `L_hat = 2 pi / 3`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_3;

use super::pattern_file::{pi_fraction, PatternFile};
use crate::pattern_graph::{EdgeSpec, RawPattern};

pub const EXAMPLES: &[&str] = &[
    "tetrahedron",
    "cube",
    "octahedron",
    "dodecahedron",
    "icosahedron",
    "torus",
];

pub fn example(name: &str) -> Option<PatternFile> {
    let faces: Vec<Vec<usize>> = match name {
        "tetrahedron" => vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        "cube" => vec![
            vec![0, 1, 2, 3],
            vec![4, 7, 6, 5],
            vec![0, 4, 5, 1],
            vec![1, 5, 6, 2],
            vec![2, 6, 7, 3],
            vec![3, 7, 4, 0],
        ],
        "octahedron" => vec![
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 1],
            vec![5, 2, 1],
            vec![5, 3, 2],
            vec![5, 4, 3],
            vec![5, 1, 4],
        ],
        "icosahedron" => icosahedron_faces(),
        "dodecahedron" => dual_faces(&icosahedron_faces()),
        "torus" => return Some(torus_grid(4, 4)),
        _ => return None,
    };
    Some(polyhedron(&faces, FRAC_PI_3, standard_target))
}

fn icosahedron_faces() -> Vec<Vec<usize>> {
    [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect()
}

/// Faces of the dual: one per primal vertex, listing the primal faces around
/// it in cyclic order.
fn dual_faces(faces: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = faces.iter().flatten().max().map_or(0, |m| m + 1);
    (0..n)
        .map(|v| {
            let around: Vec<usize> = (0..faces.len())
                .filter(|&f| faces[f].contains(&v))
                .collect();
            let mut order = vec![around[0]];
            while order.len() < around.len() {
                let last = &faces[*order.last().unwrap()];
                let next = around
                    .iter()
                    .copied()
                    .find(|f| !order.contains(f) && shared_edge_through(last, &faces[*f], v))
                    .expect("closed vertex star");
                order.push(next);
            }
            order
        })
        .collect()
}

fn shared_edge_through(a: &[usize], b: &[usize], v: usize) -> bool {
    a.iter().filter(|&&x| x != v && b.contains(&x)).count() == 1
}

/// `(2/3)(pi/3) deg = 2 deg pi / 9`, evaluated as an exact pi fraction.
fn standard_target(degree: usize) -> f64 {
    pi_fraction(2 * degree as u32, 9)
}

/// Pattern whose faces are the given vertex cycles, with `target(deg v)` on
/// each vertex. Edge ids are assigned in sorted endpoint order.
pub fn polyhedron(faces: &[Vec<usize>], theta: f64, target: impl Fn(usize) -> f64) -> PatternFile {
    let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in faces {
        for i in 0..f.len() {
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            edge_index.insert((a.min(b), a.max(b)), 0);
        }
    }
    for (i, v) in edge_index.values_mut().enumerate() {
        *v = i;
    }
    let n = faces.iter().flatten().max().map_or(0, |m| m + 1);
    let mut degree = vec![0usize; n];
    for &(a, b) in edge_index.keys() {
        degree[a] += 1;
        degree[b] += 1;
    }
    let vname = |i: usize| format!("v{}", i + 1);
    let face_edges = faces
        .iter()
        .map(|f| {
            (0..f.len())
                .map(|i| {
                    let (a, b) = (f[i], f[(i + 1) % f.len()]);
                    format!("e{}", edge_index[&(a.min(b), a.max(b))] + 1)
                })
                .collect()
        })
        .collect();
    PatternFile {
        pattern: RawPattern {
            vertices: (0..n).map(vname).collect(),
            edges: edge_index
                .iter()
                .map(|(&(a, b), &i)| EdgeSpec {
                    id: format!("e{}", i + 1),
                    u: vname(a),
                    w: vname(b),
                    theta,
                })
                .collect(),
            targets: (0..n).map(|v| (vname(v), target(degree[v]))).collect(),
            faces: Some(face_edges),
        },
        radii: None,
    }
}

/// `rows x cols` grid on the torus, each square split along one diagonal.
pub fn torus_grid(rows: usize, cols: usize) -> PatternFile {
    assert!(
        rows >= 3 && cols >= 3,
        "smaller grids create parallel edges"
    );
    let id = |i: usize, j: usize| (i % rows) * cols + (j % cols);
    let mut faces = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    polyhedron(&faces, FRAC_PI_3, standard_target)
}
