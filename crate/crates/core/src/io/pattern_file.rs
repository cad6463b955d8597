//! Native pattern file format.
//!
//! ```text
//! # tetrahedron
//! vertices: a b c d
//! edges:
//! e0 a b pi/3
//! ...
//! targets:
//! a 2pi/3
//! ...
//! faces:            # optional, one face per line, cyclic edge ids
//! e0 e3 e1
//! radii:            # optional, initial or evaluation radii
//! a 1.2309594173407747
//! ```
//!
//! Section headers may carry content on the same line. `#` starts a comment.
//! Numbers are decimals or exact multiples of pi written `pi`, `pi/N`, `Mpi`
//! or `Mpi/N`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::pattern_graph::{EdgeSpec, PatternGraph, RadiusVector, RawPattern};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 refers to the end of input.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> std::result::Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatternFile {
    pub pattern: RawPattern,
    pub radii: Option<Vec<(String, f64)>>,
}

impl PatternFile {
    pub fn graph(&self) -> Result<PatternGraph> {
        PatternGraph::from_raw(&self.pattern)
    }

    /// Radii in the graph's vertex order; `None` when the file has no radii.
    pub fn radius_vector(&self, graph: &PatternGraph) -> Result<Option<RadiusVector>> {
        let Some(radii) = &self.radii else {
            return Ok(None);
        };
        let mut values = vec![f64::NAN; graph.vertex_count()];
        for (v, r) in radii {
            values[graph.vertex(v)?.0] = *r;
        }
        if let Some(i) = values.iter().position(|x| x.is_nan()) {
            return Err(Error::UnknownVertex(format!(
                "{} has no radius",
                graph.vertex_ids()[i]
            )));
        }
        RadiusVector::new(values).map(Some)
    }
}

/// Parses `pi`, `pi/N`, `Mpi`, `Mpi/N` exactly, otherwise a finite decimal.
pub fn parse_scalar(token: &str) -> Option<f64> {
    if let Some(pos) = token.find("pi") {
        let (head, tail) = token.split_at(pos);
        let tail = &tail[2..];
        let num: u32 = if head.is_empty() {
            1
        } else {
            head.parse().ok()?
        };
        let den: u32 = if tail.is_empty() {
            1
        } else {
            tail.strip_prefix('/')?.parse().ok()?
        };
        if num == 0 || den == 0 {
            return None;
        }
        return Some(pi_fraction(num, den));
    }
    let value: f64 = token.parse().ok()?;
    value.is_finite().then_some(value)
}

/// `num pi / den`, reduced first so equal fractions give identical bits.
pub fn pi_fraction(num: u32, den: u32) -> f64 {
    let g = gcd(num, den).max(1);
    match (num / g, den / g) {
        (1, 2) => FRAC_PI_2,
        (1, 3) => FRAC_PI_3,
        (1, 4) => FRAC_PI_4,
        (1, 6) => FRAC_PI_6,
        (1, 8) => FRAC_PI_8,
        (n, d) => n as f64 * PI / d as f64,
    }
}

/// Inverse of [`parse_scalar`]: small rational multiples of pi that match
/// bit-for-bit print symbolically, everything else as the shortest
/// round-tripping decimal.
pub fn format_scalar(value: f64) -> String {
    for den in 1..=12u32 {
        let num = (value * den as f64 / PI).round();
        if (1.0..=24.0).contains(&num) && pi_fraction(num as u32, den) == value {
            let num = num as u32;
            if gcd(num, den) != 1 {
                continue;
            }
            let head = if num == 1 {
                String::new()
            } else {
                num.to_string()
            };
            let tail = if den == 1 {
                String::new()
            } else {
                format!("/{den}")
            };
            return format!("{head}pi{tail}");
        }
    }
    format!("{value:?}")
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Vertices,
    Edges,
    Targets,
    Faces,
    Radii,
}

impl Section {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "vertices" => Section::Vertices,
            "edges" => Section::Edges,
            "targets" => Section::Targets,
            "faces" => Section::Faces,
            "radii" => Section::Radii,
            _ => return None,
        })
    }
}

pub fn parse_pattern(text: &str) -> std::result::Result<PatternFile, ParseError> {
    let mut file = PatternFile::default();
    let mut current: Option<Section> = None;
    let mut seen: HashMap<Section, usize> = HashMap::new();
    let mut faces: Option<Vec<Vec<String>>> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut body = line;
        if let Some((head, rest)) = line.split_once(':') {
            let name = head.trim();
            match Section::from_name(name) {
                Some(section) => {
                    if let Some(prev) = seen.insert(section, line_no) {
                        return err(
                            line_no,
                            format!("section `{name}` repeated (first at line {prev})"),
                        );
                    }
                    if section == Section::Faces {
                        faces = Some(Vec::new());
                    }
                    if section == Section::Radii {
                        file.radii = Some(Vec::new());
                    }
                    current = Some(section);
                    body = rest.trim();
                    if body.is_empty() {
                        continue;
                    }
                }
                None => return err(line_no, format!("unknown section `{name}`")),
            }
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let number = |tok: &str| {
            parse_scalar(tok).ok_or_else(|| ParseError {
                line: line_no,
                message: format!("expected a number, got `{tok}`"),
            })
        };
        match current {
            None => return err(line_no, "content before any section header"),
            Some(Section::Vertices) => {
                file.pattern
                    .vertices
                    .extend(tokens.iter().map(|s| s.to_string()));
            }
            Some(Section::Edges) => {
                let [id, u, w, theta] = tokens[..] else {
                    return err(line_no, "edge lines are `id u w theta`");
                };
                file.pattern.edges.push(EdgeSpec {
                    id: id.into(),
                    u: u.into(),
                    w: w.into(),
                    theta: number(theta)?,
                });
            }
            Some(Section::Targets) => {
                let [v, value] = tokens[..] else {
                    return err(line_no, "target lines are `vertex value`");
                };
                file.pattern.targets.push((v.into(), number(value)?));
            }
            Some(Section::Faces) => {
                faces
                    .as_mut()
                    .expect("set on header")
                    .push(tokens.iter().map(|s| s.to_string()).collect());
            }
            Some(Section::Radii) => {
                let [v, value] = tokens[..] else {
                    return err(line_no, "radius lines are `vertex value`");
                };
                file.radii
                    .as_mut()
                    .expect("set on header")
                    .push((v.into(), number(value)?));
            }
        }
    }
    for (section, name) in [
        (Section::Vertices, "vertices"),
        (Section::Edges, "edges"),
        (Section::Targets, "targets"),
    ] {
        if !seen.contains_key(&section) {
            return err(0, format!("missing `{name}` section"));
        }
    }
    file.pattern.faces = faces;
    Ok(file)
}

pub fn format_pattern(file: &PatternFile) -> String {
    let p = &file.pattern;
    let mut out = String::new();
    writeln!(out, "vertices: {}", p.vertices.join(" ")).unwrap();
    writeln!(out, "edges:").unwrap();
    for e in &p.edges {
        writeln!(out, "{} {} {} {}", e.id, e.u, e.w, format_scalar(e.theta)).unwrap();
    }
    writeln!(out, "targets:").unwrap();
    for (v, t) in &p.targets {
        writeln!(out, "{v} {}", format_scalar(*t)).unwrap();
    }
    if let Some(faces) = &p.faces {
        writeln!(out, "faces:").unwrap();
        for f in faces {
            writeln!(out, "{}", f.join(" ")).unwrap();
        }
    }
    if let Some(radii) = &file.radii {
        writeln!(out, "radii:").unwrap();
        for (v, r) in radii {
            writeln!(out, "{v} {}", format_scalar(*r)).unwrap();
        }
    }
    out
}
