#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use circle_flow::curvature::curvatures;
use circle_flow::feasibility::check_exhaustive;
use circle_flow::{KVector, PatternGraph};
use rand::Rng;

pub fn tetrahedron() -> PatternGraph {
    let edges: Vec<_> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(u, w)| (u, w, FRAC_PI_3))
        .collect();
    let faces = vec![vec![0, 3, 1], vec![0, 4, 2], vec![1, 5, 2], vec![3, 5, 4]];
    PatternGraph::from_indices(4, &edges, &[2.0 * PI / 3.0; 4], Some(&faces)).unwrap()
}

pub fn tetra_radius() -> f64 {
    (1.0f64 / 3.0).acos()
}

pub fn random_k<R: Rng>(rng: &mut R, n: usize, bound: f64) -> KVector {
    KVector::new((0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).unwrap()
}

/// Connected simple graph: random spanning tree plus extra edges, angles in
/// `[0.2, pi/2)`.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    let max_pairs = n * (n - 1) / 2;
    let mut attempts = 0;
    while pairs.len() < (n - 1 + extra).min(max_pairs) && attempts < 1000 {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
            pairs.push((a, b));
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| (a, b, rng.gen_range(0.2..FRAC_PI_2)))
        .collect()
}

pub fn random_graph<R: Rng>(rng: &mut R, n_range: std::ops::RangeInclusive<usize>) -> PatternGraph {
    let n = rng.gen_range(n_range);
    let extra = rng.gen_range(0..=n);
    let edges = random_edges(rng, n, extra);
    PatternGraph::from_indices(n, &edges, &vec![1.0; n], None).unwrap()
}

/// Targets realized by a random interior point, so the instance is feasible.
pub fn feasible_instance<R: Rng>(
    rng: &mut R,
    n_range: std::ops::RangeInclusive<usize>,
) -> (PatternGraph, KVector) {
    let g = random_graph(rng, n_range);
    let k_star = random_k(rng, g.vertex_count(), 2.0);
    let targets = curvatures(&g, &k_star).unwrap().total;
    (g.with_targets(targets).unwrap(), k_star)
}

/// `2 sum_{v<e} theta(e)`, the largest total curvature vertex `v` can carry.
pub fn vertex_caps(g: &PatternGraph) -> Vec<f64> {
    let mut caps = vec![0.0; g.vertex_count()];
    for e in g.edges() {
        for v in e.ends {
            caps[v.0] += 2.0 * e.theta;
        }
    }
    caps
}

/// Uniform targets below each vertex cap; feasibility is left to chance.
pub fn random_targets<R: Rng>(rng: &mut R, g: &PatternGraph) -> PatternGraph {
    let targets = vertex_caps(g)
        .iter()
        .map(|c| rng.gen_range(0.01..1.0) * c)
        .collect();
    g.with_targets(targets).unwrap()
}

pub fn random_instance<R: Rng>(
    rng: &mut R,
    n_range: std::ops::RangeInclusive<usize>,
) -> PatternGraph {
    let g = random_graph(rng, n_range);
    random_targets(rng, &g)
}

pub fn infeasible_instance<R: Rng>(
    rng: &mut R,
    n_range: std::ops::RangeInclusive<usize>,
) -> PatternGraph {
    loop {
        let g = random_instance(rng, n_range.clone());
        if !check_exhaustive(&g).unwrap().feasible {
            return g;
        }
    }
}

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(s: f64, a: V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Two circles on the unit sphere, placed explicitly.
pub struct GeometricBigon {
    pub r: [f64; 2],
    pub center_distance: f64,
    c1: V3,
    c2: V3,
    /// The two intersection points.
    pub corners: [V3; 2],
}

impl GeometricBigon {
    pub fn new(r1: f64, r2: f64, theta: f64) -> Self {
        // The quadrilateral angle at a corner is pi - theta. Half-chord form
        // of the center distance, accurate for small circles.
        let half = ((0.5 * (r1 - r2)).sin().powi(2)
            + r1.sin() * r2.sin() * (0.5 * theta).cos().powi(2))
        .sqrt();
        let d = 2.0 * half.asin();
        let cos_d = d.cos();
        let c1 = [0.0, 0.0, 1.0];
        let c2 = [d.sin(), 0.0, d.cos()];
        // p = a c1 + b c2 + g n with p.c1 = cos r1, p.c2 = cos r2, |p| = 1;
        // the triple product [c1, c2, p] = sin d g is sin r1 sin r2 sin theta.
        let det = d.sin().powi(2);
        let a = (r1.cos() - cos_d * r2.cos()) / det;
        let b = (r2.cos() - cos_d * r1.cos()) / det;
        let base = [
            a * c1[0] + b * c2[0],
            a * c1[1] + b * c2[1],
            a * c1[2] + b * c2[2],
        ];
        let g = r1.sin() * r2.sin() * theta.sin() / d.sin();
        let n = cross(c1, c2);
        let n = scale(1.0 / dot(n, n).sqrt(), n);
        let corners = [
            [base[0] + g * n[0], base[1] + g * n[1], base[2] + g * n[2]],
            [base[0] - g * n[0], base[1] - g * n[1], base[2] - g * n[2]],
        ];
        GeometricBigon {
            r: [r1, r2],
            center_distance: d,
            c1,
            c2,
            corners,
        }
    }

    /// Angle at center `i` between a corner and the other center.
    pub fn half_angle(&self, i: usize) -> f64 {
        let (c, other) = if i == 0 {
            (self.c1, self.c2)
        } else {
            (self.c2, self.c1)
        };
        let tangent = |p: V3| {
            let t = sub(p, scale(dot(p, c), c));
            scale(1.0 / dot(t, t).sqrt(), t)
        };
        let a = tangent(self.corners[0]);
        let b = tangent(other);
        let s = dot(cross(a, b), c).abs();
        s.atan2(dot(a, b))
    }

    /// Corner angle measured between the two circle tangents; equals `theta`
    /// for a correct placement.
    pub fn intersection_angle(&self) -> f64 {
        let p = self.corners[0];
        let normal_at = |c: V3| {
            let t = sub(c, scale(dot(p, c), p));
            scale(1.0 / dot(t, t).sqrt(), t)
        };
        let n1 = normal_at(self.c1);
        let n2 = normal_at(self.c2);
        PI - dot(n1, n2).clamp(-1.0, 1.0).acos()
    }

    /// Total geodesic curvature of arc `i`: arc length times `cot r`.
    pub fn arc_curvature(&self, i: usize) -> f64 {
        let r = self.r[i];
        2.0 * self.half_angle(i) * r.sin() / r.tan()
    }

    /// Lens area by slicing in polar angle about the first center:
    /// `int_0^{r1} sin(phi) w(phi) dphi` where `w` is the azimuthal width
    /// inside the second cap.
    pub fn area(&self) -> f64 {
        let [r1, r2] = self.r;
        let d = self.center_distance;
        let width = |phi: f64| {
            let s = phi.sin();
            if s == 0.0 {
                return if phi.cos() * d.cos() >= r2.cos() {
                    2.0 * PI
                } else {
                    0.0
                };
            }
            let c = (r2.cos() - phi.cos() * d.cos()) / (s * d.sin());
            2.0 * c.clamp(-1.0, 1.0).acos()
        };
        let mut breaks = vec![0.0, r1];
        for b in [(d - r2).abs(), d + r2] {
            if b > 0.0 && b < r1 {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks
            .windows(2)
            .map(|w| smooth_simpson(w[0], w[1], |phi| phi.sin() * width(phi)))
            .sum()
    }
}

/// Composite Simpson after `x = a + (b - a)(1 - cos u)/2`, which removes
/// square-root behavior at both ends.
fn smooth_simpson(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const N: usize = 4000;
    let g = |u: f64| {
        let x = a + 0.5 * (b - a) * (1.0 - u.cos());
        f(x) * 0.5 * (b - a) * u.sin()
    };
    let h = PI / N as f64;
    let mut sum = g(0.0) + g(PI);
    for i in 1..N {
        sum += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// `K = ln cot r`, written out independently of the library.
pub fn k_of(r: f64) -> f64 {
    (r.cos() / r.sin()).ln()
}

pub fn r_of(k: f64) -> f64 {
    FRAC_PI_2 - k.exp().atan()
}

/// Bigon arc curvatures evaluated in 256-bit arithmetic, so that central
/// differences stay meaningful for very thin or very flat lenses.
pub struct PreciseBigon {
    cc: astro_float::Consts,
}

const PREC: usize = 256;
const RM: astro_float::RoundingMode = astro_float::RoundingMode::ToEven;

impl PreciseBigon {
    pub fn new() -> Self {
        PreciseBigon {
            cc: astro_float::Consts::new().unwrap(),
        }
    }

    fn big(x: f64) -> astro_float::BigFloat {
        astro_float::BigFloat::from_f64(x, PREC)
    }

    /// `[L1, L2]` at log curvatures `k` (given in extended precision).
    fn curvatures(
        &mut self,
        k: [&astro_float::BigFloat; 2],
        theta: f64,
    ) -> [astro_float::BigFloat; 2] {
        let one = Self::big(1.0);
        let cc = &mut self.cc;
        let half_pi = one.atan(PREC, RM, cc).mul(&Self::big(2.0), PREC, RM);
        let t = Self::big(theta);
        let (sin_t, cos_t) = (t.sin(PREC, RM, cc), t.cos(PREC, RM, cc));
        // cot r = e^K, cos r = e^K / sqrt(1 + e^2K).
        let cot: Vec<_> = k.iter().map(|x| x.exp(PREC, RM, cc)).collect();
        let sin_r: Vec<_> = cot
            .iter()
            .map(|c| {
                one.div(
                    &one.add(&c.mul(c, PREC, RM), PREC, RM).sqrt(PREC, RM),
                    PREC,
                    RM,
                )
            })
            .collect();
        let cos_r: Vec<_> = cot
            .iter()
            .zip(&sin_r)
            .map(|(c, s)| c.mul(s, PREC, RM))
            .collect();
        let arc = |i: usize, cc: &mut astro_float::Consts| {
            let j = 1 - i;
            // beta_i = atan2(sin t, sin r_i (cot r_j + cot r_i cos t)), with sin t > 0.
            let x = cot[j]
                .add(&cot[i].mul(&cos_t, PREC, RM), PREC, RM)
                .mul(&sin_r[i], PREC, RM);
            let beta = half_pi.sub(&x.div(&sin_t, PREC, RM).atan(PREC, RM, cc), PREC, RM);
            beta.mul(&cos_r[i], PREC, RM).mul(&Self::big(2.0), PREC, RM)
        };
        [arc(0, cc), arc(1, cc)]
    }

    pub fn value(&mut self, k: [f64; 2], theta: f64) -> [f64; 2] {
        let base = [Self::big(k[0]), Self::big(k[1])];
        let l = self.curvatures([&base[0], &base[1]], theta);
        [0, 1].map(|i| format!("{}", l[i]).parse::<f64>().unwrap())
    }

    /// Central difference of `[L1, L2]` in `K_dir` with step `h`.
    pub fn difference(&mut self, k: [f64; 2], theta: f64, dir: usize, h: f64) -> [f64; 2] {
        let step = Self::big(h);
        let base = [Self::big(k[0]), Self::big(k[1])];
        let mut up = base.clone();
        let mut down = base.clone();
        up[dir] = up[dir].add(&step, PREC, RM);
        down[dir] = down[dir].sub(&step, PREC, RM);
        let a = self.curvatures([&up[0], &up[1]], theta);
        let b = self.curvatures([&down[0], &down[1]], theta);
        let two_h = step.mul(&Self::big(2.0), PREC, RM);
        let quotient = |i: usize| {
            let q = a[i].sub(&b[i], PREC, RM).div(&two_h, PREC, RM);
            format!("{q}").parse::<f64>().unwrap()
        };
        [quotient(0), quotient(1)]
    }
}
