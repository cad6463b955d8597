//! Spherical trigonometry of a single bigon.
//!
//! Two spherical disks of radii `r1, r2 < pi/2` meeting at angle `theta`
//! overlap in a lens. The quadrilateral spanned by the two centers and the two
//! intersection points has half-angles `beta_i` at the centers, from the
//! cotangent four-part formula
//!
//! ```text
//! cot beta_1 = (cot r_2 sin r_1 + cos r_1 cos theta) / sin theta
//! ```
//!
//! Everything is evaluated from `sin r`, `cos r` and `cot r`, so inputs built
//! from log-curvatures `K = ln cot r` stay accurate far from `K = 0`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Inputs closer than this to 0 or pi/2 are rejected by [`BigonInput::new`].
pub const RADIUS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct CircleTrig {
    sin: f64,
    cos: f64,
    cot: f64,
}

impl CircleTrig {
    fn from_radius(r: f64) -> Self {
        let (sin, cos) = r.sin_cos();
        CircleTrig {
            sin,
            cos,
            cot: cos / sin,
        }
    }

    fn from_log_curvature(k: f64) -> Self {
        let cot = k.exp();
        let h = 1f64.hypot(cot);
        CircleTrig {
            sin: 1.0 / h,
            cos: cot / h,
            cot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigonInput {
    c1: CircleTrig,
    c2: CircleTrig,
    theta: f64,
    sin_theta: f64,
    cos_theta: f64,
}

impl BigonInput {
    pub fn new(r1: f64, r2: f64, theta: f64) -> Result<Self> {
        for r in [r1, r2] {
            if !(r >= RADIUS_MARGIN && r <= FRAC_PI_2 - RADIUS_MARGIN) {
                return Err(Error::BigonInput(format!("radius {r} outside (0, pi/2)")));
            }
        }
        check_theta(theta)?;
        Ok(Self::assemble(
            CircleTrig::from_radius(r1),
            CircleTrig::from_radius(r2),
            theta,
        ))
    }

    /// Builds the bigon from log-curvatures; any finite `K` is admissible.
    pub fn from_log_curvatures(k1: f64, k2: f64, theta: f64) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite()) {
            return Err(Error::BigonInput("non-finite log-curvature".into()));
        }
        check_theta(theta)?;
        Ok(Self::assemble(
            CircleTrig::from_log_curvature(k1),
            CircleTrig::from_log_curvature(k2),
            theta,
        ))
    }

    pub(crate) fn from_log_curvatures_unchecked(k1: f64, k2: f64, theta: f64) -> Self {
        Self::assemble(
            CircleTrig::from_log_curvature(k1),
            CircleTrig::from_log_curvature(k2),
            theta,
        )
    }

    fn assemble(c1: CircleTrig, c2: CircleTrig, theta: f64) -> Self {
        let (sin_theta, cos_theta) = theta.sin_cos();
        BigonInput {
            c1,
            c2,
            theta,
            sin_theta,
            cos_theta,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Half of the center angle subtended by the two intersection points.
    /// Two-argument arctangent keeps the result in `(0, pi)`.
    pub fn half_angle(&self, which: Side) -> f64 {
        let (near, far) = match which {
            Side::First => (&self.c1, &self.c2),
            Side::Second => (&self.c2, &self.c1),
        };
        self.sin_theta
            .atan2(far.cot * near.sin + near.cos * self.cos_theta)
    }

    /// Curvature contributions only; the flow's inner loop.
    #[inline]
    pub(crate) fn curvatures(&self) -> [f64; 2] {
        let b1 = self.half_angle(Side::First);
        let b2 = self.half_angle(Side::Second);
        [2.0 * b1 * self.c1.cos, 2.0 * b2 * self.c2.cos]
    }

    pub fn measure(&self) -> BigonMeasurement {
        let beta = [self.half_angle(Side::First), self.half_angle(Side::Second)];
        let (c1, c2) = (&self.c1, &self.c2);
        let arc_length = [2.0 * beta[0] * c1.sin, 2.0 * beta[1] * c2.sin];
        let curvature = [2.0 * beta[0] * c1.cos, 2.0 * beta[1] * c2.cos];
        let area = 2.0 * self.theta - curvature[0] - curvature[1];

        // k1 k2 (-2 sin^2 beta_1 sin^2 r_1) / sin theta, with k1 sin^2 r1 = sin r1 cos r1
        let sb1 = beta[0].sin();
        let cross = -2.0 * c2.cot * sb1 * sb1 * c1.sin * c1.cos / self.sin_theta;
        let sum1 = c1.cos * c1.sin * c1.sin * chord_excess(2.0 * beta[0]);
        let sum2 = c2.cos * c2.sin * c2.sin * chord_excess(2.0 * beta[1]);

        BigonMeasurement {
            beta,
            arc_length,
            curvature,
            area,
            jacobian: [[sum1 - cross, cross], [cross, sum2 - cross]],
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::BigonInput(format!(
            "theta {theta} outside (0, pi/2]"
        )))
    }
}

/// `x - sin x`, with a series near zero where the subtraction cancels.
fn chord_excess(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x - x.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigonMeasurement {
    /// Half-angles at the two centers.
    pub beta: [f64; 2],
    /// Arc of each circle inside the lens, `2 beta_i sin r_i`.
    pub arc_length: [f64; 2],
    /// Total geodesic curvature of each arc, `2 beta_i cos r_i`.
    pub curvature: [f64; 2],
    /// Lens area, `2 theta - L_1 - L_2`.
    pub area: f64,
    /// `jacobian[i][j] = dL_i / dK_j`. The off-diagonal entries share one
    /// computation and are identical.
    pub jacobian: [[f64; 2]; 2],
}

impl BigonMeasurement {
    /// `d(L_1 + L_2)/dK_i`.
    pub fn column_sum(&self, i: usize) -> f64 {
        self.jacobian[0][i] + self.jacobian[1][i]
    }
}
