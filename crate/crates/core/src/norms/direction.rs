use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Unit vector `l` in the plane together with `l_perp`, which is `l`
/// rotated by +90 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    l: [f64; 2],
    l_perp: [f64; 2],
}

impl Direction {
    pub fn new(l: [f64; 2]) -> Result<Self> {
        let norm = l[0].hypot(l[1]);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::domain(format!(
                "direction must be a unit vector, |l| = {norm}"
            )));
        }
        Ok(Direction {
            l,
            l_perp: [-l[1], l[0]],
        })
    }

    /// Direction at `angle` radians from the positive x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Direction {
            l: [c, s],
            l_perp: [-s, c],
        }
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::from_angle(deg.to_radians())
    }

    pub fn x_axis() -> Self {
        Direction {
            l: [1.0, 0.0],
            l_perp: [0.0, 1.0],
        }
    }

    pub fn l(&self) -> [f64; 2] {
        self.l
    }

    pub fn l_perp(&self) -> [f64; 2] {
        self.l_perp
    }

    pub fn angle(&self) -> f64 {
        self.l[1].atan2(self.l[0])
    }

    /// `l^i l^j H_ij` for a symmetric matrix given by `(xx, xy, yy)`.
    pub fn quadratic_form(&self, xx: f64, xy: f64, yy: f64) -> f64 {
        let [a, b] = self.l;
        a * a * xx + 2.0 * a * b * xy + b * b * yy
    }
}

/// Orthogonal map `S(x, y) = x l1 + y l2` with `l2 = l1_perp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMap {
    l1: [f64; 2],
    l2: [f64; 2],
}

pub fn rotation_map(l1: Direction) -> RotationMap {
    RotationMap {
        l1: l1.l(),
        l2: l1.l_perp(),
    }
}

impl RotationMap {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            p[0] * self.l1[0] + p[1] * self.l2[0],
            p[0] * self.l1[1] + p[1] * self.l2[1],
        ]
    }

    /// `S^{-1} = S^T`.
    pub fn inverse(&self, q: [f64; 2]) -> [f64; 2] {
        [
            q[0] * self.l1[0] + q[1] * self.l1[1],
            q[0] * self.l2[0] + q[1] * self.l2[1],
        ]
    }

    /// Determinant of the linear map.
    pub fn jacobian(&self) -> f64 {
        self.l1[0] * self.l2[1] - self.l2[0] * self.l1[1]
    }

    /// Columns `(S e1, S e2)`.
    pub fn columns(&self) -> ([f64; 2], [f64; 2]) {
        (self.l1, self.l2)
    }
}
