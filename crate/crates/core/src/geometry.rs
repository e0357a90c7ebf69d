//! Small fixed-size vector types and planar isometries.
//!
//! Horizontal coordinates are `(x, y)`, height is `z`. Every gluing between
//! walls is an [`Isometry2`] acting on the horizontal part only.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A 2D point or vector in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.length()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).length()
    }

    pub fn extend(self, z: f64) -> Vec3 {
        Vec3::new(self.x, self.y, z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A 3D point or vector in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Vec3 = Vec3 { x: 1.0, y: 1.0, z: 1.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn abs(self) -> Vec3 {
        Vec3::new(self.x.abs(), self.y.abs(), self.z.abs())
    }

    pub fn max_scalar(self, s: f64) -> Vec3 {
        Vec3::new(self.x.max(s), self.y.max(s), self.z.max(s))
    }

    pub fn max_component(self) -> f64 {
        self.x.max(self.y).max(self.z)
    }

    pub fn mul_elem(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Planar isometry `p -> linear * p + translation` with an orthogonal
/// linear part. Stored row-major: `linear[r][c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry2 {
    pub linear: [[f64; 2]; 2],
    pub translation: Vec2,
}

impl Default for Isometry2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Isometry2 {
    pub const IDENTITY: Isometry2 = Isometry2 {
        linear: [[1.0, 0.0], [0.0, 1.0]],
        translation: Vec2::ZERO,
    };

    pub fn translation(t: Vec2) -> Self {
        Self {
            linear: Self::IDENTITY.linear,
            translation: t,
        }
    }

    /// Counterclockwise rotation by `angle` about `center`.
    pub fn rotation_about(center: Vec2, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let linear = [[c, -s], [s, c]];
        let rotated = Self::apply_linear(&linear, center);
        Self {
            linear,
            translation: center - rotated,
        }
    }

    fn apply_linear(m: &[[f64; 2]; 2], v: Vec2) -> Vec2 {
        Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    pub fn apply_vector(&self, v: Vec2) -> Vec2 {
        Self::apply_linear(&self.linear, v)
    }

    pub fn apply_point(&self, p: Vec2) -> Vec2 {
        self.apply_vector(p) + self.translation
    }

    pub fn determinant(&self) -> f64 {
        self.linear[0][0] * self.linear[1][1] - self.linear[0][1] * self.linear[1][0]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry2) -> Isometry2 {
        let a = &self.linear;
        let b = &other.linear;
        let mut linear = [[0.0; 2]; 2];
        for (r, row) in linear.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Isometry2 {
            linear,
            translation: self.apply_point(other.translation),
        }
    }

    /// Exact inverse using the transpose of the orthogonal linear part.
    pub fn inverse(&self) -> Isometry2 {
        let m = &self.linear;
        let linear = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        let t = Self::apply_linear(&linear, self.translation);
        Isometry2 {
            linear,
            translation: -t,
        }
    }

    /// Largest entry of `linearᵀ·linear − I`.
    pub fn orthogonality_error(&self) -> f64 {
        let m = &self.linear;
        let a = m[0][0] * m[0][0] + m[1][0] * m[1][0] - 1.0;
        let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        let d = m[0][1] * m[0][1] + m[1][1] * m[1][1] - 1.0;
        a.abs().max(b.abs()).max(d.abs())
    }

    pub fn is_linear_identity(&self, tol: f64) -> bool {
        let m = &self.linear;
        (m[0][0] - 1.0).abs() <= tol
            && m[0][1].abs() <= tol
            && m[1][0].abs() <= tol
            && (m[1][1] - 1.0).abs() <= tol
    }

    /// Rotation angle of an orientation-preserving linear part, in `(-π, π]`.
    pub fn rotation_angle(&self) -> f64 {
        self.linear[1][0].atan2(self.linear[0][0])
    }

    /// Row-major flattening, as used by the shader manifest.
    pub fn linear_flat(&self) -> [f64; 4] {
        let m = &self.linear;
        [m[0][0], m[0][1], m[1][0], m[1][1]]
    }

    /// Snap linear entries within `1e-12` of −1, 0 or 1 onto those values so
    /// that axis-aligned gluings stay exact.
    pub(crate) fn snapped(mut self) -> Self {
        for row in self.linear.iter_mut() {
            for v in row.iter_mut() {
                let r = v.round();
                if r.abs() <= 1.0 && (*v - r).abs() < 1e-12 {
                    *v = if r == 0.0 { 0.0 } else { r };
                }
            }
        }
        for v in [&mut self.translation.x, &mut self.translation.y] {
            if v.abs() < 1e-13 {
                *v = 0.0;
            }
        }
        self
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

/// Distance from `p` to the segment `a`–`b`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).length() <= tol
    }

    #[test]
    fn quarter_turn_about_origin() {
        let r = Isometry2::rotation_about(Vec2::ZERO, FRAC_PI_2).snapped();
        assert_eq!(r.apply_point(Vec2::new(1.0, 0.0)), Vec2::new(0.0, 1.0));
        assert!((r.rotation_angle() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let g = Isometry2::rotation_about(Vec2::new(2.0, -1.0), 0.7)
            .compose(&Isometry2::translation(Vec2::new(0.3, 5.0)));
        let id = g.compose(&g.inverse());
        for p in [Vec2::new(0.0, 0.0), Vec2::new(3.0, -7.5), Vec2::new(-1.0, 2.0)] {
            assert!(close(id.apply_point(p), p, 1e-12));
            assert!(close(g.inverse().apply_point(g.apply_point(p)), p, 1e-12));
        }
        assert!(g.orthogonality_error() < 1e-15);
        assert!((g.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn segment_distance() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        assert_eq!(point_segment_distance(Vec2::new(0.5, 2.0), a, b), 2.0);
        assert_eq!(point_segment_distance(Vec2::new(4.0, 4.0), a, b), 5.0);
    }
}
