//! Quaternion / direction-cosine-matrix / rotation-vector algebra.
//!
//! Conventions used throughout the crate:
//! - Quaternions are Hamilton, scalar-first `[s, η]`, and kept at unit norm.
//! - `Quaternion::to_dcm` produces the rotation matrix
//!   `C = (s² − ηᵀη)I + 2ηηᵀ + 2s(η×)`, so `to_dcm(a ⊗ b) = to_dcm(a)·to_dcm(b)`.
//! - A rotation vector σ maps to the quaternion
//!   `[cos(‖σ‖/2), (σ/‖σ‖)·sin(‖σ‖/2)]`, whose DCM equals `exp([σ×])`.

use nalgebra::{Matrix3, Vector3};

/// Direction cosine matrix. Orthonormality is maintained by construction:
/// every `Dcm` in this crate comes from a unit quaternion or from an
/// explicitly orthonormal column/row layout.
pub type Dcm = Matrix3<f64>;

/// Rotation vector (axis × angle, radians).
pub type RotationVector = Vector3<f64>;

/// Skew-symmetric matrix `(v×)` such that `(v×)·w = v × w`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Unit attitude quaternion, Hamilton convention, scalar-first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    /// Scalar part.
    pub s: f64,
    /// Vector part.
    pub v: Vector3<f64>,
}

impl Quaternion {
    /// The identity rotation `[1, 0, 0, 0]`.
    pub fn identity() -> Self {
        Quaternion { s: 1.0, v: Vector3::zeros() }
    }

    /// Builds a quaternion from components and normalizes it.
    pub fn new(s: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { s, v: Vector3::new(x, y, z) }.normalized()
    }

    /// Quaternion of the rotation vector σ: `[cos(‖σ‖/2), σ̂·sin(‖σ‖/2)]`.
    ///
    /// For `‖σ‖ < 1e-8` the `sin(‖σ‖/2)/‖σ‖` factor is evaluated by its
    /// 4th-order Taylor expansion to avoid the 0/0 at σ = 0.
    pub fn from_rotation_vector(sigma: &RotationVector) -> Self {
        let angle = sigma.norm();
        let (s, k) = if angle < 1e-8 {
            let a2 = angle * angle;
            // cos(x/2) and sin(x/2)/x around x = 0
            (1.0 - a2 / 8.0 + a2 * a2 / 384.0, 0.5 - a2 / 48.0 + a2 * a2 / 3840.0)
        } else {
            let half = 0.5 * angle;
            (half.cos(), half.sin() / angle)
        };
        Quaternion { s, v: sigma * k }.normalized()
    }

    /// Extracts a quaternion from a rotation matrix (Shepperd's method:
    /// branch on the largest of trace/diagonal for numerical stability).
    pub fn from_dcm(c: &Dcm) -> Self {
        let tr = c.trace();
        let q = if tr >= c[(0, 0)] && tr >= c[(1, 1)] && tr >= c[(2, 2)] {
            let s = (1.0 + tr).sqrt();
            Quaternion {
                s: 0.5 * s,
                v: Vector3::new(
                    c[(2, 1)] - c[(1, 2)],
                    c[(0, 2)] - c[(2, 0)],
                    c[(1, 0)] - c[(0, 1)],
                ) * (0.5 / s),
            }
        } else if c[(0, 0)] >= c[(1, 1)] && c[(0, 0)] >= c[(2, 2)] {
            let s = (1.0 + c[(0, 0)] - c[(1, 1)] - c[(2, 2)]).sqrt();
            Quaternion {
                s: (c[(2, 1)] - c[(1, 2)]) * (0.5 / s),
                v: Vector3::new(
                    0.5 * s,
                    (c[(0, 1)] + c[(1, 0)]) * (0.5 / s),
                    (c[(0, 2)] + c[(2, 0)]) * (0.5 / s),
                ),
            }
        } else if c[(1, 1)] >= c[(2, 2)] {
            let s = (1.0 - c[(0, 0)] + c[(1, 1)] - c[(2, 2)]).sqrt();
            Quaternion {
                s: (c[(0, 2)] - c[(2, 0)]) * (0.5 / s),
                v: Vector3::new(
                    (c[(0, 1)] + c[(1, 0)]) * (0.5 / s),
                    0.5 * s,
                    (c[(1, 2)] + c[(2, 1)]) * (0.5 / s),
                ),
            }
        } else {
            let s = (1.0 - c[(0, 0)] - c[(1, 1)] + c[(2, 2)]).sqrt();
            Quaternion {
                s: (c[(1, 0)] - c[(0, 1)]) * (0.5 / s),
                v: Vector3::new(
                    (c[(0, 2)] + c[(2, 0)]) * (0.5 / s),
                    (c[(1, 2)] + c[(2, 1)]) * (0.5 / s),
                    0.5 * s,
                ),
            }
        };
        q.normalized()
    }

    /// Rotation matrix `C = (s² − ηᵀη)I + 2ηηᵀ + 2s(η×)`.
    pub fn to_dcm(&self) -> Dcm {
        let s = self.s;
        let v = self.v;
        Matrix3::identity() * (s * s - v.dot(&v)) + 2.0 * v * v.transpose() + 2.0 * s * skew(&v)
    }

    /// Conjugate (inverse for unit quaternions).
    pub fn conjugate(&self) -> Self {
        Quaternion { s: self.s, v: -self.v }
    }

    pub fn norm(&self) -> f64 {
        (self.s * self.s + self.v.dot(&self.v)).sqrt()
    }

    /// Returns the renormalized quaternion.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Quaternion { s: self.s / n, v: self.v / n }
    }

    /// Rotates a vector: `to_dcm() · w`.
    pub fn rotate(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let t = 2.0 * self.v.cross(w);
        w + self.s * t + self.v.cross(&t)
    }
}

impl std::ops::Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product, renormalized.
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            s: self.s * rhs.s - self.v.dot(&rhs.v),
            v: self.s * rhs.v + rhs.s * self.v + self.v.cross(&rhs.v),
        }
        .normalized()
    }
}

/// Earth-frame rotation matrix `C_{e(t)}^{e(0)}` after an elapsed time `dt`:
/// a rotation about the polar (z) axis by `rotation_rate · dt` that maps
/// e(t)-frame coordinates into e(0)-frame coordinates.
pub fn earth_frame_rotation(rotation_rate: f64, dt: f64) -> Dcm {
    let a = rotation_rate * dt;
    let (sa, ca) = a.sin_cos();
    Matrix3::new(ca, -sa, 0.0, sa, ca, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation angle of a DCM in radians, `acos((tr − 1)/2)` clamped to [0, π].
pub fn rotation_angle(c: &Dcm) -> f64 {
    (0.5 * (c.trace() - 1.0)).clamp(-1.0, 1.0).acos()
}
