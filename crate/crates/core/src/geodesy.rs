//! Earth model, coordinate transforms, gravity, and local-level frame
//! geometry.
//!
//! The local-level frame is North-Up-East (N-U-E) throughout. Curvilinear
//! positions are ordered (longitude λ, latitude L, height h) to match the
//! curvature-matrix mapping `ṗⁿ = R_c vⁿ`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::attitude::Dcm;

/// Latitudes with `|cos L|` below this are treated as on the pole by the
/// curvilinear machinery (about 0.2 m from the axis). Operations that
/// divide by `cos L` refuse to evaluate there instead of overflowing.
pub const COS_LAT_SINGULARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesyError {
    /// `1/cos L` (or `tan L`) requested too close to a pole.
    #[error("local-level geometry is singular at latitude {latitude} rad (|cos L| < {COS_LAT_SINGULARITY_TOL})")]
    SingularLatitude { latitude: f64 },
    /// A direction from the Earth centre was requested for the zero vector.
    #[error("operation undefined for a zero-norm ECEF position")]
    ZeroPosition,
}

/// Reference Earth: geometry, rotation and gravity strength.
///
/// `eccentricity_sq = 0` degenerates to a sphere of radius
/// `equatorial_radius`, which is the default model used by the built-in
/// scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EarthModel {
    /// Semi-major axis a (m).
    pub equatorial_radius: f64,
    /// First eccentricity squared e² (0 for a sphere).
    pub eccentricity_sq: f64,
    /// Earth rotation rate Ω (rad/s).
    pub rotation_rate: f64,
    /// Gravity magnitude g₀ (m/s²); gravity points to the Earth centre.
    pub gravity_magnitude: f64,
}

impl Default for EarthModel {
    /// Spherical Earth with standard rotation rate and gravity.
    fn default() -> Self {
        EarthModel {
            equatorial_radius: 6_378_137.0,
            eccentricity_sq: 0.0,
            rotation_rate: 7.292115e-5,
            gravity_magnitude: 9.80665,
        }
    }
}

impl EarthModel {
    /// WGS-84 ellipsoid geometry (same rotation rate and gravity strength
    /// as the default model).
    pub fn wgs84() -> Self {
        EarthModel { eccentricity_sq: 0.0066943799901413165, ..EarthModel::default() }
    }

    /// Earth rotation vector in the e-frame, `[0, 0, Ω]`.
    pub fn rotation_vector(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.rotation_rate)
    }
}

/// Curvilinear position (longitude, latitude, height above the ellipsoid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvilinearPosition {
    /// Longitude λ (rad), normalized to (−π, π].
    pub longitude: f64,
    /// Latitude L (rad), |L| ≤ π/2.
    pub latitude: f64,
    /// Height h (m).
    pub height: f64,
}

impl CurvilinearPosition {
    pub fn new(longitude: f64, latitude: f64, height: f64) -> Self {
        CurvilinearPosition { longitude: normalize_longitude(longitude), latitude, height }
    }

    /// Reduces an out-of-range latitude back into [−π/2, π/2] by reflecting
    /// through the pole (the longitude flips by π). Keeps the encoded Earth
    /// point fixed; used when an integration step lands past a pole.
    pub fn wrapped(&self) -> Self {
        let mut lat = self.latitude;
        let mut lon = self.longitude;
        // reduce to (−π, π] first, then at most one reflection
        lat = normalize_longitude(lat);
        if lat > std::f64::consts::FRAC_PI_2 {
            lat = std::f64::consts::PI - lat;
            lon += std::f64::consts::PI;
        } else if lat < -std::f64::consts::FRAC_PI_2 {
            lat = -std::f64::consts::PI - lat;
            lon += std::f64::consts::PI;
        }
        CurvilinearPosition::new(lon, lat, self.height)
    }
}

/// Earth-centred Earth-fixed Cartesian position (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcefPosition(pub Vector3<f64>);

impl EcefPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        EcefPosition(Vector3::new(x, y, z))
    }

    pub fn norm(&self) -> f64 {
        self.0.x.hypot(self.0.y).hypot(self.0.z)
    }
}

/// Wraps an angle to (−π, π].
pub fn normalize_longitude(angle: f64) -> f64 {
    use std::f64::consts::PI;
    if angle > -PI && angle <= PI {
        return angle;
    }
    PI - (PI - angle).rem_euclid(2.0 * PI)
}

/// Curvilinear → ECEF:
/// `pᵉ = [(R_E+h)cosL cosλ, (R_E+h)cosL sinλ, (R_E(1−e²)+h)sinL]`,
/// which reduces to `(R+h)·[cosL cosλ, cosL sinλ, sinL]` on a sphere.
pub fn curvilinear_to_ecef(p: &CurvilinearPosition, model: &EarthModel) -> EcefPosition {
    let (sin_lat, cos_lat) = p.latitude.sin_cos();
    let (sin_lon, cos_lon) = p.longitude.sin_cos();
    let (r_e, _) = radii_of_curvature(p.latitude, model);
    EcefPosition::new(
        (r_e + p.height) * cos_lat * cos_lon,
        (r_e + p.height) * cos_lat * sin_lon,
        (r_e * (1.0 - model.eccentricity_sq) + p.height) * sin_lat,
    )
}

/// ECEF → curvilinear. Closed form on a sphere; fixed-point iteration on
/// the latitude for an ellipsoid (converges far below 1e-12 m here).
///
/// On the polar axis the longitude is conventionally 0.
pub fn ecef_to_curvilinear(
    p: &EcefPosition,
    model: &EarthModel,
) -> Result<CurvilinearPosition, GeodesyError> {
    let norm = p.norm();
    if norm == 0.0 {
        return Err(GeodesyError::ZeroPosition);
    }
    let p_xy = p.0.x.hypot(p.0.y);
    let longitude = if p_xy == 0.0 { 0.0 } else { p.0.y.atan2(p.0.x) };

    if model.eccentricity_sq == 0.0 {
        let latitude = p.0.z.atan2(p_xy);
        return Ok(CurvilinearPosition::new(longitude, latitude, norm - model.equatorial_radius));
    }

    let a = model.equatorial_radius;
    let e2 = model.eccentricity_sq;
    let mut lat = p.0.z.atan2(p_xy * (1.0 - e2));
    let mut height = norm - a;
    for _ in 0..20 {
        let sin_lat = lat.sin();
        let n = a / (1.0 - e2 * sin_lat * sin_lat).sqrt();
        let new_height = if lat.cos().abs() > sin_lat.abs() {
            p_xy / lat.cos() - n
        } else {
            p.0.z / sin_lat - n * (1.0 - e2)
        };
        let new_lat = p.0.z.atan2(p_xy * (1.0 - e2 * n / (n + new_height)));
        let done = (new_lat - lat).abs() < 1e-14 && (new_height - height).abs() < 1e-12;
        lat = new_lat;
        height = new_height;
        if done {
            break;
        }
    }
    Ok(CurvilinearPosition::new(longitude, lat, height))
}

/// Central gravity `gᵉ = −g₀ · p/|p|`.
pub fn gravity_ecef(p: &EcefPosition, model: &EarthModel) -> Result<Vector3<f64>, GeodesyError> {
    let norm = p.norm();
    if norm == 0.0 {
        return Err(GeodesyError::ZeroPosition);
    }
    Ok(p.0 * (-model.gravity_magnitude / norm))
}

/// Transverse and meridian radii of curvature `(R_E, R_N)` at a latitude.
/// For a sphere both equal the radius.
pub fn radii_of_curvature(latitude: f64, model: &EarthModel) -> (f64, f64) {
    let a = model.equatorial_radius;
    let e2 = model.eccentricity_sq;
    if e2 == 0.0 {
        return (a, a);
    }
    let s2 = latitude.sin().powi(2);
    let w = 1.0 - e2 * s2;
    (a / w.sqrt(), a * (1.0 - e2) / (w * w.sqrt()))
}

/// Local curvature matrix mapping N-U-E velocity to curvilinear rates:
///
/// ```text
///       ⎡ 0            0   1/((R_E+h)cosL) ⎤
/// R_c = ⎢ 1/(R_N+h)    0   0               ⎥
///       ⎣ 0            1   0               ⎦
/// ```
///
/// Singular as `cos L → 0`; refuses latitudes inside the pole tolerance.
pub fn curvature_matrix(
    latitude: f64,
    height: f64,
    model: &EarthModel,
) -> Result<Matrix3<f64>, GeodesyError> {
    let cos_lat = latitude.cos();
    if cos_lat.abs() < COS_LAT_SINGULARITY_TOL {
        return Err(GeodesyError::SingularLatitude { latitude });
    }
    let (r_e, r_n) = radii_of_curvature(latitude, model);
    Ok(Matrix3::new(
        0.0,
        0.0,
        1.0 / ((r_e + height) * cos_lat),
        1.0 / (r_n + height),
        0.0,
        0.0,
        0.0,
        1.0,
        0.0,
    ))
}

/// Transport rate of the N-U-E frame over the curved Earth:
/// `ω_enⁿ = [v_E/(R_E+h), v_E·tanL/(R_E+h), −v_N/(R_N+h)]`.
pub fn transport_rate(
    velocity_nue: &Vector3<f64>,
    latitude: f64,
    height: f64,
    model: &EarthModel,
) -> Result<Vector3<f64>, GeodesyError> {
    let cos_lat = latitude.cos();
    if cos_lat.abs() < COS_LAT_SINGULARITY_TOL {
        return Err(GeodesyError::SingularLatitude { latitude });
    }
    let (r_e, r_n) = radii_of_curvature(latitude, model);
    let v_north = velocity_nue.x;
    let v_east = velocity_nue.z;
    Ok(Vector3::new(
        v_east / (r_e + height),
        v_east * latitude.tan() / (r_e + height),
        -v_north / (r_n + height),
    ))
}

/// Earth rotation rate in N-U-E axes, `ω_ieⁿ = [Ω cosL, Ω sinL, 0]`.
pub fn earth_rotation_rate_nue(latitude: f64, model: &EarthModel) -> Vector3<f64> {
    Vector3::new(
        model.rotation_rate * latitude.cos(),
        model.rotation_rate * latitude.sin(),
        0.0,
    )
}

/// Rotation from ECEF axes to local N-U-E axes at (λ, L).
/// Rows are the North, Up and East unit vectors expressed in ECEF.
pub fn ecef_to_nue_dcm(longitude: f64, latitude: f64) -> Dcm {
    let (sin_lat, cos_lat) = latitude.sin_cos();
    let (sin_lon, cos_lon) = longitude.sin_cos();
    Matrix3::new(
        -sin_lat * cos_lon,
        -sin_lat * sin_lon,
        cos_lat,
        cos_lat * cos_lon,
        cos_lat * sin_lon,
        sin_lat,
        -sin_lon,
        cos_lon,
        0.0,
    )
}
