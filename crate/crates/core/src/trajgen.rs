//! Analytic truth trajectories and perfect-sensor IMU/GNSS data synthesis.
//!
//! Two path kinds are supported, both flown at constant height and constant
//! ground speed with the body axes locked to the Earth frame (`C_b^e = I`):
//!
//! - `Meridian`: a great circle along the starting meridian. Northward
//!   flights pass over the pole and continue down the antipodal meridian;
//!   the Cartesian state is globally smooth and only the curvilinear report
//!   wraps.
//! - `Parallel`: a constant-latitude circle (eastward for positive speed).
//!   This is the velocity-maneuvering path used to exercise in-motion
//!   alignment near the poles.
//!
//! Synthesis assumes a spherical Earth model; the curvilinear/Cartesian
//! pair is then exactly
//! `p^n = [λ₀, L₀ + v·t/(R+h), h₀]`, `p^e = (R+h)·[cosL cosλ, cosL sinλ, sinL]`
//! (meridian case), with velocity and acceleration by differentiation.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::attitude::Quaternion;
use crate::geodesy::{
    self, CurvilinearPosition, EarthModel, EcefPosition, COS_LAT_SINGULARITY_TOL,
};
use crate::strapdown::ImuIncrements;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("time {t} s is outside the scenario range [0, {duration}] s")]
    OutOfRange { t: f64, duration: f64 },
    #[error("duration must be positive, got {0} s")]
    NonPositiveDuration(f64),
    #[error("imu_rate must be positive, got {0} Hz")]
    InvalidImuRate(f64),
    #[error("gnss_rate must be positive and divide the navigation rate, got {0} Hz")]
    InvalidGnssRate(f64),
    #[error("initial latitude {0} rad is outside [-pi/2, pi/2]")]
    InvalidLatitude(f64),
    #[error("a parallel path cannot start inside the pole tolerance (lat {0} rad)")]
    ParallelPathAtPole(f64),
    #[error("trajectory synthesis requires a spherical Earth model (eccentricity_sq = 0)")]
    NonSphericalEarth,
}

/// Shape of the analytic flight path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Great circle along the starting meridian (north/south flight).
    Meridian,
    /// Constant-latitude circle (east/west flight).
    Parallel,
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathKind::Meridian => write!(f, "meridian"),
            PathKind::Parallel => write!(f, "parallel"),
        }
    }
}

impl std::str::FromStr for PathKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "meridian" => Ok(PathKind::Meridian),
            "parallel" => Ok(PathKind::Parallel),
            other => Err(format!("unknown path_kind `{other}` (expected meridian|parallel)")),
        }
    }
}

/// Analytic flight scenario description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub path_kind: PathKind,
    /// Initial longitude λ₀ (rad).
    pub lon0: f64,
    /// Initial latitude L₀ (rad).
    pub lat0: f64,
    /// Constant height h₀ (m).
    pub height0: f64,
    /// Signed ground speed (m/s): + is northward (meridian) or eastward
    /// (parallel).
    pub speed: f64,
    /// Flight duration (s).
    pub duration: f64,
    /// IMU sub-sample rate (Hz); the navigation interval holds two
    /// sub-samples, so T = 2/imu_rate.
    pub imu_rate: f64,
    /// GNSS fix rate (Hz).
    pub gnss_rate: f64,
    pub earth: EarthModel,
}

impl ScenarioConfig {
    /// Southward non-polar flight: 1 h from (120°E, 50°N) at 2000 m/s,
    /// ending near 14.6°S.
    pub fn southward() -> Self {
        ScenarioConfig {
            path_kind: PathKind::Meridian,
            lon0: 120f64.to_radians(),
            lat0: 50f64.to_radians(),
            height0: 10_000.0,
            speed: -2_000.0,
            duration: 3_600.0,
            imu_rate: 100.0,
            gnss_rate: 1.0,
            earth: EarthModel::default(),
        }
    }

    /// Northward transpolar flight: 1.5 h from (120°E, 50°N) at 2000 m/s,
    /// crossing the north pole and ending near (60°W, 33°N).
    pub fn transpolar() -> Self {
        ScenarioConfig { speed: 2_000.0, duration: 5_400.0, ..ScenarioConfig::southward() }
    }

    /// Navigation interval T (s): two IMU sub-samples.
    pub fn nav_interval(&self) -> f64 {
        2.0 / self.imu_rate
    }

    /// Geometric radius of the flight, `R + h₀`.
    pub fn orbit_radius(&self) -> f64 {
        self.earth.equatorial_radius + self.height0
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.duration > 0.0) {
            return Err(ScenarioError::NonPositiveDuration(self.duration));
        }
        if !(self.imu_rate > 0.0) {
            return Err(ScenarioError::InvalidImuRate(self.imu_rate));
        }
        let per_nav = self.imu_rate / (2.0 * self.gnss_rate);
        if !(self.gnss_rate > 0.0) || (per_nav - per_nav.round()).abs() > 1e-9 || per_nav < 1.0 {
            return Err(ScenarioError::InvalidGnssRate(self.gnss_rate));
        }
        if self.lat0.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(ScenarioError::InvalidLatitude(self.lat0));
        }
        if self.path_kind == PathKind::Parallel
            && self.lat0.cos().abs() < COS_LAT_SINGULARITY_TOL
        {
            return Err(ScenarioError::ParallelPathAtPole(self.lat0));
        }
        if self.earth.eccentricity_sq != 0.0 {
            return Err(ScenarioError::NonSphericalEarth);
        }
        Ok(())
    }
}

/// Truth state at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSample {
    pub time: f64,
    /// Curvilinear position, wrapped into |L| ≤ π/2 and λ ∈ (−π, π].
    pub curvilinear: CurvilinearPosition,
    pub ecef: EcefPosition,
    /// `v^e` (m/s).
    pub velocity: Vector3<f64>,
    /// Body attitude `q_b^e` (identity on these paths).
    pub attitude: Quaternion,
}

// Smooth (unwrapped) Cartesian truth: position, velocity, acceleration.
fn cartesian_truth(t: f64, cfg: &ScenarioConfig) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let r = cfg.orbit_radius();
    match cfg.path_kind {
        PathKind::Meridian => {
            let phi = cfg.lat0 + cfg.speed / r * t;
            let (sin_phi, cos_phi) = phi.sin_cos();
            let (sin_lon, cos_lon) = cfg.lon0.sin_cos();
            let p = r * Vector3::new(cos_phi * cos_lon, cos_phi * sin_lon, sin_phi);
            let v = cfg.speed * Vector3::new(-sin_phi * cos_lon, -sin_phi * sin_lon, cos_phi);
            let a = -(cfg.speed * cfg.speed / r)
                * Vector3::new(cos_phi * cos_lon, cos_phi * sin_lon, sin_phi);
            (p, v, a)
        }
        PathKind::Parallel => {
            let (sin_lat, cos_lat) = cfg.lat0.sin_cos();
            let rate = cfg.speed / (r * cos_lat);
            let lon = cfg.lon0 + rate * t;
            let (sin_lon, cos_lon) = lon.sin_cos();
            let p = r * Vector3::new(cos_lat * cos_lon, cos_lat * sin_lon, sin_lat);
            let v = cfg.speed * Vector3::new(-sin_lon, cos_lon, 0.0);
            let a = -(cfg.speed * rate) * Vector3::new(cos_lon, sin_lon, 0.0);
            (p, v, a)
        }
    }
}

fn curvilinear_truth(t: f64, cfg: &ScenarioConfig) -> CurvilinearPosition {
    match cfg.path_kind {
        PathKind::Meridian => CurvilinearPosition {
            longitude: cfg.lon0,
            latitude: cfg.lat0 + cfg.speed / cfg.orbit_radius() * t,
            height: cfg.height0,
        }
        .wrapped(),
        PathKind::Parallel => CurvilinearPosition::new(
            cfg.lon0 + cfg.speed / (cfg.orbit_radius() * cfg.lat0.cos()) * t,
            cfg.lat0,
            cfg.height0,
        ),
    }
}

/// Truth sample at time `t ∈ [0, duration]`.
pub fn truth_at(t: f64, cfg: &ScenarioConfig) -> Result<TruthSample, ScenarioError> {
    if !(0.0..=cfg.duration).contains(&t) {
        return Err(ScenarioError::OutOfRange { t, duration: cfg.duration });
    }
    let (p, v, _) = cartesian_truth(t, cfg);
    Ok(TruthSample {
        time: t,
        curvilinear: curvilinear_truth(t, cfg),
        ecef: EcefPosition(p),
        velocity: v,
        attitude: Quaternion::identity(),
    })
}

/// Specific force sensed by the (Earth-aligned) body at time `t`:
/// `f^b = v̇^e + 2 ω_ie^e × v^e − g^e`.
pub fn specific_force_at(t: f64, cfg: &ScenarioConfig) -> Vector3<f64> {
    let (p, v, a) = cartesian_truth(t, cfg);
    let gravity = geodesy::gravity_ecef(&EcefPosition(p), &cfg.earth)
        .expect("flight paths keep a positive geometric radius");
    a + 2.0 * cfg.earth.rotation_vector().cross(&v) - gravity
}

/// Inertial angular rate sensed by the gyros: the body is locked to the
/// Earth frame, so `ω_ib^b = ω_ie^e` at all times.
pub fn angular_rate_at(_t: f64, cfg: &ScenarioConfig) -> Vector3<f64> {
    cfg.earth.rotation_vector()
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.9061798459386640,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.9061798459386640,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.23692688505618909,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618909,
];

/// Perfect-sensor increments over one sub-sample `[t_a, t_b]`:
/// the incremental angle is `ω_ie^e · (t_b − t_a)` exactly, and the
/// incremental velocity is the 5-point Gauss-Legendre quadrature of the
/// analytic specific force.
pub fn imu_increments_at(
    t_a: f64,
    t_b: f64,
    cfg: &ScenarioConfig,
) -> (Vector3<f64>, Vector3<f64>) {
    let dtheta = cfg.earth.rotation_vector() * (t_b - t_a);
    let half = 0.5 * (t_b - t_a);
    let mid = 0.5 * (t_a + t_b);
    let mut dv = Vector3::zeros();
    for (node, weight) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        dv += *weight * specific_force_at(mid + half * node, cfg);
    }
    (dtheta, dv * half)
}

/// Assembles the two-sub-sample increments for the navigation interval
/// starting at `t` (of length `cfg.nav_interval()`).
pub fn navigation_increments(t: f64, cfg: &ScenarioConfig) -> ImuIncrements {
    let dt = cfg.nav_interval();
    let half = 0.5 * dt;
    let (dtheta1, dv1) = imu_increments_at(t, t + half, cfg);
    let (dtheta2, dv2) = imu_increments_at(t + half, t + dt, cfg);
    ImuIncrements { dtheta1, dtheta2, dv1, dv2, dt }
}

/// Perfect GNSS fix: the truth position and velocity at `t`.
pub fn gnss_sample_at(t: f64, cfg: &ScenarioConfig) -> (EcefPosition, Vector3<f64>) {
    let (p, v, _) = cartesian_truth(t, cfg);
    (EcefPosition(p), v)
}
