//! GNSS-aided optimization-based coarse attitude alignment in the Earth
//! frame.
//!
//! The constant initial attitude satisfies `C_b^e(0)·α = β` with
//!
//! ```text
//! α = ∫ C_{b(t)}^{b(0)} f^b dt
//! β = C_{e(t)}^{e(0)} v^e − v^e(0) + ∫ C_{e(t)}^{e(0)} ω_ie^e × v^e dt
//!                                 − ∫ C_{e(t)}^{e(0)} g^e dt
//! ```
//!
//! where α is built purely from the inertial sensors and β purely from
//! GNSS position/velocity and the apparent gravity. Each GNSS epoch with
//! usable vector norms contributes one normalized (α̂, β̂) pair; the
//! attitude that best maps all α̂ onto all β̂ is the maximum-eigenvalue
//! eigenvector of the Davenport matrix.
//!
//! The solve degenerates when every pair lies on one line — near the poles
//! the apparent gravity stops sweeping a cone — and that case is reported
//! as [`AlignmentError::DegenerateGeometry`] instead of returning an
//! arbitrary rotation about the common axis.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use thiserror::Error;

use crate::attitude::{earth_frame_rotation, Dcm, Quaternion};
use crate::geodesy::{self, EarthModel, EcefPosition};
use crate::strapdown::{coning_correction, sculling_velocity, ImuIncrements};

/// Minimum ‖α‖ and ‖β‖ (m/s) for a GNSS epoch to contribute a pair.
pub const PAIR_NORM_FLOOR: f64 = 0.1;

/// Minimum eigenvalue-gap-per-pair below which the geometry is treated as
/// degenerate (all pairs collinear).
pub const QUALITY_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignmentError {
    #[error("attitude solve needs at least 2 vector pairs, have {available}")]
    InsufficientObservations { available: usize },
    #[error("vector pairs are collinear (quality {quality:.3e} below {QUALITY_THRESHOLD:.0e}); attitude is unobservable")]
    DegenerateGeometry { quality: f64 },
    #[error("GNSS timestamp {t} s is not after the previous sample at {previous} s")]
    NonMonotonicTime { t: f64, previous: f64 },
}

/// One stored unit-vector observation pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorPair {
    /// Normalized α (body-side integral).
    pub alpha: Vector3<f64>,
    /// Normalized β (GNSS/gravity-side integral).
    pub beta: Vector3<f64>,
}

/// Coarse initial attitude and its observability figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentSolution {
    /// `q_b^e(0)`: body-to-Earth attitude at the alignment start.
    pub attitude: Quaternion,
    /// `(λ₁ − λ₂)/n_pairs` of the Davenport matrix; larger is better
    /// conditioned. Grows with the direction spread of the pairs.
    pub quality: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, Copy)]
struct GnssNode {
    time: f64,
    coriolis_integrand: Vector3<f64>,
    gravity_integrand: Vector3<f64>,
}

/// Sequential accumulator for the α/β integrals and the observation pairs.
///
/// Feed IMU increments in time order with [`ingest_imu`](Self::ingest_imu);
/// at each GNSS epoch (which must coincide with the current IMU time) feed
/// the fix with [`ingest_gnss`](Self::ingest_gnss). Time starts at zero.
#[derive(Debug, Clone)]
pub struct AlignmentAccumulator {
    earth: EarthModel,
    /// `q_{b(t)}^{b(0)}`: gyro-propagated body rotation since start.
    body_rotation: Quaternion,
    alpha: Vector3<f64>,
    coriolis_integral: Vector3<f64>,
    gravity_integral: Vector3<f64>,
    initial_velocity: Option<Vector3<f64>>,
    time: f64,
    last_gnss: Option<GnssNode>,
    last_beta: Option<Vector3<f64>>,
    observations: Vec<VectorPair>,
}

impl AlignmentAccumulator {
    pub fn new(earth: EarthModel) -> Self {
        AlignmentAccumulator {
            earth,
            body_rotation: Quaternion::identity(),
            alpha: Vector3::zeros(),
            coriolis_integral: Vector3::zeros(),
            gravity_integral: Vector3::zeros(),
            initial_velocity: None,
            time: 0.0,
            last_gnss: None,
            last_beta: None,
            observations: Vec::new(),
        }
    }

    /// Advances the body-side integral by one navigation interval: α grows
    /// by the sculling-corrected velocity increment rotated into the b(0)
    /// frame at the interval start, then the stored body rotation advances
    /// by the coning-corrected angle.
    pub fn ingest_imu(&mut self, inc: &ImuIncrements) {
        let u = sculling_velocity(&inc.dtheta1, &inc.dtheta2, &inc.dv1, &inc.dv2);
        self.alpha += self.body_rotation.rotate(&u);
        let sigma_b = coning_correction(&inc.dtheta1, &inc.dtheta2);
        self.body_rotation = self.body_rotation * Quaternion::from_rotation_vector(&sigma_b);
        self.time += inc.dt;
    }

    /// Advances the GNSS-side integrals to epoch `t` (trapezoidal rule on
    /// the GNSS grid), assembles β, and stores a normalized (α̂, β̂) pair
    /// when both vectors clear [`PAIR_NORM_FLOOR`]. Returns whether a pair
    /// was stored.
    pub fn ingest_gnss(
        &mut self,
        t: f64,
        velocity: &Vector3<f64>,
        position: &EcefPosition,
    ) -> Result<bool, AlignmentError> {
        if let Some(last) = &self.last_gnss {
            if t <= last.time {
                return Err(AlignmentError::NonMonotonicTime { t, previous: last.time });
            }
        }

        let frozen = earth_frame_rotation(self.earth.rotation_rate, t);
        let gravity = geodesy::gravity_ecef(position, &self.earth)
            .unwrap_or_else(|_| Vector3::zeros());
        let node = GnssNode {
            time: t,
            coriolis_integrand: frozen * self.earth.rotation_vector().cross(velocity),
            gravity_integrand: frozen * gravity,
        };

        if let Some(last) = &self.last_gnss {
            let h = 0.5 * (t - last.time);
            self.coriolis_integral += h * (last.coriolis_integrand + node.coriolis_integrand);
            self.gravity_integral += h * (last.gravity_integrand + node.gravity_integrand);
        }
        let v0 = *self.initial_velocity.get_or_insert(*velocity);
        self.last_gnss = Some(node);

        let beta = frozen * velocity - v0 + self.coriolis_integral - self.gravity_integral;
        self.last_beta = Some(beta);

        if self.alpha.norm() > PAIR_NORM_FLOOR && beta.norm() > PAIR_NORM_FLOOR {
            self.observations.push(VectorPair {
                alpha: self.alpha.normalize(),
                beta: beta.normalize(),
            });
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Solves for `q_b^e(0)` from the stored pairs.
    pub fn solve_initial_attitude(&self) -> Result<AlignmentSolution, AlignmentError> {
        davenport_q_method(&self.observations)
    }

    /// Current attitude from a solved initial attitude:
    /// `C_b^e(t) = C_{e(0)}^{e(t)} · C_b^e(0) · C_{b(t)}^{b(0)}`.
    pub fn current_attitude(&self, solution: &AlignmentSolution) -> Dcm {
        earth_frame_rotation(self.earth.rotation_rate, self.time).transpose()
            * solution.attitude.to_dcm()
            * self.body_rotation.to_dcm()
    }

    /// Raw (un-normalized) α integral.
    pub fn alpha(&self) -> Vector3<f64> {
        self.alpha
    }

    /// β assembled at the most recent GNSS epoch, if any.
    pub fn last_beta(&self) -> Option<Vector3<f64>> {
        self.last_beta
    }

    /// Gyro-propagated `q_{b(t)}^{b(0)}`.
    pub fn body_rotation(&self) -> Quaternion {
        self.body_rotation
    }

    pub fn elapsed(&self) -> f64 {
        self.time
    }

    pub fn observations(&self) -> &[VectorPair] {
        &self.observations
    }
}

/// Davenport q-method: the attitude maximizing `Σᵢ β̂ᵢᵀ·C·α̂ᵢ` over all
/// rotations (equal weights) is the eigenvector of the largest eigenvalue
/// of the symmetric 4×4 gain matrix built from `B = Σᵢ β̂ᵢ α̂ᵢᵀ`.
pub fn davenport_q_method(pairs: &[VectorPair]) -> Result<AlignmentSolution, AlignmentError> {
    if pairs.len() < 2 {
        return Err(AlignmentError::InsufficientObservations { available: pairs.len() });
    }

    let mut b = Matrix3::<f64>::zeros();
    for pair in pairs {
        b += pair.beta * pair.alpha.transpose();
    }
    let sigma = b.trace();
    let s = b + b.transpose();
    let z = Vector3::new(
        b[(2, 1)] - b[(1, 2)],
        b[(0, 2)] - b[(2, 0)],
        b[(1, 0)] - b[(0, 1)],
    );

    let mut k = Matrix4::<f64>::zeros();
    k[(0, 0)] = sigma;
    for i in 0..3 {
        k[(0, i + 1)] = z[i];
        k[(i + 1, 0)] = z[i];
        for j in 0..3 {
            k[(i + 1, j + 1)] = s[(i, j)] - if i == j { sigma } else { 0.0 };
        }
    }

    let eigen = nalgebra::SymmetricEigen::new(k);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).expect("finite eigenvalues")
    });
    let quality = (eigen.eigenvalues[order[0]] - eigen.eigenvalues[order[1]]) / pairs.len() as f64;
    if quality < QUALITY_THRESHOLD {
        return Err(AlignmentError::DegenerateGeometry { quality });
    }

    let v: Vector4<f64> = eigen.eigenvectors.column(order[0]).into_owned();
    let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
    Ok(AlignmentSolution {
        attitude: Quaternion::new(sign * v[0], sign * v[1], sign * v[2], sign * v[3]),
        quality,
        n_pairs: pairs.len(),
    })
}
