//! Discrete two-sample strapdown updates in the Earth (ECEF) frame and in
//! the local-level (N-U-E) frame, the zero-vertical-velocity reset, and a
//! continuous-time reference model for validating the discrete steppers.
//!
//! Both steppers consume the same [`ImuIncrements`] and the same gravity
//! model, so any difference between their outputs is discretization or
//! frame geometry, not modelling.

use nalgebra::{Vector3, Vector4};

use crate::attitude::Quaternion;
use crate::geodesy::{
    self, CurvilinearPosition, EarthModel, EcefPosition, GeodesyError,
};

/// Gyro and accelerometer increments over one navigation interval `dt`,
/// split into two equal sub-samples for coning/sculling compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuIncrements {
    /// First-half incremental angle (rad).
    pub dtheta1: Vector3<f64>,
    /// Second-half incremental angle (rad).
    pub dtheta2: Vector3<f64>,
    /// First-half incremental velocity (m/s).
    pub dv1: Vector3<f64>,
    /// Second-half incremental velocity (m/s).
    pub dv2: Vector3<f64>,
    /// Navigation interval T (s); each sub-sample spans T/2.
    pub dt: f64,
}

/// Navigation solution carried by the Earth-frame mechanization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthFrameState {
    /// Body-to-Earth attitude quaternion (DCM `C_b^e`).
    pub attitude: Quaternion,
    /// Ground velocity in Earth axes, `v^e` (m/s).
    pub velocity: Vector3<f64>,
    /// ECEF position `p^e` (m).
    pub position: EcefPosition,
    /// Epoch (s).
    pub time: f64,
}

/// Navigation solution carried by the local-level (N-U-E) mechanization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLevelState {
    /// Body-to-local-level attitude quaternion (DCM `C_b^n`).
    pub attitude: Quaternion,
    /// Velocity in N-U-E axes, `v^n` (m/s).
    pub velocity: Vector3<f64>,
    /// Curvilinear position (λ, L, h).
    pub position: CurvilinearPosition,
    /// Epoch (s).
    pub time: f64,
}

/// Two-sample coning compensation:
/// `σ_b = Δθ₁ + Δθ₂ + (2/3)·Δθ₁ × Δθ₂`.
pub fn coning_correction(dtheta1: &Vector3<f64>, dtheta2: &Vector3<f64>) -> Vector3<f64> {
    dtheta1 + dtheta2 + (2.0 / 3.0) * dtheta1.cross(dtheta2)
}

/// Two-sample velocity increment with rotation and sculling compensation:
/// `u^b = Δv₁ + Δv₂ + ½(Δθ₁+Δθ₂)×(Δv₁+Δv₂) + (2/3)(Δθ₁×Δv₂ + Δv₁×Δθ₂)`.
pub fn sculling_velocity(
    dtheta1: &Vector3<f64>,
    dtheta2: &Vector3<f64>,
    dv1: &Vector3<f64>,
    dv2: &Vector3<f64>,
) -> Vector3<f64> {
    dv1 + dv2
        + 0.5 * (dtheta1 + dtheta2).cross(&(dv1 + dv2))
        + (2.0 / 3.0) * (dtheta1.cross(dv2) + dv1.cross(dtheta2))
}

/// One Earth-frame navigation update over `inc.dt`.
///
/// Attitude chain: `C_b^e(k+1) = C_{e_k}^{e_{k+1}} · C_b^e(k) · C_{b_{k+1}}^{b_k}`
/// with `σ_e = T·ω_ie^e` and `C_{e_k}^{e_{k+1}}` the transpose of the σ_e
/// rotation (pinned by the requirement that an Earth-fixed body keeps a
/// constant `C_b^e`). Velocity uses the explicit Coriolis and gravity terms
/// at the beginning of the interval; position is trapezoidal.
///
/// This update has no latitude singularity and is total for finite inputs.
pub fn earth_frame_step(
    state: &EarthFrameState,
    inc: &ImuIncrements,
    model: &EarthModel,
) -> EarthFrameState {
    let dt = inc.dt;
    let omega_ie = model.rotation_vector();

    // attitude
    let sigma_e = omega_ie * dt;
    let sigma_b = coning_correction(&inc.dtheta1, &inc.dtheta2);
    let earth_rotation = Quaternion::from_rotation_vector(&sigma_e).conjugate();
    let body_rotation = Quaternion::from_rotation_vector(&sigma_b);
    let attitude = earth_rotation * state.attitude * body_rotation;

    // velocity (gravity is undefined only at the exact Earth centre; use
    // zero there so the step stays total)
    let u = sculling_velocity(&inc.dtheta1, &inc.dtheta2, &inc.dv1, &inc.dv2);
    let gravity = geodesy::gravity_ecef(&state.position, model).unwrap_or_else(|_| Vector3::zeros());
    let velocity = state.velocity + state.attitude.rotate(&u)
        - 2.0 * dt * omega_ie.cross(&state.velocity)
        + dt * gravity;

    // position (trapezoid)
    let position = EcefPosition(state.position.0 + dt * 0.5 * (state.velocity + velocity));

    EarthFrameState { attitude, velocity, position, time: state.time + dt }
}

/// One local-level (N-U-E) navigation update over `inc.dt`.
///
/// Mirrors [`earth_frame_step`] with the frame rotation
/// `σ_n = T·(ω_ie^n + ω_en^n)` and the curvilinear position update
/// `p^n(k+1) = p^n(k) + R_c(k)·r`. Near a pole the transport rate and the
/// curvature matrix blow up; inside the pole tolerance this returns
/// [`GeodesyError::SingularLatitude`] rather than silently producing
/// garbage. A step that lands past a pole is reflected back into range
/// (`CurvilinearPosition::wrapped`).
pub fn local_level_step(
    state: &LocalLevelState,
    inc: &ImuIncrements,
    model: &EarthModel,
) -> Result<LocalLevelState, GeodesyError> {
    let dt = inc.dt;
    let lat = state.position.latitude;
    let height = state.position.height;

    let omega_ie = geodesy::earth_rotation_rate_nue(lat, model);
    let omega_en = geodesy::transport_rate(&state.velocity, lat, height, model)?;
    let curvature = geodesy::curvature_matrix(lat, height, model)?;

    // attitude
    let sigma_n = (omega_ie + omega_en) * dt;
    let sigma_b = coning_correction(&inc.dtheta1, &inc.dtheta2);
    let frame_rotation = Quaternion::from_rotation_vector(&sigma_n).conjugate();
    let body_rotation = Quaternion::from_rotation_vector(&sigma_b);
    let attitude = frame_rotation * state.attitude * body_rotation;

    // velocity; gravity shared with the Earth-frame stepper, rotated into
    // N-U-E at the current position
    let u = sculling_velocity(&inc.dtheta1, &inc.dtheta2, &inc.dv1, &inc.dv2);
    let ecef = geodesy::curvilinear_to_ecef(&state.position, model);
    let gravity_nue =
        geodesy::ecef_to_nue_dcm(state.position.longitude, lat) * geodesy::gravity_ecef(&ecef, model)?;
    let velocity = state.velocity + state.attitude.rotate(&u)
        - dt * (2.0 * omega_ie + omega_en).cross(&state.velocity)
        + dt * gravity_nue;

    // position
    let r = dt * 0.5 * (state.velocity + velocity);
    let dp = curvature * r;
    let position = CurvilinearPosition {
        longitude: state.position.longitude + dp.x,
        latitude: state.position.latitude + dp.y,
        height: state.position.height + dp.z,
    }
    .wrapped();

    Ok(LocalLevelState { attitude, velocity, position, time: state.time + dt })
}

/// Zero-vertical-velocity reset for the Earth-frame solution: the velocity
/// is rotated into N-U-E at the current estimated position, its Up
/// component zeroed, and rotated back. Position and attitude are untouched.
pub fn vertical_reset_earth(
    state: &EarthFrameState,
    model: &EarthModel,
) -> Result<EarthFrameState, GeodesyError> {
    let c = geodesy::ecef_to_curvilinear(&state.position, model)?;
    let e_to_n = geodesy::ecef_to_nue_dcm(c.longitude, c.latitude);
    let mut v_nue = e_to_n * state.velocity;
    v_nue.y = 0.0;
    Ok(EarthFrameState { velocity: e_to_n.transpose() * v_nue, ..*state })
}

/// Zero-vertical-velocity reset for the local-level solution: `v_U := 0`.
pub fn vertical_reset_llf(state: &LocalLevelState) -> LocalLevelState {
    LocalLevelState {
        velocity: Vector3::new(state.velocity.x, 0.0, state.velocity.z),
        ..*state
    }
}

/// Time derivatives of the Earth-frame state under the continuous
/// kinematics, as produced by [`continuous_rhs`].
#[derive(Debug, Clone, Copy)]
pub struct EarthFrameRates {
    /// Attitude quaternion derivative, scalar-first `[ṡ, η̇ₓ, η̇ᵧ, η̇_z]`.
    pub attitude: Vector4<f64>,
    /// `v̇^e` (m/s²).
    pub velocity: Vector3<f64>,
    /// `ṗ^e` (m/s).
    pub position: Vector3<f64>,
}

/// Continuous-time Earth-frame kinematics:
///
/// ```text
/// Ċ_b^e = C_b^e (ω_eb^b ×),   ω_eb^b = ω_ib^b − C_e^b ω_ie^e
/// v̇^e  = C_b^e f^b − 2 ω_ie^e × v^e + g^e
/// ṗ^e  = v^e
/// ```
///
/// in quaternion form (`q̇ = ½ q ⊗ [0, ω_eb^b]`). This is the reference
/// model the discrete stepper is validated against.
pub fn continuous_rhs(
    state: &EarthFrameState,
    specific_force: &Vector3<f64>,
    angular_rate: &Vector3<f64>,
    model: &EarthModel,
) -> EarthFrameRates {
    let q = state.attitude;
    let omega_ie = model.rotation_vector();
    let omega_eb = angular_rate - q.conjugate().rotate(&omega_ie);

    // ½ q ⊗ [0, ω], written out
    let half_omega = 0.5 * omega_eb;
    let attitude = Vector4::new(
        -q.v.dot(&half_omega),
        q.s * half_omega.x + q.v.y * half_omega.z - q.v.z * half_omega.y,
        q.s * half_omega.y + q.v.z * half_omega.x - q.v.x * half_omega.z,
        q.s * half_omega.z + q.v.x * half_omega.y - q.v.y * half_omega.x,
    );

    let gravity = geodesy::gravity_ecef(&state.position, model).unwrap_or_else(|_| Vector3::zeros());
    let velocity = q.rotate(specific_force) - 2.0 * omega_ie.cross(&state.velocity) + gravity;

    EarthFrameRates { attitude, velocity, position: state.velocity }
}

/// Integrates the continuous Earth-frame kinematics with fixed-step
/// classical RK4 from `state.time` over `duration`, sampling the specific
/// force and angular rate as functions of absolute time. The step size is
/// `duration/n` with `n` chosen so it never exceeds `max_step`.
pub fn integrate_rk4<F, W>(
    state: &EarthFrameState,
    duration: f64,
    max_step: f64,
    specific_force: F,
    angular_rate: W,
    model: &EarthModel,
) -> EarthFrameState
where
    F: Fn(f64) -> Vector3<f64>,
    W: Fn(f64) -> Vector3<f64>,
{
    assert!(duration >= 0.0 && max_step > 0.0);
    let n = (duration / max_step).ceil().max(1.0) as usize;
    let h = duration / n as f64;

    let pack = |s: &EarthFrameState| -> [f64; 10] {
        [
            s.attitude.s,
            s.attitude.v.x,
            s.attitude.v.y,
            s.attitude.v.z,
            s.velocity.x,
            s.velocity.y,
            s.velocity.z,
            s.position.0.x,
            s.position.0.y,
            s.position.0.z,
        ]
    };
    let unpack = |y: &[f64; 10], t: f64| -> EarthFrameState {
        EarthFrameState {
            attitude: Quaternion { s: y[0], v: Vector3::new(y[1], y[2], y[3]) }.normalized(),
            velocity: Vector3::new(y[4], y[5], y[6]),
            position: EcefPosition::new(y[7], y[8], y[9]),
            time: t,
        }
    };
    let rhs = |y: &[f64; 10], t: f64| -> [f64; 10] {
        let s = unpack(y, t);
        let r = continuous_rhs(&s, &specific_force(t), &angular_rate(t), model);
        [
            r.attitude.x,
            r.attitude.y,
            r.attitude.z,
            r.attitude.w,
            r.velocity.x,
            r.velocity.y,
            r.velocity.z,
            r.position.x,
            r.position.y,
            r.position.z,
        ]
    };

    let mut y = pack(state);
    let mut t = state.time;
    for _ in 0..n {
        let k1 = rhs(&y, t);
        let mut y2 = y;
        for i in 0..10 {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = rhs(&y2, t + 0.5 * h);
        let mut y3 = y;
        for i in 0..10 {
            y3[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = rhs(&y3, t + 0.5 * h);
        let mut y4 = y;
        for i in 0..10 {
            y4[i] = y[i] + h * k3[i];
        }
        let k4 = rhs(&y4, t + h);
        for i in 0..10 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;

        // keep the quaternion block on the unit sphere
        let qn = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]).sqrt();
        for q in y.iter_mut().take(4) {
            *q /= qn;
        }
    }
    unpack(&y, state.time + duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sphere() -> EarthModel {
        EarthModel::default()
    }

    /// Earth model with no rotation and no gravity: both steppers must
    /// degenerate to pure translation.
    fn inert_model() -> EarthModel {
        EarthModel { rotation_rate: 0.0, gravity_magnitude: 0.0, ..EarthModel::default() }
    }

    fn zero_increments(dt: f64) -> ImuIncrements {
        ImuIncrements {
            dtheta1: Vector3::zeros(),
            dtheta2: Vector3::zeros(),
            dv1: Vector3::zeros(),
            dv2: Vector3::zeros(),
            dt,
        }
    }

    /// Increments of a body that is fixed to the Earth at ECEF position
    /// `p` (gyros see the Earth rate, accelerometers oppose gravity).
    fn earth_fixed_increments(p: &EcefPosition, dt: f64, model: &EarthModel) -> ImuIncrements {
        let dtheta = model.rotation_vector() * (dt / 2.0);
        let dv = -geodesy::gravity_ecef(p, model).unwrap() * (dt / 2.0);
        ImuIncrements { dtheta1: dtheta, dtheta2: dtheta, dv1: dv, dv2: dv, dt }
    }

    #[test]
    fn coning_closed_forms() {
        let a = Vector3::new(0.02, 0.0, 0.0);
        let b = Vector3::new(0.03, 0.0, 0.0);
        assert_eq!(coning_correction(&a, &b), Vector3::new(0.05, 0.0, 0.0));

        let s = coning_correction(&Vector3::new(0.01, 0.0, 0.0), &Vector3::new(0.0, 0.01, 0.0));
        assert_relative_eq!(s.x, 0.01, max_relative = 1e-15);
        assert_relative_eq!(s.y, 0.01, max_relative = 1e-15);
        assert_relative_eq!(s.z, 6.6666666666666667e-5, max_relative = 1e-15);

        assert_eq!(
            coning_correction(&Vector3::zeros(), &Vector3::zeros()),
            Vector3::zeros()
        );
    }

    #[test]
    fn sculling_closed_forms() {
        let dv1 = Vector3::new(0.1, -0.2, 0.05);
        let dv2 = Vector3::new(0.0, 0.3, -0.1);
        // no rotation: all cross terms vanish
        assert_eq!(
            sculling_velocity(&Vector3::zeros(), &Vector3::zeros(), &dv1, &dv2),
            dv1 + dv2
        );

        // everything parallel: cross terms vanish
        let axis: Vector3<f64> = Vector3::new(1.0, 2.0, -0.5);
        let u = sculling_velocity(&(0.001 * axis), &(0.002 * axis), &(0.1 * axis), &(0.2 * axis));
        assert!((u - 0.3 * axis).norm() < 1e-15);

        // pure rotation compensation: the (2/3) terms cancel by antisymmetry
        let dtheta = Vector3::new(1e-3, 0.0, 0.0);
        let dv = Vector3::new(0.0, 0.1, 0.0);
        let u = sculling_velocity(&dtheta, &dtheta, &dv, &dv);
        assert_relative_eq!(u.x, 0.0, epsilon = 1e-18);
        assert_relative_eq!(u.y, 0.2, max_relative = 1e-15);
        assert_relative_eq!(u.z, 2e-4, max_relative = 1e-15);
    }

    #[test]
    fn earth_step_stationary_equilibrium() {
        let model = sphere();
        let p0 = geodesy::curvilinear_to_ecef(
            &CurvilinearPosition::new(120f64.to_radians(), 50f64.to_radians(), 10_000.0),
            &model,
        );
        let mut state = EarthFrameState {
            attitude: Quaternion::identity(),
            velocity: Vector3::zeros(),
            position: p0,
            time: 0.0,
        };
        let inc = earth_fixed_increments(&p0, 0.02, &model);
        for _ in 0..10 {
            let next = earth_frame_step(&state, &inc, &model);
            assert!((next.position.0 - state.position.0).norm() < 1e-6);
            state = next;
        }
        // attitude of an Earth-fixed body stays constant; this pins the
        // sign convention of the e-frame rotation in the chain
        assert!((state.attitude.to_dcm() - nalgebra::Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn earth_step_pure_trapezoid_when_inert() {
        let model = inert_model();
        let state = EarthFrameState {
            attitude: Quaternion::identity(),
            velocity: Vector3::new(1.0, 0.0, 0.0),
            position: EcefPosition::new(0.0, 2.0, 3.0),
            time: 5.0,
        };
        let next = earth_frame_step(&state, &zero_increments(1.0), &model);
        assert_eq!(next.velocity, state.velocity);
        assert_eq!(next.position.0, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(next.time, 6.0);
        assert_eq!(next.attitude, state.attitude);
    }

    #[test]
    fn earth_step_quaternion_norm_over_a_million_steps() {
        let model = sphere();
        let p0 = geodesy::curvilinear_to_ecef(
            &CurvilinearPosition::new(0.3, 0.8, 10_000.0),
            &model,
        );
        let inc = earth_fixed_increments(&p0, 0.02, &model);
        let mut state = EarthFrameState {
            attitude: Quaternion::new(0.9, 0.2, -0.1, 0.3),
            velocity: Vector3::zeros(),
            position: p0,
            time: 0.0,
        };
        for _ in 0..1_000_000 {
            state = earth_frame_step(&state, &inc, &model);
            state.position = p0; // hold position; this test is about attitude only
        }
        assert!((state.attitude.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn llf_step_stationary_equilibrium() {
        let model = sphere();
        let dt = 0.02;
        // body axes aligned with N-U-E; gyros see the Earth rate in N-U-E,
        // accelerometers oppose local gravity
        let lat = 50f64.to_radians();
        let dtheta = geodesy::earth_rotation_rate_nue(lat, &model) * (dt / 2.0);
        let dv = Vector3::new(0.0, model.gravity_magnitude, 0.0) * (dt / 2.0);
        let inc = ImuIncrements { dtheta1: dtheta, dtheta2: dtheta, dv1: dv, dv2: dv, dt };

        let mut state = LocalLevelState {
            attitude: Quaternion::identity(),
            velocity: Vector3::zeros(),
            position: CurvilinearPosition::new(120f64.to_radians(), lat, 10_000.0),
            time: 0.0,
        };
        for _ in 0..10 {
            let next = local_level_step(&state, &inc, &model).unwrap();
            assert!((next.position.longitude - state.position.longitude).abs() < 1e-6f64.to_radians());
            assert!((next.position.latitude - state.position.latitude).abs() < 1e-6f64.to_radians());
            assert!((next.position.height - state.position.height).abs() < 1e-4);
            state = next;
        }
        assert!((state.attitude.to_dcm() - nalgebra::Matrix3::identity()).norm() < 1e-10);
    }

    #[test]
    fn llf_step_refuses_pole() {
        let model = sphere();
        let state = LocalLevelState {
            attitude: Quaternion::identity(),
            velocity: Vector3::new(2000.0, 0.0, 0.0),
            position: CurvilinearPosition::new(0.0, 89.99999f64.to_radians(), 10_000.0),
            time: 0.0,
        };
        assert!(matches!(
            local_level_step(&state, &zero_increments(0.02), &model),
            Err(GeodesyError::SingularLatitude { .. })
        ));
    }

    #[test]
    fn vertical_reset_earth_projects_out_radial_velocity() {
        let model = sphere();
        let p = geodesy::curvilinear_to_ecef(
            &CurvilinearPosition::new(0.7, -0.4, 5_000.0),
            &model,
        );
        let up = p.0.normalize();
        let horizontal = Vector3::new(-up.y, up.x, 0.0).normalize() * 37.0;

        let mk = |v: Vector3<f64>| EarthFrameState {
            attitude: Quaternion::identity(),
            velocity: v,
            position: p,
            time: 0.0,
        };

        // already horizontal: unchanged
        let r = vertical_reset_earth(&mk(horizontal), &model).unwrap();
        assert!((r.velocity - horizontal).norm() < 1e-12);

        // purely radial: zeroed
        let r = vertical_reset_earth(&mk(up * 12.0), &model).unwrap();
        assert!(r.velocity.norm() < 1e-12);

        // mixed: the horizontal part survives
        let r = vertical_reset_earth(&mk(horizontal + up * 12.0), &model).unwrap();
        assert!((r.velocity - horizontal).norm() < 1e-12);

        // zero-norm position is an error
        let bad = EarthFrameState {
            attitude: Quaternion::identity(),
            velocity: up,
            position: EcefPosition::new(0.0, 0.0, 0.0),
            time: 0.0,
        };
        assert!(vertical_reset_earth(&bad, &model).is_err());
    }

    #[test]
    fn vertical_reset_llf_zeroes_up_only() {
        let state = LocalLevelState {
            attitude: Quaternion::identity(),
            velocity: Vector3::new(1.0, 2.0, 3.0),
            position: CurvilinearPosition::new(0.0, 0.5, 100.0),
            time: 7.0,
        };
        let r = vertical_reset_llf(&state);
        assert_eq!(r.velocity, Vector3::new(1.0, 0.0, 3.0));
        assert_eq!(r.position, state.position);
        assert_eq!(r.time, state.time);
        // idempotent
        assert_eq!(vertical_reset_llf(&r).velocity, r.velocity);
    }

    #[test]
    fn continuous_rhs_equilibria() {
        let model = sphere();
        let p = geodesy::curvilinear_to_ecef(
            &CurvilinearPosition::new(1.0, 0.5, 10_000.0),
            &model,
        );
        let q = Quaternion::new(0.8, 0.1, -0.5, 0.3);
        let state = EarthFrameState { attitude: q, velocity: Vector3::zeros(), position: p, time: 0.0 };

        // hovering: specific force exactly opposes gravity
        let g = geodesy::gravity_ecef(&p, &model).unwrap();
        let f_b = -q.conjugate().rotate(&g);
        let rates = continuous_rhs(&state, &f_b, &Vector3::zeros(), &model);
        assert!(rates.velocity.norm() < 1e-12);

        // Earth-fixed body: zero attitude rate
        let omega_b = q.conjugate().rotate(&model.rotation_vector());
        let rates = continuous_rhs(&state, &Vector3::zeros(), &omega_b, &model);
        assert!(rates.attitude.norm() < 1e-20);
    }

    #[test]
    fn rk4_keeps_earth_fixed_body_earth_fixed() {
        let model = sphere();
        let p = geodesy::curvilinear_to_ecef(
            &CurvilinearPosition::new(2.0943951023931953, 0.8726646259971648, 10_000.0),
            &model,
        );
        let q = Quaternion::new(0.9, -0.2, 0.1, 0.4);
        let state = EarthFrameState { attitude: q, velocity: Vector3::zeros(), position: p, time: 0.0 };

        let g = geodesy::gravity_ecef(&p, &model).unwrap();
        let f_b = -q.conjugate().rotate(&g);
        let omega_b = q.conjugate().rotate(&model.rotation_vector());

        let end = integrate_rk4(&state, 30.0, 1e-3, |_| f_b, |_| omega_b, &model);
        assert!((end.position.0 - p.0).norm() < 1e-6);
        assert!(end.velocity.norm() < 1e-7);
        assert!((end.attitude.to_dcm() - q.to_dcm()).norm() < 1e-9);
    }

    proptest! {
        #[test]
        fn earth_step_stays_finite(
            lon in -3.1f64..3.1,
            lat in -1.5707963f64..1.5707963,
            h in -1_000.0f64..50_000.0,
            vx in -3_000.0f64..3_000.0,
            vy in -3_000.0f64..3_000.0,
            vz in -3_000.0f64..3_000.0,
            wx in -0.5f64..0.5,
            wy in -0.5f64..0.5,
            wz in -0.5f64..0.5,
        ) {
            let model = sphere();
            let state = EarthFrameState {
                attitude: Quaternion::new(1.0, wx, wy, wz),
                velocity: Vector3::new(vx, vy, vz),
                position: geodesy::curvilinear_to_ecef(
                    &CurvilinearPosition::new(lon, lat, h), &model),
                time: 0.0,
            };
            let inc = ImuIncrements {
                dtheta1: Vector3::new(wx, wy, wz) * 0.01,
                dtheta2: Vector3::new(wz, wx, wy) * 0.01,
                dv1: Vector3::new(vx, vy, vz) * 1e-4,
                dv2: Vector3::new(vy, vz, vx) * 1e-4,
                dt: 0.02,
            };
            let next = earth_frame_step(&state, &inc, &model);
            prop_assert!(next.position.0.iter().all(|x| x.is_finite()));
            prop_assert!(next.velocity.iter().all(|x| x.is_finite()));
            prop_assert!((next.attitude.norm() - 1.0).abs() < 1e-12);
        }
    }
}
