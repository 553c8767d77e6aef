//! Scratch probe: midpoint-gravity variants of both steppers, to size the
//! discretization terms behind the acceptance tolerances.

use nalgebra::Vector3;
use polarnav::attitude::Quaternion;
use polarnav::geodesy::{self, CurvilinearPosition, EarthModel, EcefPosition};
use polarnav::strapdown::{
    coning_correction, integrate_rk4, sculling_velocity, vertical_reset_earth, EarthFrameState,
    ImuIncrements, LocalLevelState,
};
use polarnav::trajgen::{self, ScenarioConfig};

fn earth_step_v2(s: &EarthFrameState, inc: &ImuIncrements, m: &EarthModel) -> EarthFrameState {
    let dt = inc.dt;
    let omega = m.rotation_vector();
    let sigma_e = omega * dt;
    let sigma_b = coning_correction(&inc.dtheta1, &inc.dtheta2);
    let attitude = Quaternion::from_rotation_vector(&sigma_e).conjugate()
        * s.attitude
        * Quaternion::from_rotation_vector(&sigma_b);
    let u = sculling_velocity(&inc.dtheta1, &inc.dtheta2, &inc.dv1, &inc.dv2);
    // gravity at the midpoint position, extrapolated along current velocity
    let p_mid = EcefPosition(s.position.0 + (0.5 * dt) * s.velocity);
    let gravity = geodesy::gravity_ecef(&p_mid, m).unwrap();
    let velocity =
        s.velocity + s.attitude.rotate(&u) - 2.0 * dt * omega.cross(&s.velocity) + dt * gravity;
    let position = EcefPosition(s.position.0 + dt * 0.5 * (s.velocity + velocity));
    EarthFrameState { attitude, velocity, position, time: s.time + dt }
}

fn llf_step_v2(s: &LocalLevelState, inc: &ImuIncrements, m: &EarthModel) -> LocalLevelState {
    let dt = inc.dt;
    let lat = s.position.latitude;
    let h = s.position.height;
    let omega_ie = geodesy::earth_rotation_rate_nue(lat, m);
    let omega_en = geodesy::transport_rate(&s.velocity, lat, h, m).unwrap();
    let curvature = geodesy::curvature_matrix(lat, h, m).unwrap();

    let sigma_n = (omega_ie + omega_en) * dt;
    let sigma_b = coning_correction(&inc.dtheta1, &inc.dtheta2);
    let attitude = Quaternion::from_rotation_vector(&sigma_n).conjugate()
        * s.attitude
        * Quaternion::from_rotation_vector(&sigma_b);

    let u = sculling_velocity(&inc.dtheta1, &inc.dtheta2, &inc.dv1, &inc.dv2);
    // midpoint curvilinear position for the gravity evaluation
    let dp_half = curvature * ((0.5 * dt) * s.velocity);
    let p_mid = CurvilinearPosition {
        longitude: s.position.longitude + dp_half.x,
        latitude: s.position.latitude + dp_half.y,
        height: s.position.height + dp_half.z,
    };
    let ecef_mid = geodesy::curvilinear_to_ecef(&p_mid, m);
    let gravity_nue = geodesy::ecef_to_nue_dcm(p_mid.longitude, p_mid.latitude)
        * geodesy::gravity_ecef(&ecef_mid, m).unwrap();

    let velocity = s.velocity + s.attitude.rotate(&u)
        - dt * (2.0 * omega_ie + omega_en).cross(&s.velocity)
        + dt * gravity_nue;
    let r = dt * 0.5 * (s.velocity + velocity);
    let dp = curvature * r;
    let position = CurvilinearPosition {
        longitude: s.position.longitude + dp.x,
        latitude: s.position.latitude + dp.y,
        height: s.position.height + dp.z,
    }
    .wrapped();
    LocalLevelState { attitude, velocity, position, time: s.time + dt }
}

fn reset_llf(s: &LocalLevelState) -> LocalLevelState {
    LocalLevelState {
        velocity: Vector3::new(s.velocity.x, 0.0, s.velocity.z),
        ..*s
    }
}

fn main() {
    // scenario errors + frame difference with the midpoint-gravity pair
    for (name, cfg) in [
        ("southward", ScenarioConfig::southward()),
        ("transpolar", ScenarioConfig::transpolar()),
    ] {
        let dt = cfg.nav_interval();
        let steps = (cfg.duration / dt).round() as usize;
        let t0 = trajgen::truth_at(0.0, &cfg).unwrap();

        let mut e = EarthFrameState {
            attitude: t0.attitude,
            velocity: t0.velocity,
            position: t0.ecef,
            time: 0.0,
        };
        let e_to_n = geodesy::ecef_to_nue_dcm(t0.curvilinear.longitude, t0.curvilinear.latitude);
        let mut l = LocalLevelState {
            attitude: Quaternion::from_dcm(&(e_to_n * t0.attitude.to_dcm())),
            velocity: e_to_n * t0.velocity,
            position: t0.curvilinear,
            time: 0.0,
        };
        let mut max_e: f64 = 0.0;
        let mut max_l: f64 = 0.0;
        let mut max_diff: f64 = 0.0;
        let mut llf_alive = true;
        let mut singular_at = None;
        for k in 0..steps {
            let inc = trajgen::navigation_increments(k as f64 * dt, &cfg);
            e = earth_step_v2(&e, &inc, &cfg.earth);
            e = vertical_reset_earth(&e, &cfg.earth).unwrap();
            if llf_alive {
                let lat = l.position.latitude;
                if lat.cos().abs() < polarnav::geodesy::COS_LAT_SINGULARITY_TOL {
                    llf_alive = false;
                    singular_at = Some(k as f64 * dt);
                } else {
                    l = reset_llf(&llf_step_v2(&l, &inc, &cfg.earth));
                }
            }
            if (k + 1) % 500 == 0 {
                let tr = trajgen::gnss_sample_at((k + 1) as f64 * dt, &cfg);
                max_e = max_e.max((e.position.0 - tr.0 .0).norm());
                if llf_alive {
                    let lp = geodesy::curvilinear_to_ecef(&l.position, &cfg.earth);
                    max_l = max_l.max((lp.0 - tr.0 .0).norm());
                    max_diff = max_diff.max((lp.0 - e.position.0).norm());
                }
            }
        }
        println!(
            "{name}: earth max {max_e:.3} m, llf max {max_l:.3} m, frame diff {max_diff:.4} m, singular {singular_at:?}"
        );
    }

    // earth-vs-RK4 windows with midpoint gravity
    let cfg = ScenarioConfig::transpolar();
    for window_start in [0.0, 2200.0, 5340.0] {
        let truth = trajgen::truth_at(window_start, &cfg).unwrap();
        let init = EarthFrameState {
            attitude: truth.attitude,
            velocity: truth.velocity,
            position: truth.ecef,
            time: window_start,
        };
        let mut disc = init;
        for k in 0..3000 {
            let inc = trajgen::navigation_increments(window_start + k as f64 * 0.02, &cfg);
            disc = earth_step_v2(&disc, &inc, &cfg.earth);
        }
        let rk4 = integrate_rk4(
            &init,
            60.0,
            1e-3,
            |t| trajgen::specific_force_at(t, &cfg),
            |t| trajgen::angular_rate_at(t, &cfg),
            &cfg.earth,
        );
        println!(
            "window {window_start:>6}: |disc - rk4| = {:.3e} m",
            (disc.position.0 - rk4.position.0).norm()
        );
    }

    // convergence with midpoint gravity
    for imu_rate in [100.0, 200.0] {
        let cfg = ScenarioConfig { imu_rate, ..ScenarioConfig::transpolar() };
        let dt = cfg.nav_interval();
        let steps = (cfg.duration / dt).round() as usize;
        let t0 = trajgen::truth_at(0.0, &cfg).unwrap();
        let mut e = EarthFrameState {
            attitude: t0.attitude,
            velocity: t0.velocity,
            position: t0.ecef,
            time: 0.0,
        };
        let mut max_e: f64 = 0.0;
        for k in 0..steps {
            let inc = trajgen::navigation_increments(k as f64 * dt, &cfg);
            e = earth_step_v2(&e, &inc, &cfg.earth);
            e = vertical_reset_earth(&e, &cfg.earth).unwrap();
            if (k + 1) % 500 == 0 {
                let tr = trajgen::gnss_sample_at((k + 1) as f64 * dt, &cfg);
                max_e = max_e.max((e.position.0 - tr.0 .0).norm());
            }
        }
        println!("imu_rate {imu_rate}: max err {max_e:.4} m");
    }
}
