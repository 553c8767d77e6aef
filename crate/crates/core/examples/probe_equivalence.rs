//! Scratch probe: pointwise difference between the two mechanizations on
//! the sub-polar scenario, and discrete-vs-RK4 agreement on 60 s windows.

use nalgebra::Vector3;
use polarnav::geodesy;
use polarnav::strapdown::{earth_frame_step, integrate_rk4, vertical_reset_earth, EarthFrameState};
use polarnav::trajgen::{self, ScenarioConfig};

fn main() {
    // pointwise frame difference over the 1 h sub-polar flight
    let cfg = ScenarioConfig::southward();
    let earth = polarnav::harness::run_scenario("s", &cfg, polarnav::Mechanization::Earth).unwrap();
    let llf = polarnav::harness::run_scenario("s", &cfg, polarnav::Mechanization::LocalLevel).unwrap();
    let mut max_diff: f64 = 0.0;
    let mut max_t = 0.0;
    for (a, b) in earth.series.iter().zip(llf.series.iter()) {
        assert_eq!(a.time, b.time);
        let d = (a.err_ecef - b.err_ecef).norm();
        if d > max_diff {
            max_diff = d;
            max_t = a.time;
        }
    }
    println!("frame equivalence: max |p_earth - p_llf| = {max_diff:.4} m at t = {max_t} s");

    // discrete stepper vs 1 kHz RK4 over 60 s windows of the transpolar run
    let cfg = ScenarioConfig::transpolar();
    for window_start in [0.0, 1200.0, 2200.0, 4000.0, 5340.0] {
        let truth = trajgen::truth_at(window_start, &cfg).unwrap();
        let init = EarthFrameState {
            attitude: truth.attitude,
            velocity: truth.velocity,
            position: truth.ecef,
            time: window_start,
        };
        // discrete at 50 Hz navigation rate (T = 0.02 s), no reset
        let mut disc = init;
        let steps = (60.0 / 0.02) as usize;
        for k in 0..steps {
            let inc = trajgen::navigation_increments(window_start + k as f64 * 0.02, &cfg);
            disc = earth_frame_step(&disc, &inc, &cfg.earth);
        }
        let rk4 = integrate_rk4(
            &init,
            60.0,
            1e-3,
            |t| trajgen::specific_force_at(t, &cfg),
            |t| trajgen::angular_rate_at(t, &cfg),
            &cfg.earth,
        );
        let diff = (disc.position.0 - rk4.position.0).norm();
        let truth_end = trajgen::truth_at(window_start + 60.0, &cfg).unwrap();
        let rk4_err = (rk4.position.0 - truth_end.ecef.0).norm();
        println!(
            "window {window_start:>6}: |disc - rk4| = {diff:.3e} m, |rk4 - truth| = {rk4_err:.3e} m"
        );
    }

    // convergence order: transpolar earth-frame final error at T, T/2
    for imu_rate in [100.0, 200.0, 400.0] {
        let cfg = ScenarioConfig { imu_rate, ..ScenarioConfig::transpolar() };
        let truth0 = trajgen::truth_at(0.0, &cfg).unwrap();
        let mut state = EarthFrameState {
            attitude: truth0.attitude,
            velocity: truth0.velocity,
            position: truth0.ecef,
            time: 0.0,
        };
        let dt = cfg.nav_interval();
        let steps = (cfg.duration / dt).round() as usize;
        let mut max_err: f64 = 0.0;
        for k in 0..steps {
            let inc = trajgen::navigation_increments(k as f64 * dt, &cfg);
            state = earth_frame_step(&state, &inc, &cfg.earth);
            state = vertical_reset_earth(&state, &cfg.earth).unwrap();
            if (k + 1) % 500 == 0 {
                let t = trajgen::gnss_sample_at((k + 1) as f64 * dt, &cfg);
                max_err = max_err.max((state.position.0 - t.0 .0).norm());
            }
        }
        let t_end = trajgen::gnss_sample_at(steps as f64 * dt, &cfg);
        println!(
            "imu_rate {imu_rate:>5}: max err {max_err:10.4} m, final err {:10.4} m",
            (state.position.0 - t_end.0 .0).norm()
        );
    }

    // what does gravity/coriolis explicitness cost? velocity error growth
    let cfg = ScenarioConfig::southward();
    let t0 = trajgen::truth_at(0.0, &cfg).unwrap();
    let mut st = EarthFrameState {
        attitude: t0.attitude,
        velocity: t0.velocity,
        position: t0.ecef,
        time: 0.0,
    };
    let mut worst_v: f64 = 0.0;
    for k in 0..(3600.0f64 / 0.02) as usize {
        let inc = trajgen::navigation_increments(k as f64 * 0.02, &cfg);
        st = earth_frame_step(&st, &inc, &cfg.earth);
        st = vertical_reset_earth(&st, &cfg.earth).unwrap();
        if (k + 1) % 5000 == 0 {
            let tr = trajgen::gnss_sample_at((k + 1) as f64 * 0.02, &cfg);
            let dv: Vector3<f64> = st.velocity - tr.1;
            worst_v = worst_v.max(dv.norm());
        }
    }
    println!("southward earth: worst sampled velocity error {worst_v:.5} m/s");
    let _ = geodesy::ecef_to_curvilinear(&st.position, &cfg.earth).unwrap();
}
