//! Scenario harness: wires the trajectory generator into the two
//! mechanizations, collects error series against the analytic truth, runs
//! the in-motion alignment experiment, and serializes results.
//!
//! Navigation state never flows back from the display path: the steppers
//! consume only their own `EarthFrameState`/`LocalLevelState`, and
//! [`display_transform`] is a read-only projection.

mod config;
mod output;

pub use config::{emit_config, parse_config, ConfigError};
pub use output::{
    alignment_csv_string, run_csv_string, summary_json_string, write_alignment_outputs,
    write_run_outputs,
};

use nalgebra::Vector3;
use thiserror::Error;

use crate::alignment::{AlignmentAccumulator, AlignmentError, AlignmentSolution};
use crate::attitude::{rotation_angle, Dcm, Quaternion};
use crate::geodesy::{
    self, CurvilinearPosition, EarthModel, EcefPosition, GeodesyError, COS_LAT_SINGULARITY_TOL,
};
use crate::strapdown::{
    earth_frame_step, local_level_step, vertical_reset_earth, vertical_reset_llf, EarthFrameState,
    LocalLevelState,
};
use crate::trajgen::{self, ScenarioConfig, ScenarioError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which discrete mechanization carries the navigation state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanization {
    Earth,
    LocalLevel,
}

impl std::fmt::Display for Mechanization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mechanization::Earth => write!(f, "earth"),
            Mechanization::LocalLevel => write!(f, "llf"),
        }
    }
}

/// One recorded navigation-error sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    /// Epoch (s).
    pub time: f64,
    /// 3-D ECEF position error norm (m).
    pub pos_err_m: f64,
    /// 3-D velocity error norm, compared in ECEF axes (m/s).
    pub vel_err_mps: f64,
    /// Estimated latitude (deg), for ground-track plots.
    pub lat_deg: f64,
    /// Estimated longitude (deg).
    pub lon_deg: f64,
    /// Estimated height (m).
    pub height_m: f64,
    /// Per-axis ECEF position error (m).
    pub err_ecef: Vector3<f64>,
    /// True when this row records the mechanization hitting the polar
    /// singularity (the series ends here).
    pub singular: bool,
}

/// Summary of one run, derived from the recorded series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub max_pos_err_m: f64,
    pub final_pos_err_m: f64,
    /// Epoch at which the mechanization raised the polar singularity, if
    /// it did.
    pub singular_at_s: Option<f64>,
}

/// Full record of one (scenario, mechanization) run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub mechanization: Mechanization,
    pub series: Vec<ErrorSample>,
    pub summary: RunSummary,
    pub config: ScenarioConfig,
}

impl RunReport {
    /// Recomputes the summary from the series; equal to `self.summary` by
    /// construction.
    pub fn recompute_summary(&self) -> RunSummary {
        summarize(&self.series)
    }
}

fn summarize(series: &[ErrorSample]) -> RunSummary {
    RunSummary {
        max_pos_err_m: series.iter().map(|s| s.pos_err_m).fold(0.0, f64::max),
        final_pos_err_m: series.last().map_or(0.0, |s| s.pos_err_m),
        singular_at_s: series.iter().find(|s| s.singular).map(|s| s.time),
    }
}

/// Euclidean norm of the ECEF position difference (m).
pub fn position_error(estimate: &EcefPosition, truth: &EcefPosition) -> f64 {
    (estimate.0 - truth.0).norm()
}

/// Read-only projection of an Earth-frame solution into local-level terms
/// for display: curvilinear position, N-U-E velocity and body-to-N-U-E
/// attitude. Near a pole the longitude (and with it the N/E axes) is
/// geometrically indeterminate; that is flagged rather than failing, since
/// the navigation state itself is unaffected.
#[derive(Debug, Clone, Copy)]
pub struct DisplayState {
    pub position: CurvilinearPosition,
    pub velocity_nue: Vector3<f64>,
    /// `C_b^n`.
    pub attitude_nue: Dcm,
    pub longitude_indeterminate: bool,
}

pub fn display_transform(
    state: &EarthFrameState,
    model: &EarthModel,
) -> Result<DisplayState, GeodesyError> {
    let position = geodesy::ecef_to_curvilinear(&state.position, model)?;
    let e_to_n = geodesy::ecef_to_nue_dcm(position.longitude, position.latitude);
    Ok(DisplayState {
        position,
        velocity_nue: e_to_n * state.velocity,
        attitude_nue: e_to_n * state.attitude.to_dcm(),
        longitude_indeterminate: position.latitude.cos().abs() < COS_LAT_SINGULARITY_TOL,
    })
}

fn record_sample(
    t: f64,
    est_ecef: &EcefPosition,
    est_vel_ecef: &Vector3<f64>,
    est_curvilinear: &CurvilinearPosition,
    cfg: &ScenarioConfig,
    singular: bool,
) -> ErrorSample {
    let truth = trajgen::gnss_sample_at(t, cfg);
    let err = est_ecef.0 - truth.0 .0;
    ErrorSample {
        time: t,
        pos_err_m: err.norm(),
        vel_err_mps: (est_vel_ecef - truth.1).norm(),
        lat_deg: est_curvilinear.latitude.to_degrees(),
        lon_deg: est_curvilinear.longitude.to_degrees(),
        height_m: est_curvilinear.height,
        err_ecef: err,
        singular,
    }
}

/// Runs one scenario under one mechanization: initializes from exact truth
/// at t = 0, steps at the navigation interval with a vertical reset after
/// every update, and records errors at 1 Hz (or every step when the
/// interval is coarser). A local-level run that reaches the polar
/// singularity records the failure epoch and stops gracefully.
pub fn run_scenario(
    name: &str,
    cfg: &ScenarioConfig,
    mechanization: Mechanization,
) -> Result<RunReport, HarnessError> {
    cfg.validate()?;
    let dt = cfg.nav_interval();
    let steps = (cfg.duration / dt).round() as usize;
    let record_every = (1.0 / dt).round().max(1.0) as usize;

    let truth0 = trajgen::truth_at(0.0, cfg)?;
    let mut series = Vec::with_capacity(steps / record_every + 2);

    match mechanization {
        Mechanization::Earth => {
            let mut state = EarthFrameState {
                attitude: truth0.attitude,
                velocity: truth0.velocity,
                position: truth0.ecef,
                time: 0.0,
            };
            let display0 = geodesy::ecef_to_curvilinear(&state.position, &cfg.earth)?;
            series.push(record_sample(0.0, &state.position, &state.velocity, &display0, cfg, false));

            for k in 0..steps {
                let inc = trajgen::navigation_increments(k as f64 * dt, cfg);
                state = earth_frame_step(&state, &inc, &cfg.earth);
                state = vertical_reset_earth(&state, &cfg.earth)?;
                state.time = (k + 1) as f64 * dt;
                if (k + 1) % record_every == 0 || k + 1 == steps {
                    let display = geodesy::ecef_to_curvilinear(&state.position, &cfg.earth)?;
                    series.push(record_sample(
                        state.time,
                        &state.position,
                        &state.velocity,
                        &display,
                        cfg,
                        false,
                    ));
                }
            }
        }
        Mechanization::LocalLevel => {
            let e_to_n = geodesy::ecef_to_nue_dcm(
                truth0.curvilinear.longitude,
                truth0.curvilinear.latitude,
            );
            let mut state = LocalLevelState {
                attitude: Quaternion::from_dcm(&(e_to_n * truth0.attitude.to_dcm())),
                velocity: e_to_n * truth0.velocity,
                position: truth0.curvilinear,
                time: 0.0,
            };
            let to_ecef = |s: &LocalLevelState| {
                let p = geodesy::curvilinear_to_ecef(&s.position, &cfg.earth);
                let n_to_e = geodesy::ecef_to_nue_dcm(s.position.longitude, s.position.latitude)
                    .transpose();
                (p, n_to_e * s.velocity)
            };
            let (p0, v0) = to_ecef(&state);
            series.push(record_sample(0.0, &p0, &v0, &state.position, cfg, false));

            for k in 0..steps {
                let inc = trajgen::navigation_increments(k as f64 * dt, cfg);
                match local_level_step(&state, &inc, &cfg.earth) {
                    Ok(next) => {
                        state = vertical_reset_llf(&next);
                        state.time = (k + 1) as f64 * dt;
                        if (k + 1) % record_every == 0 || k + 1 == steps {
                            let (p, v) = to_ecef(&state);
                            series.push(record_sample(
                                state.time,
                                &p,
                                &v,
                                &state.position,
                                cfg,
                                false,
                            ));
                        }
                    }
                    Err(GeodesyError::SingularLatitude { .. }) => {
                        let (p, v) = to_ecef(&state);
                        series.push(record_sample(state.time, &p, &v, &state.position, cfg, true));
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }

    let summary = summarize(&series);
    Ok(RunReport {
        scenario: name.to_string(),
        mechanization,
        series,
        summary,
        config: *cfg,
    })
}

/// Per-epoch record of the alignment experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentSample {
    pub time: f64,
    /// Angle between the estimated and true current attitude (deg), when a
    /// solution exists.
    pub error_angle_deg: Option<f64>,
    /// Eigenvalue-gap quality of the solve (also reported for degenerate
    /// geometry).
    pub quality: Option<f64>,
    pub n_pairs: usize,
    pub status: AlignmentStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentStatus {
    Ok,
    InsufficientObservations,
    DegenerateGeometry,
}

impl std::fmt::Display for AlignmentStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlignmentStatus::Ok => write!(f, "ok"),
            AlignmentStatus::InsufficientObservations => write!(f, "insufficient"),
            AlignmentStatus::DegenerateGeometry => write!(f, "degenerate"),
        }
    }
}

/// Full record of one alignment run.
#[derive(Debug, Clone)]
pub struct AlignmentReport {
    pub scenario: String,
    pub series: Vec<AlignmentSample>,
    /// Solution at the end of the run, if the geometry supported one.
    pub final_solution: Option<AlignmentSolution>,
    pub config: ScenarioConfig,
}

/// Feeds synthesized IMU and GNSS data into the alignment accumulator for
/// `align_duration` seconds, re-solving at every GNSS epoch. Degenerate
/// geometry is recorded, not fatal.
pub fn run_alignment(
    name: &str,
    cfg: &ScenarioConfig,
    align_duration: f64,
) -> Result<AlignmentReport, HarnessError> {
    cfg.validate()?;
    if !(0.0..=cfg.duration).contains(&align_duration) {
        return Err(ScenarioError::OutOfRange { t: align_duration, duration: cfg.duration }.into());
    }
    let dt = cfg.nav_interval();
    let gnss_every = (cfg.imu_rate / (2.0 * cfg.gnss_rate)).round() as usize;
    let steps = (align_duration / dt).round() as usize;

    let mut acc = AlignmentAccumulator::new(cfg.earth);
    let mut series = Vec::new();
    let mut last_solution = None;

    let mut observe = |acc: &AlignmentAccumulator, t: f64| -> AlignmentSample {
        match acc.solve_initial_attitude() {
            Ok(sol) => {
                let truth_attitude = trajgen::truth_at(t, cfg)
                    .map(|s| s.attitude.to_dcm())
                    .unwrap_or_else(|_| Dcm::identity());
                let err = rotation_angle(&(truth_attitude.transpose() * acc.current_attitude(&sol)));
                let sample = AlignmentSample {
                    time: t,
                    error_angle_deg: Some(err.to_degrees()),
                    quality: Some(sol.quality),
                    n_pairs: sol.n_pairs,
                    status: AlignmentStatus::Ok,
                };
                last_solution = Some(sol);
                sample
            }
            Err(AlignmentError::DegenerateGeometry { quality }) => AlignmentSample {
                time: t,
                error_angle_deg: None,
                quality: Some(quality),
                n_pairs: acc.observations().len(),
                status: AlignmentStatus::DegenerateGeometry,
            },
            Err(_) => AlignmentSample {
                time: t,
                error_angle_deg: None,
                quality: None,
                n_pairs: acc.observations().len(),
                status: AlignmentStatus::InsufficientObservations,
            },
        }
    };

    let (p0, v0) = trajgen::gnss_sample_at(0.0, cfg);
    acc.ingest_gnss(0.0, &v0, &p0).expect("first GNSS sample");
    series.push(observe(&acc, 0.0));

    for k in 0..steps {
        acc.ingest_imu(&trajgen::navigation_increments(k as f64 * dt, cfg));
        if (k + 1) % gnss_every == 0 {
            let t = (k + 1) as f64 * dt;
            let (p, v) = trajgen::gnss_sample_at(t, cfg);
            acc.ingest_gnss(t, &v, &p).expect("monotonic GNSS feed");
            series.push(observe(&acc, t));
        }
    }

    Ok(AlignmentReport {
        scenario: name.to_string(),
        series,
        final_solution: last_solution,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn short_cfg() -> ScenarioConfig {
        ScenarioConfig { duration: 2.0, ..ScenarioConfig::southward() }
    }

    #[test]
    fn position_error_basics() {
        let a = EcefPosition::new(6_378_137.0, 0.0, 0.0);
        assert_eq!(position_error(&a, &a), 0.0);
        let b = EcefPosition::new(6_378_167.0, 0.0, 0.0);
        assert_eq!(position_error(&b, &a), 30.0);
    }

    #[test]
    fn short_runs_are_well_formed() {
        let cfg = short_cfg();
        for mech in [Mechanization::Earth, Mechanization::LocalLevel] {
            let report = run_scenario("short", &cfg, mech).unwrap();
            assert_eq!(report.series.first().unwrap().time, 0.0);
            assert_eq!(report.series.last().unwrap().time, 2.0);
            assert!(report.series.windows(2).all(|w| w[0].time < w[1].time));
            // 2 s of perfect-sensor flight: errors are tiny but nonzero
            assert!(report.summary.max_pos_err_m < 0.1);
            assert_eq!(report.summary, report.recompute_summary());
            assert_eq!(report.summary.singular_at_s, None);
        }
    }

    #[test]
    fn the_two_mechanizations_agree_over_a_short_run() {
        let cfg = ScenarioConfig { duration: 30.0, ..ScenarioConfig::southward() };
        let earth = run_scenario("s", &cfg, Mechanization::Earth).unwrap();
        let llf = run_scenario("s", &cfg, Mechanization::LocalLevel).unwrap();
        for (a, b) in earth.series.iter().zip(llf.series.iter()) {
            assert_eq!(a.time, b.time);
            assert!((a.err_ecef - b.err_ecef).norm() < 1e-3);
        }
    }

    #[test]
    fn display_transform_geometry() {
        let m = EarthModel::default();
        // at (λ=0, L=0) the ECEF z axis is local North, x is Up, y is East
        let state = EarthFrameState {
            attitude: Quaternion::identity(),
            velocity: Vector3::new(0.0, 0.0, 1.0),
            position: EcefPosition::new(m.equatorial_radius, 0.0, 0.0),
            time: 0.0,
        };
        let d = display_transform(&state, &m).unwrap();
        assert!((d.velocity_nue - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(!d.longitude_indeterminate);
        let expected = geodesy::ecef_to_nue_dcm(0.0, 0.0);
        assert!((d.attitude_nue - expected).norm() < 1e-14);

        // round trip back to ECEF velocity
        let back = geodesy::ecef_to_nue_dcm(d.position.longitude, d.position.latitude)
            .transpose()
            * d.velocity_nue;
        assert!((back - state.velocity).norm() < 1e-12);

        // polar state: navigation fine, longitude flagged
        let polar = EarthFrameState {
            position: EcefPosition::new(0.0, 0.0, m.equatorial_radius),
            ..state
        };
        let d = display_transform(&polar, &m).unwrap();
        assert!(d.longitude_indeterminate);

        assert!(display_transform(
            &EarthFrameState { position: EcefPosition::new(0.0, 0.0, 0.0), ..state },
            &m
        )
        .is_err());
    }

    #[test]
    fn alignment_report_starts_without_solution() {
        let cfg = ScenarioConfig {
            path_kind: crate::trajgen::PathKind::Parallel,
            lat0: 89.5f64.to_radians(),
            duration: 40.0,
            ..ScenarioConfig::transpolar()
        };
        let report = run_alignment("align", &cfg, 40.0).unwrap();
        assert_eq!(report.series[0].status, AlignmentStatus::InsufficientObservations);
        assert_eq!(report.series[0].n_pairs, 0);
        // later epochs accumulate pairs and eventually solve
        let last = report.series.last().unwrap();
        assert_eq!(last.status, AlignmentStatus::Ok);
        assert!(report.final_solution.is_some());
        assert!(last.error_angle_deg.unwrap() < 1.0);
    }

    #[test]
    fn summary_matches_series_recomputation() {
        let report = run_scenario("short", &short_cfg(), Mechanization::Earth).unwrap();
        let re = report.recompute_summary();
        assert_relative_eq!(re.max_pos_err_m, report.summary.max_pos_err_m);
        assert_relative_eq!(re.final_pos_err_m, report.summary.final_pos_err_m);
        assert_eq!(re.singular_at_s, report.summary.singular_at_s);
    }
}
