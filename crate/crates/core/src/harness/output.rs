//! Result serialization: per-run CSV series, JSON summaries, and a
//! gnuplot-compatible plot script. All writers are deterministic functions
//! of the report contents.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{AlignmentReport, HarnessError, RunReport};
use crate::trajgen::ScenarioConfig;

/// CSV for one run. Pinned schema, then per-axis error columns:
/// `t_s,pos_err_m,vel_err_mps,lat_deg,lon_deg,h_m,flag,err_x_m,err_y_m,err_z_m`.
pub fn run_csv_string(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("t_s,pos_err_m,vel_err_mps,lat_deg,lon_deg,h_m,flag,err_x_m,err_y_m,err_z_m\n");
    for s in &report.series {
        let _ = writeln!(
            out,
            "{:.3},{:.6},{:.6},{:.9},{:.9},{:.4},{},{:.6},{:.6},{:.6}",
            s.time,
            s.pos_err_m,
            s.vel_err_mps,
            s.lat_deg,
            s.lon_deg,
            s.height_m,
            if s.singular { "singular" } else { "ok" },
            s.err_ecef.x,
            s.err_ecef.y,
            s.err_ecef.z,
        );
    }
    out
}

/// CSV for one alignment run:
/// `t_s,err_angle_deg,quality,n_pairs,flag` (`nan` where no solve exists).
pub fn alignment_csv_string(report: &AlignmentReport) -> String {
    let mut out = String::new();
    out.push_str("t_s,err_angle_deg,quality,n_pairs,flag\n");
    for s in &report.series {
        let _ = writeln!(
            out,
            "{:.3},{},{},{},{}",
            s.time,
            s.error_angle_deg.map_or("nan".to_string(), |v| format!("{v:.9}")),
            s.quality.map_or("nan".to_string(), |v| format!("{v:.6e}")),
            s.n_pairs,
            s.status,
        );
    }
    out
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    scenario: &'a str,
    mechanization: String,
    max_pos_err_m: f64,
    final_pos_err_m: f64,
    singular_at_s: Option<f64>,
    config: &'a ScenarioConfig,
}

/// JSON summary for one run.
pub fn summary_json_string(report: &RunReport) -> String {
    let json = SummaryJson {
        scenario: &report.scenario,
        mechanization: report.mechanization.to_string(),
        max_pos_err_m: report.summary.max_pos_err_m,
        final_pos_err_m: report.summary.final_pos_err_m,
        singular_at_s: report.summary.singular_at_s,
        config: &report.config,
    };
    serde_json::to_string_pretty(&json).expect("summary serializes") + "\n"
}

fn plot_script(csv_names: &[String]) -> String {
    let mut out = String::new();
    out.push_str("# gnuplot script; run from the directory containing the CSVs\n");
    out.push_str("set datafile separator ','\n");
    out.push_str("set xlabel 'time (s)'\n");
    out.push_str("set ylabel 'position error (m)'\n");
    out.push_str("set key left top\n");
    let plots: Vec<String> = csv_names
        .iter()
        .map(|n| format!("'{n}' using 1:2 with lines title '{}'", n.trim_end_matches(".csv")))
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out.push_str("pause -1 'press enter to close'\n");
    out
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `<scenario>_<mech>.csv` and `<scenario>_<mech>_summary.json` per
/// report plus one `plot.gp` referencing every CSV. Returns the written
/// paths.
pub fn write_run_outputs(reports: &[RunReport], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut csv_names = Vec::new();
    for report in reports {
        let stem = format!("{}_{}", report.scenario, report.mechanization);
        let csv = out_dir.join(format!("{stem}.csv"));
        write(&csv, &run_csv_string(report))?;
        csv_names.push(format!("{stem}.csv"));
        written.push(csv);

        let json = out_dir.join(format!("{stem}_summary.json"));
        write(&json, &summary_json_string(report))?;
        written.push(json);
    }
    let gp = out_dir.join("plot.gp");
    write(&gp, &plot_script(&csv_names))?;
    written.push(gp);
    Ok(written)
}

/// Writes `<scenario>_alignment.csv` plus a small plot script.
pub fn write_alignment_outputs(
    report: &AlignmentReport,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let name = format!("{}_alignment.csv", report.scenario);
    let csv = out_dir.join(&name);
    write(&csv, &alignment_csv_string(report))?;

    let mut script = String::new();
    script.push_str("# gnuplot script; run from the directory containing the CSVs\n");
    script.push_str("set datafile separator ','\n");
    script.push_str("set xlabel 'time (s)'\n");
    script.push_str("set ylabel 'attitude error (deg)'\n");
    script.push_str("set logscale y\n");
    let _ = writeln!(script, "plot '{name}' using 1:2 with lines title 'attitude error'");
    script.push_str("pause -1 'press enter to close'\n");
    let gp = out_dir.join("plot_alignment.gp");
    write(&gp, &script)?;
    Ok(vec![csv, gp])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_alignment, run_scenario, Mechanization};
    use crate::trajgen::PathKind;

    fn short_cfg() -> ScenarioConfig {
        ScenarioConfig { duration: 3.0, ..ScenarioConfig::southward() }
    }

    #[test]
    fn csv_has_pinned_header_and_rows() {
        let report = run_scenario("short", &short_cfg(), Mechanization::Earth).unwrap();
        let csv = run_csv_string(&report);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_s,pos_err_m,vel_err_mps,lat_deg,lon_deg,h_m,flag,err_x_m,err_y_m,err_z_m"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.000,"));
        assert!(first.contains(",ok,"));
        assert_eq!(csv.lines().count(), 1 + report.series.len());
    }

    #[test]
    fn csv_output_is_deterministic() {
        let a = run_csv_string(&run_scenario("d", &short_cfg(), Mechanization::Earth).unwrap());
        let b = run_csv_string(&run_scenario("d", &short_cfg(), Mechanization::Earth).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn summary_json_shape() {
        let report = run_scenario("short", &short_cfg(), Mechanization::LocalLevel).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&summary_json_string(&report)).unwrap();
        assert_eq!(json["scenario"], "short");
        assert_eq!(json["mechanization"], "llf");
        assert!(json["max_pos_err_m"].is_f64());
        assert!(json["singular_at_s"].is_null());
        assert_eq!(json["config"]["path_kind"], "meridian");
        assert_eq!(json["config"]["earth"]["eccentricity_sq"], 0.0);
    }

    #[test]
    fn files_land_in_the_out_dir() {
        let dir = tempfile::tempdir().unwrap();
        let reports = vec![
            run_scenario("short", &short_cfg(), Mechanization::Earth).unwrap(),
            run_scenario("short", &short_cfg(), Mechanization::LocalLevel).unwrap(),
        ];
        let written = write_run_outputs(&reports, dir.path()).unwrap();
        assert_eq!(written.len(), 5); // 2 csv + 2 json + plot.gp
        for path in &written {
            assert!(path.exists(), "{path:?} missing");
        }
        let gp = std::fs::read_to_string(dir.path().join("plot.gp")).unwrap();
        assert!(gp.contains("short_earth.csv"));
        assert!(gp.contains("short_llf.csv"));
    }

    #[test]
    fn alignment_outputs() {
        let cfg = ScenarioConfig {
            path_kind: PathKind::Parallel,
            lat0: 89.5f64.to_radians(),
            duration: 20.0,
            ..ScenarioConfig::transpolar()
        };
        let report = run_alignment("polar", &cfg, 20.0).unwrap();
        let csv = alignment_csv_string(&report);
        assert!(csv.starts_with("t_s,err_angle_deg,quality,n_pairs,flag\n"));
        assert!(csv.contains("insufficient"));

        let dir = tempfile::tempdir().unwrap();
        let written = write_alignment_outputs(&report, dir.path()).unwrap();
        assert!(written.iter().all(|p| p.exists()));
    }
}
