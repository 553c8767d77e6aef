//! Runs the two built-in flight scenarios under both mechanizations and
//! prints the error summaries.

use polarnav::harness::{run_scenario, Mechanization};
use polarnav::trajgen::ScenarioConfig;

fn main() {
    let cases = [
        ("southward", ScenarioConfig::southward()),
        ("transpolar", ScenarioConfig::transpolar()),
    ];
    for (name, cfg) in cases {
        for mech in [Mechanization::Earth, Mechanization::LocalLevel] {
            let start = std::time::Instant::now();
            let report = run_scenario(name, &cfg, mech).unwrap();
            let s = &report.summary;
            println!(
                "{name:>10} {mech:>5}: max {:12.3} m  final {:12.3} m  singular {:?}  ({:.2} s)",
                s.max_pos_err_m,
                s.final_pos_err_m,
                s.singular_at_s,
                start.elapsed().as_secs_f64(),
            );
        }
    }
}
