//! Acceptance run: every registered criterion with its default parameters.
//! Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::process::ExitCode;

use ncharm_cli::{run, ExperimentConfig};

/// Criterion number, experiment, and wall-time budget in seconds where one applies.
const CRITERIA: &[(usize, &str, Option<f64>)] = &[
    (1, "kp-growth", Some(60.0)),
    (2, "isometry", Some(10.0)),
    (3, "schoenberg", None),
    (4, "gamma2-bakry", Some(120.0)),
    (5, "square-functions", None),
    (6, "bmo-equivalence", None),
    (7, "impower", None),
    (8, "riesz", None),
    (9, "markov-metric", None),
    (10, "cz-extrapolation", None),
    (11, "qmetric", None),
    (12, "multiplier", None),
];

fn main() -> ExitCode {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for &(number, name, budget) in CRITERIA {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let outcome = ExperimentConfig::defaults(name).and_then(|c| run(&c));
        let line = match outcome {
            Ok(report) => {
                let mut problems: Vec<String> = report
                    .failures()
                    .map(|r| format!("{} = {:e} (threshold {:e})", r.name, r.value, r.threshold.unwrap_or(f64::NAN)))
                    .collect();
                if let Some(b) = budget {
                    if report.wall_time_seconds > b {
                        problems.push(format!("wall time {:.1} s over the {b} s budget", report.wall_time_seconds));
                    }
                }
                let checks = report.records.iter().filter(|r| r.threshold.is_some()).count();
                if problems.is_empty() {
                    format!("PASS criterion {number}: {name} ({checks} checks, {:.2} s)", report.wall_time_seconds)
                } else {
                    failed += 1;
                    format!("FAIL criterion {number}: {name}: {}", problems.join("; "))
                }
            }
            Err(e) => {
                failed += 1;
                format!("FAIL criterion {number}: {name}: error: {e}")
            }
        };
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
