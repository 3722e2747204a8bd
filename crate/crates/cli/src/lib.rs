//! Experiment runner: named presets, JSON configs with exact rationals,
//! CSV and SVG outputs.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{HarnessError, HarnessResult};
pub use experiments::{find_experiment, list_experiments, run, ExperimentSpec, ResultBundle};

/// Summary as `key=value` lines, followed by the written files.
pub fn format_summary(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    for (k, v) in &bundle.summary {
        out.push_str(&format!("{k}={v}\n"));
    }
    for p in &bundle.csv_paths {
        out.push_str(&format!("csv={}\n", p.display()));
    }
    for p in &bundle.svg_paths {
        out.push_str(&format!("svg={}\n", p.display()));
    }
    out
}
