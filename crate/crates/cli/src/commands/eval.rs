//! `mansion eval`: directory-vs-directory IoU with CSV output.

use super::read_text;
use crate::config::EffectiveConfig;
use crate::manifest::RunManifest;
use crate::CliError;
use mansion_core::evaluation::dataset::{dataset_eval, report_to_csv, EvalManifest};
use mansion_core::evaluation::EvalError;
use std::path::Path;
use std::time::Instant;

pub fn run(
    pred: &Path,
    gt: &Path,
    resolution: u32,
    class_map: Option<&Path>,
    out: Option<&Path>,
    cfg: &EffectiveConfig,
) -> Result<(), CliError> {
    let start = Instant::now();
    let manifest_doc = match class_map {
        Some(p) => EvalManifest::from_json(&read_text(p)?).map_err(|e| CliError::Parse(e.to_string()))?,
        None => EvalManifest::default(),
    };
    let report = dataset_eval(pred, gt, resolution, &manifest_doc).map_err(|e| match e {
        EvalError::Io(io) => CliError::Io(io.to_string()),
        other => CliError::Parse(other.to_string()),
    })?;
    let csv = report_to_csv(&report);
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(path, &csv)?;
            let mut manifest = RunManifest::new("eval", 0, serde_json::to_value(cfg).unwrap());
            if let Some(p) = class_map {
                manifest.record_input("class_map", p)?;
            }
            manifest.record_output(path);
            manifest.record_timing("total", start.elapsed());
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    manifest.write_to(dir)?;
                }
            }
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "pooled micro {:.2} macro {:.2} over {} sample(s)",
        report.pooled.micro_iou,
        report.pooled.macro_iou,
        report.samples.len()
    );
    Ok(())
}
