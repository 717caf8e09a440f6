//! `mansion tune`: random-search energy weights against annotated samples.
//!
//! Each sample is a triplet in the samples directory:
//! `<stem>.region.json`, `<stem>.graph.json`, `<stem>.annotation.json`
//! (the annotation doubles as seed source and IoU target).

use super::read_text;
use crate::config::EffectiveConfig;
use crate::CliError;
use mansion_core::geometry::io::{FloorplanDoc, RegionDoc};
use mansion_core::solver::tune::{tune_weights, TuneInstance};
use mansion_core::topology::json::graph_from_json;
use std::path::Path;

pub fn run(
    samples: &Path,
    trials: usize,
    out: Option<&Path>,
    cfg: &EffectiveConfig,
) -> Result<(), CliError> {
    let mut stems: Vec<String> = std::fs::read_dir(samples)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.strip_suffix(".region.json"))
                .map(|s| s.to_string())
        })
        .collect();
    stems.sort();
    if stems.is_empty() {
        return Err(CliError::Parse(format!(
            "no '<stem>.region.json' samples in {}",
            samples.display()
        )));
    }

    let mut instances = Vec::new();
    for stem in &stems {
        let region = RegionDoc::from_json(&read_text(&samples.join(format!("{stem}.region.json")))?)
            .map_err(|e| CliError::Parse(e.to_string()))?
            .to_region()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        let graph = graph_from_json(&read_text(&samples.join(format!("{stem}.graph.json")))?)
            .map_err(|e| CliError::Parse(e.to_string()))?;
        let annotation =
            FloorplanDoc::from_json(&read_text(&samples.join(format!("{stem}.annotation.json")))?)
                .map_err(|e| CliError::Parse(e.to_string()))?;
        instances.push(TuneInstance {
            region,
            graph,
            annotation,
        });
    }

    let outcome = tune_weights(&instances, &cfg.solver, trials, cfg.solver.sampling.rng_seed)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let best_score = outcome
        .trials
        .iter()
        .map(|t| t.mean_micro_iou)
        .fold(f64::NEG_INFINITY, f64::max);
    let result = serde_json::json!({
        "trials": outcome.trials.len(),
        "best_mean_micro_iou": best_score,
        "best_weights": {
            "ratio": outcome.best.w_ratio,
            "seed": outcome.best.w_seed,
            "corner": outcome.best.w_corner,
            "wall": outcome.best.w_wall,
            "epsilon": outcome.best.epsilon,
        }
    });
    let text = serde_json::to_string_pretty(&result).unwrap();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}
