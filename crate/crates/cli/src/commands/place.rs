//! `mansion place`: furnish a room, emitting the scene JSON, an SVG top
//! view, and the placement metrics report.

use super::read_text;
use crate::config::EffectiveConfig;
use crate::manifest::RunManifest;
use crate::CliError;
use mansion_core::evaluation::placement_metrics;
use mansion_core::placement::io::{scene_to_json, scene_to_svg, PlacementDoc};
use mansion_core::placement::place_all;
use std::path::Path;
use std::time::Instant;

pub fn run(
    room_path: &Path,
    constraints_path: Option<&Path>,
    out: &Path,
    cfg: &EffectiveConfig,
) -> Result<(), CliError> {
    let start = Instant::now();
    let room_text = read_text(room_path)?;
    let doc = match constraints_path {
        None => PlacementDoc::from_json(&room_text).map_err(|e| CliError::Parse(e.to_string()))?,
        Some(cpath) => {
            // room file: {"room": ..., "entrance": ...}; constraints file:
            // {"objects": [...]} — merged into one document
            let mut room_value: serde_json::Value =
                serde_json::from_str(&room_text).map_err(|e| CliError::Parse(e.to_string()))?;
            let constraints: serde_json::Value = serde_json::from_str(&read_text(cpath)?)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let objects = constraints
                .get("objects")
                .cloned()
                .ok_or_else(|| CliError::Parse("constraints file needs an 'objects' array".into()))?;
            room_value["objects"] = objects;
            serde_json::from_value(room_value).map_err(|e| CliError::Parse(e.to_string()))?
        }
    };
    let room = doc.room_polygon().map_err(|e| CliError::Parse(e.to_string()))?;
    let groups = doc.groups().map_err(|e| CliError::Parse(e.to_string()))?;
    let scene = place_all(&room, doc.entrance(), groups, &cfg.placement)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let report = placement_metrics(&scene);

    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new("place", 0, serde_json::to_value(cfg).unwrap());
    manifest.record_input("room", room_path)?;
    if let Some(c) = constraints_path {
        manifest.record_input("constraints", c)?;
    }

    let scene_path = out.join("scene.json");
    std::fs::write(&scene_path, scene_to_json(&scene))?;
    manifest.record_output(&scene_path);

    let svg_path = out.join("scene.svg");
    std::fs::write(&svg_path, scene_to_svg(&scene))?;
    manifest.record_output(&svg_path);

    let report_path = out.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).unwrap())?;
    manifest.record_output(&report_path);

    manifest.record_timing("total", start.elapsed());
    manifest.write_to(out)?;

    println!(
        "placed {} object(s) ({} small), discarded {}; OB={} CN={} Rch={:.1}",
        report.n_obj,
        report.n_small,
        scene.discarded.len(),
        report.n_ob,
        report.n_cn,
        report.rch
    );
    Ok(())
}
