//! `mansion solve-floor`: one region + one graph to label map, vector
//! floorplan, SVG sheet, and manifest.

use super::{classify_solver_error, read_text, SeedMode};
use crate::config::EffectiveConfig;
use crate::manifest::RunManifest;
use crate::CliError;
use mansion_core::geometry::io::{encode_png, encode_rle, map_to_svg, RegionDoc};
use mansion_core::orchestrator::{door_annotations, floor_to_floorplan, FloorLayout};
use mansion_core::postprocess::cleanup;
use mansion_core::solver::solve_floor;
use mansion_core::topology::json::graph_from_json;
use std::path::Path;
use std::time::Instant;

pub fn run(
    graph_path: &Path,
    region_path: &Path,
    seeds_flag: &str,
    out: &Path,
    cfg: &EffectiveConfig,
) -> Result<(), CliError> {
    let start = Instant::now();
    let graph = graph_from_json(&read_text(graph_path)?).map_err(|e| CliError::Parse(e.to_string()))?;
    let region = RegionDoc::from_json(&read_text(region_path)?)
        .map_err(|e| CliError::Parse(e.to_string()))?
        .to_region()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mode = SeedMode::parse(seeds_flag)?;
    let mut provider = mode.provider(cfg.solver.sampling.rng_seed)?;

    let solved = solve_floor(&region, &graph, provider.as_mut(), &cfg.solver, &cfg.weights)
        .map_err(classify_solver_error)?;
    let outcome = cleanup(&solved.map, &cfg.cleanup);
    let doors = door_annotations(&outcome.map, &graph, &solved.binding);
    let floor = FloorLayout {
        index: 1,
        map: outcome.map,
        room_names: solved.binding.room_names().to_vec(),
        core_names: solved.binding.core_names().to_vec(),
        doors,
        cleanup_converged: outcome.converged,
        disconnected_rooms: vec![],
    };

    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "solve-floor",
        cfg.solver.sampling.rng_seed,
        serde_json::to_value(cfg).unwrap(),
    );
    manifest.record_input("graph", graph_path)?;
    manifest.record_input("region", region_path)?;

    write_floor_outputs(&floor, out, &mut manifest)?;
    manifest.record_timing("total", start.elapsed());
    manifest.write_to(out)?;
    Ok(())
}

pub fn write_floor_outputs(
    floor: &FloorLayout,
    dir: &Path,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let rle_path = dir.join("labelmap.rle");
    std::fs::write(&rle_path, encode_rle(&floor.map))?;
    manifest.record_output(&rle_path);

    let png_path = dir.join("labelmap.png");
    std::fs::write(&png_path, encode_png(&floor.map))?;
    manifest.record_output(&png_path);

    let plan_path = dir.join("floorplan.json");
    std::fs::write(&plan_path, floor_to_floorplan(floor).to_json())?;
    manifest.record_output(&plan_path);

    let svg_path = dir.join("sheet.svg");
    std::fs::write(&svg_path, map_to_svg(&floor.map, &floor.room_names, &floor.core_names))?;
    manifest.record_output(&svg_path);
    Ok(())
}
