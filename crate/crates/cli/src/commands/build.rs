//! `mansion build`: whole-building solve into a bundle directory with
//! per-floor outputs, an alignment report, and a building manifest.

use super::solve::write_floor_outputs;
use super::{classify_solver_error, read_text, SeedMode};
use crate::config::EffectiveConfig;
use crate::manifest::RunManifest;
use crate::CliError;
use mansion_core::orchestrator::{
    check_vertical_alignment, solve_building, BuildingError, BuildingProgram, SeedProviderFactory,
};
use mansion_core::rng::derive_seed;
use mansion_core::solver::seeds::{MonteCarloSeeds, SeedError};
use mansion_core::solver::SeedProvider;
use std::path::Path;
use std::time::Instant;

struct ModeFactory {
    mode: SeedMode,
    rng_seed: u64,
}

impl SeedProviderFactory for ModeFactory {
    fn for_floor(&self, floor_index: i64) -> Result<Box<dyn SeedProvider>, SeedError> {
        match &self.mode {
            SeedMode::MonteCarlo => Ok(Box::new(MonteCarloSeeds::new(derive_seed(
                self.rng_seed,
                &["floor"],
                &[floor_index as u64],
            )))),
            SeedMode::Annotation(path) => {
                let text = std::fs::read_to_string(path)?;
                let doc = mansion_core::geometry::io::FloorplanDoc::from_json(&text)
                    .map_err(|e| SeedError::Other(e.to_string()))?;
                Ok(Box::new(
                    mansion_core::solver::seeds::AnnotationSeeds::from_floorplan(&doc)?,
                ))
            }
            SeedMode::ExternalCommand(cmd) => Ok(Box::new(
                mansion_core::solver::seeds::ExternalCommandSeeds::from_shellish(cmd),
            )),
            SeedMode::ExternalDir(dir) => Ok(Box::new(mansion_core::solver::seeds::ExternalDirSeeds {
                dir: dir.join(format!("floor_{floor_index}")),
            })),
        }
    }
}

pub fn run(
    program_path: &Path,
    seeds_flag: &str,
    out: &Path,
    cfg: &EffectiveConfig,
) -> Result<(), CliError> {
    let start = Instant::now();
    let program = BuildingProgram::from_json(&read_text(program_path)?)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mode = SeedMode::parse(seeds_flag)?;
    let factory = ModeFactory {
        mode,
        rng_seed: cfg.solver.sampling.rng_seed,
    };

    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "build",
        cfg.solver.sampling.rng_seed,
        serde_json::to_value(cfg).unwrap(),
    );
    manifest.record_input("program", program_path)?;

    let layout = match solve_building(&program, &factory, &cfg.solver, &cfg.weights) {
        Ok(layout) => layout,
        Err(BuildingError::FloorInfeasible { floor, source, partial }) => {
            // keep whatever solved for diagnosis before reporting failure
            let diag = out.join("diagnostics");
            for f in &partial {
                let dir = diag.join(format!("floor_{}", f.index));
                std::fs::create_dir_all(&dir)?;
                write_floor_outputs(f, &dir, &mut manifest)?;
            }
            manifest.record_timing("total", start.elapsed());
            manifest.write_to(out)?;
            return Err(match classify_solver_error(source) {
                CliError::Infeasible(m) => CliError::Infeasible(format!("floor {floor}: {m}")),
                other => other,
            });
        }
        Err(e) => return Err(CliError::Parse(e.to_string())),
    };

    for floor in &layout.floors {
        let dir = out.join(format!("floor_{}", floor.index));
        std::fs::create_dir_all(&dir)?;
        write_floor_outputs(floor, &dir, &mut manifest)?;
    }

    let alignment = check_vertical_alignment(&layout);
    let alignment_path = out.join("alignment_report.json");
    std::fs::write(&alignment_path, serde_json::to_string_pretty(&alignment).unwrap())?;
    manifest.record_output(&alignment_path);

    let provenance_path = out.join("provenance.json");
    std::fs::write(
        &provenance_path,
        serde_json::to_string_pretty(&layout.provenance).unwrap(),
    )?;
    manifest.record_output(&provenance_path);

    manifest.record_timing("total", start.elapsed());
    manifest.write_to(out)?;
    if !alignment.is_aligned() {
        return Err(CliError::Other(format!(
            "vertical alignment check failed: {} mismatch(es)",
            alignment.mismatches.len()
        )));
    }
    Ok(())
}
