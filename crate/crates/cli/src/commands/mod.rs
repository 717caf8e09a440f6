pub mod solve;
pub mod build;
pub mod place;
pub mod eval;
pub mod scene;
pub mod render;
pub mod tune;

use crate::CliError;
use mansion_core::solver::seeds::{
    AnnotationSeeds, ExternalCommandSeeds, ExternalDirSeeds, MonteCarloSeeds, SeedError,
};
use mansion_core::solver::{SeedProvider, SolverError};
use std::path::Path;

/// Parses the `--seeds` flag into a provider recipe.
#[derive(Debug, Clone)]
pub enum SeedMode {
    MonteCarlo,
    Annotation(std::path::PathBuf),
    ExternalCommand(String),
    ExternalDir(std::path::PathBuf),
}

impl SeedMode {
    pub fn parse(flag: &str) -> Result<Self, CliError> {
        if flag == "mc" {
            return Ok(SeedMode::MonteCarlo);
        }
        if let Some(rest) = flag.strip_prefix("ma=") {
            return Ok(SeedMode::Annotation(rest.into()));
        }
        if let Some(rest) = flag.strip_prefix("external=") {
            return Ok(SeedMode::ExternalCommand(rest.to_string()));
        }
        if let Some(rest) = flag.strip_prefix("external-dir=") {
            return Ok(SeedMode::ExternalDir(rest.into()));
        }
        Err(CliError::Parse(format!(
            "bad --seeds '{flag}': expected mc, ma=<floorplan.json>, external=<cmd>, or external-dir=<dir>"
        )))
    }

    pub fn provider(&self, rng_seed: u64) -> Result<Box<dyn SeedProvider>, CliError> {
        match self {
            SeedMode::MonteCarlo => Ok(Box::new(MonteCarloSeeds::new(rng_seed))),
            SeedMode::Annotation(path) => {
                let text = std::fs::read_to_string(path)?;
                let doc = mansion_core::geometry::io::FloorplanDoc::from_json(&text)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                let provider = AnnotationSeeds::from_floorplan(&doc)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                Ok(Box::new(provider))
            }
            SeedMode::ExternalCommand(cmd) => {
                Ok(Box::new(ExternalCommandSeeds::from_shellish(cmd)))
            }
            SeedMode::ExternalDir(dir) => Ok(Box::new(ExternalDirSeeds { dir: dir.clone() })),
        }
    }
}

pub fn classify_solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::Infeasible { .. }
        | SolverError::ParentTooSmall { .. }
        | SolverError::ParentNotRealized(_) => CliError::Infeasible(e.to_string()),
        SolverError::SeedProvider(SeedError::Io(io)) => CliError::Io(io.to_string()),
        SolverError::SeedProvider(SeedError::MissingResponse(p)) => {
            CliError::Io(format!("missing seed response {}", p.display()))
        }
        other => CliError::Parse(other.to_string()),
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
