//! Effective configuration: built-in defaults, overlaid by an optional TOML
//! config file (explicit `--config` or the `MANSION_CONFIG` env var), then
//! by command-line flags.

use mansion_core::placement::PlacementRules;
use mansion_core::postprocess::CleanupConfig;
use mansion_core::solver::{EnergyWeights, SamplingConfig, SolverConfig};
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "MANSION_CONFIG";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default)]
    pub sampling: SamplingOverrides,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub weights: WeightOverrides,
    #[serde(default)]
    pub placement: PlacementOverrides,
    #[serde(default)]
    pub cleanup: CleanupOverrides,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SamplingOverrides {
    pub n_retry: Option<usize>,
    pub batch_size: Option<usize>,
    pub r_base: Option<f64>,
    pub k: Option<f64>,
    pub gamma: Option<Vec<f64>>,
    pub min_seed_separation: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolverOverrides {
    pub min_contact: Option<u32>,
    pub mc_budget: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WeightOverrides {
    pub ratio: Option<f64>,
    pub seed: Option<f64>,
    pub corner: Option<f64>,
    pub wall: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PlacementOverrides {
    pub cell_size: Option<f64>,
    pub edge_step: Option<f64>,
    pub middle_steps: Option<Vec<f64>>,
    pub middle_margin: Option<f64>,
    pub near_default: Option<f64>,
    pub far_default: Option<f64>,
    pub surface_gap: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CleanupOverrides {
    pub max_cycles: Option<u32>,
}

/// Fully resolved configuration, serialized into run manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveConfig {
    pub solver: SolverConfig,
    pub weights: EnergyWeights,
    pub placement: PlacementRules,
    pub cleanup: CleanupConfig,
}

impl ConfigFile {
    pub fn load(explicit: Option<&std::path::Path>) -> Result<Self, String> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).map(std::path::PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn resolve(&self, rng_seed: u64) -> EffectiveConfig {
        let mut sampling = SamplingConfig {
            rng_seed,
            ..SamplingConfig::default()
        };
        if let Some(v) = self.sampling.n_retry {
            sampling.n_retry = v;
        }
        if let Some(v) = self.sampling.batch_size {
            sampling.batch_size = v;
        }
        if let Some(v) = self.sampling.r_base {
            sampling.r_base = v;
        }
        if let Some(v) = self.sampling.k {
            sampling.k = v;
        }
        if let Some(v) = &self.sampling.gamma {
            sampling.gamma = v.clone();
        }
        if let Some(v) = self.sampling.min_seed_separation {
            sampling.min_seed_separation = v;
        }
        let mut solver = SolverConfig {
            sampling,
            ..SolverConfig::default()
        };
        if let Some(v) = self.solver.min_contact {
            solver.min_contact = v;
        }
        if let Some(v) = self.solver.mc_budget {
            solver.mc_budget = v;
        }
        let mut weights = EnergyWeights::default();
        if let Some(v) = self.weights.ratio {
            weights.w_ratio = v;
        }
        if let Some(v) = self.weights.seed {
            weights.w_seed = v;
        }
        if let Some(v) = self.weights.corner {
            weights.w_corner = v;
        }
        if let Some(v) = self.weights.wall {
            weights.w_wall = v;
        }
        if let Some(v) = self.weights.epsilon {
            weights.epsilon = v;
        }
        let mut placement = PlacementRules::default();
        if let Some(v) = self.placement.cell_size {
            placement.cell_size = v;
        }
        if let Some(v) = self.placement.edge_step {
            placement.edge_step = v;
        }
        if let Some(v) = &self.placement.middle_steps {
            placement.middle_steps = v.clone();
        }
        if let Some(v) = self.placement.middle_margin {
            placement.middle_margin = v;
        }
        if let Some(v) = self.placement.near_default {
            placement.near_default = v;
        }
        if let Some(v) = self.placement.far_default {
            placement.far_default = v;
        }
        if let Some(v) = self.placement.surface_gap {
            placement.surface_gap = v;
        }
        let cleanup = CleanupConfig {
            max_cycles: self.cleanup.max_cycles.unwrap_or(20),
        };
        EffectiveConfig {
            solver,
            weights,
            placement,
            cleanup,
        }
    }
}

/// Parses the `--weights r,s,c,w[,eps]` flag.
pub fn parse_weights_flag(text: &str, base: &mut EnergyWeights) -> Result<(), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 && parts.len() != 5 {
        return Err("expected 4 or 5 comma-separated numbers".into());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    base.w_ratio = nums[0];
    base.w_seed = nums[1];
    base.w_corner = nums[2];
    base.w_wall = nums[3];
    if let Some(eps) = nums.get(4) {
        base.epsilon = *eps;
    }
    Ok(())
}
