//! Topology-aware cutting solver: seed planning, adaptive seed sampling,
//! constrained growth of candidate partitions, hard topology filtering, and
//! energy ranking with a Monte-Carlo fallback.

mod grow;
mod energy;
mod check;
mod cut;
mod floor;
pub mod seeds;
pub mod tune;

pub use check::{check_topology, verify_topology, LabelBinding};
pub use cut::{cut_node, cut_node_traced, BatchTrace, CandidateTrace, CutTrace};
pub use energy::{score_candidate, ParentEnvelope, RoomFeatures, SeedContext};
pub use floor::{solve_floor, solve_floor_traced, SolvedFloor};
pub use grow::{grow_partition, GrowSeed};
pub use seeds::{SeedProvider, SeedRequest, SeedRequestChild};

use crate::topology::ValidationReport;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("graph failed validation: {0:?}")]
    InvalidGraph(Box<ValidationReport>),
    #[error(transparent)]
    Topology(#[from] crate::topology::TopologyError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("seed cell {0} lies outside the parent region")]
    SeedOutsideParent(usize),
    #[error("duplicate seed cell {0}")]
    DuplicateSeedCell(usize),
    #[error("seed for room {0} has non-positive target")]
    BadSeedTarget(u32),
    #[error("no seeds supplied")]
    NoSeeds,
    #[error("target area for room '{0}' is zero")]
    ZeroTargetArea(String),
    #[error("room '{0}' is not part of the graph")]
    UnknownRoom(String),
    #[error("parent '{parent}' has {cells} cells but {children} children")]
    ParentTooSmall {
        parent: String,
        cells: usize,
        children: usize,
    },
    #[error("parent '{0}' is not present in the layout")]
    ParentNotRealized(String),
    #[error("seed plan misses room(s): {}", .0.join(", "))]
    SeedPlanIncomplete(Vec<String>),
    #[error("seed plan allocates {0:.2} of the parent area (limit 1.05)")]
    SeedPlanOverAllocated(f64),
    #[error("bad solver configuration: {0}")]
    BadConfig(String),
    #[error("no feasible candidate for parent '{parent}' after {tried} candidates")]
    Infeasible {
        parent: String,
        tried: usize,
        /// lowest-energy infeasible candidate, for diagnostics
        best_attempt: Option<Box<CandidatePartition>>,
    },
    #[error("seed provider failed: {0}")]
    SeedProvider(#[from] seeds::SeedError),
}

/// Seed geometry from a plan entry: a point or an axis-aligned box, in world
/// coordinates. Boxes are reduced to their centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeedGeom {
    Point { x: f64, y: f64 },
    Box { x: [f64; 2], y: [f64; 2] },
}

impl SeedGeom {
    pub fn center(&self) -> (f64, f64) {
        match *self {
            SeedGeom::Point { x, y } => (x, y),
            SeedGeom::Box { x, y } => ((x[0] + x[1]) / 2.0, (y[0] + y[1]) / 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub room_id: String,
    pub geom: SeedGeom,
    /// Fraction of the parent area this room should take; overrides the
    /// graph target area when present.
    pub area_fraction: Option<f64>,
}

/// Per-round seed guidance: one entry per child of the round.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub entries: Vec<SeedEntry>,
}

impl SeedPlan {
    pub fn entry(&self, room_id: &str) -> Option<&SeedEntry> {
        self.entries.iter().find(|e| e.room_id == room_id)
    }

    /// Parses the external seed-plan wire format: a JSON array of objects
    /// with `room_id`, `x`, `y` (scalars or `[min, max]` pairs), an optional
    /// `area` fraction, and a free-text `reason` that is ignored.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Span {
            Pair([f64; 2]),
            One(f64),
        }
        #[derive(Deserialize)]
        struct Entry {
            room_id: String,
            x: Span,
            y: Span,
            #[serde(default)]
            area: Option<f64>,
        }
        let raw: Vec<Entry> = serde_json::from_str(text)?;
        let entries = raw
            .into_iter()
            .map(|e| {
                let geom = match (e.x, e.y) {
                    (Span::One(x), Span::One(y)) => SeedGeom::Point { x, y },
                    (Span::Pair(x), Span::Pair(y)) => SeedGeom::Box { x, y },
                    (Span::Pair(x), Span::One(y)) => SeedGeom::Box { x, y: [y, y] },
                    (Span::One(x), Span::Pair(y)) => SeedGeom::Box { x: [x, x], y },
                };
                SeedEntry {
                    room_id: e.room_id,
                    geom,
                    area_fraction: e.area,
                }
            })
            .collect();
        Ok(SeedPlan { entries })
    }

    pub fn to_json(&self) -> String {
        let arr: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let (x, y) = match e.geom {
                    SeedGeom::Point { x, y } => (serde_json::json!(x), serde_json::json!(y)),
                    SeedGeom::Box { x, y } => (serde_json::json!(x), serde_json::json!(y)),
                };
                let mut obj = serde_json::json!({"room_id": e.room_id, "x": x, "y": y});
                if let Some(a) = e.area_fraction {
                    obj["area"] = serde_json::json!(a);
                }
                obj
            })
            .collect();
        serde_json::to_string_pretty(&arr).expect("seed plan serializes")
    }
}

/// Adaptive seed-sampling knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Retry rounds with widening perturbation radii.
    pub n_retry: usize,
    /// Candidates grown per retry.
    pub batch_size: usize,
    /// Base perturbation radius, grid units.
    pub r_base: f64,
    /// Scale applied to the area fraction when computing base radii.
    pub k: f64,
    /// Per-retry radius multipliers, non-decreasing, `gamma[0] >= 1`.
    pub gamma: Vec<f64>,
    /// Minimum pairwise seed distance, grid units.
    pub min_seed_separation: f64,
    pub rng_seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            n_retry: 10,
            batch_size: 100,
            r_base: 2.0,
            k: 10.0,
            gamma: (0..10).map(|j| 1.0 + 0.35 * j as f64).collect(),
            min_seed_separation: 2.0,
            rng_seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_retry < 1 {
            return Err("n_retry must be >= 1".into());
        }
        if self.batch_size < 1 {
            return Err("batch_size must be >= 1".into());
        }
        if self.gamma.is_empty() {
            return Err("gamma must be non-empty".into());
        }
        if self.gamma[0] < 1.0 {
            return Err("gamma[0] must be >= 1".into());
        }
        if self.gamma.windows(2).any(|w| w[1] < w[0]) {
            return Err("gamma must be non-decreasing".into());
        }
        Ok(())
    }

    pub fn gamma_at(&self, retry: usize) -> f64 {
        *self
            .gamma
            .get(retry)
            .unwrap_or_else(|| self.gamma.last().expect("gamma non-empty"))
    }
}

/// Energy term weights. `ratio`, `seed`, and `corner` are penalties; `wall`
/// rewards envelope contact and enters with a negative sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub w_ratio: f64,
    pub w_seed: f64,
    pub w_corner: f64,
    pub w_wall: f64,
    pub epsilon: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self {
            w_ratio: 1.0,
            w_seed: 0.2,
            w_corner: 0.3,
            w_wall: 0.4,
            epsilon: 1e-6,
        }
    }
}

impl EnergyWeights {
    pub fn validate(&self) -> Result<(), String> {
        if self.w_ratio < 0.0 || self.w_seed < 0.0 || self.w_corner < 0.0 || self.w_wall < 0.0 {
            return Err("weights must be non-negative".into());
        }
        if self.epsilon <= 0.0 {
            return Err("epsilon must be positive".into());
        }
        Ok(())
    }
}

/// Full solver configuration: sampling plus hard-constraint knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub sampling: SamplingConfig,
    /// Cell edges of shared boundary required per realized adjacency edge.
    pub min_contact: u32,
    /// Monte-Carlo fallback candidate budget; 0 means `n_retry * batch_size`.
    pub mc_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sampling: SamplingConfig::default(),
            min_contact: 1,
            mc_budget: 0,
        }
    }
}

impl SolverConfig {
    pub fn effective_mc_budget(&self) -> usize {
        if self.mc_budget == 0 {
            self.sampling.n_retry * self.sampling.batch_size
        } else {
            self.mc_budget
        }
    }
}

/// One grown split of a parent region into child rooms.
///
/// Cell sets are indices into the full floor grid. The parent keeps
/// `parent_remainder`; `unassigned` cells were unreachable from every seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePartition {
    pub parent: u32,
    pub children: Vec<RoomCells>,
    pub parent_remainder: Vec<usize>,
    pub unassigned: Vec<usize>,
    pub features: Option<Vec<RoomFeatures>>,
    pub energy: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomCells {
    pub room: u32,
    pub cells: Vec<usize>,
}

impl CandidatePartition {
    /// Score as the negation of the total energy.
    pub fn score(&self) -> Option<f64> {
        self.energy.map(|e| -e)
    }
}
