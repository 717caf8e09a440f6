//! Priority-aware group-based object placement with hard reachability.
//!
//! Object constraints come in three layers: a global spatial role (`edge`,
//! `middle`, or unconstrained), a structural pattern (`single`, a
//! `matrix(rows, cols, spacing)` of repeated instances, or `paired` with a
//! partner riding in the anchor's frame), and optional `near`/`far` relations
//! against other objects. Constraints normalize into groups of one anchor
//! plus members; groups place in strict priority order
//! (edge+matrix, edge, matrix, middle, free) and any object that cannot be
//! placed without breaking collision, containment, or reachability is
//! discarded rather than relaxed.

mod groups;
mod scene;
mod search;
pub mod io;

pub use groups::{build_macro_object, downgrade_matrix, normalize_groups, MacroObject};
pub use scene::{compute_reachability, is_reachable, PlacedScene, Placement};
pub use search::{find_feasible_placement, matrix_fits, place_all, PlacementRules};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error("paired partner '{0}' not found")]
    DanglingPartner(String),
    #[error("relation target '{0}' not found")]
    DanglingTarget(String),
    #[error("object '{0}' has a non-positive footprint")]
    BadFootprint(String),
    #[error("matrix spacing for '{0}' is negative")]
    BadSpacing(String),
    #[error("surface parent '{0}' not found")]
    DanglingSurface(String),
    #[error("room has no free cells")]
    NoFreeSpace,
    #[error("entrance does not lie on the room boundary")]
    BadEntrance,
    #[error("duplicate object id '{0}'")]
    DuplicateId(String),
}

/// Global spatial role of an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalConstraint {
    Edge,
    Middle,
    Unconstrained,
}

/// Structural pattern of an anchor or member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StructuralConstraint {
    Single,
    Matrix { rows: u32, cols: u32, spacing: f64 },
    Paired { partner: String, offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Near,
    Far,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub target: String,
    #[serde(default)]
    pub distance: Option<f64>,
}

pub const DEFAULT_NEAR_DISTANCE: f64 = 1.5;
pub const DEFAULT_FAR_DISTANCE: f64 = 3.0;
pub const DEFAULT_CLEARANCE: f64 = 0.6;

/// Per-side clearance margins in front of interactive faces, in the object's
/// own frame before rotation: front (+y), right (+x), back (-y), left (-x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clearance {
    #[serde(default)]
    pub front: f64,
    #[serde(default)]
    pub right: f64,
    #[serde(default)]
    pub back: f64,
    #[serde(default)]
    pub left: f64,
}

impl Default for Clearance {
    fn default() -> Self {
        Self {
            front: DEFAULT_CLEARANCE,
            right: 0.0,
            back: 0.0,
            left: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementConstraint {
    pub global: GlobalConstraint,
    pub structural: StructuralConstraint,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

impl Default for PlacementConstraint {
    fn default() -> Self {
        Self {
            global: GlobalConstraint::Unconstrained,
            structural: StructuralConstraint::Single,
            relations: Vec::new(),
        }
    }
}

/// Footprint and interaction metadata of one object kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    /// Footprint extent along x at rotation 0.
    pub width: f64,
    /// Footprint extent along y at rotation 0.
    pub depth: f64,
    #[serde(default)]
    pub rotatable: bool,
    #[serde(default)]
    pub clearance: Clearance,
}

impl ObjectSpec {
    pub fn new(id: impl Into<String>, width: f64, depth: f64) -> Self {
        Self {
            id: id.into(),
            width,
            depth,
            rotatable: true,
            clearance: Clearance::default(),
        }
    }

    pub fn footprint_area(&self) -> f64 {
        self.width * self.depth
    }
}

/// One member of a group: an object placed in the anchor's frame, either on
/// the floor near the anchor or on the anchor's top surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMember {
    pub spec: ObjectSpec,
    pub constraint: PlacementConstraint,
    /// When set, the member packs onto the top surface of this object
    /// (anchor or earlier member) instead of standing on the floor.
    #[serde(default)]
    pub on_surface_of: Option<String>,
}

/// Anchor plus members; the unit the placement solver works with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectGroup {
    pub anchor: ObjectSpec,
    pub anchor_constraint: PlacementConstraint,
    pub members: Vec<GroupMember>,
}

impl ObjectGroup {
    /// Priority level of the group's anchor:
    /// edge+matrix (0), edge (1), matrix (2), middle (3), free (4).
    pub fn priority(&self) -> u8 {
        let matrix = matches!(self.anchor_constraint.structural, StructuralConstraint::Matrix { .. });
        match (self.anchor_constraint.global, matrix) {
            (GlobalConstraint::Edge, true) => 0,
            (GlobalConstraint::Edge, false) => 1,
            (_, true) => 2,
            (GlobalConstraint::Middle, false) => 3,
            (GlobalConstraint::Unconstrained, false) => 4,
        }
    }
}
