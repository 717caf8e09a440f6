//! Raster IoU over room-category label maps and placement-quality metrics.

pub mod dataset;

use crate::geometry::{GridLabelMap, Label};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dimension mismatch: prediction {pw}x{ph} vs ground truth {gw}x{gh}")]
    DimensionMismatch { pw: u32, ph: u32, gw: u32, gh: u32 },
    #[error("unknown category for label {0:?} with no mapping")]
    UnknownCategory(String),
    #[error("unpaired sample '{0}'")]
    UnpairedSample(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] crate::geometry::io::FormatError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("{0}")]
    Other(String),
}

/// Maps grid labels to room categories. Rooms and cores carry independent
/// index spaces; anything unmapped is background and excluded from scoring.
#[derive(Debug, Clone, Default)]
pub struct ClassMap {
    pub rooms: HashMap<u32, String>,
    pub cores: HashMap<u32, String>,
}

impl ClassMap {
    pub fn category_of(&self, label: Label) -> Option<&str> {
        match label {
            Label::Room(r) => self.rooms.get(&r).map(|s| s.as_str()),
            Label::Core(k) => self.cores.get(&k).map(|s| s.as_str()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IoUReport {
    /// Percent IoU pooled over all pixels of all categories.
    pub micro_iou: f64,
    /// Percent IoU averaged over categories present in the ground truth.
    pub macro_iou: f64,
    pub per_class: BTreeMap<String, f64>,
}

/// Per-category intersection/union tallies; reusable for dataset pooling.
#[derive(Debug, Clone, Default)]
pub struct ConfusionCounts {
    pub per_class: BTreeMap<String, (u64, u64)>,
    pub gt_classes: BTreeSet<String>,
}

impl ConfusionCounts {
    pub fn merge(&mut self, other: &ConfusionCounts) {
        for (cat, (i, u)) in &other.per_class {
            let entry = self.per_class.entry(cat.clone()).or_insert((0, 0));
            entry.0 += i;
            entry.1 += u;
        }
        self.gt_classes.extend(other.gt_classes.iter().cloned());
    }

    pub fn report(&self) -> IoUReport {
        let mut per_class = BTreeMap::new();
        let mut inter_total = 0u64;
        let mut union_total = 0u64;
        for (cat, (i, u)) in &self.per_class {
            let iou = if *u == 0 { 0.0 } else { 100.0 * *i as f64 / *u as f64 };
            per_class.insert(cat.clone(), iou);
            inter_total += i;
            union_total += u;
        }
        let micro = if union_total == 0 {
            0.0
        } else {
            100.0 * inter_total as f64 / union_total as f64
        };
        let macro_classes: Vec<f64> = self
            .gt_classes
            .iter()
            .filter_map(|c| per_class.get(c).copied())
            .collect();
        let macro_iou = if macro_classes.is_empty() {
            0.0
        } else {
            macro_classes.iter().sum::<f64>() / macro_classes.len() as f64
        };
        IoUReport {
            micro_iou: micro,
            macro_iou,
            per_class,
        }
    }
}

/// Tallies per-category intersection and union cells between two maps of
/// equal dimensions. Background cells (no category) are excluded.
pub fn confusion_counts(
    pred: &GridLabelMap,
    gt: &GridLabelMap,
    pred_classes: &ClassMap,
    gt_classes: &ClassMap,
) -> Result<ConfusionCounts, EvalError> {
    if pred.width() != gt.width() || pred.height() != gt.height() {
        return Err(EvalError::DimensionMismatch {
            pw: pred.width(),
            ph: pred.height(),
            gw: gt.width(),
            gh: gt.height(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for i in 0..pred.len() {
        let p = pred_classes.category_of(pred.get_idx(i));
        let g = gt_classes.category_of(gt.get_idx(i));
        if let Some(g) = g {
            counts.gt_classes.insert(g.to_string());
        }
        match (p, g) {
            (Some(p), Some(g)) if p == g => {
                let e = counts.per_class.entry(p.to_string()).or_insert((0, 0));
                e.0 += 1;
                e.1 += 1;
            }
            (p, g) => {
                if let Some(p) = p {
                    counts.per_class.entry(p.to_string()).or_insert((0, 0)).1 += 1;
                }
                if let Some(g) = g {
                    counts.per_class.entry(g.to_string()).or_insert((0, 0)).1 += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Micro/macro IoU between a prediction and a ground truth at the same
/// resolution. Micro pools intersections and unions over categories; macro
/// averages per-category IoU over categories present in the ground truth.
pub fn iou(
    pred: &GridLabelMap,
    gt: &GridLabelMap,
    pred_classes: &ClassMap,
    gt_classes: &ClassMap,
) -> Result<IoUReport, EvalError> {
    Ok(confusion_counts(pred, gt, pred_classes, gt_classes)?.report())
}

/// Placement quality metrics over a placed scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementReport {
    /// Placed objects, total.
    pub n_obj: usize,
    /// Surface-top small items (included in `n_obj`).
    pub n_small: usize,
    /// Objects not fully inside the room polygon.
    pub n_ob: usize,
    /// Overlapping unordered object pairs.
    pub n_cn: usize,
    /// Percent of floor-standing objects whose clearance zone connects to
    /// the entrance.
    pub rch: f64,
}

pub fn placement_metrics(scene: &crate::placement::PlacedScene) -> PlacementReport {
    let floor: Vec<&crate::placement::Placement> =
        scene.placements.iter().filter(|p| p.surface_parent.is_none()).collect();
    let small = scene.placements.len() - floor.len();

    let mut n_ob = 0;
    for p in &floor {
        let (x0, y0, x1, y1) = p.aabb();
        if !scene.room.contains_box(x0, y0, x1, y1) {
            n_ob += 1;
        }
    }

    let mut n_cn = 0;
    for i in 0..floor.len() {
        for j in (i + 1)..floor.len() {
            if overlaps(floor[i], floor[j]) {
                n_cn += 1;
            }
        }
    }
    // surface items can only collide with items on the same surface
    let surface: Vec<&crate::placement::Placement> =
        scene.placements.iter().filter(|p| p.surface_parent.is_some()).collect();
    for i in 0..surface.len() {
        for j in (i + 1)..surface.len() {
            if surface[i].surface_parent == surface[j].surface_parent && overlaps(surface[i], surface[j]) {
                n_cn += 1;
            }
        }
    }

    PlacementReport {
        n_obj: scene.placements.len(),
        n_small: small,
        n_ob,
        n_cn,
        rch: crate::placement::compute_reachability(scene),
    }
}

fn overlaps(a: &crate::placement::Placement, b: &crate::placement::Placement) -> bool {
    let (ax0, ay0, ax1, ay1) = a.aabb();
    let (bx0, by0, bx1, by1) = b.aabb();
    let eps = 1e-9;
    ax0 + eps < bx1 && bx0 + eps < ax1 && ay0 + eps < by1 && by0 + eps < ay1
}
