//! Seed providers: where per-round seed guidance comes from.
//!
//! The solver is model-optional. Seeds may come from dataset annotations
//! (room centroids and areas), from Monte-Carlo sampling, or from an
//! external proposer driven through a small JSON contract: the solver writes
//! a request document describing the parent region and the rooms to place,
//! and reads back a seed-plan array (`room_id` / `x` / `y` / `area`).

use super::{SeedEntry, SeedGeom, SeedPlan};
use crate::geometry::io::FloorplanDoc;
use crate::geometry::{GridLabelMap, Label};
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("no annotation for room '{0}'")]
    MissingAnnotation(String),
    #[error("external seed command failed: {0}")]
    Command(String),
    #[error("external seed response missing: {0}")]
    MissingResponse(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad seed plan: {0}")]
    BadPlan(#[from] serde_json::Error),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRequestChild {
    pub room_id: String,
    pub target_area: f64,
    pub target_cells: usize,
}

/// Request document handed to a seed provider before each cut round.
/// Coordinates are world units; `x_range`/`y_range` bound the parent region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRequest {
    pub parent_id: String,
    pub parent_kind: String,
    pub parent_area_cells: usize,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    /// Outer contour of the parent region, world coordinates.
    pub parent_contour: Vec<[i64; 2]>,
    pub children: Vec<SeedRequestChild>,
}

impl SeedRequest {
    /// Builds the request from the parent's current cells in the layout.
    pub fn from_layout(
        layout: &GridLabelMap,
        parent_id: &str,
        parent_kind: &str,
        parent_label: Label,
        children: Vec<SeedRequestChild>,
    ) -> Self {
        let cells = layout.cells_with(parent_label);
        let (ox, oy) = layout.origin();
        let mut x0 = i64::MAX;
        let mut y0 = i64::MAX;
        let mut x1 = i64::MIN;
        let mut y1 = i64::MIN;
        for &c in &cells {
            let (x, y) = layout.coords(c);
            x0 = x0.min(ox + x as i64);
            y0 = y0.min(oy + y as i64);
            x1 = x1.max(ox + x as i64 + 1);
            y1 = y1.max(oy + y as i64 + 1);
        }
        let contour = crate::geometry::contour::trace_label_contours(layout, parent_label)
            .into_iter()
            .max_by_key(|lp| lp.len())
            .map(|lp| lp.into_iter().map(|p| [p.x, p.y]).collect())
            .unwrap_or_default();
        SeedRequest {
            parent_id: parent_id.to_string(),
            parent_kind: parent_kind.to_string(),
            parent_area_cells: cells.len(),
            x_range: [x0 as f64, x1 as f64],
            y_range: [y0 as f64, y1 as f64],
            parent_contour: contour,
            children,
        }
    }
}

pub trait SeedProvider {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError>;
}

/// Annotation-backed seeds: room centroids and absolute areas read from a
/// vector floorplan. Area fractions are derived against the parent area at
/// request time.
pub struct AnnotationSeeds {
    centroids: HashMap<String, (f64, f64)>,
    areas: HashMap<String, f64>,
}

impl AnnotationSeeds {
    pub fn from_floorplan(doc: &FloorplanDoc) -> Result<Self, SeedError> {
        let mut centroids = HashMap::new();
        let mut areas = HashMap::new();
        for room in &doc.rooms {
            let n = room.vertices.len();
            if n == 0 {
                continue;
            }
            // polygon centroid via the shoelace formula
            let mut acc_a = 0.0;
            let mut cx = 0.0;
            let mut cy = 0.0;
            for i in 0..n {
                let p = room.vertices[i];
                let q = room.vertices[(i + 1) % n];
                let cross = (p[0] * q[1] - q[0] * p[1]) as f64;
                acc_a += cross;
                cx += (p[0] + q[0]) as f64 * cross;
                cy += (p[1] + q[1]) as f64 * cross;
            }
            let area = acc_a / 2.0;
            if area.abs() < f64::EPSILON {
                continue;
            }
            centroids.insert(room.id.clone(), (cx / (6.0 * area), cy / (6.0 * area)));
            areas.insert(room.id.clone(), area.abs());
        }
        Ok(Self { centroids, areas })
    }
}

impl SeedProvider for AnnotationSeeds {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError> {
        let entries = request
            .children
            .iter()
            .map(|child| {
                let (x, y) = self
                    .centroids
                    .get(&child.room_id)
                    .copied()
                    .ok_or_else(|| SeedError::MissingAnnotation(child.room_id.clone()))?;
                let area = self.areas[&child.room_id];
                let fraction = (area / request.parent_area_cells as f64).clamp(0.0, 1.0);
                Ok(SeedEntry {
                    room_id: child.room_id.clone(),
                    geom: SeedGeom::Point { x, y },
                    area_fraction: (fraction > 0.0).then_some(fraction),
                })
            })
            .collect::<Result<Vec<_>, SeedError>>()?;
        Ok(SeedPlan { entries })
    }
}

/// Model-free seeds: uniform samples inside the parent bounding range,
/// placed in decreasing target order with pairwise repulsion. Deterministic
/// per (seed, parent id).
pub struct MonteCarloSeeds {
    pub rng_seed: u64,
    pub min_separation: f64,
}

impl MonteCarloSeeds {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            min_separation: 2.0,
        }
    }
}

impl SeedProvider for MonteCarloSeeds {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError> {
        let mut stream = rng::stream(self.rng_seed, &["seed-plan", &request.parent_id], &[]);
        let mut order: Vec<usize> = (0..request.children.len()).collect();
        order.sort_by(|&a, &b| {
            request.children[b]
                .target_cells
                .cmp(&request.children[a].target_cells)
                .then(a.cmp(&b))
        });
        let mut points: Vec<Option<(f64, f64)>> = vec![None; request.children.len()];
        let mut placed: Vec<(f64, f64)> = Vec::new();
        for &k in &order {
            let mut point = None;
            for _ in 0..16 {
                let x = stream.random_range(request.x_range[0]..request.x_range[1]);
                let y = stream.random_range(request.y_range[0]..request.y_range[1]);
                let ok = placed
                    .iter()
                    .all(|p| (p.0 - x).powi(2) + (p.1 - y).powi(2) >= self.min_separation.powi(2));
                point = Some((x, y));
                if ok {
                    break;
                }
            }
            let p = point.expect("at least one draw");
            placed.push(p);
            points[k] = Some(p);
        }
        let entries = request
            .children
            .iter()
            .zip(points)
            .map(|(child, p)| {
                let (x, y) = p.expect("every child sampled");
                SeedEntry {
                    room_id: child.room_id.clone(),
                    geom: SeedGeom::Point { x, y },
                    area_fraction: None,
                }
            })
            .collect();
        Ok(SeedPlan { entries })
    }
}

/// External proposer invoked as a child process: the request JSON goes to
/// stdin, the seed-plan array is read from stdout.
pub struct ExternalCommandSeeds {
    pub command: Vec<String>,
}

impl ExternalCommandSeeds {
    pub fn from_shellish(cmd: &str) -> Self {
        Self {
            command: cmd.split_whitespace().map(|s| s.to_string()).collect(),
        }
    }
}

impl SeedProvider for ExternalCommandSeeds {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError> {
        let (program, args) = self
            .command
            .split_first()
            .ok_or_else(|| SeedError::Command("empty command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| SeedError::Command(format!("{program}: {e}")))?;
        let payload = serde_json::to_string(request).expect("request serializes");
        child
            .stdin
            .as_mut()
            .expect("stdin piped")
            .write_all(payload.as_bytes())?;
        let output = child.wait_with_output()?;
        if !output.status.success() {
            return Err(SeedError::Command(format!(
                "{program} exited with {}",
                output.status
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        Ok(SeedPlan::from_json(&text)?)
    }
}

/// External proposer driven through a directory: the request is written to
/// `<parent>.request.json` and the pre-staged `<parent>.response.json` is
/// read back.
pub struct ExternalDirSeeds {
    pub dir: PathBuf,
}

impl SeedProvider for ExternalDirSeeds {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError> {
        std::fs::create_dir_all(&self.dir)?;
        let req_path = self.dir.join(format!("{}.request.json", request.parent_id));
        std::fs::write(&req_path, serde_json::to_string_pretty(request).unwrap())?;
        let resp_path = self.dir.join(format!("{}.response.json", request.parent_id));
        if !resp_path.exists() {
            return Err(SeedError::MissingResponse(resp_path));
        }
        let text = std::fs::read_to_string(&resp_path)?;
        Ok(SeedPlan::from_json(&text)?)
    }
}

/// In-memory plans keyed by parent id; handy for tests and replays.
#[derive(Debug, Clone, Default)]
pub struct FixedSeeds {
    pub plans: HashMap<String, SeedPlan>,
}

impl SeedProvider for FixedSeeds {
    fn plan_seeds(&mut self, request: &SeedRequest) -> Result<SeedPlan, SeedError> {
        self.plans
            .get(&request.parent_id)
            .cloned()
            .ok_or_else(|| SeedError::MissingAnnotation(request.parent_id.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_plan_wire_format_accepts_boxes_and_points() {
        let text = r#"[
          {"room_id": "lobby", "x": [0.0, 8.0], "y": [0.0, 6.0], "area": 0.45,
           "reason": "central area"},
          {"room_id": "office_1", "x": 9.5, "y": 2.5}
        ]"#;
        let plan = SeedPlan::from_json(text).unwrap();
        assert_eq!(plan.entries.len(), 2);
        assert_eq!(plan.entries[0].geom.center(), (4.0, 3.0));
        assert_eq!(plan.entries[0].area_fraction, Some(0.45));
        assert_eq!(plan.entries[1].geom.center(), (9.5, 2.5));
        assert_eq!(plan.entries[1].area_fraction, None);

        let round_trip = SeedPlan::from_json(&plan.to_json()).unwrap();
        assert_eq!(round_trip, plan);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_separated() {
        let request = SeedRequest {
            parent_id: "hub".into(),
            parent_kind: "main".into(),
            parent_area_cells: 400,
            x_range: [0.0, 20.0],
            y_range: [0.0, 20.0],
            parent_contour: vec![],
            children: vec![
                SeedRequestChild { room_id: "a".into(), target_area: 100.0, target_cells: 100 },
                SeedRequestChild { room_id: "b".into(), target_area: 50.0, target_cells: 50 },
            ],
        };
        let mut p1 = MonteCarloSeeds::new(7);
        let mut p2 = MonteCarloSeeds::new(7);
        let plan1 = p1.plan_seeds(&request).unwrap();
        let plan2 = p2.plan_seeds(&request).unwrap();
        assert_eq!(plan1, plan2);
        let (x1, y1) = plan1.entries[0].geom.center();
        let (x2, y2) = plan1.entries[1].geom.center();
        assert!((x1 - x2).powi(2) + (y1 - y2).powi(2) >= 4.0);
    }

    #[test]
    fn annotation_seeds_use_centroids_and_fractions() {
        use crate::geometry::io::{FrameSpec, RoomPoly};
        let doc = FloorplanDoc {
            frame: FrameSpec { x: [0.0, 10.0], y: [0.0, 10.0] },
            rooms: vec![RoomPoly {
                id: "kitchen".into(),
                category: None,
                vertices: vec![[0, 0], [4, 0], [4, 5], [0, 5]],
            }],
            doors: vec![],
        };
        let mut provider = AnnotationSeeds::from_floorplan(&doc).unwrap();
        let request = SeedRequest {
            parent_id: "hub".into(),
            parent_kind: "main".into(),
            parent_area_cells: 100,
            x_range: [0.0, 10.0],
            y_range: [0.0, 10.0],
            parent_contour: vec![],
            children: vec![SeedRequestChild {
                room_id: "kitchen".into(),
                target_area: 20.0,
                target_cells: 20,
            }],
        };
        let plan = provider.plan_seeds(&request).unwrap();
        assert_eq!(plan.entries[0].geom.center(), (2.0, 2.5));
        assert_eq!(plan.entries[0].area_fraction, Some(0.2));
        // unknown room
        let missing = SeedRequest {
            children: vec![SeedRequestChild {
                room_id: "garage".into(),
                target_area: 10.0,
                target_cells: 10,
            }],
            ..request
        };
        assert!(matches!(
            provider.plan_seeds(&missing),
            Err(SeedError::MissingAnnotation(_))
        ));
    }
}
