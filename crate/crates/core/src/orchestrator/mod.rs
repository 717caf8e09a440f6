//! Multi-floor pipeline: ingest a building program, solve and clean each
//! floor with vertical cores carved at identical coordinates, emit door
//! annotations for access edges, and check cross-floor core alignment.

pub mod program;

pub use program::{emit_program, ingest_program, BuildingProgram, FloorProgram, ProgramError};

use crate::geometry::io::{DoorSpec, FloorplanDoc, FrameSpec, RoomPoly};
use crate::geometry::{CoreBox, FreeRegion, GridLabelMap, Label};
use crate::postprocess::{cleanup, CleanupConfig};
use crate::rng::derive_seed;
use crate::solver::seeds::SeedError;
use crate::solver::{
    solve_floor, EnergyWeights, LabelBinding, SeedProvider, SolverConfig, SolverError,
};
use crate::topology::{EdgeKind, RoomGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildingError {
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("floor {floor}: {source}")]
    FloorInfeasible {
        floor: i64,
        source: SolverError,
        /// Floors that did solve, kept for diagnostics.
        partial: Vec<FloorLayout>,
    },
}

/// Builds one seed provider per floor; floors may solve concurrently, so
/// providers must not share mutable state across floors.
pub trait SeedProviderFactory: Sync {
    fn for_floor(&self, floor_index: i64) -> Result<Box<dyn SeedProvider>, SeedError>;
}

/// Monte-Carlo providers with per-floor derived streams.
pub struct McProviderFactory {
    pub rng_seed: u64,
}

impl SeedProviderFactory for McProviderFactory {
    fn for_floor(&self, floor_index: i64) -> Result<Box<dyn SeedProvider>, SeedError> {
        Ok(Box::new(crate::solver::seeds::MonteCarloSeeds::new(
            derive_seed(self.rng_seed, &["floor"], &[floor_index as u64]),
        )))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FloorLayout {
    pub index: i64,
    pub map: GridLabelMap,
    pub room_names: Vec<String>,
    pub core_names: Vec<String>,
    pub doors: Vec<DoorSpec>,
    pub cleanup_converged: bool,
    pub disconnected_rooms: Vec<String>,
}

/// Reproducibility context carried with every layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub rng_seed: u64,
    pub weights: EnergyWeights,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildingLayout {
    pub floors: Vec<FloorLayout>,
    pub cores: Vec<CoreBox>,
    pub provenance: Provenance,
}

/// Solves every floor of the program: free region with that floor's cores,
/// per-floor rng derived from the base seed and floor index, cleanup, and
/// door annotations. Fails fast naming the first infeasible floor while
/// retaining the floors that did solve.
pub fn solve_building(
    program: &BuildingProgram,
    providers: &dyn SeedProviderFactory,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<BuildingLayout, BuildingError> {
    let results: Vec<(i64, Result<FloorLayout, SolverError>)> = program
        .floors
        .par_iter()
        .map(|floor| {
            let result = solve_one_floor(program, floor, providers, cfg, weights);
            (floor.index, result)
        })
        .collect();

    let mut floors = Vec::with_capacity(results.len());
    let mut failure: Option<(i64, SolverError)> = None;
    for (index, result) in results {
        match result {
            Ok(layout) => floors.push(layout),
            Err(e) => {
                if failure.is_none() {
                    failure = Some((index, e));
                }
            }
        }
    }
    if let Some((floor, source)) = failure {
        return Err(BuildingError::FloorInfeasible {
            floor,
            source,
            partial: floors,
        });
    }
    floors.sort_by_key(|f| f.index);
    Ok(BuildingLayout {
        floors,
        cores: program.cores.iter().map(|c| c.core.clone()).collect(),
        provenance: Provenance {
            rng_seed: cfg.sampling.rng_seed,
            weights: *weights,
            solver: cfg.clone(),
        },
    })
}

fn solve_one_floor(
    program: &BuildingProgram,
    floor: &FloorProgram,
    providers: &dyn SeedProviderFactory,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<FloorLayout, SolverError> {
    let region = FreeRegion::new(floor.footprint.clone(), program.cores_for(floor.index))?;
    let mut provider = providers.for_floor(floor.index)?;
    let mut floor_cfg = cfg.clone();
    floor_cfg.sampling.rng_seed = derive_seed(cfg.sampling.rng_seed, &["floor"], &[floor.index as u64]);
    let solved = solve_floor(&region, &floor.graph, provider.as_mut(), &floor_cfg, weights)?;
    let outcome = cleanup(&solved.map, &CleanupConfig::default());
    let doors = door_annotations(&outcome.map, &floor.graph, &solved.binding);
    Ok(FloorLayout {
        index: floor.index,
        map: outcome.map,
        room_names: solved.binding.room_names().to_vec(),
        core_names: solved.binding.core_names().to_vec(),
        doors,
        cleanup_converged: outcome.converged,
        disconnected_rooms: outcome
            .disconnected_rooms
            .iter()
            .filter_map(|&r| solved.binding.room_name(r).map(|s| s.to_string()))
            .collect(),
    })
}

/// Door positions for access edges: the midpoint of the median shared-wall
/// unit edge between the two realized rooms (or room and core).
pub fn door_annotations(map: &GridLabelMap, graph: &RoomGraph, binding: &LabelBinding) -> Vec<DoorSpec> {
    let mut doors = Vec::new();
    let (ox, oy) = map.origin();
    for edge in &graph.edges {
        if edge.kind != EdgeKind::Access {
            continue;
        }
        let (Some(a), Some(b)) = (binding.label_of(&edge.source), binding.label_of(&edge.target))
        else {
            continue;
        };
        // collect shared unit edges in deterministic scan order
        let mut shared: Vec<(usize, bool)> = Vec::new(); // (cell, vertical wall?)
        let w = map.width() as usize;
        for idx in 0..map.len() {
            let here = map.get_idx(idx);
            let x = idx % w;
            let y = idx / w;
            if x + 1 < w {
                let east = map.get_idx(idx + 1);
                if (here == a && east == b) || (here == b && east == a) {
                    shared.push((idx, true));
                }
            }
            if y + 1 < (map.height() as usize) {
                let north = map.get_idx(idx + w);
                if (here == a && north == b) || (here == b && north == a) {
                    shared.push((idx, false));
                }
            }
        }
        if shared.is_empty() {
            continue;
        }
        let (cell, vertical) = shared[shared.len() / 2];
        let x = (cell % w) as f64;
        let y = (cell / w) as f64;
        let position = if vertical {
            [ox as f64 + x + 1.0, oy as f64 + y + 0.5]
        } else {
            [ox as f64 + x + 0.5, oy as f64 + y + 1.0]
        };
        doors.push(DoorSpec {
            rooms: [edge.source.clone(), edge.target.clone()],
            position,
            orientation: if vertical { "v".into() } else { "h".into() },
        });
    }
    doors
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentMismatch {
    pub core_id: String,
    pub floors: Vec<i64>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub mismatches: Vec<AlignmentMismatch>,
}

impl AlignmentReport {
    pub fn is_aligned(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Verifies each core occupies identical grid coordinates on every floor it
/// appears on, by re-deriving the core's bounding box from each floor's
/// label map.
pub fn check_vertical_alignment(layout: &BuildingLayout) -> AlignmentReport {
    let mut report = AlignmentReport::default();
    for (core_pos, core) in layout.cores.iter().enumerate() {
        let mut boxes: Vec<(i64, (i64, i64, i64, i64))> = Vec::new();
        for floor in &layout.floors {
            // the core index may differ per floor; match by name
            let Some(k) = floor.core_names.iter().position(|n| n == &core.id) else {
                continue;
            };
            let cells = floor.map.cells_with(Label::Core(k as u32));
            if cells.is_empty() {
                continue;
            }
            let (ox, oy) = floor.map.origin();
            let mut x0 = i64::MAX;
            let mut y0 = i64::MAX;
            let mut x1 = i64::MIN;
            let mut y1 = i64::MIN;
            for &c in &cells {
                let (x, y) = floor.map.coords(c);
                x0 = x0.min(ox + x as i64);
                y0 = y0.min(oy + y as i64);
                x1 = x1.max(ox + x as i64 + 1);
                y1 = y1.max(oy + y as i64 + 1);
            }
            boxes.push((floor.index, (x0, y0, x1, y1)));
        }
        if boxes.len() < 2 {
            continue;
        }
        let reference = boxes[0].1;
        let offenders: Vec<i64> = boxes
            .iter()
            .filter(|(_, b)| *b != reference)
            .map(|(f, _)| *f)
            .collect();
        if !offenders.is_empty() {
            report.mismatches.push(AlignmentMismatch {
                core_id: core.id.clone(),
                floors: offenders,
                detail: format!(
                    "core #{core_pos} reference box {:?} on floor {} not matched",
                    reference, boxes[0].0
                ),
            });
        }
    }
    report
}

/// Vector floorplan for one solved floor: traced room contours plus doors.
pub fn floor_to_floorplan(floor: &FloorLayout) -> FloorplanDoc {
    let map = &floor.map;
    let (ox, oy) = map.origin();
    let mut rooms = Vec::new();
    let mut present: Vec<u32> = map
        .cells()
        .iter()
        .filter_map(|l| match l {
            Label::Room(r) => Some(*r),
            _ => None,
        })
        .collect();
    present.sort_unstable();
    present.dedup();
    for r in present {
        let loops = crate::geometry::contour::trace_label_contours(map, Label::Room(r));
        let Some(outer) = loops.into_iter().max_by_key(|lp| lp.len()) else {
            continue;
        };
        rooms.push(RoomPoly {
            id: floor
                .room_names
                .get(r as usize)
                .cloned()
                .unwrap_or_else(|| format!("room_{r}")),
            category: None,
            vertices: outer.into_iter().map(|p| [p.x, p.y]).collect(),
        });
    }
    FloorplanDoc {
        frame: FrameSpec {
            x: [ox as f64, ox as f64 + map.width() as f64],
            y: [oy as f64, oy as f64 + map.height() as f64],
        },
        rooms,
        doors: floor.doors.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CoreKind, GridRect};

    fn tiny_program(floors: usize) -> BuildingProgram {
        let graph_json = r#"{
            "nodes": [
              {"id": "lobby", "type": "main", "area": 40.0},
              {"id": "office", "type": "Entities", "area": 30.0},
              {"id": "stair_0", "type": "stair", "area": 6.0}
            ],
            "edges": [
              {"source": "lobby", "target": "office", "kind": "access"},
              {"source": "lobby", "target": "stair_0", "kind": "adjacent"}
            ]
        }"#;
        let floor_docs: Vec<String> = (1..=floors)
            .map(|i| {
                if i == 1 {
                    format!(
                        r#"{{"index": 1, "footprint": [[0,0],[10,0],[10,10],[0,10]], "graph": {graph_json}}}"#
                    )
                } else {
                    format!(r#"{{"index": {i}, "copy": 1}}"#)
                }
            })
            .collect();
        let text = format!(
            r#"{{
              "vertical_connectivity": {{"cores": [{{"type": "stair", "x": [0, 2], "y": [0, 3], "id": "stair_0"}}]}},
              "floors": [{}]
            }}"#,
            floor_docs.join(",")
        );
        BuildingProgram::from_json(&text).unwrap()
    }

    #[test]
    fn two_floors_share_identical_core_boxes() {
        let program = tiny_program(2);
        let mut cfg = SolverConfig::default();
        cfg.sampling.batch_size = 16;
        cfg.sampling.n_retry = 4;
        cfg.sampling.rng_seed = 3;
        let layout = solve_building(
            &program,
            &McProviderFactory { rng_seed: 3 },
            &cfg,
            &EnergyWeights::default(),
        )
        .unwrap();
        assert_eq!(layout.floors.len(), 2);
        let report = check_vertical_alignment(&layout);
        assert!(report.is_aligned(), "{:?}", report.mismatches);
        // access edge lobby-office gets a door on each floor
        for floor in &layout.floors {
            assert!(lookup_door(floor, "lobby", "office").is_some());
        }
    }

    fn lookup_door<'a>(floor: &'a FloorLayout, a: &str, b: &str) -> Option<&'a DoorSpec> {
        floor.doors.iter().find(|d| {
            (d.rooms[0] == a && d.rooms[1] == b) || (d.rooms[0] == b && d.rooms[1] == a)
        })
    }

    #[test]
    fn shifted_core_is_detected() {
        let program = tiny_program(2);
        let mut cfg = SolverConfig::default();
        cfg.sampling.batch_size = 16;
        cfg.sampling.n_retry = 4;
        let mut layout = solve_building(
            &program,
            &McProviderFactory { rng_seed: 0 },
            &cfg,
            &EnergyWeights::default(),
        )
        .unwrap();
        // deliberately shift floor 2's core cells one column right
        let map = &mut layout.floors[1].map;
        let cells = map.cells_with(Label::Core(0));
        for &c in &cells {
            map.set_idx(c, Label::Empty);
        }
        for &c in &cells {
            map.set_idx(c + 1, Label::Core(0));
        }
        let report = check_vertical_alignment(&layout);
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].core_id, "stair_0");
        assert_eq!(report.mismatches[0].floors, vec![2]);
    }

    #[test]
    fn multi_core_alignment_matches_pairwise_oracle() {
        // hand-built layout with two cores on three floors
        let mk_floor = |index: i64, shift: i64| {
            let region = FreeRegion::new(
                crate::geometry::OrthoPolygon::rect(0, 0, 8, 8).unwrap(),
                vec![
                    CoreBox {
                        id: "stair_0".into(),
                        kind: CoreKind::Stair,
                        rect: GridRect::new(shift, 0, 2 + shift, 2),
                    },
                    CoreBox {
                        id: "lift_1".into(),
                        kind: CoreKind::Elevator,
                        rect: GridRect::new(6, 6, 8, 8),
                    },
                ],
            )
            .unwrap();
            let mut map = crate::geometry::free_cells(&region, 1).unwrap();
            for i in 0..map.len() {
                if map.get_idx(i) == Label::Empty {
                    map.set_idx(i, Label::Room(0));
                }
            }
            FloorLayout {
                index,
                map,
                room_names: vec!["hub".into()],
                core_names: vec!["stair_0".into(), "lift_1".into()],
                doors: vec![],
                cleanup_converged: true,
                disconnected_rooms: vec![],
            }
        };
        let layout = BuildingLayout {
            floors: vec![mk_floor(1, 0), mk_floor(2, 0), mk_floor(3, 1)],
            cores: vec![
                CoreBox {
                    id: "stair_0".into(),
                    kind: CoreKind::Stair,
                    rect: GridRect::new(0, 0, 2, 2),
                },
                CoreBox {
                    id: "lift_1".into(),
                    kind: CoreKind::Elevator,
                    rect: GridRect::new(6, 6, 8, 8),
                },
            ],
            provenance: Provenance {
                rng_seed: 0,
                weights: EnergyWeights::default(),
                solver: SolverConfig::default(),
            },
        };
        let report = check_vertical_alignment(&layout);
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].core_id, "stair_0");
        assert_eq!(report.mismatches[0].floors, vec![3]);
    }
}
