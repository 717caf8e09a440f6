//! Building-program document: vertical connectivity (shared cores), floors
//! with footprints and room graphs, and the `{"index": k, "copy": j}`
//! shorthand for repeating a floor.

use crate::geometry::{CoreBox, CoreKind, GridPoint, GridRect, OrthoPolygon};
use crate::topology::json::{graph_from_value, GraphJsonError};
use crate::topology::RoomGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphJsonError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("program has no floors")]
    NoFloors,
    #[error("floor {0} has neither a footprint nor a shared footprint")]
    MissingFootprint(usize),
    #[error("floor {0} has no room graph")]
    MissingGraph(usize),
    #[error("floor {index} copies floor {copy}, which must come earlier")]
    BadCopy { index: i64, copy: i64 },
    #[error("core coordinates must be non-negative (core {0})")]
    NegativeCoreCoords(usize),
    #[error("core box {0} is degenerate")]
    DegenerateCore(usize),
    #[error("duplicate floor index {0}")]
    DuplicateFloor(i64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramDoc {
    #[serde(default)]
    pub vertical_connectivity: Option<VerticalConnectivityDoc>,
    pub floors: Vec<FloorDoc>,
    /// Shared footprint for floors that do not declare their own.
    #[serde(default)]
    pub footprint: Option<Vec<[i64; 2]>>,
    /// World units per grid cell; areas divide by its square.
    #[serde(default)]
    pub cell_size: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerticalConnectivityDoc {
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub cores: Vec<CoreDoc>,
    #[serde(default)]
    pub justification: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoreDoc {
    #[serde(rename = "type")]
    pub core_type: String,
    pub x: [i64; 2],
    pub y: [i64; 2],
    #[serde(default)]
    pub id: Option<String>,
    /// Floor indices served; defaults to every floor.
    #[serde(default)]
    pub floors: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FloorDoc {
    pub index: i64,
    #[serde(default)]
    pub copy: Option<i64>,
    #[serde(default)]
    pub footprint: Option<Vec<[i64; 2]>>,
    #[serde(default)]
    pub graph: Option<serde_json::Value>,
    #[serde(default)]
    pub requirement: Option<String>,
    #[serde(default)]
    pub gross_floor_area: Option<f64>,
}

/// Resolved program: every floor has a footprint and a graph; cores carry
/// stable ids and floor spans.
#[derive(Debug, Clone)]
pub struct BuildingProgram {
    pub floors: Vec<FloorProgram>,
    pub cores: Vec<ProgramCore>,
    pub cell_size: f64,
}

#[derive(Debug, Clone)]
pub struct FloorProgram {
    pub index: i64,
    pub footprint: OrthoPolygon,
    pub graph: RoomGraph,
}

#[derive(Debug, Clone)]
pub struct ProgramCore {
    pub core: CoreBox,
    /// Floor indices this core spans.
    pub floors: Vec<i64>,
}

impl BuildingProgram {
    pub fn from_json(text: &str) -> Result<Self, ProgramError> {
        let doc: ProgramDoc = serde_json::from_str(text)?;
        ingest_program(&doc)
    }

    /// Cores serving the given floor.
    pub fn cores_for(&self, floor_index: i64) -> Vec<CoreBox> {
        self.cores
            .iter()
            .filter(|c| c.floors.contains(&floor_index))
            .map(|c| c.core.clone())
            .collect()
    }
}

/// Resolves copies, validates cores, and normalizes units to the solver
/// grid (dividing lengths by `cell_size`, areas by its square).
pub fn ingest_program(doc: &ProgramDoc) -> Result<BuildingProgram, ProgramError> {
    if doc.floors.is_empty() {
        return Err(ProgramError::NoFloors);
    }
    let cell_size = doc.cell_size.unwrap_or(1.0);
    let scale = |v: i64| -> i64 { ((v as f64) / cell_size).round() as i64 };

    let all_indices: Vec<i64> = doc.floors.iter().map(|f| f.index).collect();
    {
        let mut seen = std::collections::HashSet::new();
        for &i in &all_indices {
            if !seen.insert(i) {
                return Err(ProgramError::DuplicateFloor(i));
            }
        }
    }

    // cores: ids default to "<type>_<position>"
    let mut cores = Vec::new();
    if let Some(vc) = &doc.vertical_connectivity {
        for (i, c) in vc.cores.iter().enumerate() {
            if c.x[0] < 0 || c.x[1] < 0 || c.y[0] < 0 || c.y[1] < 0 {
                return Err(ProgramError::NegativeCoreCoords(i));
            }
            let rect = GridRect::new(scale(c.x[0]), scale(c.y[0]), scale(c.x[1]), scale(c.y[1]));
            if rect.is_empty() {
                return Err(ProgramError::DegenerateCore(i));
            }
            let kind = match c.core_type.as_str() {
                "stair" => CoreKind::Stair,
                "elevator" => CoreKind::Elevator,
                other => {
                    return Err(ProgramError::Json(serde::de::Error::custom(format!(
                        "unknown core type '{other}'"
                    ))))
                }
            };
            cores.push(ProgramCore {
                core: CoreBox {
                    id: c.id.clone().unwrap_or_else(|| format!("{}_{i}", c.core_type)),
                    kind,
                    rect,
                },
                floors: c.floors.clone().unwrap_or_else(|| all_indices.clone()),
            });
        }
    }

    // floors in declaration order; copies must point backward
    let mut floors: Vec<FloorProgram> = Vec::with_capacity(doc.floors.len());
    for (pos, f) in doc.floors.iter().enumerate() {
        if let Some(copy_of) = f.copy {
            let source_pos = doc.floors[..pos].iter().position(|g| g.index == copy_of);
            let Some(source_pos) = source_pos else {
                return Err(ProgramError::BadCopy {
                    index: f.index,
                    copy: copy_of,
                });
            };
            let src: FloorProgram = floors[source_pos].clone();
            floors.push(FloorProgram {
                index: f.index,
                footprint: src.footprint,
                graph: src.graph,
            });
            continue;
        }
        let ring = f
            .footprint
            .as_ref()
            .or(doc.footprint.as_ref())
            .ok_or(ProgramError::MissingFootprint(pos))?;
        let footprint = OrthoPolygon::new(
            ring.iter()
                .map(|v| GridPoint::new(scale(v[0]), scale(v[1])))
                .collect(),
        )?;
        let graph_value = f.graph.clone().ok_or(ProgramError::MissingGraph(pos))?;
        let mut graph = graph_from_value(graph_value)?;
        if (cell_size - 1.0).abs() > f64::EPSILON {
            for node in &mut graph.nodes {
                node.target_area /= cell_size * cell_size;
            }
        }
        floors.push(FloorProgram {
            index: f.index,
            footprint,
            graph,
        });
    }

    // every core must sit inside every footprint it spans
    let program = BuildingProgram {
        floors,
        cores,
        cell_size,
    };
    for core in &program.cores {
        for floor in &program.floors {
            if core.floors.contains(&floor.index) {
                let r = core.core.rect;
                if !floor.footprint.contains_box(r.x0 as f64, r.y0 as f64, r.x1 as f64, r.y1 as f64) {
                    return Err(ProgramError::Geometry(
                        crate::geometry::GeometryError::CoreOutsideFootprint(core.core.id.clone()),
                    ));
                }
            }
        }
    }
    Ok(program)
}

/// Serializes a resolved program back into the document shape; round-trips
/// through `ingest_program` identically.
pub fn emit_program(program: &BuildingProgram) -> ProgramDoc {
    ProgramDoc {
        vertical_connectivity: Some(VerticalConnectivityDoc {
            method: None,
            cores: program
                .cores
                .iter()
                .map(|c| CoreDoc {
                    core_type: c.core.kind.as_str().to_string(),
                    x: [c.core.rect.x0, c.core.rect.x1],
                    y: [c.core.rect.y0, c.core.rect.y1],
                    id: Some(c.core.id.clone()),
                    floors: Some(c.floors.clone()),
                })
                .collect(),
            justification: None,
        }),
        floors: program
            .floors
            .iter()
            .map(|f| FloorDoc {
                index: f.index,
                copy: None,
                footprint: Some(f.footprint.vertices().iter().map(|p| [p.x, p.y]).collect()),
                graph: Some(
                    serde_json::from_str(&crate::topology::json::graph_to_json(&f.graph)).unwrap(),
                ),
                requirement: None,
                gross_floor_area: None,
            })
            .collect(),
        footprint: None,
        cell_size: Some(program.cell_size),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_floor_doc() -> String {
        r#"{
          "vertical_connectivity": {
            "method": "stair",
            "cores": [{"type": "stair", "x": [0, 2], "y": [0, 3], "id": "stair_0"}],
            "justification": "corner placement"
          },
          "floors": [
            {"index": 1,
             "footprint": [[0,0],[12,0],[12,10],[0,10]],
             "graph": {
               "nodes": [
                 {"id": "lobby", "type": "main", "area": 60.0},
                 {"id": "office", "type": "Entities", "area": 40.0},
                 {"id": "stair_0", "type": "stair", "area": 6.0}
               ],
               "edges": [
                 {"source": "lobby", "target": "office", "kind": "access"},
                 {"source": "lobby", "target": "stair_0", "kind": "adjacent"}
               ]
             }},
            {"index": 2, "copy": 1}
          ]
        }"#
        .to_string()
    }

    #[test]
    fn copy_floor_reuses_graph_and_footprint() {
        let program = BuildingProgram::from_json(&two_floor_doc()).unwrap();
        assert_eq!(program.floors.len(), 2);
        assert_eq!(program.floors[0].footprint, program.floors[1].footprint);
        assert_eq!(
            program.floors[0].graph.nodes.len(),
            program.floors[1].graph.nodes.len()
        );
        assert_eq!(program.cores.len(), 1);
        assert_eq!(program.cores_for(1).len(), 1);
        assert_eq!(program.cores_for(2).len(), 1);
    }

    #[test]
    fn forward_copy_is_rejected() {
        let text = r#"{
          "floors": [
            {"index": 1, "copy": 2},
            {"index": 2, "footprint": [[0,0],[4,0],[4,4],[0,4]],
             "graph": {"nodes": [{"id": "a", "type": "main", "area": 10.0}], "edges": []}}
          ]
        }"#;
        assert!(matches!(
            BuildingProgram::from_json(text),
            Err(ProgramError::BadCopy { .. })
        ));
    }

    #[test]
    fn negative_core_coordinates_are_rejected() {
        let text = r#"{
          "vertical_connectivity": {"cores": [{"type": "stair", "x": [-1, 2], "y": [0, 2]}]},
          "floors": [{"index": 1, "footprint": [[0,0],[8,0],[8,8],[0,8]],
            "graph": {"nodes": [{"id": "a", "type": "main", "area": 10.0}], "edges": []}}]
        }"#;
        assert!(matches!(
            BuildingProgram::from_json(text),
            Err(ProgramError::NegativeCoreCoords(0))
        ));
    }

    #[test]
    fn core_outside_footprint_is_rejected() {
        let text = r#"{
          "vertical_connectivity": {"cores": [{"type": "stair", "x": [10, 14], "y": [0, 2]}]},
          "floors": [{"index": 1, "footprint": [[0,0],[8,0],[8,8],[0,8]],
            "graph": {"nodes": [{"id": "a", "type": "main", "area": 10.0}], "edges": []}}]
        }"#;
        assert!(BuildingProgram::from_json(text).is_err());
    }

    #[test]
    fn minimal_one_floor_program_is_valid() {
        let text = r#"{
          "floors": [{"index": 1, "footprint": [[0,0],[6,0],[6,6],[0,6]],
            "graph": {"nodes": [{"id": "studio", "type": "main", "area": 30.0}], "edges": []}}]
        }"#;
        let program = BuildingProgram::from_json(text).unwrap();
        assert_eq!(program.floors.len(), 1);
        assert!(program.cores.is_empty());
    }

    #[test]
    fn program_round_trips_through_emit() {
        let program = BuildingProgram::from_json(&two_floor_doc()).unwrap();
        let doc = emit_program(&program);
        let text = serde_json::to_string(&doc).unwrap();
        let back = BuildingProgram::from_json(&text).unwrap();
        assert_eq!(back.floors.len(), program.floors.len());
        assert_eq!(back.cores.len(), program.cores.len());
        assert_eq!(back.floors[1].footprint, program.floors[1].footprint);
        assert_eq!(back.cores[0].core, program.cores[0].core);
    }
}
