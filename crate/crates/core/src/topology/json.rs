//! Room-graph JSON: `nodes` with id/type/area/materials/open_relation and
//! `edges` with source/target/kind.

use super::{EdgeKind, OpenRelation, RoomEdge, RoomGraph, RoomKind, RoomNode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unknown node type '{0}'")]
    UnknownNodeType(String),
    #[error("unknown edge kind '{0}'")]
    UnknownEdgeKind(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    #[serde(rename = "type")]
    node_type: String,
    area: f64,
    #[serde(default)]
    floor_material: String,
    #[serde(default)]
    wall_material: String,
    #[serde(default)]
    open_relation: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    source: String,
    target: String,
    #[serde(default)]
    kind: Option<String>,
}

fn kind_from_str(s: &str) -> Result<RoomKind, GraphJsonError> {
    match s {
        "main" => Ok(RoomKind::Main),
        "Entities" | "entity" | "entities" | "Entity" => Ok(RoomKind::Entity),
        "area" => Ok(RoomKind::Area),
        "elevator" => Ok(RoomKind::Elevator),
        "stair" => Ok(RoomKind::Stair),
        other => Err(GraphJsonError::UnknownNodeType(other.to_string())),
    }
}

fn kind_to_str(kind: RoomKind) -> &'static str {
    match kind {
        RoomKind::Main => "main",
        RoomKind::Entity => "Entities",
        RoomKind::Area => "area",
        RoomKind::Elevator => "elevator",
        RoomKind::Stair => "stair",
    }
}

pub fn graph_from_json(text: &str) -> Result<RoomGraph, GraphJsonError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    graph_from_doc(doc)
}

pub fn graph_from_value(value: serde_json::Value) -> Result<RoomGraph, GraphJsonError> {
    let doc: GraphDoc = serde_json::from_value(value)?;
    graph_from_doc(doc)
}

fn graph_from_doc(doc: GraphDoc) -> Result<RoomGraph, GraphJsonError> {
    let nodes = doc
        .nodes
        .into_iter()
        .map(|n| {
            let kind = kind_from_str(&n.node_type)?;
            let open_relation = match n.open_relation.as_deref() {
                Some("open") => OpenRelation::Open,
                Some("door") => OpenRelation::Door,
                Some(other) => return Err(GraphJsonError::UnknownNodeType(other.to_string())),
                None => {
                    if kind == RoomKind::Main {
                        OpenRelation::Open
                    } else {
                        OpenRelation::Door
                    }
                }
            };
            Ok(RoomNode {
                id: n.id,
                kind,
                target_area: n.area,
                open_relation,
                floor_material: n.floor_material,
                wall_material: n.wall_material,
            })
        })
        .collect::<Result<Vec<_>, GraphJsonError>>()?;
    let edges = doc
        .edges
        .into_iter()
        .map(|e| {
            let kind = match e.kind.as_deref() {
                Some("adjacent") | None => EdgeKind::Adjacent,
                Some("access") => EdgeKind::Access,
                Some(other) => return Err(GraphJsonError::UnknownEdgeKind(other.to_string())),
            };
            Ok(RoomEdge {
                source: e.source,
                target: e.target,
                kind,
            })
        })
        .collect::<Result<Vec<_>, GraphJsonError>>()?;
    Ok(RoomGraph { nodes, edges })
}

pub fn graph_to_json(graph: &RoomGraph) -> String {
    let doc = GraphDoc {
        nodes: graph
            .nodes
            .iter()
            .map(|n| NodeDoc {
                id: n.id.clone(),
                node_type: kind_to_str(n.kind).to_string(),
                area: n.target_area,
                floor_material: n.floor_material.clone(),
                wall_material: n.wall_material.clone(),
                open_relation: Some(
                    match n.open_relation {
                        OpenRelation::Open => "open",
                        OpenRelation::Door => "door",
                    }
                    .to_string(),
                ),
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| EdgeDoc {
                source: e.source.clone(),
                target: e.target.clone(),
                kind: Some(
                    match e.kind {
                        EdgeKind::Adjacent => "adjacent",
                        EdgeKind::Access => "access",
                    }
                    .to_string(),
                ),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_schema_sample() {
        let text = r#"{
          "nodes": [
            {"id": "lobby", "type": "main", "area": 80.0,
             "floor_material": "warm oak hardwood, matte",
             "wall_material": "soft beige drywall, smooth", "open_relation": "open"},
            {"id": "office_zone", "type": "area", "area": 30.0,
             "floor_material": "warm oak hardwood, matte",
             "wall_material": "soft beige drywall, smooth", "open_relation": "door"},
            {"id": "room_1", "type": "Entities", "area": 15.0,
             "floor_material": "carpet, neutral gray",
             "wall_material": "painted drywall, white", "open_relation": "door"}
          ],
          "edges": [
            {"source": "lobby", "target": "office_zone", "kind": "adjacent"},
            {"source": "office_zone", "target": "room_1", "kind": "adjacent"}
          ]
        }"#;
        let graph = graph_from_json(text).unwrap();
        assert_eq!(graph.nodes.len(), 3);
        assert_eq!(graph.nodes[0].kind, RoomKind::Main);
        assert_eq!(graph.nodes[2].kind, RoomKind::Entity);
        assert_eq!(graph.edges[0].kind, EdgeKind::Adjacent);
        assert_eq!(super::super::select_hub(&graph).unwrap(), "lobby");

        let back = graph_from_json(&graph_to_json(&graph)).unwrap();
        assert_eq!(back.nodes.len(), graph.nodes.len());
        assert_eq!(back.nodes[2].kind, RoomKind::Entity);
    }

    #[test]
    fn rejects_unknown_type() {
        let text = r#"{"nodes": [{"id": "x", "type": "garage", "area": 1.0}], "edges": []}"#;
        assert!(matches!(
            graph_from_json(text),
            Err(GraphJsonError::UnknownNodeType(_))
        ));
    }
}
