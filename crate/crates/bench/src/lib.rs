//! Shared fixtures for the pipeline benchmarks.

use mansion_core::geometry::{FreeRegion, OrthoPolygon};
use mansion_core::topology::{EdgeKind, RoomEdge, RoomGraph, RoomKind, RoomNode};

pub fn residential_region(side: i64) -> FreeRegion {
    FreeRegion::new(OrthoPolygon::rect(0, 0, side, side).unwrap(), vec![]).unwrap()
}

/// Hub plus `n` rooms in a star, areas split to fill the region.
pub fn star_graph(n: usize, free_area: f64) -> RoomGraph {
    let hub_share = 0.4;
    let mut nodes = vec![RoomNode::new("hub", RoomKind::Main, free_area * hub_share)];
    let mut edges = Vec::new();
    for i in 0..n {
        let id = format!("room_{i}");
        nodes.push(RoomNode::new(
            &id,
            RoomKind::Entity,
            free_area * (1.0 - hub_share) * 0.9 / n as f64,
        ));
        edges.push(RoomEdge {
            source: "hub".into(),
            target: id,
            kind: EdgeKind::Access,
        });
    }
    RoomGraph { nodes, edges }
}
