//! Bubble-diagram model: typed room nodes with target areas, typed
//! adjacency/access edges, validation against a free region, hub selection,
//! and construction of the cut schedule the solver consumes.

pub mod json;

use crate::geometry::FreeRegion;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

/// Default fraction of the free area kept back as circulation/core reserve
/// when validating target-area totals.
pub const DEFAULT_RESERVE_RATIO: f64 = 0.12;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("graph has no 'main' node")]
    MissingHub,
    #[error("graph has {0} 'main' nodes, expected exactly one")]
    MultipleHubs(usize),
    #[error("graph is disconnected: {0} unreachable from the hub")]
    Disconnected(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoomKind {
    Main,
    Entity,
    Area,
    Elevator,
    Stair,
}

impl RoomKind {
    pub fn is_core(&self) -> bool {
        matches!(self, RoomKind::Elevator | RoomKind::Stair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpenRelation {
    Open,
    Door,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Adjacent,
    Access,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomNode {
    pub id: String,
    pub kind: RoomKind,
    /// Target area in grid-cell units at solver resolution.
    pub target_area: f64,
    pub open_relation: OpenRelation,
    pub floor_material: String,
    pub wall_material: String,
}

impl RoomNode {
    pub fn new(id: impl Into<String>, kind: RoomKind, target_area: f64) -> Self {
        let open_relation = if kind.is_core() {
            OpenRelation::Door
        } else if kind == RoomKind::Main {
            OpenRelation::Open
        } else {
            OpenRelation::Door
        };
        Self {
            id: id.into(),
            kind,
            target_area,
            open_relation,
            floor_material: String::new(),
            wall_material: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomEdge {
    pub source: String,
    pub target: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomGraph {
    pub nodes: Vec<RoomNode>,
    pub edges: Vec<RoomEdge>,
}

impl RoomGraph {
    pub fn node(&self, id: &str) -> Option<&RoomNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn neighbors(&self, id: &str) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.source == id {
                    Some(e.target.as_str())
                } else if e.target == id {
                    Some(e.source.as_str())
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn non_core_nodes(&self) -> impl Iterator<Item = &RoomNode> {
        self.nodes.iter().filter(|n| !n.kind.is_core())
    }
}

/// One step of the hierarchical splitting schedule: carve `children` out of
/// `parent`'s current region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutRound {
    pub parent: String,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub subjects: Vec<String>,
}

/// Outcome of `validate_graph`: empty (of errors) means the graph satisfies
/// every hard invariant against the given region.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        !self
            .violations
            .iter()
            .any(|v| v.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    fn error(&mut self, code: &str, message: String, subjects: Vec<String>) {
        self.violations.push(Violation {
            severity: Severity::Error,
            code: code.to_string(),
            message,
            subjects,
        });
    }

    fn warning(&mut self, code: &str, message: String, subjects: Vec<String>) {
        self.violations.push(Violation {
            severity: Severity::Warning,
            code: code.to_string(),
            message,
            subjects,
        });
    }
}

/// Checks every graph invariant and the fit against `region`:
/// node typing, hub uniqueness, edge sanity, connectivity, area budget
/// (hard at 100% of the free area, warning above the reserve threshold),
/// and core-node/core-box correspondence.
pub fn validate_graph(graph: &RoomGraph, region: &FreeRegion) -> ValidationReport {
    validate_graph_with_reserve(graph, region, DEFAULT_RESERVE_RATIO)
}

pub fn validate_graph_with_reserve(
    graph: &RoomGraph,
    region: &FreeRegion,
    reserve_ratio: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen_ids = HashSet::new();
    for node in &graph.nodes {
        if !seen_ids.insert(node.id.as_str()) {
            report.error(
                "duplicate-node",
                format!("node id '{}' appears more than once", node.id),
                vec![node.id.clone()],
            );
        }
        if !node.kind.is_core() && node.target_area <= 0.0 {
            report.error(
                "nonpositive-area",
                format!("node '{}' has non-positive target area", node.id),
                vec![node.id.clone()],
            );
        }
        if node.kind.is_core() && node.open_relation != OpenRelation::Door {
            report.error(
                "core-open-relation",
                format!("core node '{}' must have open_relation 'door'", node.id),
                vec![node.id.clone()],
            );
        }
    }

    let hubs: Vec<&RoomNode> = graph.nodes.iter().filter(|n| n.kind == RoomKind::Main).collect();
    match hubs.len() {
        0 => report.error("missing-hub", "no 'main' node present".into(), vec![]),
        1 => {}
        n => report.error(
            "multiple-hubs",
            format!("{n} 'main' nodes present, expected exactly one"),
            hubs.iter().map(|h| h.id.clone()).collect(),
        ),
    }

    let mut pairs = HashSet::new();
    for edge in &graph.edges {
        for end in [&edge.source, &edge.target] {
            if graph.node(end).is_none() {
                report.error(
                    "dangling-edge",
                    format!("edge endpoint '{end}' is not a node"),
                    vec![edge.source.clone(), edge.target.clone()],
                );
            }
        }
        if edge.source == edge.target {
            report.error(
                "self-loop",
                format!("self-loop on '{}'", edge.source),
                vec![edge.source.clone()],
            );
        }
        let key = if edge.source <= edge.target {
            (edge.source.clone(), edge.target.clone())
        } else {
            (edge.target.clone(), edge.source.clone())
        };
        if !pairs.insert(key) {
            report.error(
                "duplicate-edge",
                format!("more than one edge between '{}' and '{}'", edge.source, edge.target),
                vec![edge.source.clone(), edge.target.clone()],
            );
        }
    }

    // connectivity including core nodes
    if let Some(first) = graph.nodes.first() {
        let mut reached = HashSet::new();
        let mut queue = VecDeque::new();
        reached.insert(first.id.as_str());
        queue.push_back(first.id.as_str());
        while let Some(id) = queue.pop_front() {
            for n in graph.neighbors(id) {
                if reached.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        let missing: Vec<String> = graph
            .nodes
            .iter()
            .filter(|n| !reached.contains(n.id.as_str()))
            .map(|n| n.id.clone())
            .collect();
        if !missing.is_empty() {
            report.error(
                "disconnected",
                format!("{} node(s) unreachable from '{}'", missing.len(), first.id),
                missing,
            );
        }
    }

    // area budget against the free region
    let free = region.free_area() as f64;
    let total: f64 = graph.non_core_nodes().map(|n| n.target_area).sum();
    if total > free {
        report.error(
            "area-overflow",
            format!("target areas sum to {total:.1} but the free region has only {free:.1} cells"),
            vec![],
        );
    } else if total > free * (1.0 - reserve_ratio) {
        report.warning(
            "reserve-squeeze",
            format!(
                "target areas sum to {total:.1} of {free:.1} free cells, under the {:.0}% reserve",
                reserve_ratio * 100.0
            ),
            vec![],
        );
    }

    // every core node must match a core box of the region, by id and kind
    for node in &graph.nodes {
        let want = match node.kind {
            RoomKind::Stair => Some(crate::geometry::CoreKind::Stair),
            RoomKind::Elevator => Some(crate::geometry::CoreKind::Elevator),
            _ => None,
        };
        if let Some(kind) = want {
            match region.cores().iter().find(|c| c.id == node.id) {
                None => report.error(
                    "core-unmatched",
                    format!("core node '{}' has no core box in the region", node.id),
                    vec![node.id.clone()],
                ),
                Some(c) if c.kind != kind => report.error(
                    "core-kind-mismatch",
                    format!("core node '{}' is a {:?} but the region box is a {:?}", node.id, node.kind, c.kind),
                    vec![node.id.clone()],
                ),
                _ => {}
            }
        }
    }

    // corner-preference lint: core boxes are expected in footprint corners
    let bbox = region.footprint().bounding_box();
    for core in region.cores() {
        let r = core.rect;
        let on_x = r.x0 == bbox.x0 || r.x1 == bbox.x1;
        let on_y = r.y0 == bbox.y0 || r.y1 == bbox.y1;
        if !(on_x && on_y) {
            report.warning(
                "core-not-in-corner",
                format!("core '{}' does not sit in a footprint corner", core.id),
                vec![core.id.clone()],
            );
        }
    }

    report
}

/// Returns the unique `main` node id.
pub fn select_hub(graph: &RoomGraph) -> Result<&str, TopologyError> {
    let mut hubs = graph.nodes.iter().filter(|n| n.kind == RoomKind::Main);
    let first = hubs.next().ok_or(TopologyError::MissingHub)?;
    let extra = hubs.count();
    if extra > 0 {
        return Err(TopologyError::MultipleHubs(extra + 1));
    }
    Ok(&first.id)
}

/// Builds the cut schedule by breadth-first traversal from the hub.
///
/// Depths come from BFS over all edges (core nodes are traversable so rooms
/// connected only through a stair or elevator still get a depth). Core nodes
/// are excluded from both the parent set and the child clusters. When a node
/// has several shallower neighbors, its parent is the one with the largest
/// target area (ties by id); a core chosen this way is resolved to its own
/// non-core parent. Rounds are ordered by (child depth, parent id), children
/// within a round by descending target area then id.
pub fn build_cut_rounds(graph: &RoomGraph, hub: &str) -> Result<Vec<CutRound>, TopologyError> {
    if graph.node(hub).is_none() {
        return Err(TopologyError::UnknownNode(hub.to_string()));
    }

    let mut depth: HashMap<&str, usize> = HashMap::new();
    depth.insert(hub, 0);
    let mut queue = VecDeque::new();
    queue.push_back(hub);
    while let Some(id) = queue.pop_front() {
        let d = depth[id];
        for n in graph.neighbors(id) {
            if !depth.contains_key(n) {
                depth.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    if let Some(unreached) = graph.nodes.iter().find(|n| !depth.contains_key(n.id.as_str())) {
        return Err(TopologyError::Disconnected(unreached.id.clone()));
    }

    // tree parent per node: best shallower neighbor
    let mut tree_parent: HashMap<&str, &str> = HashMap::new();
    for node in &graph.nodes {
        let id = node.id.as_str();
        if id == hub {
            continue;
        }
        let d = depth[id];
        let mut best: Option<&RoomNode> = None;
        for n in graph.neighbors(id) {
            if depth[n] + 1 != d {
                continue;
            }
            let cand = graph.node(n).expect("neighbor exists");
            best = match best {
                None => Some(cand),
                Some(cur) => {
                    let better = cand.target_area > cur.target_area
                        || (cand.target_area == cur.target_area && cand.id < cur.id);
                    Some(if better { cand } else { cur })
                }
            };
        }
        tree_parent.insert(id, best.expect("BFS reached node via a shallower neighbor").id.as_str());
    }

    // a core parent delegates to its own resolved parent
    fn resolve<'a>(
        id: &'a str,
        hub: &'a str,
        graph: &'a RoomGraph,
        tree_parent: &HashMap<&'a str, &'a str>,
    ) -> &'a str {
        let mut cur = id;
        loop {
            if cur == hub || !graph.node(cur).unwrap().kind.is_core() {
                return cur;
            }
            cur = tree_parent[cur];
        }
    }

    let mut grouped: HashMap<(usize, &str), Vec<&RoomNode>> = HashMap::new();
    for node in &graph.nodes {
        let id = node.id.as_str();
        if id == hub || node.kind.is_core() {
            continue;
        }
        let parent = resolve(tree_parent[id], hub, graph, &tree_parent);
        grouped.entry((depth[id], parent)).or_default().push(node);
    }

    let mut keys: Vec<(usize, &str)> = grouped.keys().copied().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(b.1)));
    let rounds = keys
        .into_iter()
        .map(|key| {
            let mut kids = grouped.remove(&key).unwrap();
            kids.sort_by(|a, b| {
                b.target_area
                    .partial_cmp(&a.target_area)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.id.cmp(&b.id))
            });
            CutRound {
                parent: key.1.to_string(),
                children: kids.into_iter().map(|n| n.id.clone()).collect(),
            }
        })
        .collect();
    Ok(rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CoreBox, CoreKind, GridRect, OrthoPolygon};

    fn region_16x16() -> FreeRegion {
        FreeRegion::new(OrthoPolygon::rect(0, 0, 16, 16).unwrap(), vec![]).unwrap()
    }

    fn edge(a: &str, b: &str) -> RoomEdge {
        RoomEdge {
            source: a.into(),
            target: b.into(),
            kind: EdgeKind::Adjacent,
        }
    }

    #[test]
    fn detects_multiple_hubs() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("a", RoomKind::Main, 10.0),
                RoomNode::new("b", RoomKind::Main, 10.0),
            ],
            edges: vec![edge("a", "b")],
        };
        let report = validate_graph(&graph, &region_16x16());
        assert!(report.errors().any(|v| v.code == "multiple-hubs"));
        assert!(matches!(select_hub(&graph), Err(TopologyError::MultipleHubs(2))));
    }

    #[test]
    fn detects_area_overflow() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 256.0),
                RoomNode::new("b", RoomKind::Entity, 128.0),
            ],
            edges: vec![edge("hub", "b")],
        };
        let report = validate_graph(&graph, &region_16x16());
        assert!(report.errors().any(|v| v.code == "area-overflow"));
    }

    #[test]
    fn valid_house_graph_is_clean() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("living", RoomKind::Main, 100.0),
                RoomNode::new("kitchen", RoomKind::Entity, 40.0),
                RoomNode::new("bedroom", RoomKind::Entity, 50.0),
                RoomNode::new("bath", RoomKind::Entity, 20.0),
                RoomNode::new("hall", RoomKind::Entity, 20.0),
            ],
            edges: vec![
                edge("living", "kitchen"),
                edge("living", "hall"),
                edge("hall", "bedroom"),
                edge("hall", "bath"),
            ],
        };
        let report = validate_graph(&graph, &region_16x16());
        assert!(report.is_ok(), "unexpected: {:?}", report.violations);
        assert_eq!(select_hub(&graph).unwrap(), "living");
    }

    #[test]
    fn rounds_for_chain_and_star() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 50.0),
                RoomNode::new("a", RoomKind::Entity, 30.0),
                RoomNode::new("b", RoomKind::Entity, 20.0),
                RoomNode::new("c", RoomKind::Entity, 10.0),
            ],
            edges: vec![edge("hub", "a"), edge("hub", "b"), edge("a", "c")],
        };
        let rounds = build_cut_rounds(&graph, "hub").unwrap();
        assert_eq!(
            rounds,
            vec![
                CutRound {
                    parent: "hub".into(),
                    children: vec!["a".into(), "b".into()],
                },
                CutRound {
                    parent: "a".into(),
                    children: vec!["c".into()],
                },
            ]
        );
    }

    #[test]
    fn star_graph_single_round() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 40.0),
                RoomNode::new("a", RoomKind::Entity, 30.0),
                RoomNode::new("b", RoomKind::Entity, 30.0),
                RoomNode::new("c", RoomKind::Entity, 30.0),
            ],
            edges: vec![edge("hub", "a"), edge("hub", "b"), edge("hub", "c")],
        };
        let rounds = build_cut_rounds(&graph, "hub").unwrap();
        assert_eq!(rounds.len(), 1);
        assert_eq!(rounds[0].children, vec!["a", "b", "c"]);
    }

    #[test]
    fn core_only_children_produce_no_rounds() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 40.0),
                RoomNode::new("stair_0", RoomKind::Stair, 4.0),
            ],
            edges: vec![edge("hub", "stair_0")],
        };
        let rounds = build_cut_rounds(&graph, "hub").unwrap();
        assert!(rounds.is_empty());
    }

    #[test]
    fn room_behind_core_is_parented_to_noncore_ancestor() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 40.0),
                RoomNode::new("stair_0", RoomKind::Stair, 4.0),
                RoomNode::new("attic", RoomKind::Entity, 12.0),
            ],
            edges: vec![edge("hub", "stair_0"), edge("stair_0", "attic")],
        };
        let rounds = build_cut_rounds(&graph, "hub").unwrap();
        assert_eq!(rounds.len(), 1);
        assert_eq!(rounds[0].parent, "hub");
        assert_eq!(rounds[0].children, vec!["attic"]);
    }

    #[test]
    fn parent_before_child_and_full_coverage() {
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 60.0),
                RoomNode::new("a", RoomKind::Entity, 40.0),
                RoomNode::new("b", RoomKind::Entity, 30.0),
                RoomNode::new("c", RoomKind::Entity, 20.0),
                RoomNode::new("d", RoomKind::Entity, 10.0),
                RoomNode::new("stair_0", RoomKind::Stair, 4.0),
            ],
            edges: vec![
                edge("hub", "a"),
                edge("hub", "b"),
                edge("a", "c"),
                edge("b", "c"),
                edge("c", "d"),
                edge("hub", "stair_0"),
            ],
        };
        let rounds = build_cut_rounds(&graph, "hub").unwrap();
        let mut seen: Vec<&str> = vec!["hub"];
        for round in &rounds {
            assert!(seen.contains(&round.parent.as_str()), "parent before child violated");
            for c in &round.children {
                seen.push(c);
            }
        }
        let mut all: Vec<&str> = seen[1..].to_vec();
        all.sort_unstable();
        assert_eq!(all, vec!["a", "b", "c", "d"]);
        // c has two shallower neighbors; a has the larger area and wins
        assert!(rounds.iter().any(|r| r.parent == "a" && r.children.contains(&"c".to_string())));
    }

    #[test]
    fn core_box_matching_is_validated() {
        let region = FreeRegion::new(
            OrthoPolygon::rect(0, 0, 16, 16).unwrap(),
            vec![CoreBox {
                id: "stair_0".into(),
                kind: CoreKind::Stair,
                rect: GridRect::new(0, 0, 2, 2),
            }],
        )
        .unwrap();
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 100.0),
                RoomNode::new("stair_9", RoomKind::Stair, 4.0),
            ],
            edges: vec![edge("hub", "stair_9")],
        };
        let report = validate_graph(&graph, &region);
        assert!(report.errors().any(|v| v.code == "core-unmatched"));
    }
}
