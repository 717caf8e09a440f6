//! Single-floor topology-driven solve: initialize the layout with cores
//! carved and the hub owning every free cell, then apply the cutting node
//! round by round along the cut schedule.

use super::check::LabelBinding;
use super::cut::{cut_node_traced, CutTrace};
use super::seeds::{SeedProvider, SeedRequest, SeedRequestChild};
use super::{SolverConfig, SolverError};
use crate::geometry::{free_cells, FreeRegion, GridLabelMap, Label};
use crate::solver::EnergyWeights;
use crate::topology::{build_cut_rounds, select_hub, validate_graph, CutRound, RoomGraph};

/// A solved floor: the raw label map (before post-processing) plus the
/// binding from grid labels back to graph node and core ids.
#[derive(Debug, Clone)]
pub struct SolvedFloor {
    pub map: GridLabelMap,
    pub binding: LabelBinding,
    pub rounds: Vec<CutRound>,
    pub traces: Vec<CutTrace>,
}

pub fn solve_floor(
    region: &FreeRegion,
    graph: &RoomGraph,
    provider: &mut dyn SeedProvider,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<SolvedFloor, SolverError> {
    solve_floor_impl(region, graph, provider, cfg, weights, false)
}

/// Like [`solve_floor`] but retains per-round candidate traces.
pub fn solve_floor_traced(
    region: &FreeRegion,
    graph: &RoomGraph,
    provider: &mut dyn SeedProvider,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<SolvedFloor, SolverError> {
    solve_floor_impl(region, graph, provider, cfg, weights, true)
}

fn solve_floor_impl(
    region: &FreeRegion,
    graph: &RoomGraph,
    provider: &mut dyn SeedProvider,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
    traced: bool,
) -> Result<SolvedFloor, SolverError> {
    let report = validate_graph(graph, region);
    if !report.is_ok() {
        return Err(SolverError::InvalidGraph(Box::new(report)));
    }
    let hub = select_hub(graph)?.to_string();
    let binding = LabelBinding::new(graph, region)?;
    let rounds = build_cut_rounds(graph, &hub)?;

    // init: cores carved, hub owns every free cell
    let mut map = free_cells(region, 1)?;
    let hub_label = binding.label_of(&hub).expect("hub is bound");
    for i in 0..map.len() {
        if map.get_idx(i) == Label::Empty {
            map.set_idx(i, hub_label);
        }
    }

    let mut traces = Vec::new();
    for round in &rounds {
        let parent_label = binding
            .label_of(&round.parent)
            .ok_or_else(|| SolverError::UnknownRoom(round.parent.clone()))?;
        let parent_kind = graph
            .node(&round.parent)
            .map(|n| format!("{:?}", n.kind).to_lowercase())
            .unwrap_or_default();
        let parent_cells = map.count(parent_label);
        let children: Vec<SeedRequestChild> = round
            .children
            .iter()
            .map(|id| {
                let node = graph.node(id).ok_or_else(|| SolverError::UnknownRoom(id.clone()))?;
                Ok(SeedRequestChild {
                    room_id: id.clone(),
                    target_area: node.target_area,
                    target_cells: (node.target_area.round() as usize).max(1).min(parent_cells),
                })
            })
            .collect::<Result<_, SolverError>>()?;
        let request = SeedRequest::from_layout(&map, &round.parent, &parent_kind, parent_label, children);
        let plan = provider.plan_seeds(&request)?;
        if traced {
            let (next, trace) = cut_node_traced(&map, round, graph, &binding, &plan, cfg, weights)?;
            map = next;
            traces.push(trace);
        } else {
            map = super::cut::cut_node(&map, round, graph, &binding, &plan, cfg, weights)?;
        }
    }

    Ok(SolvedFloor {
        map,
        binding,
        rounds,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OrthoPolygon;
    use crate::solver::seeds::MonteCarloSeeds;
    use crate::topology::{EdgeKind, RoomEdge, RoomKind, RoomNode};

    fn hub_only_graph() -> RoomGraph {
        RoomGraph {
            nodes: vec![RoomNode::new("hub", RoomKind::Main, 64.0)],
            edges: vec![],
        }
    }

    #[test]
    fn hub_only_graph_owns_all_free_cells() {
        let region = FreeRegion::new(OrthoPolygon::rect(0, 0, 8, 8).unwrap(), vec![]).unwrap();
        let graph = hub_only_graph();
        let mut provider = MonteCarloSeeds::new(0);
        let solved = solve_floor(
            &region,
            &graph,
            &mut provider,
            &SolverConfig::default(),
            &EnergyWeights::default(),
        )
        .unwrap();
        assert_eq!(solved.map.count(Label::Room(0)), 64);
        assert!(solved.rounds.is_empty());
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let region = FreeRegion::new(OrthoPolygon::rect(0, 0, 4, 4).unwrap(), vec![]).unwrap();
        let graph = RoomGraph {
            nodes: vec![RoomNode::new("a", RoomKind::Entity, 4.0)],
            edges: vec![],
        };
        let mut provider = MonteCarloSeeds::new(0);
        let err = solve_floor(
            &region,
            &graph,
            &mut provider,
            &SolverConfig::default(),
            &EnergyWeights::default(),
        );
        assert!(matches!(err, Err(SolverError::InvalidGraph(_))));
    }

    #[test]
    fn deterministic_across_runs_and_thread_counts() {
        let region = FreeRegion::new(OrthoPolygon::rect(0, 0, 12, 10).unwrap(), vec![]).unwrap();
        let graph = RoomGraph {
            nodes: vec![
                RoomNode::new("hub", RoomKind::Main, 50.0),
                RoomNode::new("a", RoomKind::Entity, 40.0),
                RoomNode::new("b", RoomKind::Entity, 30.0),
            ],
            edges: vec![
                RoomEdge { source: "hub".into(), target: "a".into(), kind: EdgeKind::Access },
                RoomEdge { source: "hub".into(), target: "b".into(), kind: EdgeKind::Access },
            ],
        };
        let mut cfg = SolverConfig::default();
        cfg.sampling.batch_size = 16;
        cfg.sampling.n_retry = 4;
        cfg.sampling.rng_seed = 11;
        let weights = EnergyWeights::default();

        let solve = || {
            let mut provider = MonteCarloSeeds::new(11);
            solve_floor(&region, &graph, &mut provider, &cfg, &weights)
                .unwrap()
                .map
        };
        let a = solve();
        let b = solve();
        assert_eq!(a, b);

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(solve);
        assert_eq!(a, single);
    }
}
