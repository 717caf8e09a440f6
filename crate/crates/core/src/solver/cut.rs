//! Topology-aware cutting node.
//!
//! For one cut round, samples seed perturbations in widening discs around
//! the planned seeds, grows a batch of candidate partitions per retry,
//! filters them by the hard topology predicate, and merges the lowest-energy
//! survivor. When every retry fails the node falls back to Monte-Carlo
//! seeding; when that fails too, it reports infeasibility carrying the best
//! attempt for diagnostics.

use super::check::{merge_candidate, verify_topology_scoped, LabelBinding};
use super::energy::{score_candidate, ParentEnvelope, SeedContext};
use super::grow::{grow_partition, GrowSeed};
use super::{CandidatePartition, SeedPlan, SolverConfig, SolverError};
use crate::geometry::{CellRect, GridLabelMap, Label};
use crate::rng;
use crate::solver::EnergyWeights;
use crate::topology::{CutRound, RoomGraph};
use rand::Rng;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct CandidateTrace {
    pub feasible: bool,
    pub energy: f64,
    pub candidate: CandidatePartition,
}

#[derive(Debug, Clone)]
pub struct BatchTrace {
    pub candidates: Vec<CandidateTrace>,
    pub winner: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct CutTrace {
    pub parent: String,
    /// Plan-seed context per child (grid coordinates, target cells), in
    /// round order; lets auditors re-score stored candidates from scratch.
    pub seed_ctx: Vec<SeedContext>,
    pub retries: Vec<BatchTrace>,
    pub fallback: Option<BatchTrace>,
    /// Retry index that produced the merged candidate; `None` means the
    /// fallback produced it.
    pub winner_retry: Option<usize>,
}

/// Per-child plan context resolved against the graph and the parent region.
struct ChildPlan {
    label: u32,
    seed: (f64, f64), // grid coordinates (cells)
    target_cells: usize,
}

pub fn cut_node(
    layout: &GridLabelMap,
    round: &CutRound,
    graph: &RoomGraph,
    binding: &LabelBinding,
    plan: &SeedPlan,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<GridLabelMap, SolverError> {
    cut_node_inner(layout, round, graph, binding, plan, cfg, weights, None)
}

/// Like [`cut_node`] but records every evaluated batch for auditing.
pub fn cut_node_traced(
    layout: &GridLabelMap,
    round: &CutRound,
    graph: &RoomGraph,
    binding: &LabelBinding,
    plan: &SeedPlan,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<(GridLabelMap, CutTrace), SolverError> {
    let mut trace = CutTrace {
        parent: round.parent.clone(),
        ..CutTrace::default()
    };
    let map = cut_node_inner(layout, round, graph, binding, plan, cfg, weights, Some(&mut trace))?;
    Ok((map, trace))
}

#[allow(clippy::too_many_arguments)]
fn cut_node_inner(
    layout: &GridLabelMap,
    round: &CutRound,
    graph: &RoomGraph,
    binding: &LabelBinding,
    plan: &SeedPlan,
    cfg: &SolverConfig,
    weights: &EnergyWeights,
    mut trace: Option<&mut CutTrace>,
) -> Result<GridLabelMap, SolverError> {
    cfg.sampling.validate().map_err(SolverError::BadConfig)?;
    weights.validate().map_err(SolverError::BadConfig)?;

    let parent_idx = binding
        .room_index(&round.parent)
        .ok_or_else(|| SolverError::UnknownRoom(round.parent.clone()))?;
    let parent_label = Label::Room(parent_idx);
    let parent_cells = layout.cells_with(parent_label);
    if parent_cells.is_empty() {
        return Err(SolverError::ParentNotRealized(round.parent.clone()));
    }
    if parent_cells.len() < round.children.len() {
        return Err(SolverError::ParentTooSmall {
            parent: round.parent.clone(),
            cells: parent_cells.len(),
            children: round.children.len(),
        });
    }

    let children = resolve_children(round, graph, binding, plan, layout, parent_cells.len())?;
    let dims = (layout.width(), layout.height());
    let envelope = ParentEnvelope::of(dims, &parent_cells);
    let seed_ctx: Vec<SeedContext> = children
        .iter()
        .map(|c| SeedContext {
            room: c.label,
            seed: c.seed,
            target_cells: c.target_cells as f64,
        })
        .collect();

    // base perturbation radius per child: r_base + k * area fraction
    let radii: Vec<f64> = children
        .iter()
        .map(|c| cfg.sampling.r_base + cfg.sampling.k * c.target_cells as f64 / parent_cells.len() as f64)
        .collect();

    let child_targets: usize = children.iter().map(|c| c.target_cells).sum();
    let remainder_target = parent_cells.len().saturating_sub(child_targets);

    // labels whose geometry this cut may change
    let mut scope: Vec<Label> = children.iter().map(|c| Label::Room(c.label)).collect();
    scope.push(parent_label);

    // cell counts of labels untouched by this cut, for realized-ness checks
    let mut realized_outside: HashMap<Label, usize> = HashMap::new();
    for l in layout.cells() {
        *realized_outside.entry(*l).or_insert(0) += 1;
    }

    let bbox = parent_bbox(layout, &parent_cells);
    let window = CellRect {
        x0: bbox.x0.saturating_sub(1),
        y0: bbox.y0.saturating_sub(1),
        x1: bbox.x1 + 1,
        y1: bbox.y1 + 1,
    };

    let eval = |mode_tag: &str, batch_idx: u64, cand_idx: u64| -> Result<CandidateTrace, SolverError> {
        let mut stream = rng::stream(cfg.sampling.rng_seed, &["cut", &round.parent, mode_tag], &[batch_idx, cand_idx]);
        let seeds = if mode_tag == "retry" {
            sample_perturbed_seeds(
                &mut stream,
                &children,
                &radii,
                cfg.sampling.gamma_at(batch_idx as usize),
                cfg.sampling.min_seed_separation,
                &parent_cells,
                dims,
            )
        } else {
            sample_monte_carlo_seeds(
                &mut stream,
                &children,
                cfg.sampling.min_seed_separation,
                &parent_cells,
                dims,
            )
        };
        let mut grow_seeds: Vec<GrowSeed> = children
            .iter()
            .zip(&seeds)
            .map(|(c, &cell)| GrowSeed {
                room: c.label,
                cell,
                target_cells: c.target_cells,
            })
            .collect();
        let parent_participates = remainder_target >= 1 && parent_cells.len() > seeds.len();
        if parent_participates {
            let cell = farthest_parent_cell(&parent_cells, &seeds, dims.0 as usize);
            grow_seeds.push(GrowSeed {
                room: parent_idx,
                cell,
                target_cells: remainder_target.max(1),
            });
        }
        let grown = grow_partition(dims, &parent_cells, &grow_seeds)?;
        let mut candidate = CandidatePartition {
            parent: parent_idx,
            parent_remainder: if parent_participates {
                grown.children.last().unwrap().cells.clone()
            } else {
                Vec::new()
            },
            children: grown.children[..children.len()].to_vec(),
            unassigned: grown.unassigned,
            features: None,
            energy: None,
            feasible: false,
        };
        let merged = merge_candidate(layout, &candidate);
        let feasible = verify_topology_scoped(
            &merged,
            graph,
            binding,
            cfg.min_contact,
            window,
            &scope,
            &realized_outside,
            parent_label,
            candidate.parent_remainder.len(),
        );
        candidate.feasible = feasible;
        let energy = score_candidate(&mut candidate, &seed_ctx, &envelope, weights)?;
        Ok(CandidateTrace {
            feasible,
            energy,
            candidate,
        })
    };

    if let Some(t) = trace.as_deref_mut() {
        t.seed_ctx = seed_ctx.clone();
    }

    let mut best_attempt: Option<CandidateTrace> = None;
    let mut tried = 0usize;

    for retry in 0..cfg.sampling.n_retry {
        let batch: Vec<Result<CandidateTrace, SolverError>> = (0..cfg.sampling.batch_size)
            .into_par_iter()
            .map(|i| eval("retry", retry as u64, i as u64))
            .collect();
        let batch: Result<Vec<CandidateTrace>, SolverError> = batch.into_iter().collect();
        let batch = batch?;
        tried += batch.len();
        let winner = pick_winner(&batch);
        if let Some(t) = trace.as_deref_mut() {
            t.retries.push(BatchTrace {
                candidates: batch.clone(),
                winner,
            });
        }
        track_best(&mut best_attempt, &batch);
        if let Some(w) = winner {
            if let Some(t) = trace.as_deref_mut() {
                t.winner_retry = Some(retry);
            }
            let merged = merge_candidate(layout, &batch[w].candidate);
            return Ok(merged);
        }
    }

    // Monte-Carlo fallback: uniform seeds with repulsion, same pipeline
    let budget = cfg.effective_mc_budget();
    let batch: Vec<Result<CandidateTrace, SolverError>> = (0..budget)
        .into_par_iter()
        .map(|i| eval("mc", 0, i as u64))
        .collect();
    let batch: Result<Vec<CandidateTrace>, SolverError> = batch.into_iter().collect();
    let batch = batch?;
    tried += batch.len();
    let winner = pick_winner(&batch);
    track_best(&mut best_attempt, &batch);
    if let Some(t) = trace.as_deref_mut() {
        t.fallback = Some(BatchTrace {
            candidates: batch.clone(),
            winner,
        });
        t.winner_retry = None;
    }
    if let Some(w) = winner {
        let merged = merge_candidate(layout, &batch[w].candidate);
        return Ok(merged);
    }

    Err(SolverError::Infeasible {
        parent: round.parent.clone(),
        tried,
        best_attempt: best_attempt.map(|t| Box::new(t.candidate)),
    })
}

fn resolve_children(
    round: &CutRound,
    graph: &RoomGraph,
    binding: &LabelBinding,
    plan: &SeedPlan,
    layout: &GridLabelMap,
    parent_cells: usize,
) -> Result<Vec<ChildPlan>, SolverError> {
    let missing: Vec<String> = round
        .children
        .iter()
        .filter(|c| plan.entry(c).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(SolverError::SeedPlanIncomplete(missing));
    }
    let alloc: f64 = round
        .children
        .iter()
        .filter_map(|c| plan.entry(c).and_then(|e| e.area_fraction))
        .sum();
    if alloc > 1.05 {
        return Err(SolverError::SeedPlanOverAllocated(alloc));
    }
    let (ox, oy) = layout.origin();
    round
        .children
        .iter()
        .map(|child| {
            let label = binding
                .room_index(child)
                .ok_or_else(|| SolverError::UnknownRoom(child.clone()))?;
            let entry = plan.entry(child).expect("checked above");
            let (wx, wy) = entry.geom.center();
            let target_cells = match entry.area_fraction {
                Some(frac) => ((frac * parent_cells as f64).round() as usize).max(1),
                None => {
                    let node = graph
                        .node(child)
                        .ok_or_else(|| SolverError::UnknownRoom(child.clone()))?;
                    if node.target_area <= 0.0 {
                        return Err(SolverError::ZeroTargetArea(child.clone()));
                    }
                    (node.target_area.round() as usize).max(1)
                }
            };
            Ok(ChildPlan {
                label,
                seed: (wx - ox as f64, wy - oy as f64),
                target_cells,
            })
        })
        .collect()
}

fn parent_bbox(layout: &GridLabelMap, cells: &[usize]) -> CellRect {
    let mut x0 = u32::MAX;
    let mut y0 = u32::MAX;
    let mut x1 = 0;
    let mut y1 = 0;
    for &c in cells {
        let (x, y) = layout.coords(c);
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x + 1);
        y1 = y1.max(y + 1);
    }
    CellRect { x0, y0, x1, y1 }
}

/// Draws one perturbed seed cell per child inside a disc of radius
/// `gamma * R_r` around the planned seed; points outside the parent are
/// projected to the nearest parent cell. Re-draws up to 16 times to honor
/// the minimum pairwise separation, then relaxes.
fn sample_perturbed_seeds(
    rng: &mut impl Rng,
    children: &[ChildPlan],
    radii: &[f64],
    gamma: f64,
    min_separation: f64,
    parent_cells: &[usize],
    dims: (u32, u32),
) -> Vec<usize> {
    let width = dims.0 as usize;
    let mut chosen: Vec<usize> = Vec::with_capacity(children.len());
    for (child, &r0) in children.iter().zip(radii) {
        let radius = gamma * r0;
        let mut accepted = None;
        let mut last = None;
        for _ in 0..16 {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let rad = radius * rng.random::<f64>().sqrt();
            let px = child.seed.0 + rad * theta.cos();
            let py = child.seed.1 + rad * theta.sin();
            let cell = nearest_free_cell(parent_cells, &chosen, (px, py), width);
            last = Some(cell);
            if separated(cell, &chosen, min_separation, width) {
                accepted = Some(cell);
                break;
            }
        }
        chosen.push(accepted.or(last).expect("at least one draw"));
    }
    chosen
}

/// Uniform seeds over the parent cells, drawn in decreasing target order
/// with repulsion, then mapped back to child order.
fn sample_monte_carlo_seeds(
    rng: &mut impl Rng,
    children: &[ChildPlan],
    min_separation: f64,
    parent_cells: &[usize],
    dims: (u32, u32),
) -> Vec<usize> {
    let width = dims.0 as usize;
    let mut order: Vec<usize> = (0..children.len()).collect();
    order.sort_by(|&a, &b| {
        children[b]
            .target_cells
            .cmp(&children[a].target_cells)
            .then(a.cmp(&b))
    });
    let mut chosen_by_child = vec![usize::MAX; children.len()];
    let mut chosen: Vec<usize> = Vec::with_capacity(children.len());
    for &k in &order {
        let mut accepted = None;
        let mut last = None;
        for _ in 0..16 {
            let pick = parent_cells[rng.random_range(0..parent_cells.len())];
            if chosen.contains(&pick) {
                continue;
            }
            last = Some(pick);
            if separated(pick, &chosen, min_separation, width) {
                accepted = Some(pick);
                break;
            }
        }
        let cell = accepted.or(last).unwrap_or_else(|| {
            // all draws collided with chosen cells: deterministic fallback
            *parent_cells
                .iter()
                .find(|c| !chosen.contains(c))
                .expect("parent larger than seed count")
        });
        chosen_by_child[k] = cell;
        chosen.push(cell);
    }
    chosen_by_child
}

fn separated(cell: usize, chosen: &[usize], min_separation: f64, width: usize) -> bool {
    let (x, y) = ((cell % width) as f64, (cell / width) as f64);
    chosen.iter().all(|&c| {
        let (cx, cy) = ((c % width) as f64, (c / width) as f64);
        let d2 = (x - cx).powi(2) + (y - cy).powi(2);
        d2 >= min_separation * min_separation
    })
}

/// Nearest parent cell to a point, excluding already-used cells. Distance is
/// measured to cell centers; ties break on the lower cell index.
fn nearest_free_cell(parent_cells: &[usize], used: &[usize], point: (f64, f64), width: usize) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &c in parent_cells {
        if used.contains(&c) {
            continue;
        }
        let cx = (c % width) as f64 + 0.5;
        let cy = (c / width) as f64 + 0.5;
        let d2 = (cx - point.0).powi(2) + (cy - point.1).powi(2);
        if d2 < best.0 || (d2 == best.0 && c < best.1) {
            best = (d2, c);
        }
    }
    best.1
}

/// Parent cell with the maximum distance to the nearest child seed; the
/// parent remainder grows from here.
fn farthest_parent_cell(parent_cells: &[usize], seeds: &[usize], width: usize) -> usize {
    let mut best = (-1.0f64, usize::MAX);
    for &c in parent_cells {
        if seeds.contains(&c) {
            continue;
        }
        let cx = (c % width) as f64;
        let cy = (c / width) as f64;
        let mut nearest = f64::INFINITY;
        for &s in seeds {
            let sx = (s % width) as f64;
            let sy = (s / width) as f64;
            nearest = nearest.min((cx - sx).powi(2) + (cy - sy).powi(2));
        }
        if nearest > best.0 || (nearest == best.0 && c < best.1) {
            best = (nearest, c);
        }
    }
    best.1
}

fn pick_winner(batch: &[CandidateTrace]) -> Option<usize> {
    let mut winner: Option<usize> = None;
    for (i, cand) in batch.iter().enumerate() {
        if !cand.feasible {
            continue;
        }
        winner = match winner {
            None => Some(i),
            Some(w) => {
                if cand.energy < batch[w].energy {
                    Some(i)
                } else {
                    Some(w)
                }
            }
        };
    }
    winner
}

fn track_best(best: &mut Option<CandidateTrace>, batch: &[CandidateTrace]) {
    for cand in batch {
        let better = match best {
            None => true,
            Some(b) => cand.energy < b.energy,
        };
        if better {
            *best = Some(cand.clone());
        }
    }
}
