//! Per-room energy features and candidate scoring.
//!
//! For every child room r with realized cell set P_r, target area a_r and
//! plan seed c_r:
//!
//! - `f_ratio(r) = |area(P_r) - a_r| / a_r`
//! - `f_seed(r)` = Euclidean distance from the centroid of P_r to c_r,
//!   min-max normalized across the round's rooms within one candidate and
//!   clamped to [0, 1] (`z_seed`)
//! - `f_wall(r)` = boundary length shared with the parent-region envelope,
//!   divided by the room's own perimeter and clamped to [0, 1]
//! - `f_corner(r) = max(0, n_int(r) - 4)` where `n_int` counts non-collinear
//!   corners of P_r that do not lie on the parent envelope
//!
//! `e(r) = w_ratio*f_ratio + w_seed*z_seed + w_corner*f_corner - w_wall*f_wall`,
//! the candidate energy is the sum over child rooms, and the search score is
//! its negation.

use super::{CandidatePartition, EnergyWeights, SolverError};
use serde::{Deserialize, Serialize};

/// Plan-seed context for one child room: the unperturbed seed point (grid
/// coordinates, cell units) and the target cell count for this round.
#[derive(Debug, Clone, Copy)]
pub struct SeedContext {
    pub room: u32,
    pub seed: (f64, f64),
    pub target_cells: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomFeatures {
    pub room: u32,
    pub area_cells: usize,
    pub f_ratio: f64,
    pub f_seed: f64,
    pub z_seed: f64,
    pub f_wall_raw: f64,
    pub f_wall: f64,
    pub n_int: u32,
    pub f_corner: f64,
    pub energy: f64,
}

/// Envelope of a parent region: its boundary unit edges (as per-cell
/// direction masks) and the lattice vertices those edges touch.
pub struct ParentEnvelope {
    width: usize,
    height: usize,
    edge_mask: Vec<u8>,
    on_envelope_vertex: Vec<bool>,
    pub cell_count: usize,
}

const EAST: u8 = 1;
const WEST: u8 = 2;
const NORTH: u8 = 4;
const SOUTH: u8 = 8;

impl ParentEnvelope {
    pub fn of(dims: (u32, u32), parent_cells: &[usize]) -> Self {
        let width = dims.0 as usize;
        let height = dims.1 as usize;
        let mut inside = vec![false; width * height];
        for &c in parent_cells {
            inside[c] = true;
        }
        let mut edge_mask = vec![0u8; width * height];
        let mut on_vertex = vec![false; (width + 1) * (height + 1)];
        let vstride = width + 1;
        for &c in parent_cells {
            let x = c % width;
            let y = c / width;
            let mut mark = |dir: u8, v1: (usize, usize), v2: (usize, usize)| {
                edge_mask[c] |= dir;
                on_vertex[v1.1 * vstride + v1.0] = true;
                on_vertex[v2.1 * vstride + v2.0] = true;
            };
            if x + 1 >= width || !inside[c + 1] {
                mark(EAST, (x + 1, y), (x + 1, y + 1));
            }
            if x == 0 || !inside[c - 1] {
                mark(WEST, (x, y), (x, y + 1));
            }
            if y + 1 >= height || !inside[c + width] {
                mark(NORTH, (x, y + 1), (x + 1, y + 1));
            }
            if y == 0 || !inside[c - width] {
                mark(SOUTH, (x, y), (x + 1, y));
            }
        }
        Self {
            width,
            height,
            edge_mask,
            on_envelope_vertex: on_vertex,
            cell_count: parent_cells.len(),
        }
    }

    #[inline]
    fn envelope_edges_of_cell(&self, cell: usize) -> u32 {
        self.edge_mask[cell].count_ones()
    }

    #[inline]
    fn vertex_on_envelope(&self, vx: usize, vy: usize) -> bool {
        self.on_envelope_vertex[vy * (self.width + 1) + vx]
    }
}

/// Computes features and total energy for a candidate, writing them into the
/// candidate and returning the energy. `seeds` must follow the order of
/// `candidate.children`.
pub fn score_candidate(
    candidate: &mut CandidatePartition,
    seeds: &[SeedContext],
    envelope: &ParentEnvelope,
    weights: &EnergyWeights,
) -> Result<f64, SolverError> {
    let width = envelope.width;
    let mut features = Vec::with_capacity(candidate.children.len());

    // pass 1: everything but the seed normalization
    let mut seed_dists = Vec::with_capacity(candidate.children.len());
    for (child, ctx) in candidate.children.iter().zip(seeds) {
        debug_assert_eq!(child.room, ctx.room);
        if ctx.target_cells <= 0.0 {
            return Err(SolverError::BadSeedTarget(ctx.room));
        }
        let area = child.cells.len();
        let f_ratio = (area as f64 - ctx.target_cells).abs() / ctx.target_cells;

        let mut cx = 0.0;
        let mut cy = 0.0;
        for &c in &child.cells {
            cx += (c % width) as f64 + 0.5;
            cy += (c / width) as f64 + 0.5;
        }
        let n = area.max(1) as f64;
        cx /= n;
        cy /= n;
        let f_seed = ((cx - ctx.seed.0).powi(2) + (cy - ctx.seed.1).powi(2)).sqrt();
        seed_dists.push(f_seed);

        let (f_wall_raw, perimeter) = wall_contact(child.cells.as_slice(), envelope);
        let f_wall = if perimeter > 0.0 {
            (f_wall_raw / perimeter).clamp(0.0, 1.0)
        } else {
            0.0
        };

        let n_int = interior_corners(child.cells.as_slice(), envelope);
        let f_corner = (n_int as f64 - 4.0).max(0.0);

        features.push(RoomFeatures {
            room: child.room,
            area_cells: area,
            f_ratio,
            f_seed,
            z_seed: 0.0,
            f_wall_raw,
            f_wall,
            n_int,
            f_corner,
            energy: 0.0,
        });
    }

    // pass 2: min-max normalize seed distances within this candidate
    let min = seed_dists.iter().copied().fold(f64::INFINITY, f64::min);
    let max = seed_dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for feat in &mut features {
        feat.z_seed = if seed_dists.is_empty() {
            0.0
        } else {
            ((feat.f_seed - min) / (max - min + weights.epsilon)).clamp(0.0, 1.0)
        };
        feat.energy = weights.w_ratio * feat.f_ratio
            + weights.w_seed * feat.z_seed
            + weights.w_corner * feat.f_corner
            - weights.w_wall * feat.f_wall;
        total += feat.energy;
    }

    candidate.features = Some(features);
    candidate.energy = Some(total);
    Ok(total)
}

/// Returns (envelope contact length, perimeter) of a room cell set, both in
/// unit cell edges.
fn wall_contact(cells: &[usize], envelope: &ParentEnvelope) -> (f64, f64) {
    let width = envelope.width;
    let height = envelope.height;
    let mut inside = vec![false; width * height];
    for &c in cells {
        inside[c] = true;
    }
    let mut contact = 0u32;
    let mut perimeter = 0u32;
    for &c in cells {
        let x = c % width;
        let y = c / width;
        let mut side = |neighbor_in: bool| {
            if !neighbor_in {
                perimeter += 1;
            }
        };
        side(x + 1 < width && inside[c + 1]);
        side(x > 0 && inside[c - 1]);
        side(y + 1 < height && inside[c + width]);
        side(y > 0 && inside[c - width]);
        contact += envelope.envelope_edges_of_cell(c);
    }
    (contact as f64, perimeter as f64)
}

/// Counts boundary corners of the cell set that do not lie on the parent
/// envelope. A lattice vertex is a corner when the four surrounding cells
/// show a turning pattern: exactly 1 or 3 of them inside, or the two inside
/// cells diagonal to each other (which counts twice).
fn interior_corners(cells: &[usize], envelope: &ParentEnvelope) -> u32 {
    let width = envelope.width;
    let height = envelope.height;
    let mut inside = vec![false; width * height];
    for &c in cells {
        inside[c] = true;
    }
    let at = |x: i64, y: i64| -> bool {
        if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
            return false;
        }
        inside[y as usize * width + x as usize]
    };

    let mut candidates: Vec<(usize, usize)> = Vec::with_capacity(cells.len());
    let mut seen = std::collections::HashSet::new();
    for &c in cells {
        let x = c % width;
        let y = c / width;
        for v in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
            if seen.insert(v) {
                candidates.push(v);
            }
        }
    }

    let mut n_int = 0u32;
    for (vx, vy) in candidates {
        let sw = at(vx as i64 - 1, vy as i64 - 1);
        let se = at(vx as i64, vy as i64 - 1);
        let nw = at(vx as i64 - 1, vy as i64);
        let ne = at(vx as i64, vy as i64);
        let count = sw as u8 + se as u8 + nw as u8 + ne as u8;
        let multiplicity = match count {
            1 | 3 => 1,
            2 if (sw && ne && !se && !nw) || (se && nw && !sw && !ne) => 2,
            _ => 0,
        };
        if multiplicity > 0 && !envelope.vertex_on_envelope(vx, vy) {
            n_int += multiplicity;
        }
    }
    n_int
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{grow_partition, GrowSeed};

    fn rect_cells(width: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> Vec<usize> {
        let mut v = Vec::new();
        for y in y0..y1 {
            for x in x0..x1 {
                v.push((y * width + x) as usize);
            }
        }
        v
    }

    #[test]
    fn single_room_on_envelope_has_only_wall_reward() {
        // room covers the whole 4x3 parent: rectangle on envelope
        let parent = rect_cells(4, 0, 0, 4, 3);
        let envelope = ParentEnvelope::of((4, 3), &parent);
        let mut cand = grow_partition(
            (4, 3),
            &parent,
            &[GrowSeed { room: 0, cell: 5, target_cells: 12 }],
        )
        .unwrap();
        let weights = EnergyWeights::default();
        // seed context at the exact centroid, exact target area
        let e = score_candidate(
            &mut cand,
            &[SeedContext { room: 0, seed: (2.0, 1.5), target_cells: 12.0 }],
            &envelope,
            &weights,
        )
        .unwrap();
        let f = &cand.features.as_ref().unwrap()[0];
        assert_eq!(f.f_ratio, 0.0);
        assert_eq!(f.f_seed, 0.0);
        assert_eq!(f.z_seed, 0.0);
        assert_eq!(f.n_int, 0);
        assert_eq!(f.f_corner, 0.0);
        // whole boundary is envelope contact, clamped ratio = 1.0
        assert_eq!(f.f_wall, 1.0);
        assert!((e - (-weights.w_wall)).abs() < 1e-12);
        assert_eq!(cand.score(), Some(-e));
    }

    #[test]
    fn energy_formula_direct_evaluation() {
        // hand-checked: f_ratio=0.1, z_seed=0.5, f_corner=1, f_wall=0.3,
        // weights (1.0, 0.2, 0.3, 0.4) -> e = 0.1 + 0.1 + 0.3 - 0.12 = 0.38
        let w = EnergyWeights {
            w_ratio: 1.0,
            w_seed: 0.2,
            w_corner: 0.3,
            w_wall: 0.4,
            epsilon: 1e-6,
        };
        let e = w.w_ratio * 0.1 + w.w_seed * 0.5 + w.w_corner * 1.0 - w.w_wall * 0.3;
        assert!((e - 0.38).abs() < 1e-12);
    }

    #[test]
    fn interior_rectangle_has_four_uncounted_corners() {
        // 2x2 room strictly inside a 6x6 parent: n_int = 4, f_corner = 0
        let parent = rect_cells(6, 0, 0, 6, 6);
        let envelope = ParentEnvelope::of((6, 6), &parent);
        let room = rect_cells(6, 2, 2, 4, 4);
        assert_eq!(interior_corners(&room, &envelope), 4);
        // L-shaped room strictly inside: 6 corners -> f_corner would be 2
        let mut l_room = rect_cells(6, 2, 2, 5, 3);
        l_room.extend(rect_cells(6, 2, 3, 3, 5));
        l_room.sort_unstable();
        assert_eq!(interior_corners(&l_room, &envelope), 6);
    }

    #[test]
    fn corners_on_envelope_are_excluded() {
        let parent = rect_cells(6, 0, 0, 6, 6);
        let envelope = ParentEnvelope::of((6, 6), &parent);
        // room in the corner of the parent: all 4 corners on the envelope
        // except the inner one
        let room = rect_cells(6, 0, 0, 2, 2);
        assert_eq!(interior_corners(&room, &envelope), 1);
    }

    #[test]
    fn seed_normalization_spreads_between_zero_and_one() {
        let parent = rect_cells(6, 0, 0, 6, 2);
        let envelope = ParentEnvelope::of((6, 2), &parent);
        let mut cand = grow_partition(
            (6, 2),
            &parent,
            &[
                GrowSeed { room: 0, cell: 0, target_cells: 6 },
                GrowSeed { room: 1, cell: 5, target_cells: 6 },
            ],
        )
        .unwrap();
        // put both plan seeds far left: room 0 centroid is near, room 1 far
        score_candidate(
            &mut cand,
            &[
                SeedContext { room: 0, seed: (0.5, 1.0), target_cells: 6.0 },
                SeedContext { room: 1, seed: (0.5, 1.0), target_cells: 6.0 },
            ],
            &envelope,
            &EnergyWeights::default(),
        )
        .unwrap();
        let f = cand.features.as_ref().unwrap();
        assert!(f[0].z_seed < 1e-6);
        assert!(f[1].z_seed > 0.999);
    }
}
