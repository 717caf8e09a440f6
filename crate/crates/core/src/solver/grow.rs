//! Synchronized frontier growth of rooms from seed cells.
//!
//! Rooms take turns claiming one 4-adjacent frontier cell per cycle. Turn
//! order within a cycle is descending remaining deficit (target minus
//! current size), ties by seed list position. A room claims the frontier
//! cell that minimizes its bounding-box perimeter increase, ties by lowest
//! cell index. Rooms at or above target pause; they resume only when no
//! under-target room can claim anything, so leftover cells still get
//! absorbed. The procedure is deterministic given its inputs.

use super::{CandidatePartition, RoomCells, SolverError};

#[derive(Debug, Clone, Copy)]
pub struct GrowSeed {
    pub room: u32,
    pub cell: usize,
    pub target_cells: usize,
}

const UNASSIGNED: i32 = -1;
const OUTSIDE: i32 = -2;

struct RoomState {
    count: usize,
    target: usize,
    min_x: u32,
    max_x: u32,
    min_y: u32,
    max_y: u32,
    frontier: Vec<usize>,
    in_frontier: Vec<bool>,
}

impl RoomState {
    fn deficit(&self) -> i64 {
        self.target as i64 - self.count as i64
    }

    fn perimeter_increase(&self, x: u32, y: u32) -> i64 {
        let w_old = (self.max_x - self.min_x + 1) as i64;
        let h_old = (self.max_y - self.min_y + 1) as i64;
        let w_new = (self.max_x.max(x) - self.min_x.min(x) + 1) as i64;
        let h_new = (self.max_y.max(y) - self.min_y.min(y) + 1) as i64;
        2 * (w_new + h_new) - 2 * (w_old + h_old)
    }
}

struct Grid {
    width: usize,
    height: usize,
}

impl Grid {
    #[inline]
    fn xy(&self, idx: usize) -> (u32, u32) {
        ((idx % self.width) as u32, (idx / self.width) as u32)
    }

    #[inline]
    fn neighbors(&self, idx: usize) -> [Option<usize>; 4] {
        let x = idx % self.width;
        let y = idx / self.width;
        [
            (x + 1 < self.width).then(|| idx + 1),
            (x > 0).then(|| idx - 1),
            (y + 1 < self.height).then(|| idx + self.width),
            (y > 0).then(|| idx - self.width),
        ]
    }
}

/// Grows a partition of `parent_cells` from the given seeds on a grid of
/// dimensions `dims = (width, height)`. Geometry only: features, energy,
/// and the parent label are left for the caller to fill in.
pub fn grow_partition(
    dims: (u32, u32),
    parent_cells: &[usize],
    seeds: &[GrowSeed],
) -> Result<CandidatePartition, SolverError> {
    let grid = Grid {
        width: dims.0 as usize,
        height: dims.1 as usize,
    };
    let n_cells = grid.width * grid.height;
    if seeds.is_empty() {
        return Err(SolverError::NoSeeds);
    }

    let mut assign = vec![OUTSIDE; n_cells];
    for &c in parent_cells {
        assign[c] = UNASSIGNED;
    }

    let mut rooms: Vec<RoomState> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if seed.target_cells == 0 {
            return Err(SolverError::BadSeedTarget(seed.room));
        }
        if seed.cell >= n_cells || assign[seed.cell] == OUTSIDE {
            return Err(SolverError::SeedOutsideParent(seed.cell));
        }
        if assign[seed.cell] != UNASSIGNED {
            return Err(SolverError::DuplicateSeedCell(seed.cell));
        }
        assign[seed.cell] = rooms.len() as i32;
        let (x, y) = grid.xy(seed.cell);
        let mut state = RoomState {
            count: 1,
            target: seed.target_cells,
            min_x: x,
            max_x: x,
            min_y: y,
            max_y: y,
            frontier: Vec::new(),
            in_frontier: vec![false; n_cells],
        };
        for n in grid.neighbors(seed.cell).into_iter().flatten() {
            if assign[n] == UNASSIGNED {
                state.in_frontier[n] = true;
                state.frontier.push(n);
            }
        }
        rooms.push(state);
    }
    // a neighbor of several seeds sits in several frontiers; claims stay
    // exclusive because assignment is checked at claim time

    let mut order: Vec<usize> = (0..rooms.len()).collect();
    loop {
        order.sort_by(|&a, &b| rooms[b].deficit().cmp(&rooms[a].deficit()).then(a.cmp(&b)));

        let mut hungry_claimed = false;
        for &k in &order {
            if rooms[k].deficit() <= 0 {
                continue;
            }
            if claim_best(&mut rooms[k], k, &mut assign, &grid) {
                hungry_claimed = true;
            }
        }
        if hungry_claimed {
            continue;
        }

        // no under-target room could move; saturated rooms absorb leftovers
        let mut any_claimed = false;
        for &k in &order {
            if rooms[k].deficit() > 0 {
                continue;
            }
            if claim_best(&mut rooms[k], k, &mut assign, &grid) {
                any_claimed = true;
            }
        }
        if !any_claimed {
            break;
        }
    }

    Ok(collect_candidate(parent_cells, seeds, &assign))
}

/// Claims the best frontier cell for room `k`, pruning stale entries.
/// Returns false when the room has no claimable cell left.
fn claim_best(room: &mut RoomState, k: usize, assign: &mut [i32], grid: &Grid) -> bool {
    let mut best: Option<(i64, usize)> = None;
    let mut write = 0;
    for read in 0..room.frontier.len() {
        let cell = room.frontier[read];
        if assign[cell] != UNASSIGNED {
            room.in_frontier[cell] = false;
            continue; // claimed by another room since insertion
        }
        room.frontier[write] = cell;
        write += 1;
        let (x, y) = grid.xy(cell);
        let inc = room.perimeter_increase(x, y);
        let better = match best {
            None => true,
            Some((bi, bc)) => inc < bi || (inc == bi && cell < bc),
        };
        if better {
            best = Some((inc, cell));
        }
    }
    room.frontier.truncate(write);

    let Some((_, cell)) = best else {
        return false;
    };
    let pos = room
        .frontier
        .iter()
        .position(|&c| c == cell)
        .expect("chosen cell is in the frontier");
    room.frontier.swap_remove(pos);
    room.in_frontier[cell] = false;

    assign[cell] = k as i32;
    let (x, y) = grid.xy(cell);
    room.min_x = room.min_x.min(x);
    room.max_x = room.max_x.max(x);
    room.min_y = room.min_y.min(y);
    room.max_y = room.max_y.max(y);
    room.count += 1;

    for n in grid.neighbors(cell).into_iter().flatten() {
        if assign[n] == UNASSIGNED && !room.in_frontier[n] {
            room.in_frontier[n] = true;
            room.frontier.push(n);
        }
    }
    true
}

fn collect_candidate(
    parent_cells: &[usize],
    seeds: &[GrowSeed],
    assign: &[i32],
) -> CandidatePartition {
    let mut children: Vec<RoomCells> = seeds
        .iter()
        .map(|s| RoomCells {
            room: s.room,
            cells: Vec::new(),
        })
        .collect();
    let mut unassigned = Vec::new();
    let mut sorted = parent_cells.to_vec();
    sorted.sort_unstable();
    for &c in &sorted {
        match assign[c] {
            UNASSIGNED => unassigned.push(c),
            k if k >= 0 => children[k as usize].cells.push(c),
            _ => {}
        }
    }
    CandidatePartition {
        parent: u32::MAX,
        children,
        parent_remainder: Vec::new(),
        unassigned,
        features: None,
        energy: None,
        feasible: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn single_seed_covers_whole_parent() {
        let parent = rect_cells(4, 0, 0, 4, 3);
        let cand = grow_partition(
            (4, 3),
            &parent,
            &[GrowSeed {
                room: 0,
                cell: 5,
                target_cells: parent.len(),
            }],
        )
        .unwrap();
        assert_eq!(cand.children[0].cells, parent);
        assert!(cand.unassigned.is_empty());
    }

    #[test]
    fn two_seeds_split_strip_evenly() {
        // 6x2 strip, seeds at opposite ends, equal targets: 2x3 / 2x3 split
        let parent = rect_cells(6, 0, 0, 6, 2);
        let cand = grow_partition(
            (6, 2),
            &parent,
            &[
                GrowSeed { room: 0, cell: 0, target_cells: 6 },
                GrowSeed { room: 1, cell: 5, target_cells: 6 },
            ],
        )
        .unwrap();
        assert_eq!(cand.children[0].cells, rect_cells(6, 0, 0, 3, 2));
        assert_eq!(cand.children[1].cells, rect_cells(6, 3, 0, 6, 2));
    }

    #[test]
    fn rejects_bad_seeds() {
        let parent = rect_cells(4, 0, 0, 2, 2);
        assert!(matches!(
            grow_partition((4, 4), &parent, &[GrowSeed { room: 0, cell: 3, target_cells: 1 }]),
            Err(SolverError::SeedOutsideParent(3))
        ));
        assert!(matches!(
            grow_partition(
                (4, 4),
                &parent,
                &[
                    GrowSeed { room: 0, cell: 0, target_cells: 1 },
                    GrowSeed { room: 1, cell: 0, target_cells: 1 },
                ]
            ),
            Err(SolverError::DuplicateSeedCell(0))
        ));
        assert!(matches!(
            grow_partition((4, 4), &parent, &[GrowSeed { room: 0, cell: 0, target_cells: 0 }]),
            Err(SolverError::BadSeedTarget(0))
        ));
        assert!(matches!(grow_partition((4, 4), &parent, &[]), Err(SolverError::NoSeeds)));
    }

    #[test]
    fn rooms_stay_connected_and_partition_is_exact() {
        // L-shaped parent, three seeds
        let mut parent = rect_cells(6, 0, 0, 6, 2);
        parent.extend(rect_cells(6, 0, 2, 2, 5));
        parent.sort_unstable();
        let cand = grow_partition(
            (6, 5),
            &parent,
            &[
                GrowSeed { room: 0, cell: 1, target_cells: 6 },
                GrowSeed { room: 1, cell: 4, target_cells: 6 },
                GrowSeed { room: 2, cell: 2 * 6, target_cells: 6 },
            ],
        )
        .unwrap();
        let total: usize = cand.children.iter().map(|c| c.cells.len()).sum();
        assert_eq!(total + cand.unassigned.len(), parent.len());
        assert!(cand.unassigned.is_empty());
        // pairwise disjoint
        for i in 0..cand.children.len() {
            for j in (i + 1)..cand.children.len() {
                let a: std::collections::HashSet<_> = cand.children[i].cells.iter().collect();
                assert!(cand.children[j].cells.iter().all(|c| !a.contains(c)));
            }
        }
        // 4-connectivity per room
        for child in &cand.children {
            let set: std::collections::HashSet<usize> = child.cells.iter().copied().collect();
            let mut seen = std::collections::HashSet::new();
            let mut queue = vec![child.cells[0]];
            seen.insert(child.cells[0]);
            while let Some(c) = queue.pop() {
                let (x, y) = ((c % 6), (c / 6));
                let mut push = |n: usize| {
                    if set.contains(&n) && seen.insert(n) {
                        queue.push(n);
                    }
                };
                if x + 1 < 6 {
                    push(c + 1);
                }
                if x > 0 {
                    push(c - 1);
                }
                if y + 1 < 5 {
                    push(c + 6);
                }
                if y > 0 {
                    push(c - 6);
                }
            }
            assert_eq!(seen.len(), child.cells.len(), "room {} disconnected", child.room);
        }
    }

    #[test]
    fn unreachable_pocket_stays_unassigned() {
        // two disconnected parent blobs; seed only in the left one
        let mut parent = rect_cells(5, 0, 0, 2, 2);
        parent.extend(rect_cells(5, 3, 0, 5, 2));
        parent.sort_unstable();
        let cand = grow_partition(
            (5, 2),
            &parent,
            &[GrowSeed { room: 0, cell: 0, target_cells: 8 }],
        )
        .unwrap();
        assert_eq!(cand.children[0].cells, rect_cells(5, 0, 0, 2, 2));
        assert_eq!(cand.unassigned, rect_cells(5, 3, 0, 5, 2));
    }

    #[test]
    fn growth_is_deterministic() {
        let parent = rect_cells(8, 0, 0, 8, 8);
        let seeds = [
            GrowSeed { room: 0, cell: 9, target_cells: 20 },
            GrowSeed { room: 1, cell: 54, target_cells: 30 },
            GrowSeed { room: 2, cell: 14, target_cells: 14 },
        ];
        let a = grow_partition((8, 8), &parent, &seeds).unwrap();
        let b = grow_partition((8, 8), &parent, &seeds).unwrap();
        assert_eq!(a, b);
    }
}
