//! Spur removal and hole filling on solved label maps.
//!
//! A spur is a room cell whose same-room 4-neighbor count is at most one
//! while at least one neighbor belongs to a different room or lies outside
//! the interior (exterior, core, or off-grid). Spur passes detect all spur
//! cells first and clear them simultaneously, repeating to a fixed point.
//! Interior empty components are then filled by the room sharing the longest
//! boundary. The fill-then-clean cycle repeats up to `max_cycles`.

use crate::geometry::{GridLabelMap, Label};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanupConfig {
    pub max_cycles: u32,
}

impl Default for CleanupConfig {
    fn default() -> Self {
        Self { max_cycles: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct CleanupOutcome {
    pub map: GridLabelMap,
    pub converged: bool,
    pub cycles: u32,
    /// Rooms whose cell set ended up 4-disconnected (thin corridors eroded
    /// by spur removal); surfaced for the caller to decide on a re-solve.
    pub disconnected_rooms: Vec<u32>,
}

/// Clears spur cells to `Empty`, synchronously per pass, until none remain.
pub fn remove_spurs(map: &GridLabelMap) -> GridLabelMap {
    let mut out = map.clone();
    loop {
        let spurs = collect_spurs(&out);
        if spurs.is_empty() {
            return out;
        }
        for idx in spurs {
            out.set_idx(idx, Label::Empty);
        }
    }
}

fn collect_spurs(map: &GridLabelMap) -> Vec<usize> {
    let mut spurs = Vec::new();
    for idx in 0..map.len() {
        let here = map.get_idx(idx);
        let Label::Room(_) = here else { continue };
        let mut same = 0;
        let mut foreign = 0;
        for n in map.neighbors4(idx) {
            match n {
                Some(j) => match map.get_idx(j) {
                    l if l == here => same += 1,
                    Label::Room(_) | Label::Exterior | Label::Core(_) => foreign += 1,
                    Label::Empty => {}
                },
                // off-grid counts as outside the interior
                None => foreign += 1,
            }
        }
        if same <= 1 && foreign >= 1 {
            spurs.push(idx);
        }
    }
    spurs
}

/// Relabels each interior empty component to the room sharing the longest
/// boundary with it, ties to the lower room index. Components bordered by
/// no room stay empty.
pub fn fill_holes(map: &GridLabelMap) -> GridLabelMap {
    let mut out = map.clone();
    let components = map.connected_components(|l| l == Label::Empty);
    for comp in components {
        let mut contact: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for &idx in &comp {
            for n in map.neighbors4(idx).into_iter().flatten() {
                if let Label::Room(r) = map.get_idx(n) {
                    *contact.entry(r).or_insert(0) += 1;
                }
            }
        }
        let Some(winner) = contact
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(room, _)| room)
        else {
            continue;
        };
        for idx in comp {
            out.set_idx(idx, Label::Room(winner));
        }
    }
    out
}

/// Alternates hole filling and spur removal until a full cycle changes
/// nothing or `max_cycles` is reached. The result is always spur-free; the
/// `converged` flag distinguishes a fixed point from a cycle budget hit.
pub fn cleanup(map: &GridLabelMap, cfg: &CleanupConfig) -> CleanupOutcome {
    let mut current = map.clone();
    let mut converged = false;
    let mut cycles = 0;
    for _ in 0..cfg.max_cycles.max(1) {
        cycles += 1;
        let filled = fill_holes(&current);
        let cleaned = remove_spurs(&filled);
        if cleaned == current {
            current = cleaned;
            converged = true;
            break;
        }
        current = cleaned;
    }
    let disconnected_rooms = find_disconnected_rooms(&current);
    CleanupOutcome {
        map: current,
        converged,
        cycles,
        disconnected_rooms,
    }
}

fn find_disconnected_rooms(map: &GridLabelMap) -> Vec<u32> {
    let mut rooms: Vec<u32> = map
        .cells()
        .iter()
        .filter_map(|l| match l {
            Label::Room(r) => Some(*r),
            _ => None,
        })
        .collect();
    rooms.sort_unstable();
    rooms.dedup();
    rooms
        .into_iter()
        .filter(|&r| {
            map.connected_components(|l| l == Label::Room(r)).len() > 1
        })
        .collect()
}
