//! Placed-scene state: object poses, the free-space occupancy grid, and
//! entrance-connected reachability.

use super::Clearance;
use crate::geometry::OrthoPolygon;
use serde::{Deserialize, Serialize};

/// Cardinal world direction. Rotations are counter-clockwise quarter turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    North,
    East,
    South,
    West,
}

/// World direction an object-frame side faces after `rotation` (degrees,
/// multiple of 90). Side indices: 0 front (+y), 1 right (+x), 2 back (-y),
/// 3 left (-x).
fn side_world_dir(side: usize, rotation: u16) -> Dir {
    // CCW order starting at north
    const CCW: [Dir; 4] = [Dir::North, Dir::West, Dir::South, Dir::East];
    let base = match side {
        0 => 0, // front faces north at rotation 0
        1 => 3, // right faces east
        2 => 2, // back faces south
        _ => 1, // left faces west
    };
    CCW[(base + (rotation as usize / 90)) % 4]
}

/// One placed object instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    /// Instance id (matrix instances get `#row_col` suffixes).
    pub id: String,
    /// Object kind this instance came from.
    pub spec_id: String,
    /// Lower-left corner of the world-axis-aligned footprint.
    pub x: f64,
    pub y: f64,
    /// Extents after rotation.
    pub width: f64,
    pub depth: f64,
    /// Counter-clockwise rotation in degrees: 0, 90, 180, 270.
    pub rotation: u16,
    /// Clearance margins in the object's own frame.
    pub clearance: Clearance,
    /// Set when the object sits on another object's top surface.
    pub surface_parent: Option<String>,
}

impl Placement {
    pub fn aabb(&self) -> (f64, f64, f64, f64) {
        (self.x, self.y, self.x + self.width, self.y + self.depth)
    }

    /// World AABBs of the nonzero clearance strips, keyed by nothing: the
    /// union of these strips is the object's interaction zone.
    pub fn clearance_zones(&self) -> Vec<(f64, f64, f64, f64)> {
        let margins = [
            self.clearance.front,
            self.clearance.right,
            self.clearance.back,
            self.clearance.left,
        ];
        let (x0, y0, x1, y1) = self.aabb();
        let mut zones = Vec::new();
        for (side, &m) in margins.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            let rect = match side_world_dir(side, self.rotation) {
                Dir::North => (x0, y1, x1, y1 + m),
                Dir::South => (x0, y0 - m, x1, y0),
                Dir::East => (x1, y0, x1 + m, y1),
                Dir::West => (x0 - m, y0, x0, y1),
            };
            zones.push(rect);
        }
        zones
    }

    pub fn has_clearance(&self) -> bool {
        self.clearance.front > 0.0
            || self.clearance.right > 0.0
            || self.clearance.back > 0.0
            || self.clearance.left > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscardedObject {
    pub id: String,
    pub reason: String,
}

/// A furnished room: polygon, entrance segment, placements, and the record
/// of objects the solver refused to place.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacedScene {
    pub room: OrthoPolygon,
    pub entrance: [[f64; 2]; 2],
    pub placements: Vec<Placement>,
    #[serde(default)]
    pub discarded: Vec<DiscardedObject>,
    /// Occupancy-grid cell size used for reachability checks.
    pub cell_size: f64,
}

impl PlacedScene {
    pub fn new(room: OrthoPolygon, entrance: [[f64; 2]; 2], cell_size: f64) -> Self {
        Self {
            room,
            entrance,
            placements: Vec::new(),
            discarded: Vec::new(),
            cell_size,
        }
    }

    pub fn floor_placements(&self) -> impl Iterator<Item = &Placement> {
        self.placements.iter().filter(|p| p.surface_parent.is_none())
    }
}

/// Free-space raster of a scene, with a breadth-first reached set grown from
/// the entrance.
pub struct OccupancyGrid {
    pub cell: f64,
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    entrance: [[f64; 2]; 2],
    inside: Vec<bool>,
    occupied: Vec<bool>,
    reached: Vec<bool>,
}

impl OccupancyGrid {
    /// Rasterizes the room and the given boxes, then floods from the
    /// entrance over free cells.
    pub fn build(
        room: &OrthoPolygon,
        entrance: [[f64; 2]; 2],
        cell: f64,
        boxes: &[(f64, f64, f64, f64)],
    ) -> Self {
        let bbox = room.bounding_box();
        let x0 = bbox.x0 as f64;
        let y0 = bbox.y0 as f64;
        let nx = ((bbox.width() as f64) / cell).round() as usize;
        let ny = ((bbox.height() as f64) / cell).round() as usize;
        let mut inside = vec![false; nx * ny];
        let mut occupied = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let cx = x0 + (i as f64 + 0.5) * cell;
                let cy = y0 + (j as f64 + 0.5) * cell;
                let idx = j * nx + i;
                if room.contains_half_open(cx, cy) {
                    inside[idx] = true;
                    for b in boxes {
                        if cx >= b.0 && cx < b.2 && cy >= b.1 && cy < b.3 {
                            occupied[idx] = true;
                            break;
                        }
                    }
                }
            }
        }
        let mut grid = Self {
            cell,
            x0,
            y0,
            nx,
            ny,
            entrance,
            inside,
            occupied,
            reached: vec![false; nx * ny],
        };
        grid.flood_from_entrance(entrance);
        grid
    }

    /// Copy of this grid with additional occupied boxes, re-flooded from the
    /// entrance. Used for hypothetical-placement checks without re-scanning
    /// the room polygon.
    pub fn with_extra_boxes(&self, boxes: &[(f64, f64, f64, f64)]) -> Self {
        let mut grid = Self {
            cell: self.cell,
            x0: self.x0,
            y0: self.y0,
            nx: self.nx,
            ny: self.ny,
            entrance: self.entrance,
            inside: self.inside.clone(),
            occupied: self.occupied.clone(),
            reached: vec![false; self.nx * self.ny],
        };
        for b in boxes {
            let i0 = (((b.0 - grid.x0) / grid.cell).floor().max(0.0)) as usize;
            let j0 = (((b.1 - grid.y0) / grid.cell).floor().max(0.0)) as usize;
            let i1 = ((((b.2 - grid.x0) / grid.cell).ceil()) as usize).min(grid.nx);
            let j1 = ((((b.3 - grid.y0) / grid.cell).ceil()) as usize).min(grid.ny);
            for j in j0..j1 {
                for i in i0..i1 {
                    let cx = grid.x0 + (i as f64 + 0.5) * grid.cell;
                    let cy = grid.y0 + (j as f64 + 0.5) * grid.cell;
                    if cx >= b.0 && cx < b.2 && cy >= b.1 && cy < b.3 {
                        grid.occupied[j * grid.nx + i] = true;
                    }
                }
            }
        }
        grid.flood_from_entrance(grid.entrance);
        grid
    }

    fn flood_from_entrance(&mut self, entrance: [[f64; 2]; 2]) {
        let mut queue = std::collections::VecDeque::new();
        // seed: free cells within 1.5 cells of the entrance segment
        let reach = 1.5 * self.cell;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let idx = j * self.nx + i;
                if !self.is_free(idx) {
                    continue;
                }
                let cx = self.x0 + (i as f64 + 0.5) * self.cell;
                let cy = self.y0 + (j as f64 + 0.5) * self.cell;
                if segment_distance(entrance, (cx, cy)) <= reach {
                    self.reached[idx] = true;
                    queue.push_back(idx);
                }
            }
        }
        while let Some(idx) = queue.pop_front() {
            let i = idx % self.nx;
            let j = idx / self.nx;
            let mut neighbors = [None, None, None, None];
            neighbors[0] = (i + 1 < self.nx).then(|| idx + 1);
            neighbors[1] = (i > 0).then(|| idx - 1);
            neighbors[2] = (j + 1 < self.ny).then(|| idx + self.nx);
            neighbors[3] = (j > 0).then(|| idx - self.nx);
            for n in neighbors.into_iter().flatten() {
                if self.is_free(n) && !self.reached[n] {
                    self.reached[n] = true;
                    queue.push_back(n);
                }
            }
        }
    }

    #[inline]
    fn is_free(&self, idx: usize) -> bool {
        self.inside[idx] && !self.occupied[idx]
    }

    pub fn any_free(&self) -> bool {
        (0..self.inside.len()).any(|i| self.is_free(i))
    }

    pub fn any_reached(&self) -> bool {
        self.reached.iter().any(|r| *r)
    }

    /// True when at least one free cell inside the box is entrance-reached.
    pub fn zone_reached(&self, zone: (f64, f64, f64, f64)) -> bool {
        let i0 = (((zone.0 - self.x0) / self.cell).floor().max(0.0)) as usize;
        let j0 = (((zone.1 - self.y0) / self.cell).floor().max(0.0)) as usize;
        let i1 = ((((zone.2 - self.x0) / self.cell).ceil()) as usize).min(self.nx);
        let j1 = ((((zone.3 - self.y0) / self.cell).ceil()) as usize).min(self.ny);
        for j in j0..j1 {
            for i in i0..i1 {
                let idx = j * self.nx + i;
                let cx = self.x0 + (i as f64 + 0.5) * self.cell;
                let cy = self.y0 + (j as f64 + 0.5) * self.cell;
                if cx >= zone.0 && cx < zone.2 && cy >= zone.1 && cy < zone.3 && self.reached[idx] {
                    return true;
                }
            }
        }
        false
    }
}

fn segment_distance(seg: [[f64; 2]; 2], p: (f64, f64)) -> f64 {
    let (ax, ay) = (seg[0][0], seg[0][1]);
    let (bx, by) = (seg[1][0], seg[1][1]);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 <= f64::EPSILON {
        0.0
    } else {
        (((p.0 - ax) * dx + (p.1 - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (ax + t * dx, ay + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Occupancy of the scene's current floor placements.
pub fn scene_grid(scene: &PlacedScene) -> OccupancyGrid {
    let boxes: Vec<(f64, f64, f64, f64)> = scene.floor_placements().map(|p| p.aabb()).collect();
    OccupancyGrid::build(&scene.room, scene.entrance, scene.cell_size, &boxes)
}

/// True when the placement's interaction zone holds at least one free cell
/// reached from the entrance. Objects with no clearance margins are not
/// interactive and count as reachable.
pub fn is_reachable(grid: &OccupancyGrid, placement: &Placement) -> bool {
    if !placement.has_clearance() {
        return true;
    }
    placement.clearance_zones().into_iter().any(|z| grid.zone_reached(z))
}

/// Percent of floor-standing objects whose clearance zone connects to the
/// entrance over free space. An unfurnished room scores 100.
pub fn compute_reachability(scene: &PlacedScene) -> f64 {
    let floor: Vec<&Placement> = scene.floor_placements().collect();
    if floor.is_empty() {
        return 100.0;
    }
    let grid = scene_grid(scene);
    let reachable = floor.iter().filter(|p| is_reachable(&grid, p)).count();
    100.0 * reachable as f64 / floor.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_room() -> OrthoPolygon {
        OrthoPolygon::rect(0, 0, 6, 6).unwrap()
    }

    fn entrance_south() -> [[f64; 2]; 2] {
        [[2.5, 0.0], [3.5, 0.0]]
    }

    fn place(id: &str, x: f64, y: f64, w: f64, d: f64) -> Placement {
        Placement {
            id: id.into(),
            spec_id: id.into(),
            x,
            y,
            width: w,
            depth: d,
            rotation: 0,
            clearance: Clearance::default(),
            surface_parent: None,
        }
    }

    #[test]
    fn empty_room_scores_100() {
        let scene = PlacedScene::new(square_room(), entrance_south(), 0.1);
        assert_eq!(compute_reachability(&scene), 100.0);
    }

    #[test]
    fn open_room_object_is_reachable() {
        let mut scene = PlacedScene::new(square_room(), entrance_south(), 0.1);
        scene.placements.push(place("table", 2.0, 3.0, 1.0, 1.0));
        assert_eq!(compute_reachability(&scene), 100.0);
    }

    #[test]
    fn walled_off_object_is_unreachable() {
        let mut scene = PlacedScene::new(square_room(), entrance_south(), 0.1);
        // wall of boxes sealing the top-left corner, with the victim inside
        scene.placements.push(place("barrier_h", 0.0, 4.0, 2.0, 0.4));
        scene.placements.push(place("barrier_v", 2.0, 4.0, 0.4, 2.0));
        scene.placements.push(place("victim", 0.2, 4.8, 1.0, 0.6));
        let rch = compute_reachability(&scene);
        assert!(rch < 100.0, "expected partial reachability, got {rch}");
        let grid = scene_grid(&scene);
        assert!(!is_reachable(&grid, &scene.placements[2]));
    }

    #[test]
    fn clearance_zone_rotates_with_object() {
        let mut p = place("desk", 2.0, 2.0, 1.0, 0.5);
        p.clearance = Clearance { front: 0.6, right: 0.0, back: 0.0, left: 0.0 };
        let north = p.clearance_zones();
        assert_eq!(north.len(), 1);
        assert_eq!(north[0], (2.0, 2.5, 3.0, 3.1));
        p.rotation = 90; // front now faces west
        let west = p.clearance_zones();
        assert_eq!(west[0], (1.4, 2.0, 2.0, 2.5));
        p.rotation = 180; // front faces south
        let south = p.clearance_zones();
        assert_eq!(south[0], (2.0, 1.4, 3.0, 2.0));
        p.rotation = 270; // front faces east
        let east = p.clearance_zones();
        assert_eq!(east[0], (3.0, 2.0, 3.6, 2.5));
    }

    #[test]
    fn covered_entrance_blocks_everything() {
        let mut scene = PlacedScene::new(square_room(), entrance_south(), 0.1);
        // slab covering the whole south side seals the entrance; it is
        // itself unreachable (its front zone cells are unreached)
        scene.placements.push(place("slab", 0.0, 0.0, 6.0, 1.0));
        scene.placements.push(place("table", 2.0, 4.0, 1.0, 1.0));
        let rch = compute_reachability(&scene);
        assert_eq!(rch, 0.0);
    }
}
