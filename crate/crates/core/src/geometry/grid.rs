use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Cell label of a floor grid.
///
/// `Room` and `Core` carry indices into tables owned by the caller (room
/// binding for graph nodes, core list of the region). `Empty` marks free
/// interior not yet claimed by a room; `Exterior` is outside the footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Exterior,
    Empty,
    Core(u32),
    Room(u32),
}

impl Label {
    pub fn is_room(&self) -> bool {
        matches!(self, Label::Room(_))
    }

    pub fn is_core(&self) -> bool {
        matches!(self, Label::Core(_))
    }
}

/// Rectangular window of cell indices, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl CellRect {
    pub fn clamped(self, width: u32, height: u32) -> CellRect {
        CellRect {
            x0: self.x0.min(width),
            y0: self.y0.min(height),
            x1: self.x1.min(width),
            y1: self.y1.min(height),
        }
    }
}

/// Dense integer grid assigning each cell to a room, a vertical core, free
/// interior, or the exterior. Row-major storage, index `y * width + x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLabelMap {
    width: u32,
    height: u32,
    /// World coordinate of the cell (0, 0) lower-left corner.
    origin_x: i64,
    origin_y: i64,
    cells: Vec<Label>,
}

impl GridLabelMap {
    pub fn filled(width: u32, height: u32, label: Label) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self {
            width,
            height,
            origin_x: 0,
            origin_y: 0,
            cells: vec![label; (width as usize) * (height as usize)],
        }
    }

    pub fn with_origin(mut self, x: i64, y: i64) -> Self {
        self.origin_x = x;
        self.origin_y = y;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn origin(&self) -> (i64, i64) {
        (self.origin_x, self.origin_y)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Label] {
        &self.cells
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize) * (self.width as usize) + (x as usize)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (u32, u32) {
        (
            (idx % self.width as usize) as u32,
            (idx / self.width as usize) as u32,
        )
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Label {
        self.cells[self.index(x, y)]
    }

    #[inline]
    pub fn get_idx(&self, idx: usize) -> Label {
        self.cells[idx]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, label: Label) {
        let i = self.index(x, y);
        self.cells[i] = label;
    }

    #[inline]
    pub fn set_idx(&mut self, idx: usize, label: Label) {
        self.cells[idx] = label;
    }

    /// 4-neighbors of a cell index, in EAST, WEST, NORTH, SOUTH order.
    pub fn neighbors4(&self, idx: usize) -> [Option<usize>; 4] {
        let (x, y) = self.coords(idx);
        [
            (x + 1 < self.width).then(|| idx + 1),
            (x > 0).then(|| idx - 1),
            (y + 1 < self.height).then(|| idx + self.width as usize),
            (y > 0).then(|| idx - self.width as usize),
        ]
    }

    pub fn cells_with(&self, label: Label) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, l)| (*l == label).then_some(i))
            .collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.cells.iter().filter(|l| **l == label).count()
    }

    /// World coordinates of a cell center, under `scale` cells per unit.
    pub fn cell_center_world(&self, idx: usize, scale: u32) -> (f64, f64) {
        let (x, y) = self.coords(idx);
        let s = scale as f64;
        (
            self.origin_x as f64 + (x as f64 + 0.5) / s,
            self.origin_y as f64 + (y as f64 + 0.5) / s,
        )
    }

    /// Counts unit edges between 4-adjacent cells labeled `a` and `b`.
    /// Zero when `a == b`; symmetric in its arguments; absent labels give 0.
    pub fn shared_boundary_length(&self, a: Label, b: Label) -> u32 {
        if a == b {
            return 0;
        }
        let mut count = 0;
        let w = self.width as usize;
        for y in 0..self.height as usize {
            for x in 0..self.width as usize {
                let here = self.cells[y * w + x];
                if x + 1 < w {
                    let east = self.cells[y * w + x + 1];
                    if (here == a && east == b) || (here == b && east == a) {
                        count += 1;
                    }
                }
                if y + 1 < self.height as usize {
                    let north = self.cells[(y + 1) * w + x];
                    if (here == a && north == b) || (here == b && north == a) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// All pairwise shared-boundary counts within a window, keyed by ordered
    /// label pair `(min, max)`. Only edges whose both cells fall inside the
    /// window are counted.
    pub fn boundary_counts_in(&self, window: CellRect) -> HashMap<(Label, Label), u32> {
        let window = window.clamped(self.width, self.height);
        let mut counts: HashMap<(Label, Label), u32> = HashMap::new();
        let w = self.width as usize;
        let mut bump = |a: Label, b: Label| {
            if a != b {
                let key = if a <= b { (a, b) } else { (b, a) };
                *counts.entry(key).or_insert(0) += 1;
            }
        };
        for y in window.y0..window.y1 {
            for x in window.x0..window.x1 {
                let here = self.cells[y as usize * w + x as usize];
                if x + 1 < window.x1 {
                    bump(here, self.cells[y as usize * w + x as usize + 1]);
                }
                if y + 1 < window.y1 {
                    bump(here, self.cells[(y as usize + 1) * w + x as usize]);
                }
            }
        }
        counts
    }

    pub fn full_window(&self) -> CellRect {
        CellRect {
            x0: 0,
            y0: 0,
            x1: self.width,
            y1: self.height,
        }
    }

    /// 4-connected components of cells matching `pred`. Components are
    /// returned in order of their smallest cell index, and each component's
    /// cells are sorted ascending.
    pub fn connected_components(&self, pred: impl Fn(Label) -> bool) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.cells.len()];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.cells.len() {
            if seen[start] || !pred(self.cells[start]) {
                continue;
            }
            let mut comp = Vec::new();
            seen[start] = true;
            queue.push_back(start);
            while let Some(idx) = queue.pop_front() {
                comp.push(idx);
                for n in self.neighbors4(idx).into_iter().flatten() {
                    if !seen[n] && pred(self.cells[n]) {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True when every cell of `label` belongs to one 4-connected component.
    pub fn label_is_connected(&self, label: Label) -> bool {
        let comps = self.connected_components(|l| l == label);
        comps.len() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_between_adjacent_columns() {
        // two 1x2 columns side by side
        let mut map = GridLabelMap::filled(2, 2, Label::Empty);
        map.set(0, 0, Label::Room(0));
        map.set(0, 1, Label::Room(0));
        map.set(1, 0, Label::Room(1));
        map.set(1, 1, Label::Room(1));
        assert_eq!(map.shared_boundary_length(Label::Room(0), Label::Room(1)), 2);
        assert_eq!(map.shared_boundary_length(Label::Room(1), Label::Room(0)), 2);
        assert_eq!(map.shared_boundary_length(Label::Room(0), Label::Room(0)), 0);
        assert_eq!(map.shared_boundary_length(Label::Room(0), Label::Room(7)), 0);
    }

    #[test]
    fn components_all_empty() {
        let map = GridLabelMap::filled(3, 3, Label::Empty);
        let comps = map.connected_components(|l| l == Label::Empty);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 9);
    }

    #[test]
    fn components_split_by_core_wall() {
        let mut map = GridLabelMap::filled(3, 1, Label::Empty);
        map.set(1, 0, Label::Core(0));
        let comps = map.connected_components(|l| l == Label::Empty);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![0]);
        assert_eq!(comps[1], vec![2]);
    }

    #[test]
    fn window_counts_match_full_scan() {
        let mut map = GridLabelMap::filled(4, 4, Label::Empty);
        map.set(0, 0, Label::Room(0));
        map.set(1, 0, Label::Room(1));
        map.set(1, 1, Label::Room(1));
        let counts = map.boundary_counts_in(map.full_window());
        assert_eq!(
            counts[&(Label::Room(0), Label::Room(1))],
            map.shared_boundary_length(Label::Room(0), Label::Room(1))
        );
        assert_eq!(
            counts[&(Label::Empty, Label::Room(1))],
            map.shared_boundary_length(Label::Empty, Label::Room(1))
        );
    }
}
