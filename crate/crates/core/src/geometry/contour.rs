//! Boundary tracing of label-map regions into closed lattice loops.
//!
//! Used for SVG export and for emitting vector room outlines. Loops keep the
//! labeled region on their left, so outer boundaries come out
//! counter-clockwise and holes clockwise.

use super::{GridLabelMap, GridPoint, Label};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Dir(i64, i64);

const EAST: Dir = Dir(1, 0);
const WEST: Dir = Dir(-1, 0);
const NORTH: Dir = Dir(0, 1);
const SOUTH: Dir = Dir(0, -1);

fn left_of(d: Dir) -> Dir {
    Dir(-d.1, d.0)
}

fn right_of(d: Dir) -> Dir {
    Dir(d.1, -d.0)
}

/// Traces all closed boundary loops of the cells carrying `label`.
/// Collinear intermediate points are removed.
pub fn trace_label_contours(map: &GridLabelMap, label: Label) -> Vec<Vec<GridPoint>> {
    let (ox, oy) = map.origin();
    let is_in = |x: i64, y: i64| -> bool {
        if x < 0 || y < 0 || x >= map.width() as i64 || y >= map.height() as i64 {
            return false;
        }
        map.get(x as u32, y as u32) == label
    };

    // directed boundary edges, keyed by start point
    let mut edges: HashMap<(i64, i64), Vec<Dir>> = HashMap::new();
    let mut push = |x: i64, y: i64, d: Dir| {
        edges.entry((x, y)).or_default().push(d);
    };
    for y in 0..map.height() as i64 {
        for x in 0..map.width() as i64 {
            if !is_in(x, y) {
                continue;
            }
            if !is_in(x, y - 1) {
                push(x, y, EAST); // south side, inside above
            }
            if !is_in(x + 1, y) {
                push(x + 1, y, NORTH); // east side, inside to the west
            }
            if !is_in(x, y + 1) {
                push(x + 1, y + 1, WEST); // north side, inside below
            }
            if !is_in(x - 1, y) {
                push(x, y + 1, SOUTH); // west side, inside to the east
            }
        }
    }
    for list in edges.values_mut() {
        list.sort_by_key(|d| (d.0, d.1));
    }

    let mut loops = Vec::new();
    // deterministic loop start order: lowest (y, x) start point
    let mut starts: Vec<(i64, i64)> = edges.keys().copied().collect();
    starts.sort_by_key(|&(x, y)| (y, x));

    for start in starts {
        loop {
            let Some(first) = edges.get_mut(&start).and_then(|v| v.pop()) else {
                break;
            };
            let mut pts = vec![GridPoint::new(start.0, start.1)];
            let mut pos = (start.0 + first.0, start.1 + first.1);
            let mut dir = first;
            while pos != start {
                pts.push(GridPoint::new(pos.0, pos.1));
                let avail = edges.get_mut(&pos).expect("open contour");
                // prefer the left turn, then straight, then right; keeps
                // diagonally-touching loops from merging
                let order = [left_of(dir), dir, right_of(dir)];
                let pick = order
                    .iter()
                    .find_map(|want| avail.iter().position(|d| d == want))
                    .expect("dead-end contour vertex");
                dir = avail.remove(pick);
                pos = (pos.0 + dir.0, pos.1 + dir.1);
            }
            loops.push(simplify(pts));
        }
    }

    // shift into world coordinates
    for lp in &mut loops {
        for p in lp.iter_mut() {
            p.x += ox;
            p.y += oy;
        }
    }
    loops
}

fn simplify(pts: Vec<GridPoint>) -> Vec<GridPoint> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = pts[(i + n - 1) % n];
        let here = pts[i];
        let next = pts[(i + 1) % n];
        let collinear = (prev.x == here.x && here.x == next.x) || (prev.y == here.y && here.y == next.y);
        if !collinear {
            out.push(here);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_single_rectangle() {
        let mut map = GridLabelMap::filled(4, 4, Label::Empty);
        for y in 1..3 {
            for x in 1..3 {
                map.set(x, y, Label::Room(0));
            }
        }
        let loops = trace_label_contours(&map, Label::Room(0));
        assert_eq!(loops.len(), 1);
        let lp = &loops[0];
        assert_eq!(lp.len(), 4);
        let area2: i64 = (0..lp.len())
            .map(|i| {
                let a = lp[i];
                let b = lp[(i + 1) % lp.len()];
                a.x * b.y - b.x * a.y
            })
            .sum();
        assert_eq!(area2, 2 * 4); // CCW, area 4
    }

    #[test]
    fn traces_ring_with_hole() {
        let mut map = GridLabelMap::filled(5, 5, Label::Empty);
        for y in 0..5 {
            for x in 0..5 {
                map.set(x, y, Label::Room(1));
            }
        }
        map.set(2, 2, Label::Empty);
        let loops = trace_label_contours(&map, Label::Room(1));
        assert_eq!(loops.len(), 2);
        let areas: Vec<i64> = loops
            .iter()
            .map(|lp| {
                (0..lp.len())
                    .map(|i| {
                        let a = lp[i];
                        let b = lp[(i + 1) % lp.len()];
                        a.x * b.y - b.x * a.y
                    })
                    .sum::<i64>()
            })
            .collect();
        // one CCW outer loop (positive), one CW hole (negative)
        assert!(areas.iter().any(|&a| a == 50));
        assert!(areas.iter().any(|&a| a == -2));
    }
}
