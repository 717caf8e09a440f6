//! Orthogonal-polygon and grid primitives shared by the solver, placement,
//! and evaluation layers.
//!
//! Coordinates are integer grid units. A cell `(i, j)` of a label map covers
//! the unit square `[x0+i, x0+i+1] x [y0+j, y0+j+1]` where `(x0, y0)` is the
//! map origin. Cell membership uses the half-open convention: a point belongs
//! to a polygon iff it is strictly inside or on the lower/left boundary, so a
//! shared edge between two polygons is owned by exactly one of them.

mod grid;
pub mod raster;
pub mod contour;
pub mod io;

pub use grid::{CellRect, GridLabelMap, Label};
pub use raster::{free_cells, rasterize_layout, Frame};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon edge from ({0}, {1}) to ({2}, {3}) is not axis-aligned")]
    NonOrthogonalEdge(i64, i64, i64, i64),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is self-intersecting near ({0}, {1})")]
    SelfIntersection(i64, i64),
    #[error("polygon has a zero-length edge at ({0}, {1})")]
    ZeroLengthEdge(i64, i64),
    #[error("core '{0}' extends outside the footprint")]
    CoreOutsideFootprint(String),
    #[error("cores '{0}' and '{1}' overlap")]
    CoreOverlap(String, String),
    #[error("room list is empty")]
    NoRooms,
    #[error("frame has zero area")]
    ZeroAreaFrame,
    #[error("resolution must be at least 1 cell in each dimension")]
    BadResolution,
    #[error("core box for '{0}' is degenerate")]
    DegenerateCore(String),
}

/// Integer lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned integer rectangle, half-open: cells with
/// `x0 <= x < x1` and `y0 <= y < y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl GridRect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0 as f64 && x < self.x1 as f64 && y >= self.y0 as f64 && y < self.y1 as f64
    }

    pub fn intersects(&self, other: &GridRect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }
}

/// Closed, simple, axis-aligned polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoPolygon {
    vertices: Vec<GridPoint>,
}

impl OrthoPolygon {
    /// Builds a polygon from an ordered vertex ring. The closing edge from the
    /// last vertex back to the first is implicit. Clockwise input is reversed.
    pub fn new(vertices: Vec<GridPoint>) -> Result<Self, GeometryError> {
        if vertices.len() < 4 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if a == b {
                return Err(GeometryError::ZeroLengthEdge(a.x, a.y));
            }
            if a.x != b.x && a.y != b.y {
                return Err(GeometryError::NonOrthogonalEdge(a.x, a.y, b.x, b.y));
            }
        }
        let signed = signed_area2(&vertices);
        if signed == 0 {
            return Err(GeometryError::ZeroArea);
        }
        let mut vertices = vertices;
        if signed < 0 {
            vertices.reverse();
        }
        let poly = Self { vertices };
        poly.check_simple()?;
        Ok(poly)
    }

    /// Convenience constructor for an axis-aligned rectangle.
    pub fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self, GeometryError> {
        Self::new(vec![
            GridPoint::new(x0, y0),
            GridPoint::new(x1, y0),
            GridPoint::new(x1, y1),
            GridPoint::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[GridPoint] {
        &self.vertices
    }

    pub fn area(&self) -> i64 {
        signed_area2(&self.vertices).abs() / 2
    }

    pub fn bounding_box(&self) -> GridRect {
        let xs = self.vertices.iter().map(|p| p.x);
        let ys = self.vertices.iter().map(|p| p.y);
        GridRect::new(
            xs.clone().min().unwrap(),
            ys.clone().min().unwrap(),
            xs.max().unwrap(),
            ys.max().unwrap(),
        )
    }

    /// Pairwise edge intersection check. Orthogonal edges only, so overlap
    /// tests reduce to interval arithmetic.
    fn check_simple(&self) -> Result<(), GeometryError> {
        let edges: Vec<(GridPoint, GridPoint)> = self.edge_iter().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if edges_conflict(edges[i], edges[j], adjacent) {
                    let p = edges[j].0;
                    return Err(GeometryError::SelfIntersection(p.x, p.y));
                }
            }
        }
        Ok(())
    }

    pub fn edge_iter(&self) -> impl Iterator<Item = (GridPoint, GridPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Half-open point-in-polygon test: true when the point is strictly inside
    /// or on a lower/left boundary edge. Implemented as a crossing count over
    /// vertical edges strictly to the right of the query point, with edge
    /// y-spans treated half-open `[ymin, ymax)`.
    pub fn contains_half_open(&self, px: f64, py: f64) -> bool {
        let mut crossings = 0u32;
        for (a, b) in self.edge_iter() {
            if a.x != b.x {
                continue; // horizontal edge
            }
            let ex = a.x as f64;
            if ex <= px {
                continue;
            }
            let (ymin, ymax) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
            if py >= ymin as f64 && py < ymax as f64 {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }

    /// Decomposes the interior into disjoint rectangles by scanning the
    /// y-slabs between consecutive distinct vertex ordinates. Exact for
    /// integer-coordinate orthogonal polygons.
    pub fn slab_rects(&self) -> Vec<GridRect> {
        let mut ys: Vec<i64> = self.vertices.iter().map(|p| p.y).collect();
        ys.sort_unstable();
        ys.dedup();
        let mut out = Vec::new();
        for w in ys.windows(2) {
            let (y0, y1) = (w[0], w[1]);
            let mid = (y0 + y1) as f64 / 2.0;
            // vertical edges spanning this slab, ordered by x
            let mut xs: Vec<i64> = self
                .edge_iter()
                .filter(|(a, b)| a.x == b.x)
                .filter(|(a, b)| {
                    let (lo, hi) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
                    (lo as f64) < mid && mid < (hi as f64)
                })
                .map(|(a, _)| a.x)
                .collect();
            xs.sort_unstable();
            for pair in xs.chunks(2) {
                if pair.len() == 2 && pair[0] < pair[1] {
                    out.push(GridRect::new(pair[0], y0, pair[1], y1));
                }
            }
        }
        out
    }

    /// True when the axis-aligned box `[x0,x1]x[y0,y1]` lies entirely inside
    /// the polygon. Exact: compares the box area against the summed overlap
    /// with the slab decomposition.
    pub fn contains_box(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
        if x1 <= x0 || y1 <= y0 {
            return false;
        }
        let want = (x1 - x0) * (y1 - y0);
        let mut have = 0.0;
        for r in self.slab_rects() {
            let ox = (x1.min(r.x1 as f64) - x0.max(r.x0 as f64)).max(0.0);
            let oy = (y1.min(r.y1 as f64) - y0.max(r.y0 as f64)).max(0.0);
            have += ox * oy;
        }
        (want - have).abs() < 1e-9 * want.max(1.0)
    }
}

fn signed_area2(vertices: &[GridPoint]) -> i64 {
    let n = vertices.len();
    let mut acc = 0i64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc
}

fn edges_conflict(e1: (GridPoint, GridPoint), e2: (GridPoint, GridPoint), adjacent: bool) -> bool {
    let seg = |p: GridPoint, q: GridPoint| -> (bool, i64, i64, i64) {
        // (is_vertical, fixed coordinate, span lo, span hi)
        if p.x == q.x {
            (true, p.x, p.y.min(q.y), p.y.max(q.y))
        } else {
            (false, p.y, p.x.min(q.x), p.x.max(q.x))
        }
    };
    let (v1, f1, lo1, hi1) = seg(e1.0, e1.1);
    let (v2, f2, lo2, hi2) = seg(e2.0, e2.1);
    if v1 == v2 {
        // parallel: conflict only when collinear spans overlap in more than a point
        f1 == f2 && lo1 < hi2 && lo2 < hi1
    } else {
        // perpendicular: conflict when they cross or touch away from shared endpoints
        let (vf, vlo, vhi, hf, hlo, hhi) = if v1 {
            (f1, lo1, hi1, f2, lo2, hi2)
        } else {
            (f2, lo2, hi2, f1, lo1, hi1)
        };
        let touches = hlo <= vf && vf <= hhi && vlo <= hf && hf <= vhi;
        if !touches {
            return false;
        }
        if adjacent {
            // consecutive edges legitimately share one endpoint
            let shared = e1.0 == e2.1 || e1.1 == e2.0 || e1.0 == e2.0 || e1.1 == e2.1;
            let interior_cross = hlo < vf && vf < hhi && vlo < hf && hf < vhi;
            return interior_cross || !shared;
        }
        true
    }
}

/// Kind of vertical core carved out of every floor it serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoreKind {
    Stair,
    Elevator,
}

impl CoreKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoreKind::Stair => "stair",
            CoreKind::Elevator => "elevator",
        }
    }
}

/// A vertical core footprint: axis-aligned box pinned to identical
/// coordinates on every floor it spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreBox {
    pub id: String,
    pub kind: CoreKind,
    pub rect: GridRect,
}

/// A floor footprint minus its vertical cores: the only area where rooms
/// may be grown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeRegion {
    footprint: OrthoPolygon,
    cores: Vec<CoreBox>,
}

impl FreeRegion {
    pub fn new(footprint: OrthoPolygon, cores: Vec<CoreBox>) -> Result<Self, GeometryError> {
        for core in &cores {
            if core.rect.is_empty() {
                return Err(GeometryError::DegenerateCore(core.id.clone()));
            }
            if !footprint.contains_box(
                core.rect.x0 as f64,
                core.rect.y0 as f64,
                core.rect.x1 as f64,
                core.rect.y1 as f64,
            ) {
                return Err(GeometryError::CoreOutsideFootprint(core.id.clone()));
            }
        }
        for i in 0..cores.len() {
            for j in (i + 1)..cores.len() {
                if cores[i].rect.intersects(&cores[j].rect) {
                    return Err(GeometryError::CoreOverlap(
                        cores[i].id.clone(),
                        cores[j].id.clone(),
                    ));
                }
            }
        }
        Ok(Self { footprint, cores })
    }

    pub fn footprint(&self) -> &OrthoPolygon {
        &self.footprint
    }

    pub fn cores(&self) -> &[CoreBox] {
        &self.cores
    }

    pub fn core_index(&self, id: &str) -> Option<usize> {
        self.cores.iter().position(|c| c.id == id)
    }

    /// Footprint area minus core area, in whole cells.
    pub fn free_area(&self) -> i64 {
        self.footprint.area() - self.cores.iter().map(|c| c.rect.area()).sum::<i64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape() -> OrthoPolygon {
        // 3x3 square with the top-right 1x1 bite removed
        OrthoPolygon::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(3, 0),
            GridPoint::new(3, 2),
            GridPoint::new(2, 2),
            GridPoint::new(2, 3),
            GridPoint::new(0, 3),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_diagonal_edges() {
        let err = OrthoPolygon::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(2, 1),
            GridPoint::new(2, 2),
            GridPoint::new(0, 2),
        ]);
        assert!(matches!(err, Err(GeometryError::NonOrthogonalEdge(..))));
    }

    #[test]
    fn rejects_self_intersection() {
        let err = OrthoPolygon::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(4, 0),
            GridPoint::new(4, 2),
            GridPoint::new(2, 2),
            GridPoint::new(2, -1),
            GridPoint::new(1, -1),
            GridPoint::new(1, 2),
            GridPoint::new(0, 2),
        ]);
        assert!(matches!(err, Err(GeometryError::SelfIntersection(..))));
    }

    #[test]
    fn normalizes_clockwise_input() {
        let ccw = OrthoPolygon::rect(0, 0, 2, 2).unwrap();
        let cw = OrthoPolygon::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(0, 2),
            GridPoint::new(2, 2),
            GridPoint::new(2, 0),
        ])
        .unwrap();
        // both normalize to counter-clockwise orientation over the same ring
        assert_eq!(signed_area2(cw.vertices()), signed_area2(ccw.vertices()));
        assert!(signed_area2(cw.vertices()) > 0);
        let mut a: Vec<GridPoint> = ccw.vertices().to_vec();
        let mut b: Vec<GridPoint> = cw.vertices().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(ccw.area(), 4);
        assert_eq!(cw.area(), 4);
    }

    #[test]
    fn area_of_l_shape() {
        assert_eq!(l_shape().area(), 8);
    }

    #[test]
    fn half_open_ownership_of_shared_edge() {
        let left = OrthoPolygon::rect(0, 0, 1, 2).unwrap();
        let right = OrthoPolygon::rect(1, 0, 2, 2).unwrap();
        // point on the shared edge x=1 belongs to the right polygon only
        assert!(!left.contains_half_open(1.0, 0.5));
        assert!(right.contains_half_open(1.0, 0.5));
        // lower boundary belongs to the polygon, upper does not
        assert!(left.contains_half_open(0.5, 0.0));
        assert!(!left.contains_half_open(0.5, 2.0));
    }

    #[test]
    fn slab_rects_cover_l_shape() {
        let poly = l_shape();
        let rects = poly.slab_rects();
        let total: i64 = rects.iter().map(|r| r.area()).sum();
        assert_eq!(total, poly.area());
        assert!(poly.contains_box(0.0, 0.0, 2.0, 3.0));
        assert!(!poly.contains_box(1.5, 1.5, 3.0, 3.0));
    }

    #[test]
    fn free_region_validates_cores() {
        let fp = OrthoPolygon::rect(0, 0, 4, 4).unwrap();
        let inside = CoreBox {
            id: "stair_0".into(),
            kind: CoreKind::Stair,
            rect: GridRect::new(0, 0, 2, 2),
        };
        let outside = CoreBox {
            id: "stair_1".into(),
            kind: CoreKind::Stair,
            rect: GridRect::new(3, 3, 5, 5),
        };
        assert!(FreeRegion::new(fp.clone(), vec![inside.clone()]).is_ok());
        assert!(matches!(
            FreeRegion::new(fp.clone(), vec![outside]),
            Err(GeometryError::CoreOutsideFootprint(_))
        ));
        let overlapping = CoreBox {
            id: "lift_0".into(),
            kind: CoreKind::Elevator,
            rect: GridRect::new(1, 1, 3, 3),
        };
        assert!(matches!(
            FreeRegion::new(fp, vec![inside, overlapping]),
            Err(GeometryError::CoreOverlap(..))
        ));
    }
}
