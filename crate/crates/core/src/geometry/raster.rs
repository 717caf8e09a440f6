use super::{FreeRegion, GeometryError, GridLabelMap, GridPoint, Label, OrthoPolygon};

/// World-coordinate frame used when scaling a vector layout onto a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Frame {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Scales all room polygons uniformly into a `resolution.0 x resolution.1`
/// grid, rounds the scaled vertices to the nearest integer grid points, and
/// labels each cell by the polygon containing its center.
///
/// The same scale factor applies to both axes and to every polygon, so two
/// layouts rasterized against the same frame are directly comparable. Cells
/// claimed by no room are `Exterior`. Where rounding makes polygons overlap,
/// the room with the lower index wins.
pub fn rasterize_layout(
    rooms: &[(u32, OrthoPolygon)],
    frame: Frame,
    resolution: (u32, u32),
) -> Result<GridLabelMap, GeometryError> {
    if rooms.is_empty() {
        return Err(GeometryError::NoRooms);
    }
    if resolution.0 < 1 || resolution.1 < 1 {
        return Err(GeometryError::BadResolution);
    }
    if frame.width() <= 0.0 || frame.height() <= 0.0 {
        return Err(GeometryError::ZeroAreaFrame);
    }
    let scale = (resolution.0 as f64 / frame.width()).min(resolution.1 as f64 / frame.height());

    // Scale and round each polygon; rounding may collapse some to zero area,
    // in which case they simply claim no cells.
    let mut scaled: Vec<(u32, Option<OrthoPolygon>)> = Vec::with_capacity(rooms.len());
    for (id, poly) in rooms {
        let verts: Vec<GridPoint> = poly
            .vertices()
            .iter()
            .map(|p| {
                GridPoint::new(
                    ((p.x as f64 - frame.x0) * scale).round() as i64,
                    ((p.y as f64 - frame.y0) * scale).round() as i64,
                )
            })
            .collect();
        let mut dedup = verts.clone();
        dedup.dedup();
        if dedup.last() == dedup.first() && dedup.len() > 1 {
            dedup.pop();
        }
        scaled.push((*id, OrthoPolygon::new(dedup).ok()));
    }

    let mut map = GridLabelMap::filled(resolution.0, resolution.1, Label::Exterior);
    let mut order: Vec<usize> = (0..scaled.len()).collect();
    order.sort_by_key(|&i| scaled[i].0);
    for y in 0..resolution.1 {
        for x in 0..resolution.0 {
            let cx = x as f64 + 0.5;
            let cy = y as f64 + 0.5;
            for &i in &order {
                if let (id, Some(poly)) = &scaled[i] {
                    if poly.contains_half_open(cx, cy) {
                        map.set(x, y, Label::Room(*id));
                        break;
                    }
                }
            }
        }
    }
    Ok(map)
}

/// Rasterizes a free region at `scale` cells per world unit over the
/// footprint bounding box. Footprint cells covered by a core box become
/// `Core(i)` (index into the region's core list), remaining footprint cells
/// `Empty`, everything else `Exterior`.
pub fn free_cells(region: &FreeRegion, scale: u32) -> Result<GridLabelMap, GeometryError> {
    if scale < 1 {
        return Err(GeometryError::BadResolution);
    }
    let bbox = region.footprint().bounding_box();
    let width = (bbox.width() as u32) * scale;
    let height = (bbox.height() as u32) * scale;
    if width == 0 || height == 0 {
        return Err(GeometryError::ZeroArea);
    }
    let mut map = GridLabelMap::filled(width, height, Label::Exterior).with_origin(bbox.x0, bbox.y0);
    let s = scale as f64;
    for y in 0..height {
        for x in 0..width {
            let wx = bbox.x0 as f64 + (x as f64 + 0.5) / s;
            let wy = bbox.y0 as f64 + (y as f64 + 0.5) / s;
            if !region.footprint().contains_half_open(wx, wy) {
                continue;
            }
            let mut label = Label::Empty;
            for (k, core) in region.cores().iter().enumerate() {
                if core.rect.contains_point(wx, wy) {
                    label = Label::Core(k as u32);
                    break;
                }
            }
            map.set(x, y, label);
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CoreBox, CoreKind, GridRect};

    #[test]
    fn full_cover_square() {
        let rooms = vec![(0u32, OrthoPolygon::rect(0, 0, 2, 2).unwrap())];
        let map = rasterize_layout(&rooms, Frame::new(0.0, 0.0, 2.0, 2.0), (2, 2)).unwrap();
        assert!(map.cells().iter().all(|l| *l == Label::Room(0)));
    }

    #[test]
    fn two_adjacent_rectangles() {
        let rooms = vec![
            (0u32, OrthoPolygon::rect(0, 0, 1, 2).unwrap()),
            (1u32, OrthoPolygon::rect(1, 0, 2, 2).unwrap()),
        ];
        let map = rasterize_layout(&rooms, Frame::new(0.0, 0.0, 2.0, 2.0), (2, 2)).unwrap();
        assert_eq!(map.get(0, 0), Label::Room(0));
        assert_eq!(map.get(0, 1), Label::Room(0));
        assert_eq!(map.get(1, 0), Label::Room(1));
        assert_eq!(map.get(1, 1), Label::Room(1));
    }

    #[test]
    fn l_shape_matches_point_in_polygon_oracle() {
        let l = OrthoPolygon::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(3, 0),
            GridPoint::new(3, 1),
            GridPoint::new(1, 1),
            GridPoint::new(1, 3),
            GridPoint::new(0, 3),
        ])
        .unwrap();
        let rooms = vec![(5u32, l.clone())];
        let map = rasterize_layout(&rooms, Frame::new(0.0, 0.0, 3.0, 3.0), (3, 3)).unwrap();
        // brute-force oracle: test every cell center against the source polygon
        for y in 0..3 {
            for x in 0..3 {
                let inside = l.contains_half_open(x as f64 + 0.5, y as f64 + 0.5);
                let expect = if inside { Label::Room(5) } else { Label::Exterior };
                assert_eq!(map.get(x, y), expect, "cell ({x}, {y})");
            }
        }
    }

    #[test]
    fn rasterize_rejects_degenerate_inputs() {
        let rooms = vec![(0u32, OrthoPolygon::rect(0, 0, 2, 2).unwrap())];
        assert!(matches!(
            rasterize_layout(&[], Frame::new(0.0, 0.0, 1.0, 1.0), (2, 2)),
            Err(GeometryError::NoRooms)
        ));
        assert!(matches!(
            rasterize_layout(&rooms, Frame::new(0.0, 0.0, 0.0, 2.0), (2, 2)),
            Err(GeometryError::ZeroAreaFrame)
        ));
        assert!(matches!(
            rasterize_layout(&rooms, Frame::new(0.0, 0.0, 2.0, 2.0), (0, 2)),
            Err(GeometryError::BadResolution)
        ));
    }

    #[test]
    fn free_cells_no_cores() {
        let region = FreeRegion::new(OrthoPolygon::rect(0, 0, 4, 4).unwrap(), vec![]).unwrap();
        let map = free_cells(&region, 1).unwrap();
        assert_eq!(map.count(Label::Empty), 16);
    }

    #[test]
    fn free_cells_with_corner_core() {
        let region = FreeRegion::new(
            OrthoPolygon::rect(0, 0, 4, 4).unwrap(),
            vec![CoreBox {
                id: "stair_0".into(),
                kind: CoreKind::Stair,
                rect: GridRect::new(0, 0, 2, 2),
            }],
        )
        .unwrap();
        let map = free_cells(&region, 1).unwrap();
        assert_eq!(map.count(Label::Empty), 12);
        assert_eq!(map.count(Label::Core(0)), 4);
    }

    #[test]
    fn free_cells_matches_membership_oracle() {
        // 6x4 footprint with two 1x2 cores
        let region = FreeRegion::new(
            OrthoPolygon::rect(0, 0, 6, 4).unwrap(),
            vec![
                CoreBox {
                    id: "stair_0".into(),
                    kind: CoreKind::Stair,
                    rect: GridRect::new(0, 0, 1, 2),
                },
                CoreBox {
                    id: "elevator_1".into(),
                    kind: CoreKind::Elevator,
                    rect: GridRect::new(5, 2, 6, 4),
                },
            ],
        )
        .unwrap();
        let map = free_cells(&region, 1).unwrap();
        let mut want_empty = 0;
        let mut want_core = 0;
        for y in 0..4 {
            for x in 0..6 {
                let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
                let in_fp = region.footprint().contains_half_open(cx, cy);
                let in_core = region.cores().iter().any(|c| c.rect.contains_point(cx, cy));
                if in_fp && in_core {
                    want_core += 1;
                } else if in_fp {
                    want_empty += 1;
                }
            }
        }
        assert_eq!(map.count(Label::Empty), want_empty);
        assert_eq!(map.count(Label::Core(0)) + map.count(Label::Core(1)), want_core);
        // conservation: empty + core = footprint cells
        assert_eq!(want_empty + want_core, region.footprint().area() as usize);
    }
}
