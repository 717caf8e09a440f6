//! Constructive placement search.
//!
//! Candidate poses are enumerated deterministically: edge poses sweep wall
//! segments clockwise from the entrance with the object's back flush to the
//! wall; middle poses walk a coarse-to-fine interior lattice. Every pose
//! passes four hard filters in order: containment, collision, relation
//! consistency, and incremental reachability (after hypothetically placing,
//! the entrance must stay 4-connected to every retained object's clearance
//! zone). The first pose in scan order that passes wins; no randomness.

use super::groups::{build_macro_object, downgrade_matrix, normalize_groups, MacroObject};
use super::scene::{is_reachable, scene_grid, DiscardedObject, OccupancyGrid, PlacedScene, Placement};
use super::{
    Clearance, GlobalConstraint, GroupMember, ObjectGroup, ObjectSpec, PlacementConstraint,
    PlacementError, Relation, RelationKind, StructuralConstraint, DEFAULT_FAR_DISTANCE,
    DEFAULT_NEAR_DISTANCE,
};
use crate::geometry::{GridPoint, OrthoPolygon};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRules {
    /// Occupancy-grid cell size for reachability, grid units.
    pub cell_size: f64,
    /// Slide step along walls for edge poses.
    pub edge_step: f64,
    /// Interior lattice steps, coarse to fine.
    pub middle_steps: Vec<f64>,
    /// Minimum distance from the boundary for middle poses.
    pub middle_margin: f64,
    pub near_default: f64,
    pub far_default: f64,
    /// Gap between items packed on a surface.
    pub surface_gap: f64,
}

impl Default for PlacementRules {
    fn default() -> Self {
        Self {
            cell_size: 0.1,
            edge_step: 0.25,
            middle_steps: vec![1.0, 0.5, 0.25],
            middle_margin: 0.5,
            near_default: DEFAULT_NEAR_DISTANCE,
            far_default: DEFAULT_FAR_DISTANCE,
            surface_gap: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pose {
    x: f64,
    y: f64,
    rotation: u16,
    width: f64,
    depth: f64,
}

impl Pose {
    fn aabb(&self) -> (f64, f64, f64, f64) {
        (self.x, self.y, self.x + self.width, self.y + self.depth)
    }
}

fn rotated_extents(spec: &ObjectSpec, rotation: u16) -> (f64, f64) {
    if rotation % 180 == 0 {
        (spec.width, spec.depth)
    } else {
        (spec.depth, spec.width)
    }
}

/// Enumerates wall-flush poses, walls ordered clockwise starting at the wall
/// carrying the entrance.
fn edge_poses(room: &OrthoPolygon, entrance: [[f64; 2]; 2], spec: &ObjectSpec, rules: &PlacementRules) -> Vec<Pose> {
    let verts = room.vertices();
    let n = verts.len();
    // clockwise traversal of a CCW ring: reversed order
    let mut walls: Vec<(GridPoint, GridPoint)> = (0..n)
        .map(|i| (verts[(i + 1) % n], verts[i]))
        .collect();
    walls.reverse();
    // rotate so the entrance wall comes first
    let mid = (
        (entrance[0][0] + entrance[1][0]) / 2.0,
        (entrance[0][1] + entrance[1][1]) / 2.0,
    );
    if let Some(start) = walls.iter().position(|w| point_on_segment(*w, mid)) {
        walls.rotate_left(start);
    }

    let mut poses = Vec::new();
    for (p, q) in walls {
        // interior sits left of the CCW edge (q -> p), so right of (p -> q)
        let inward = if p.y == q.y {
            if q.x > p.x {
                Dir4::South // wall runs +x in CW order: interior below
            } else {
                Dir4::North
            }
        } else if q.y > p.y {
            Dir4::East
        } else {
            Dir4::West
        };
        // object back against the wall: front faces the interior
        let rotation = match inward {
            Dir4::North => 0,
            Dir4::West => 90,
            Dir4::South => 180,
            Dir4::East => 270,
        };
        if !spec.rotatable && rotation != 0 {
            continue;
        }
        let (w, d) = rotated_extents(spec, rotation);
        let wall_len = ((q.x - p.x).abs() + (q.y - p.y).abs()) as f64;
        let along = if p.y == q.y { w } else { d };
        if along > wall_len {
            continue;
        }
        let mut t = 0.0;
        while t + along <= wall_len + 1e-9 {
            let pose = match inward {
                Dir4::South => Pose {
                    // wall on the north side of the room
                    x: if q.x > p.x { p.x as f64 + t } else { p.x as f64 - t - w },
                    y: p.y as f64 - d,
                    rotation,
                    width: w,
                    depth: d,
                },
                Dir4::North => Pose {
                    x: if q.x > p.x { p.x as f64 + t } else { p.x as f64 - t - w },
                    y: p.y as f64,
                    rotation,
                    width: w,
                    depth: d,
                },
                Dir4::East => Pose {
                    x: p.x as f64,
                    y: if q.y > p.y { p.y as f64 + t } else { p.y as f64 - t - d },
                    rotation,
                    width: w,
                    depth: d,
                },
                Dir4::West => Pose {
                    x: p.x as f64 - w,
                    y: if q.y > p.y { p.y as f64 + t } else { p.y as f64 - t - d },
                    rotation,
                    width: w,
                    depth: d,
                },
            };
            poses.push(pose);
            t += rules.edge_step;
        }
    }
    poses
}

#[derive(Clone, Copy, PartialEq)]
enum Dir4 {
    North,
    East,
    South,
    West,
}

fn point_on_segment(seg: (GridPoint, GridPoint), p: (f64, f64)) -> bool {
    let (a, b) = seg;
    if a.x == b.x {
        (p.0 - a.x as f64).abs() < 1e-9
            && p.1 >= a.y.min(b.y) as f64 - 1e-9
            && p.1 <= a.y.max(b.y) as f64 + 1e-9
    } else {
        (p.1 - a.y as f64).abs() < 1e-9
            && p.0 >= a.x.min(b.x) as f64 - 1e-9
            && p.0 <= a.x.max(b.x) as f64 + 1e-9
    }
}

/// Interior lattice poses, coarse to fine, each kept at least
/// `middle_margin` away from the boundary.
fn middle_poses(room: &OrthoPolygon, spec: &ObjectSpec, rules: &PlacementRules) -> Vec<Pose> {
    let bbox = room.bounding_box();
    let rotations: &[u16] = if spec.rotatable { &[0, 90, 180, 270] } else { &[0] };
    let mut seen = std::collections::HashSet::new();
    let mut poses = Vec::new();
    for &step in &rules.middle_steps {
        let mut y = bbox.y0 as f64 + rules.middle_margin;
        while y < bbox.y1 as f64 {
            let mut x = bbox.x0 as f64 + rules.middle_margin;
            while x < bbox.x1 as f64 {
                for &rotation in rotations {
                    let (w, d) = rotated_extents(spec, rotation);
                    let key = (
                        (x * 1000.0).round() as i64,
                        (y * 1000.0).round() as i64,
                        rotation,
                    );
                    if seen.insert(key) {
                        poses.push(Pose {
                            x,
                            y,
                            rotation,
                            width: w,
                            depth: d,
                        });
                    }
                }
                x += step;
            }
            y += step;
        }
    }
    poses
}

fn pose_stream(
    room: &OrthoPolygon,
    entrance: [[f64; 2]; 2],
    spec: &ObjectSpec,
    global: GlobalConstraint,
    rules: &PlacementRules,
) -> Vec<Pose> {
    match global {
        GlobalConstraint::Edge => edge_poses(room, entrance, spec, rules),
        GlobalConstraint::Middle => middle_poses(room, spec, rules),
        GlobalConstraint::Unconstrained => {
            let mut poses = edge_poses(room, entrance, spec, rules);
            poses.extend(middle_poses(room, spec, rules));
            poses
        }
    }
}

fn boxes_overlap(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    let eps = 1e-9;
    a.0 + eps < b.2 && b.0 + eps < a.2 && a.1 + eps < b.3 && b.1 + eps < a.3
}

fn box_gap(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> f64 {
    let dx = (b.0 - a.2).max(a.0 - b.2).max(0.0);
    let dy = (b.1 - a.3).max(a.1 - b.3).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

fn relations_ok(
    aabb: (f64, f64, f64, f64),
    relations: &[Relation],
    scene: &PlacedScene,
    rules: &PlacementRules,
) -> bool {
    for rel in relations {
        let targets: Vec<(f64, f64, f64, f64)> = scene
            .placements
            .iter()
            .filter(|p| p.spec_id == rel.target || p.id == rel.target)
            .map(|p| p.aabb())
            .collect();
        if targets.is_empty() {
            continue; // target absent (discarded or later): vacuously satisfied
        }
        match rel.kind {
            RelationKind::Near => {
                let thr = rel.distance.unwrap_or(rules.near_default);
                if !targets.iter().any(|t| box_gap(aabb, *t) <= thr) {
                    return false;
                }
            }
            RelationKind::Far => {
                let thr = rel.distance.unwrap_or(rules.far_default);
                if !targets.iter().all(|t| box_gap(aabb, *t) >= thr) {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks the full hard-filter chain for a set of hypothetical instances
/// (one body for plain objects, the expansion for a macro).
fn instances_feasible(
    scene: &PlacedScene,
    base_grid: &OccupancyGrid,
    room: &OrthoPolygon,
    bounding: (f64, f64, f64, f64),
    instances: &[Placement],
    relations: &[Relation],
    middle_like: bool,
    rules: &PlacementRules,
) -> bool {
    // containment of the whole pattern
    if !room.contains_box(bounding.0, bounding.1, bounding.2, bounding.3) {
        return false;
    }
    if middle_like {
        let m = rules.middle_margin;
        if !room.contains_box(bounding.0 - m, bounding.1 - m, bounding.2 + m, bounding.3 + m) {
            return false;
        }
    }
    // collision against retained objects
    for p in scene.floor_placements() {
        let pb = p.aabb();
        for inst in instances {
            if boxes_overlap(pb, inst.aabb()) {
                return false;
            }
        }
    }
    // relation consistency measured on the pattern bounding box
    if !relations_ok(bounding, relations, scene, rules) {
        return false;
    }
    // incremental reachability with the hypothetical bodies in place
    let extra: Vec<(f64, f64, f64, f64)> = instances.iter().map(|p| p.aabb()).collect();
    let grid = base_grid.with_extra_boxes(&extra);
    if !grid.any_reached() {
        return false;
    }
    for p in scene.floor_placements() {
        if !is_reachable(&grid, p) {
            return false;
        }
    }
    for inst in instances {
        if !is_reachable(&grid, inst) {
            return false;
        }
    }
    true
}

/// First feasible pose for a single object under its constraint, or `None`.
pub fn find_feasible_placement(
    spec: &ObjectSpec,
    constraint: &PlacementConstraint,
    scene: &PlacedScene,
    rules: &PlacementRules,
) -> Option<Placement> {
    let base_grid = scene_grid(scene);
    find_single_pose(spec, constraint, scene, &base_grid, rules, &spec.id)
}

fn find_single_pose(
    spec: &ObjectSpec,
    constraint: &PlacementConstraint,
    scene: &PlacedScene,
    base_grid: &OccupancyGrid,
    rules: &PlacementRules,
    instance_id: &str,
) -> Option<Placement> {
    let poses = pose_stream(&scene.room, scene.entrance, spec, constraint.global, rules);
    let middle_like = constraint.global == GlobalConstraint::Middle;
    for pose in poses {
        let candidate = Placement {
            id: instance_id.to_string(),
            spec_id: spec.id.clone(),
            x: pose.x,
            y: pose.y,
            width: pose.width,
            depth: pose.depth,
            rotation: pose.rotation,
            clearance: spec.clearance,
            surface_parent: None,
        };
        let instances = [candidate];
        if instances_feasible(
            scene,
            base_grid,
            &scene.room,
            pose.aabb(),
            &instances,
            &constraint.relations,
            middle_like,
            rules,
        ) {
            let [candidate] = instances;
            return Some(candidate);
        }
    }
    None
}

/// Maps a sub-box given in an un-rotated `W x D` pattern frame into world
/// coordinates after rotating the pattern and anchoring its lower-left
/// corner at `(px, py)`.
fn rotate_sub_box(
    (px, py): (f64, f64),
    (pattern_w, pattern_d): (f64, f64),
    (ox, oy, w, h): (f64, f64, f64, f64),
    rotation: u16,
) -> (f64, f64, f64, f64) {
    match rotation {
        0 => (px + ox, py + oy, w, h),
        90 => (px + (pattern_d - oy - h), py + ox, h, w),
        180 => (px + (pattern_w - ox - w), py + (pattern_d - oy - h), w, h),
        270 => (px + oy, py + (pattern_w - ox - w), h, w),
        _ => unreachable!("rotation is a quarter turn"),
    }
}

fn expand_macro(macro_obj: &MacroObject, anchor: &ObjectSpec, pose: &Pose) -> Vec<Placement> {
    let pattern = (macro_obj.spec.width, macro_obj.spec.depth);
    let origin = (pose.x, pose.y);
    let mut out = Vec::new();
    for (i, &(ox, oy)) in macro_obj.anchor_offsets.iter().enumerate() {
        let row = i / macro_obj.cols as usize;
        let col = i % macro_obj.cols as usize;
        let (x, y, w, d) = rotate_sub_box(origin, pattern, (ox, oy, anchor.width, anchor.depth), pose.rotation);
        out.push(Placement {
            id: format!("{}#{}_{}", anchor.id, row, col),
            spec_id: anchor.id.clone(),
            x,
            y,
            width: w,
            depth: d,
            rotation: pose.rotation,
            clearance: anchor.clearance,
            surface_parent: None,
        });
    }
    if let Some((partner, offsets)) = &macro_obj.partner {
        for (i, &(ox, oy)) in offsets.iter().enumerate() {
            let row = i / macro_obj.cols as usize;
            let col = i % macro_obj.cols as usize;
            let (x, y, w, d) =
                rotate_sub_box(origin, pattern, (ox, oy, partner.width, partner.depth), pose.rotation);
            // partner faces the anchor: rotated a half turn relative to it
            out.push(Placement {
                id: format!("{}#{}_{}", partner.id, row, col),
                spec_id: partner.id.clone(),
                x,
                y,
                width: w,
                depth: d,
                rotation: (pose.rotation + 180) % 360,
                clearance: partner.clearance,
                surface_parent: None,
            });
        }
    }
    out
}

/// True when an `r x c` layout of the group's matrix anchor admits a
/// feasible pose in the scene's current state. Probes the same search the
/// placer runs, without mutating the scene.
pub fn matrix_fits(
    scene: &PlacedScene,
    group: &ObjectGroup,
    rows: u32,
    cols: u32,
    rules: &PlacementRules,
) -> bool {
    match build_macro_object(group, rows, cols) {
        Ok(macro_obj) => find_macro_pose(scene, group, &macro_obj, rules).is_some(),
        Err(_) => false,
    }
}

/// Places every group in priority order. Matrix anchors go in as macro
/// patterns, downgraded until they fit; failed objects are discarded and
/// logged, never force-placed.
pub fn place_all(
    room: &OrthoPolygon,
    entrance: [[f64; 2]; 2],
    groups: Vec<ObjectGroup>,
    rules: &PlacementRules,
) -> Result<PlacedScene, PlacementError> {
    if !entrance_on_boundary(room, entrance) {
        return Err(PlacementError::BadEntrance);
    }
    let groups = normalize_groups(groups)?;
    let mut scene = PlacedScene::new(room.clone(), entrance, rules.cell_size);
    if !scene_grid(&scene).any_free() {
        return Err(PlacementError::NoFreeSpace);
    }

    for group in &groups {
        match group.anchor_constraint.structural {
            StructuralConstraint::Matrix { rows, cols, .. } => {
                place_matrix_group(&mut scene, group, rows, cols, rules)?;
            }
            _ => place_plain_group(&mut scene, group, rules)?,
        }
    }
    Ok(scene)
}

fn entrance_on_boundary(room: &OrthoPolygon, entrance: [[f64; 2]; 2]) -> bool {
    let n = room.vertices().len();
    (0..n).any(|i| {
        let seg = (room.vertices()[i], room.vertices()[(i + 1) % n]);
        point_on_segment(seg, (entrance[0][0], entrance[0][1]))
            && point_on_segment(seg, (entrance[1][0], entrance[1][1]))
    })
}

fn place_matrix_group(
    scene: &mut PlacedScene,
    group: &ObjectGroup,
    rows: u32,
    cols: u32,
    rules: &PlacementRules,
) -> Result<(), PlacementError> {
    let (mut r, mut c) = (rows, cols);
    while r >= 1 && c >= 1 {
        let macro_obj = build_macro_object(group, r, c)?;
        if let Some(placed) = find_macro_pose(scene, group, &macro_obj, rules) {
            scene.placements.extend(placed);
            place_members(scene, group, rules, true)?;
            return Ok(());
        }
        let (nr, nc) = downgrade_matrix(r, c);
        r = nr;
        c = nc;
    }
    scene.discarded.push(DiscardedObject {
        id: group.anchor.id.clone(),
        reason: format!("no feasible matrix size from {rows}x{cols} down"),
    });
    Ok(())
}

fn find_macro_pose(
    scene: &PlacedScene,
    group: &ObjectGroup,
    macro_obj: &MacroObject,
    rules: &PlacementRules,
) -> Option<Vec<Placement>> {
    let base_grid = scene_grid(scene);
    let poses = pose_stream(
        &scene.room,
        scene.entrance,
        &macro_obj.spec,
        group.anchor_constraint.global,
        rules,
    );
    let middle_like = group.anchor_constraint.global == GlobalConstraint::Middle;
    for pose in poses {
        let instances = expand_macro(macro_obj, &group.anchor, &pose);
        if instances_feasible(
            scene,
            &base_grid,
            &scene.room,
            pose.aabb(),
            &instances,
            &group.anchor_constraint.relations,
            middle_like,
            rules,
        ) {
            return Some(instances);
        }
    }
    None
}

fn place_plain_group(
    scene: &mut PlacedScene,
    group: &ObjectGroup,
    rules: &PlacementRules,
) -> Result<(), PlacementError> {
    // the anchor may carry a paired partner, co-placed as one pattern
    let paired_member = group.members.iter().find(|m| {
        matches!(&m.constraint.structural,
            StructuralConstraint::Paired { partner, .. } if *partner == group.anchor.id)
    });

    let placed_anchor = if paired_member.is_some() {
        find_paired_pose(scene, group, paired_member.unwrap(), rules)
    } else {
        let base_grid = scene_grid(scene);
        find_single_pose(
            &group.anchor,
            &group.anchor_constraint,
            scene,
            &base_grid,
            rules,
            &group.anchor.id,
        )
        .map(|p| vec![p])
    };

    let Some(bodies) = placed_anchor else {
        // anchor failed: the whole group is anchored to it, so discard it all
        scene.discarded.push(DiscardedObject {
            id: group.anchor.id.clone(),
            reason: "anchor has no feasible placement".into(),
        });
        for m in &group.members {
            scene.discarded.push(DiscardedObject {
                id: m.spec.id.clone(),
                reason: format!("group anchor '{}' was discarded", group.anchor.id),
            });
        }
        return Ok(());
    };
    let paired_id = paired_member.map(|m| m.spec.id.clone());
    scene.placements.extend(bodies);
    place_members_filtered(scene, group, rules, paired_id.as_deref())?;
    Ok(())
}

fn place_members(
    scene: &mut PlacedScene,
    group: &ObjectGroup,
    rules: &PlacementRules,
    skip_paired_to_anchor: bool,
) -> Result<(), PlacementError> {
    let skip: Option<String> = if skip_paired_to_anchor {
        group
            .members
            .iter()
            .find(|m| {
                matches!(&m.constraint.structural,
                    StructuralConstraint::Paired { partner, .. } if *partner == group.anchor.id)
            })
            .map(|m| m.spec.id.clone())
    } else {
        None
    };
    place_members_filtered(scene, group, rules, skip.as_deref())
}

fn place_members_filtered(
    scene: &mut PlacedScene,
    group: &ObjectGroup,
    rules: &PlacementRules,
    skip_member: Option<&str>,
) -> Result<(), PlacementError> {
    for member in &group.members {
        if Some(member.spec.id.as_str()) == skip_member {
            continue; // already co-placed with the anchor
        }
        if let Some(surface) = &member.on_surface_of {
            place_on_surface(scene, &member.spec, surface, rules);
            continue;
        }
        // members bind to the anchor frame: an implicit near-anchor relation
        // when they carry no explicit one
        let mut constraint = member.constraint.clone();
        if constraint.relations.is_empty() {
            constraint.relations.push(Relation {
                kind: RelationKind::Near,
                target: group.anchor.id.clone(),
                distance: Some(rules.near_default),
            });
        }
        let base_grid = scene_grid(scene);
        match find_single_pose(&member.spec, &constraint, scene, &base_grid, rules, &member.spec.id) {
            Some(p) => scene.placements.push(p),
            None => scene.discarded.push(DiscardedObject {
                id: member.spec.id.clone(),
                reason: "no feasible placement".into(),
            }),
        }
    }
    Ok(())
}

/// Co-places an anchor and its paired partner as one rigid pattern: the
/// partner sits `offset` behind the anchor, centered.
fn find_paired_pose(
    scene: &PlacedScene,
    group: &ObjectGroup,
    member: &GroupMember,
    rules: &PlacementRules,
) -> Option<Vec<Placement>> {
    let offset = match &member.constraint.structural {
        StructuralConstraint::Paired { offset, .. } => *offset,
        _ => 0.0,
    };
    let a = &group.anchor;
    let m = &member.spec;
    let pattern_w = a.width.max(m.width);
    let pattern_d = a.depth + offset + m.depth;
    let pattern_spec = ObjectSpec {
        id: format!("{}__pair", a.id),
        width: pattern_w,
        depth: pattern_d,
        rotatable: a.rotatable,
        clearance: Clearance {
            front: 0.0,
            right: 0.0,
            back: 0.0,
            left: 0.0,
        },
    };
    let base_grid = scene_grid(scene);
    let poses = pose_stream(
        &scene.room,
        scene.entrance,
        &pattern_spec,
        group.anchor_constraint.global,
        rules,
    );
    let middle_like = group.anchor_constraint.global == GlobalConstraint::Middle;
    for pose in poses {
        let pattern = (pattern_w, pattern_d);
        let origin = (pose.x, pose.y);
        let (ax, ay, aw, ad) = rotate_sub_box(
            origin,
            pattern,
            ((pattern_w - a.width) / 2.0, 0.0, a.width, a.depth),
            pose.rotation,
        );
        let (mx, my, mw, md) = rotate_sub_box(
            origin,
            pattern,
            ((pattern_w - m.width) / 2.0, a.depth + offset, m.width, m.depth),
            pose.rotation,
        );
        let instances = vec![
            Placement {
                id: a.id.clone(),
                spec_id: a.id.clone(),
                x: ax,
                y: ay,
                width: aw,
                depth: ad,
                rotation: pose.rotation,
                clearance: a.clearance,
                surface_parent: None,
            },
            Placement {
                id: m.id.clone(),
                spec_id: m.id.clone(),
                x: mx,
                y: my,
                width: mw,
                depth: md,
                rotation: (pose.rotation + 180) % 360,
                clearance: m.clearance,
                surface_parent: None,
            },
        ];
        if instances_feasible(
            scene,
            &base_grid,
            &scene.room,
            pose.aabb(),
            &instances,
            &group.anchor_constraint.relations,
            middle_like,
            rules,
        ) {
            return Some(instances);
        }
    }
    None
}

/// Shelf-packs an item onto the top footprint of a placed parent. Surface
/// items do not touch the floor grid and carry no reachability requirement.
fn place_on_surface(scene: &mut PlacedScene, spec: &ObjectSpec, parent_id: &str, rules: &PlacementRules) {
    let Some(parent) = scene
        .placements
        .iter()
        .find(|p| p.id == parent_id || p.spec_id == parent_id)
        .cloned()
    else {
        scene.discarded.push(DiscardedObject {
            id: spec.id.clone(),
            reason: format!("surface parent '{parent_id}' is not placed"),
        });
        return;
    };
    let gap = rules.surface_gap;
    let siblings: Vec<(f64, f64, f64, f64)> = scene
        .placements
        .iter()
        .filter(|p| p.surface_parent.as_deref() == Some(parent.id.as_str()))
        .map(|p| p.aabb())
        .collect();
    let (px0, py0, px1, py1) = parent.aabb();
    // shelf packing: rows bottom-up, items left to right
    let mut y = py0 + gap;
    while y + spec.depth <= py1 - gap + 1e-9 {
        let mut x = px0 + gap;
        while x + spec.width <= px1 - gap + 1e-9 {
            let cand = (x, y, x + spec.width, y + spec.depth);
            if !siblings.iter().any(|s| boxes_overlap(*s, cand)) {
                scene.placements.push(Placement {
                    id: spec.id.clone(),
                    spec_id: spec.id.clone(),
                    x,
                    y,
                    width: spec.width,
                    depth: spec.depth,
                    rotation: 0,
                    clearance: Clearance {
                        front: 0.0,
                        right: 0.0,
                        back: 0.0,
                        left: 0.0,
                    },
                    surface_parent: Some(parent.id.clone()),
                });
                return;
            }
            x += spec.width + gap;
        }
        y += spec.depth + gap;
    }
    scene.discarded.push(DiscardedObject {
        id: spec.id.clone(),
        reason: format!("no space left on surface '{}'", parent.id),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room6() -> OrthoPolygon {
        OrthoPolygon::rect(0, 0, 6, 6).unwrap()
    }

    fn entrance() -> [[f64; 2]; 2] {
        [[2.5, 0.0], [3.5, 0.0]]
    }

    fn single_group(spec: ObjectSpec, global: GlobalConstraint) -> ObjectGroup {
        ObjectGroup {
            anchor: spec,
            anchor_constraint: PlacementConstraint {
                global,
                structural: StructuralConstraint::Single,
                relations: vec![],
            },
            members: vec![],
        }
    }

    #[test]
    fn middle_table_lands_at_scan_start() {
        let scene = PlacedScene::new(room6(), entrance(), 0.1);
        let spec = ObjectSpec::new("table", 1.0, 1.0);
        let rules = PlacementRules::default();
        let placed = find_feasible_placement(
            &spec,
            &PlacementConstraint {
                global: GlobalConstraint::Middle,
                structural: StructuralConstraint::Single,
                relations: vec![],
            },
            &scene,
            &rules,
        )
        .expect("fits in an empty room");
        // first interior lattice point: margin offset from the bbox corner
        assert_eq!((placed.x, placed.y), (0.5, 0.5));
    }

    #[test]
    fn edge_object_sits_flush_with_back_to_wall() {
        let scene = PlacedScene::new(room6(), entrance(), 0.1);
        let spec = ObjectSpec::new("wardrobe", 1.2, 0.6);
        let rules = PlacementRules::default();
        let placed = find_feasible_placement(
            &spec,
            &PlacementConstraint {
                global: GlobalConstraint::Edge,
                structural: StructuralConstraint::Single,
                relations: vec![],
            },
            &scene,
            &rules,
        )
        .expect("fits along a wall");
        // entrance wall is south: first wall in clockwise order
        assert_eq!(placed.y, 0.0);
        assert_eq!(placed.rotation, 0);
    }

    #[test]
    fn sealing_the_entrance_corridor_is_vetoed() {
        // narrow 2-wide corridor room: the only pose a non-rotatable
        // full-width wardrobe has is across the entrance, which would wall
        // off the shelf at the far end
        let room = OrthoPolygon::rect(0, 0, 2, 8).unwrap();
        let mut scene = PlacedScene::new(room, [[0.5, 0.0], [1.5, 0.0]], 0.1);
        scene.placements.push(Placement {
            id: "shelf".into(),
            spec_id: "shelf".into(),
            x: 0.0,
            y: 7.0,
            width: 2.0,
            depth: 1.0,
            rotation: 180, // front faces south, into the corridor
            clearance: Clearance::default(),
            surface_parent: None,
        });
        let wardrobe = ObjectSpec {
            id: "wardrobe".into(),
            width: 2.0,
            depth: 1.0,
            rotatable: false,
            clearance: Clearance::default(),
        };
        let rules = PlacementRules::default();
        let result = find_feasible_placement(
            &wardrobe,
            &PlacementConstraint {
                global: GlobalConstraint::Unconstrained,
                structural: StructuralConstraint::Single,
                relations: vec![],
            },
            &scene,
            &rules,
        );
        assert!(result.is_none(), "corridor-sealing pose must be vetoed");
        // sanity: without the reachability requirement the pose would fit
        assert!(scene.room.contains_box(0.0, 0.0, 2.0, 1.0));
    }

    #[test]
    fn near_relation_is_honored_and_verified() {
        let room = OrthoPolygon::rect(0, 0, 8, 8).unwrap();
        let sofa = single_group(ObjectSpec::new("sofa", 2.0, 0.9), GlobalConstraint::Edge);
        let mut side = single_group(ObjectSpec::new("side_table", 0.5, 0.5), GlobalConstraint::Unconstrained);
        side.anchor_constraint.relations.push(Relation {
            kind: RelationKind::Near,
            target: "sofa".into(),
            distance: Some(2.0),
        });
        let rules = PlacementRules::default();
        let scene = place_all(&room, [[3.5, 0.0], [4.5, 0.0]], vec![sofa, side], &rules).unwrap();
        let sofa_p = scene.placements.iter().find(|p| p.id == "sofa").unwrap();
        let side_p = scene.placements.iter().find(|p| p.id == "side_table").unwrap();
        let gap = box_gap(sofa_p.aabb(), side_p.aabb());
        assert!(gap <= 2.0 + 1e-9, "side table gap {gap} exceeds relation bound");
        assert!(scene.discarded.is_empty());
    }

    #[test]
    fn empty_group_list_gives_empty_scene() {
        let rules = PlacementRules::default();
        let scene = place_all(&room6(), entrance(), vec![], &rules).unwrap();
        assert!(scene.placements.is_empty());
        assert!(scene.discarded.is_empty());
    }

    #[test]
    fn entrance_must_lie_on_boundary() {
        let rules = PlacementRules::default();
        let err = place_all(&room6(), [[2.5, 3.0], [3.5, 3.0]], vec![], &rules);
        assert!(matches!(err, Err(PlacementError::BadEntrance)));
    }

    #[test]
    fn surface_items_pack_without_overlap() {
        let room = OrthoPolygon::rect(0, 0, 6, 6).unwrap();
        let mut desk = single_group(ObjectSpec::new("desk", 1.6, 0.8), GlobalConstraint::Edge);
        for i in 0..3 {
            desk.members.push(GroupMember {
                spec: ObjectSpec::new(format!("book_{i}"), 0.3, 0.2),
                constraint: PlacementConstraint::default(),
                on_surface_of: Some("desk".into()),
            });
        }
        let rules = PlacementRules::default();
        let scene = place_all(&room, [[2.5, 0.0], [3.5, 0.0]], vec![desk], &rules).unwrap();
        let books: Vec<&Placement> = scene
            .placements
            .iter()
            .filter(|p| p.surface_parent.is_some())
            .collect();
        assert_eq!(books.len(), 3);
        let desk_p = scene.placements.iter().find(|p| p.id == "desk").unwrap();
        let (dx0, dy0, dx1, dy1) = desk_p.aabb();
        for b in &books {
            let (x0, y0, x1, y1) = b.aabb();
            assert!(x0 >= dx0 && y0 >= dy0 && x1 <= dx1 && y1 <= dy1, "book on desk");
        }
        for i in 0..books.len() {
            for j in (i + 1)..books.len() {
                assert!(!boxes_overlap(books[i].aabb(), books[j].aabb()));
            }
        }
    }

    #[test]
    fn matrix_downgrades_until_it_fits() {
        let room = OrthoPolygon::rect(0, 0, 5, 5).unwrap();
        let desks = ObjectGroup {
            anchor: ObjectSpec {
                id: "desk".into(),
                width: 1.2,
                depth: 0.6,
                rotatable: false,
                clearance: Clearance { front: 0.3, right: 0.0, back: 0.0, left: 0.0 },
            },
            anchor_constraint: PlacementConstraint {
                global: GlobalConstraint::Middle,
                structural: StructuralConstraint::Matrix { rows: 5, cols: 5, spacing: 0.7 },
                relations: vec![],
            },
            members: vec![],
        };
        let rules = PlacementRules::default();
        let scene = place_all(&room, [[2.0, 0.0], [3.0, 0.0]], vec![desks], &rules).unwrap();
        let desks_placed: Vec<&Placement> =
            scene.placements.iter().filter(|p| p.spec_id == "desk").collect();
        assert!(!desks_placed.is_empty(), "some grid must fit");
        assert!(desks_placed.len() < 25, "requested 5x5 cannot fit a 5x5 room");
        // all inside, no overlaps
        for d in &desks_placed {
            let (x0, y0, x1, y1) = d.aabb();
            assert!(scene.room.contains_box(x0, y0, x1, y1));
        }
    }
}
