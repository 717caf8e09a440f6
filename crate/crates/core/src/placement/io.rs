//! Placement interchange: the room+constraint input document and the placed
//! scene output (JSON and SVG top view).

use super::{
    Clearance, GlobalConstraint, GroupMember, ObjectGroup, ObjectSpec, PlacedScene,
    PlacementConstraint, Relation, StructuralConstraint,
};
use crate::geometry::{GridPoint, OrthoPolygon};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlacementIoError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("room polygon invalid: {0}")]
    BadRoom(#[from] crate::geometry::GeometryError),
    #[error("object '{0}' references unknown group anchor")]
    NoAnchor(String),
}

/// Input document: room polygon, entrance segment, and objects carrying the
/// edge/middle/matrix/paired constraint vocabulary. Objects sharing a
/// `group` field form one group; the anchor is the object flagged
/// `anchor: true` (or the first of the group). Ungrouped objects become
/// singleton groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementDoc {
    pub room: RoomSpec,
    pub entrance: EntranceSpec,
    pub objects: Vec<ObjectDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomSpec {
    pub vertices: Vec<[i64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntranceSpec {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectDoc {
    pub id: String,
    pub width: f64,
    pub depth: f64,
    #[serde(default = "default_true")]
    pub rotatable: bool,
    #[serde(default)]
    pub clearance: Option<Clearance>,
    #[serde(default = "default_global")]
    pub global: GlobalConstraint,
    #[serde(default = "default_structural")]
    pub structural: StructuralConstraint,
    #[serde(default)]
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub anchor: bool,
    /// Pack this object on top of another instead of on the floor.
    #[serde(default)]
    pub on: Option<String>,
}

fn default_true() -> bool {
    true
}

fn default_global() -> GlobalConstraint {
    GlobalConstraint::Unconstrained
}

fn default_structural() -> StructuralConstraint {
    StructuralConstraint::Single
}

impl PlacementDoc {
    pub fn from_json(text: &str) -> Result<Self, PlacementIoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn room_polygon(&self) -> Result<OrthoPolygon, PlacementIoError> {
        Ok(OrthoPolygon::new(
            self.room
                .vertices
                .iter()
                .map(|v| GridPoint::new(v[0], v[1]))
                .collect(),
        )?)
    }

    pub fn entrance(&self) -> [[f64; 2]; 2] {
        [self.entrance.from, self.entrance.to]
    }

    /// Folds the flat object list into anchor+member groups.
    pub fn groups(&self) -> Result<Vec<ObjectGroup>, PlacementIoError> {
        let spec_of = |o: &ObjectDoc| ObjectSpec {
            id: o.id.clone(),
            width: o.width,
            depth: o.depth,
            rotatable: o.rotatable,
            clearance: o.clearance.unwrap_or_default(),
        };
        let constraint_of = |o: &ObjectDoc| PlacementConstraint {
            global: o.global,
            structural: o.structural.clone(),
            relations: o.relations.clone(),
        };

        let mut groups: Vec<ObjectGroup> = Vec::new();
        let mut keyed: std::collections::HashMap<String, usize> = Default::default();
        // anchors first, in declaration order
        for o in &self.objects {
            let Some(key) = &o.group else { continue };
            if o.anchor || !keyed.contains_key(key) {
                if let Some(&i) = keyed.get(key) {
                    // an explicit anchor supersedes the provisional first member
                    if o.anchor {
                        let prev = groups[i].anchor.clone();
                        let prev_constraint = groups[i].anchor_constraint.clone();
                        groups[i].anchor = spec_of(o);
                        groups[i].anchor_constraint = constraint_of(o);
                        groups[i].members.insert(
                            0,
                            GroupMember {
                                spec: prev,
                                constraint: prev_constraint,
                                on_surface_of: None,
                            },
                        );
                    }
                } else {
                    keyed.insert(key.clone(), groups.len());
                    groups.push(ObjectGroup {
                        anchor: spec_of(o),
                        anchor_constraint: constraint_of(o),
                        members: vec![],
                    });
                }
            }
        }
        // members and singletons
        for o in &self.objects {
            match &o.group {
                Some(key) => {
                    let &i = keyed.get(key).ok_or_else(|| PlacementIoError::NoAnchor(o.id.clone()))?;
                    if groups[i].anchor.id == o.id {
                        continue;
                    }
                    groups[i].members.push(GroupMember {
                        spec: spec_of(o),
                        constraint: constraint_of(o),
                        on_surface_of: o.on.clone(),
                    });
                }
                None => {
                    if let Some(parent) = &o.on {
                        // surface item rides on another object's group
                        let host = groups
                            .iter_mut()
                            .find(|g| {
                                g.anchor.id == *parent
                                    || g.members.iter().any(|m| m.spec.id == *parent)
                            })
                            .ok_or_else(|| PlacementIoError::NoAnchor(o.id.clone()))?;
                        host.members.push(GroupMember {
                            spec: spec_of(o),
                            constraint: constraint_of(o),
                            on_surface_of: Some(parent.clone()),
                        });
                    } else {
                        groups.push(ObjectGroup {
                            anchor: spec_of(o),
                            anchor_constraint: constraint_of(o),
                            members: vec![],
                        });
                    }
                }
            }
        }
        Ok(groups)
    }
}

pub fn scene_to_json(scene: &PlacedScene) -> String {
    serde_json::to_string_pretty(scene).expect("scene serializes")
}

pub fn scene_from_json(text: &str) -> Result<PlacedScene, serde_json::Error> {
    serde_json::from_str(text)
}

/// Top-view SVG: room outline, entrance mark, object boxes with labels.
pub fn scene_to_svg(scene: &PlacedScene) -> String {
    let bbox = scene.room.bounding_box();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        bbox.x0 - 1,
        -bbox.y1 - 1,
        bbox.width() + 2,
        bbox.height() + 2,
        (bbox.width() + 2) * 60,
        (bbox.height() + 2) * 60,
    );
    // room outline
    let mut d = String::new();
    for (i, v) in scene.room.vertices().iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{} {} ", v.x, -v.y);
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        "  <path d=\"{d}\" fill=\"#fafafa\" stroke=\"#222\" stroke-width=\"0.08\"/>"
    );
    // entrance
    let e = scene.entrance;
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2a9d2a\" stroke-width=\"0.12\"/>",
        e[0][0], -e[0][1], e[1][0], -e[1][1]
    );
    for p in &scene.placements {
        let (x0, y0, x1, y1) = p.aabb();
        let fill = if p.surface_parent.is_some() { "#ffd9a0" } else { "#9ec5e8" };
        let _ = writeln!(
            svg,
            "  <rect x=\"{x0}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"#456\" stroke-width=\"0.03\"><title>{}</title></rect>",
            -y1,
            x1 - x0,
            y1 - y0,
            p.id
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"0.22\" text-anchor=\"middle\" fill=\"#123\">{}</text>",
            (x0 + x1) / 2.0,
            -(y0 + y1) / 2.0 + 0.08,
            p.id
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_groups_fold_correctly() {
        let text = r#"{
          "room": {"vertices": [[0,0],[8,0],[8,8],[0,8]]},
          "entrance": {"from": [3.0, 0.0], "to": [4.0, 0.0]},
          "objects": [
            {"id": "desk", "width": 1.2, "depth": 0.6, "global": "middle",
             "structural": {"kind": "matrix", "rows": 3, "cols": 3, "spacing": 0.8},
             "group": "desks", "anchor": true},
            {"id": "chair", "width": 0.5, "depth": 0.5, "group": "desks",
             "structural": {"kind": "paired", "partner": "desk", "offset": 0.3}},
            {"id": "rug", "width": 2.0, "depth": 1.5, "global": "middle"},
            {"id": "mug", "width": 0.1, "depth": 0.1, "on": "desk"}
          ]
        }"#;
        let doc = PlacementDoc::from_json(text).unwrap();
        let groups = doc.groups().unwrap();
        assert_eq!(groups.len(), 2);
        let desks = groups.iter().find(|g| g.anchor.id == "desk").unwrap();
        assert_eq!(desks.members.len(), 2); // chair + mug
        assert!(desks.members.iter().any(|m| m.on_surface_of.as_deref() == Some("desk")));
        let room = doc.room_polygon().unwrap();
        assert_eq!(room.area(), 64);
    }

    #[test]
    fn scene_json_round_trips() {
        let room = OrthoPolygon::rect(0, 0, 4, 4).unwrap();
        let scene = PlacedScene::new(room, [[1.0, 0.0], [2.0, 0.0]], 0.1);
        let text = scene_to_json(&scene);
        let back = scene_from_json(&text).unwrap();
        assert_eq!(back.placements.len(), 0);
        assert_eq!(back.cell_size, 0.1);
    }
}
