//! Geometric scene queries over a static scene document: cross-floor path
//! connectivity through portals, on-top and containment checks against
//! object bounding boxes, and filtered object listing. Queries never mutate
//! the document.

pub mod protocol;
pub mod provision;

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

pub const SCENE_SCHEMA_VERSION: u32 = 1;

/// Height tolerance below a surface top for the on-top band.
pub const SURFACE_EPSILON: f64 = 0.02;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unknown room '{0}'")]
    UnknownRoom(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("portal '{0}' references missing room '{1}'")]
    BadPortal(String, String),
    #[error("object tree has a cycle through '{0}'")]
    CyclicTree(String),
    #[error("object '{0}' has a non-positive bounding box")]
    BadAabb(String),
    #[error("unsupported scene schema version {0}")]
    BadVersion(u32),
    #[error("no space in '{0}' for '{1}'")]
    NoSpace(String, String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneRoom {
    pub id: String,
    pub floor: i32,
    /// Plan-view polygon, (x, z) coordinates.
    pub polygon: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortalKind {
    Door,
    Stair,
    Elevator,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortalEnd {
    pub room: String,
    pub floor: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenePortal {
    pub id: String,
    pub kind: PortalKind,
    pub endpoints: [PortalEnd; 2],
    #[serde(default)]
    pub position: Option<[f64; 2]>,
}

/// Axis-aligned box; y is the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn center(&self) -> [f64; 3] {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        ]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    /// Asset tag used for fuzzy keyword matching.
    pub asset: String,
    pub position: [f64; 3],
    pub aabb: Aabb,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub floor: Option<i32>,
}

/// Static scene document: rooms with plan polygons, portals wiring rooms
/// together (stairs and elevators cross floors), and an object tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneDoc {
    pub version: u32,
    pub rooms: Vec<SceneRoom>,
    pub portals: Vec<ScenePortal>,
    pub objects: Vec<SceneObject>,
    /// Local asset-property table consulted by object listing.
    #[serde(default)]
    pub asset_props: HashMap<String, serde_json::Value>,
}

impl SceneDoc {
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let doc: SceneDoc = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.version != SCENE_SCHEMA_VERSION {
            return Err(SceneError::BadVersion(self.version));
        }
        let room_ids: HashSet<&str> = self.rooms.iter().map(|r| r.id.as_str()).collect();
        for portal in &self.portals {
            for end in &portal.endpoints {
                if !room_ids.contains(end.room.as_str()) {
                    return Err(SceneError::BadPortal(portal.id.clone(), end.room.clone()));
                }
            }
        }
        let ids: HashMap<&str, &SceneObject> =
            self.objects.iter().map(|o| (o.id.as_str(), o)).collect();
        for obj in &self.objects {
            if obj.aabb.max[0] <= obj.aabb.min[0]
                || obj.aabb.max[1] <= obj.aabb.min[1]
                || obj.aabb.max[2] <= obj.aabb.min[2]
            {
                return Err(SceneError::BadAabb(obj.id.clone()));
            }
            // walk ancestry; a cycle would loop past the object count
            let mut cur = obj.parent.as_deref();
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if steps > self.objects.len() {
                    return Err(SceneError::CyclicTree(obj.id.clone()));
                }
                cur = ids
                    .get(p)
                    .ok_or_else(|| SceneError::UnknownObject(p.to_string()))?
                    .parent
                    .as_deref();
            }
        }
        Ok(())
    }

    pub fn room(&self, id: &str) -> Result<&SceneRoom, SceneError> {
        self.rooms
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| SceneError::UnknownRoom(id.to_string()))
    }

    pub fn object(&self, id: &str) -> Result<&SceneObject, SceneError> {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| SceneError::UnknownObject(id.to_string()))
    }

    /// Resolves a keyword or exact id to one object: exact id wins, then the
    /// first case-insensitive asset-tag substring match.
    pub fn resolve_object(&self, key: &str) -> Result<&SceneObject, SceneError> {
        if let Ok(o) = self.object(key) {
            return Ok(o);
        }
        let lower = key.to_lowercase();
        self.objects
            .iter()
            .find(|o| o.asset.to_lowercase().contains(&lower))
            .ok_or_else(|| SceneError::UnknownObject(key.to_string()))
    }

    pub fn children_of(&self, id: &str) -> Vec<&SceneObject> {
        self.objects
            .iter()
            .filter(|o| o.parent.as_deref() == Some(id))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathResult {
    pub reachable: bool,
    /// Portal ids along a shortest route, empty when start equals goal.
    pub route: Vec<String>,
}

/// Builds the room-portal graph and returns a shortest route (by portal
/// count) between two rooms. Portals are undirected; stairs and elevators
/// connect across floors like any other edge.
pub fn check_path(doc: &SceneDoc, from: &str, to: &str) -> Result<PathResult, SceneError> {
    doc.room(from)?;
    doc.room(to)?;
    if from == to {
        return Ok(PathResult {
            reachable: true,
            route: vec![],
        });
    }
    // adjacency in portal declaration order keeps routes deterministic
    let mut adjacency: HashMap<&str, Vec<(&str, &str)>> = HashMap::new();
    for portal in &doc.portals {
        let a = portal.endpoints[0].room.as_str();
        let b = portal.endpoints[1].room.as_str();
        adjacency.entry(a).or_default().push((b, portal.id.as_str()));
        adjacency.entry(b).or_default().push((a, portal.id.as_str()));
    }
    let mut prev: HashMap<&str, (&str, &str)> = HashMap::new();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(from);
    queue.push_back(from);
    while let Some(room) = queue.pop_front() {
        if room == to {
            let mut route = Vec::new();
            let mut cur = to;
            while cur != from {
                let (p, portal) = prev[cur];
                route.push(portal.to_string());
                cur = p;
            }
            route.reverse();
            return Ok(PathResult {
                reachable: true,
                route,
            });
        }
        if let Some(neighbors) = adjacency.get(room) {
            for &(next, portal) in neighbors {
                if seen.insert(next) {
                    prev.insert(next, (room, portal));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(PathResult {
        reachable: false,
        route: vec![],
    })
}

/// Children resting on top of the target: centroid height within
/// `[top - SURFACE_EPSILON, top + child_height / 2]`.
pub fn check_surface(doc: &SceneDoc, target: &str) -> Result<Vec<String>, SceneError> {
    let parent = doc.resolve_object(target)?;
    let top = parent.aabb.max[1];
    Ok(doc
        .children_of(&parent.id)
        .into_iter()
        .filter(|child| {
            let cy = child.aabb.center()[1];
            let eps_above = child.aabb.height() / 2.0;
            cy >= top - SURFACE_EPSILON && cy <= top + eps_above
        })
        .map(|c| c.id.clone())
        .collect())
}

/// Children stored inside the container: centroid height strictly within
/// the container's vertical range.
pub fn search_contents(doc: &SceneDoc, container: &str) -> Result<Vec<String>, SceneError> {
    let parent = doc.resolve_object(container)?;
    let (y_min, y_max) = (parent.aabb.min[1], parent.aabb.max[1]);
    Ok(doc
        .children_of(&parent.id)
        .into_iter()
        .filter(|child| {
            let cy = child.aabb.center()[1];
            cy > y_min && cy < y_max
        })
        .map(|c| c.id.clone())
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectListing {
    pub id: String,
    pub asset: String,
    pub room: Option<String>,
    pub position: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<serde_json::Value>,
}

/// Lists objects filtered by room (plan-view centroid in the room polygon,
/// floors matched when known) and by keyword/id (exact id, else
/// case-insensitive substring on the asset tag). Properties come from the
/// local asset table.
pub fn list_objects(
    doc: &SceneDoc,
    room: Option<&str>,
    keyword: Option<&str>,
) -> Result<Vec<ObjectListing>, SceneError> {
    let room_spec = match room {
        Some(id) => Some(doc.room(id)?),
        None => None,
    };
    let mut out = Vec::new();
    for obj in &doc.objects {
        if let Some(r) = room_spec {
            if let Some(f) = obj.floor {
                if f != r.floor {
                    continue;
                }
            }
            let c = obj.aabb.center();
            if !point_in_poly(&r.polygon, (c[0], c[2])) {
                continue;
            }
        }
        if let Some(k) = keyword {
            let lower = k.to_lowercase();
            if obj.id != k && !obj.asset.to_lowercase().contains(&lower) {
                continue;
            }
        }
        out.push(ObjectListing {
            id: obj.id.clone(),
            asset: obj.asset.clone(),
            room: containing_room(doc, obj).map(|r| r.id.clone()),
            position: obj.position,
            properties: doc.asset_props.get(&obj.asset).cloned(),
        });
    }
    Ok(out)
}

fn containing_room<'a>(doc: &'a SceneDoc, obj: &SceneObject) -> Option<&'a SceneRoom> {
    let c = obj.aabb.center();
    doc.rooms
        .iter()
        .filter(|r| obj.floor.map(|f| f == r.floor).unwrap_or(true))
        .find(|r| point_in_poly(&r.polygon, (c[0], c[2])))
}

fn point_in_poly(poly: &[[f64; 2]], p: (f64, f64)) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (poly[i][0], poly[i][1]);
        let (xj, yj) = (poly[j][0], poly[j][1]);
        if ((yi > p.1) != (yj > p.1)) && p.0 < (xj - xi) * (p.1 - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}
