//! Geometric provisioning: placing assets into containers or onto surfaces
//! by 2D non-overlap packing on the receptacle's horizontal extent, and
//! removing objects. Edits produce a new document snapshot; the physics
//! settle step lives outside this crate.

use super::{Aabb, SceneDoc, SceneError, SceneObject};

/// Footprint of an asset to provision, plan extents and height.
#[derive(Debug, Clone, Copy)]
pub struct AssetExtent {
    pub width: f64,  // x
    pub height: f64, // y (vertical)
    pub depth: f64,  // z
}

const PACK_GAP: f64 = 0.01;
const PACK_STEP: f64 = 0.05;

/// Finds a free (x, z) slot on the parent's horizontal extent avoiding the
/// given sibling boxes.
fn pack_slot(
    parent: &Aabb,
    siblings: &[Aabb],
    extent: AssetExtent,
) -> Option<(f64, f64)> {
    let x_room = parent.max[0] - parent.min[0] - extent.width;
    let z_room = parent.max[2] - parent.min[2] - extent.depth;
    if x_room < 0.0 || z_room < 0.0 {
        return None;
    }
    let mut z = parent.min[2] + PACK_GAP;
    while z + extent.depth <= parent.max[2] - PACK_GAP + 1e-9 {
        let mut x = parent.min[0] + PACK_GAP;
        while x + extent.width <= parent.max[0] - PACK_GAP + 1e-9 {
            let clear = siblings.iter().all(|s| {
                x + extent.width <= s.min[0] + 1e-9
                    || s.max[0] <= x + 1e-9
                    || z + extent.depth <= s.min[2] + 1e-9
                    || s.max[2] <= z + 1e-9
            });
            if clear {
                return Some((x, z));
            }
            x += PACK_STEP;
        }
        z += PACK_STEP;
    }
    None
}

/// Places a new asset inside a container: packed on the container floor,
/// child of the container. Returns the updated snapshot.
pub fn place_in_container(
    doc: &SceneDoc,
    asset_tag: &str,
    new_id: &str,
    container: &str,
    extent: AssetExtent,
) -> Result<SceneDoc, SceneError> {
    let parent = doc.resolve_object(container)?.clone();
    let inner_height = parent.aabb.height();
    if extent.height > inner_height {
        return Err(SceneError::NoSpace(parent.id.clone(), new_id.to_string()));
    }
    let siblings: Vec<Aabb> = doc
        .children_of(&parent.id)
        .into_iter()
        .map(|c| c.aabb)
        .collect();
    let (x, z) = pack_slot(&parent.aabb, &siblings, extent)
        .ok_or_else(|| SceneError::NoSpace(parent.id.clone(), new_id.to_string()))?;
    let y0 = parent.aabb.min[1];
    let mut next = doc.clone();
    next.objects.push(SceneObject {
        id: new_id.to_string(),
        asset: asset_tag.to_string(),
        position: [x + extent.width / 2.0, y0 + extent.height / 2.0, z + extent.depth / 2.0],
        aabb: Aabb {
            min: [x, y0, z],
            max: [x + extent.width, y0 + extent.height, z + extent.depth],
        },
        parent: Some(parent.id.clone()),
        floor: parent.floor,
    });
    next.validate()?;
    Ok(next)
}

/// Places a new asset on top of a receptacle surface.
pub fn place_on_surface(
    doc: &SceneDoc,
    asset_tag: &str,
    new_id: &str,
    receptacle: &str,
    extent: AssetExtent,
) -> Result<SceneDoc, SceneError> {
    let parent = doc.resolve_object(receptacle)?.clone();
    let top = parent.aabb.max[1];
    // siblings on the surface: children overlapping the top band
    let siblings: Vec<Aabb> = doc
        .children_of(&parent.id)
        .into_iter()
        .filter(|c| c.aabb.min[1] >= top - super::SURFACE_EPSILON)
        .map(|c| c.aabb)
        .collect();
    let (x, z) = pack_slot(&parent.aabb, &siblings, extent)
        .ok_or_else(|| SceneError::NoSpace(parent.id.clone(), new_id.to_string()))?;
    let mut next = doc.clone();
    next.objects.push(SceneObject {
        id: new_id.to_string(),
        asset: asset_tag.to_string(),
        position: [x + extent.width / 2.0, top + extent.height / 2.0, z + extent.depth / 2.0],
        aabb: Aabb {
            min: [x, top, z],
            max: [x + extent.width, top + extent.height, z + extent.depth],
        },
        parent: Some(parent.id.clone()),
        floor: parent.floor,
    });
    next.validate()?;
    Ok(next)
}

/// Removes one object by id, or every child of a receptacle when
/// `receptacle` is given instead. Children of removed objects go with them.
pub fn remove_object(
    doc: &SceneDoc,
    object_id: Option<&str>,
    receptacle_id: Option<&str>,
) -> Result<SceneDoc, SceneError> {
    let mut doomed: Vec<String> = Vec::new();
    match (object_id, receptacle_id) {
        (Some(id), _) => {
            doc.object(id)?;
            doomed.push(id.to_string());
        }
        (None, Some(rec)) => {
            let parent = doc.resolve_object(rec)?;
            doomed.extend(doc.children_of(&parent.id).into_iter().map(|c| c.id.clone()));
        }
        (None, None) => return Err(SceneError::UnknownObject("<none>".into())),
    }
    // transitive closure over the tree
    loop {
        let more: Vec<String> = doc
            .objects
            .iter()
            .filter(|o| {
                o.parent
                    .as_deref()
                    .map(|p| doomed.iter().any(|d| d == p))
                    .unwrap_or(false)
                    && !doomed.iter().any(|d| d == &o.id)
            })
            .map(|o| o.id.clone())
            .collect();
        if more.is_empty() {
            break;
        }
        doomed.extend(more);
    }
    let mut next = doc.clone();
    next.objects.retain(|o| !doomed.iter().any(|d| d == &o.id));
    Ok(next)
}
