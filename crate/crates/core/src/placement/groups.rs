//! Constraint normalization into ordered groups, and macro-object
//! construction for matrix patterns.

use super::{GroupMember, ObjectGroup, ObjectSpec, PlacementError, StructuralConstraint};

/// Sorts groups by the five-level anchor priority; within one level by
/// descending anchor footprint area, ties by anchor id. Validates that
/// paired partners and relation targets resolve.
pub fn normalize_groups(mut groups: Vec<ObjectGroup>) -> Result<Vec<ObjectGroup>, PlacementError> {
    let mut ids: Vec<&str> = Vec::new();
    for g in &groups {
        ids.push(&g.anchor.id);
        for m in &g.members {
            ids.push(&m.spec.id);
        }
    }
    {
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(*id) {
                return Err(PlacementError::DuplicateId(id.to_string()));
            }
        }
    }
    for g in &groups {
        if g.anchor.width <= 0.0 || g.anchor.depth <= 0.0 {
            return Err(PlacementError::BadFootprint(g.anchor.id.clone()));
        }
        for m in &g.members {
            if m.spec.width <= 0.0 || m.spec.depth <= 0.0 {
                return Err(PlacementError::BadFootprint(m.spec.id.clone()));
            }
        }
        let group_ids: Vec<&str> = std::iter::once(g.anchor.id.as_str())
            .chain(g.members.iter().map(|m| m.spec.id.as_str()))
            .collect();
        let constraints = std::iter::once(&g.anchor_constraint).chain(g.members.iter().map(|m| &m.constraint));
        for c in constraints {
            if let StructuralConstraint::Matrix { rows, cols, spacing } = c.structural {
                if rows < 1 || cols < 1 {
                    return Err(PlacementError::BadFootprint(g.anchor.id.clone()));
                }
                if spacing < 0.0 {
                    return Err(PlacementError::BadSpacing(g.anchor.id.clone()));
                }
            }
            if let StructuralConstraint::Paired { partner, .. } = &c.structural {
                if !group_ids.contains(&partner.as_str()) {
                    return Err(PlacementError::DanglingPartner(partner.clone()));
                }
            }
            for r in &c.relations {
                if !ids.contains(&r.target.as_str()) {
                    return Err(PlacementError::DanglingTarget(r.target.clone()));
                }
            }
        }
        for m in &g.members {
            if let Some(surface) = &m.on_surface_of {
                if !group_ids.contains(&surface.as_str()) {
                    return Err(PlacementError::DanglingSurface(surface.clone()));
                }
            }
        }
    }
    groups.sort_by(|a, b| {
        a.priority()
            .cmp(&b.priority())
            .then(
                b.anchor
                    .footprint_area()
                    .partial_cmp(&a.anchor.footprint_area())
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then_with(|| a.anchor.id.cmp(&b.anchor.id))
    });
    Ok(groups)
}

/// Expansion plan of a matrix macro object: instance origins relative to the
/// macro's lower-left corner, for the anchor grid and the optional paired
/// partner per instance.
#[derive(Debug, Clone)]
pub struct MacroObject {
    pub spec: ObjectSpec,
    pub rows: u32,
    pub cols: u32,
    /// Lower-left offsets of each anchor instance, row-major.
    pub anchor_offsets: Vec<(f64, f64)>,
    /// Lower-left offsets of each partner instance, parallel to
    /// `anchor_offsets` when a partner rides along.
    pub partner: Option<(ObjectSpec, Vec<(f64, f64)>)>,
}

/// Builds the bounding macro object for an `rows x cols` grid of the
/// anchor, column pitch `width + spacing`, row pitch `depth + spacing`.
/// A paired partner appends a strip behind each row: the row pitch grows by
/// `gap + partner depth` and each instance carries one partner, centered on
/// its column.
pub fn build_macro_object(
    group: &ObjectGroup,
    rows: u32,
    cols: u32,
) -> Result<MacroObject, PlacementError> {
    if rows < 1 || cols < 1 {
        return Err(PlacementError::BadFootprint(group.anchor.id.clone()));
    }
    let spacing = match group.anchor_constraint.structural {
        StructuralConstraint::Matrix { spacing, .. } => spacing,
        _ => 0.0,
    };
    if spacing < 0.0 {
        return Err(PlacementError::BadSpacing(group.anchor.id.clone()));
    }
    let a = &group.anchor;

    // a paired member folds into the macro footprint
    let paired: Option<(&GroupMember, f64)> = group.members.iter().find_map(|m| {
        if let StructuralConstraint::Paired { partner, offset } = &m.constraint.structural {
            (partner == &a.id).then_some((m, *offset))
        } else {
            None
        }
    });

    let col_pitch = a.width + spacing;
    let row_extra = paired.map(|(m, gap)| gap + m.spec.depth).unwrap_or(0.0);
    let row_pitch = a.depth + row_extra + spacing;

    let width = cols as f64 * col_pitch - spacing;
    let depth = rows as f64 * row_pitch - spacing;

    let mut anchor_offsets = Vec::with_capacity((rows * cols) as usize);
    let mut partner_offsets = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let x = c as f64 * col_pitch;
            let y = r as f64 * row_pitch;
            anchor_offsets.push((x, y));
            if let Some((m, gap)) = paired {
                let px = x + (a.width - m.spec.width) / 2.0;
                let py = y + a.depth + gap;
                partner_offsets.push((px, py));
            }
        }
    }

    Ok(MacroObject {
        spec: ObjectSpec {
            id: format!("{}__macro_{rows}x{cols}", a.id),
            width,
            depth,
            rotatable: a.rotatable,
            clearance: a.clearance,
        },
        rows,
        cols,
        anchor_offsets,
        partner: paired.map(|(m, _)| (m.spec.clone(), partner_offsets)),
    })
}

/// Downgrade order for an infeasible matrix: shrink the larger dimension
/// first, ties shrink the column count.
pub fn downgrade_matrix(rows: u32, cols: u32) -> (u32, u32) {
    if rows > cols {
        (rows - 1, cols)
    } else {
        (rows, cols - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::{GlobalConstraint, PlacementConstraint, Relation, RelationKind};

    fn group(anchor: ObjectSpec, global: GlobalConstraint, structural: StructuralConstraint) -> ObjectGroup {
        ObjectGroup {
            anchor,
            anchor_constraint: PlacementConstraint {
                global,
                structural,
                relations: vec![],
            },
            members: vec![],
        }
    }

    #[test]
    fn priority_chain_orders_groups() {
        let bookshelf = group(
            ObjectSpec::new("bookshelf", 0.8, 0.3),
            GlobalConstraint::Edge,
            StructuralConstraint::Matrix { rows: 1, cols: 4, spacing: 0.1 },
        );
        let table = group(
            ObjectSpec::new("table", 1.2, 0.8),
            GlobalConstraint::Middle,
            StructuralConstraint::Single,
        );
        let lamp = group(
            ObjectSpec::new("lamp", 0.3, 0.3),
            GlobalConstraint::Unconstrained,
            StructuralConstraint::Single,
        );
        let sorted = normalize_groups(vec![lamp, table, bookshelf]).unwrap();
        let ids: Vec<&str> = sorted.iter().map(|g| g.anchor.id.as_str()).collect();
        assert_eq!(ids, vec!["bookshelf", "table", "lamp"]);
    }

    #[test]
    fn equal_priority_sorts_by_area_then_id() {
        let small = group(
            ObjectSpec::new("a_small", 0.5, 0.5),
            GlobalConstraint::Unconstrained,
            StructuralConstraint::Single,
        );
        let big = group(
            ObjectSpec::new("z_big", 2.0, 1.0),
            GlobalConstraint::Unconstrained,
            StructuralConstraint::Single,
        );
        let twin = group(
            ObjectSpec::new("b_small", 0.5, 0.5),
            GlobalConstraint::Unconstrained,
            StructuralConstraint::Single,
        );
        let sorted = normalize_groups(vec![small.clone(), big, twin]).unwrap();
        let ids: Vec<&str> = sorted.iter().map(|g| g.anchor.id.as_str()).collect();
        assert_eq!(ids, vec!["z_big", "a_small", "b_small"]);
    }

    #[test]
    fn six_group_order_matches_comparator_oracle() {
        let mk = |id: &str, w, d, global, structural| group(ObjectSpec::new(id, w, d), global, structural);
        let groups = vec![
            mk("g0", 1.0, 1.0, GlobalConstraint::Unconstrained, StructuralConstraint::Single),
            mk("g1", 1.0, 1.0, GlobalConstraint::Middle, StructuralConstraint::Single),
            mk("g2", 1.0, 1.0, GlobalConstraint::Edge, StructuralConstraint::Matrix { rows: 2, cols: 2, spacing: 0.2 }),
            mk("g3", 2.0, 1.0, GlobalConstraint::Edge, StructuralConstraint::Single),
            mk("g4", 1.0, 1.0, GlobalConstraint::Middle, StructuralConstraint::Matrix { rows: 1, cols: 3, spacing: 0.0 }),
            mk("g5", 0.5, 0.5, GlobalConstraint::Edge, StructuralConstraint::Single),
        ];
        let sorted = normalize_groups(groups.clone()).unwrap();
        // independent comparator oracle
        let mut oracle = groups;
        oracle.sort_by(|a, b| {
            let pa = a.priority();
            let pb = b.priority();
            pa.cmp(&pb)
                .then(b.anchor.footprint_area().partial_cmp(&a.anchor.footprint_area()).unwrap())
                .then_with(|| a.anchor.id.cmp(&b.anchor.id))
        });
        let want: Vec<&str> = oracle.iter().map(|g| g.anchor.id.as_str()).collect();
        let got: Vec<&str> = sorted.iter().map(|g| g.anchor.id.as_str()).collect();
        assert_eq!(got, want);
        assert_eq!(got, vec!["g2", "g3", "g5", "g4", "g1", "g0"]);
    }

    #[test]
    fn dangling_references_are_rejected() {
        let mut g = group(
            ObjectSpec::new("sofa", 2.0, 0.9),
            GlobalConstraint::Edge,
            StructuralConstraint::Single,
        );
        g.anchor_constraint.relations.push(Relation {
            kind: RelationKind::Near,
            target: "ghost".into(),
            distance: None,
        });
        assert!(matches!(
            normalize_groups(vec![g]),
            Err(PlacementError::DanglingTarget(_))
        ));

        let mut g2 = group(
            ObjectSpec::new("desk", 1.2, 0.6),
            GlobalConstraint::Middle,
            StructuralConstraint::Paired { partner: "chair".into(), offset: 0.5 },
        );
        g2.members.clear();
        assert!(matches!(
            normalize_groups(vec![g2]),
            Err(PlacementError::DanglingPartner(_))
        ));
    }

    #[test]
    fn one_by_one_macro_equals_single_object() {
        let g = group(
            ObjectSpec::new("desk", 1.2, 0.6),
            GlobalConstraint::Middle,
            StructuralConstraint::Matrix { rows: 1, cols: 1, spacing: 0.5 },
        );
        let m = build_macro_object(&g, 1, 1).unwrap();
        assert!((m.spec.width - 1.2).abs() < 1e-12);
        assert!((m.spec.depth - 0.6).abs() < 1e-12);
        assert_eq!(m.anchor_offsets, vec![(0.0, 0.0)]);
    }

    #[test]
    fn macro_footprint_formula() {
        // 2x3 desks 1.2x0.6, spacing 0.5: (3*1.7 - 0.5) x (2*1.1 - 0.5)
        let g = group(
            ObjectSpec::new("desk", 1.2, 0.6),
            GlobalConstraint::Middle,
            StructuralConstraint::Matrix { rows: 2, cols: 3, spacing: 0.5 },
        );
        let m = build_macro_object(&g, 2, 3).unwrap();
        assert!((m.spec.width - 4.6).abs() < 1e-12);
        assert!((m.spec.depth - 1.7).abs() < 1e-12);
        assert_eq!(m.anchor_offsets.len(), 6);
    }

    #[test]
    fn paired_rows_extend_macro_depth_and_expand_exactly() {
        // desks 1.2x0.6 with chairs 0.5x0.5 offset 0.5 behind, 2x2, spacing 0.4
        let mut g = group(
            ObjectSpec::new("desk", 1.2, 0.6),
            GlobalConstraint::Middle,
            StructuralConstraint::Matrix { rows: 2, cols: 2, spacing: 0.4 },
        );
        g.members.push(GroupMember {
            spec: ObjectSpec::new("chair", 0.5, 0.5),
            constraint: PlacementConstraint {
                global: GlobalConstraint::Unconstrained,
                structural: StructuralConstraint::Paired { partner: "desk".into(), offset: 0.5 },
                relations: vec![],
            },
            on_surface_of: None,
        });
        let m = build_macro_object(&g, 2, 2).unwrap();
        // row pitch = 0.6 + (0.5 + 0.5) + 0.4 = 2.0; depth = 2*2.0 - 0.4 = 3.6
        assert!((m.spec.depth - 3.6).abs() < 1e-12);
        // width unchanged by pairing: 2*1.6 - 0.4 = 2.8
        assert!((m.spec.width - 2.8).abs() < 1e-12);
        let (chair, offsets) = m.partner.as_ref().unwrap();
        assert_eq!(chair.id, "chair");
        assert_eq!(offsets.len(), 4);
        // hand-constructed expansion: chairs centered behind each desk
        assert_eq!(m.anchor_offsets[0], (0.0, 0.0));
        assert!((offsets[0].0 - 0.35).abs() < 1e-12);
        assert!((offsets[0].1 - 1.1).abs() < 1e-12);
        // union bounding box equals the macro footprint
        let mut max_x: f64 = 0.0;
        let mut max_y: f64 = 0.0;
        for (x, y) in &m.anchor_offsets {
            max_x = max_x.max(x + 1.2);
            max_y = max_y.max(y + 0.6);
        }
        for (x, y) in offsets {
            max_x = max_x.max(x + 0.5);
            max_y = max_y.max(y + 0.5);
        }
        assert!((max_x - m.spec.width).abs() < 1e-12);
        assert!((max_y - m.spec.depth).abs() < 1e-12);
    }

    #[test]
    fn downgrade_shrinks_larger_dimension_first() {
        assert_eq!(downgrade_matrix(5, 5), (5, 4));
        assert_eq!(downgrade_matrix(5, 4), (4, 4));
        assert_eq!(downgrade_matrix(2, 3), (2, 2));
        assert_eq!(downgrade_matrix(1, 1), (1, 0));
    }
}
