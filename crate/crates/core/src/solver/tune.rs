//! Random-search weight selection over a simplex.
//!
//! Candidate weight vectors are drawn from the 4-simplex (the energy ranking
//! is scale-invariant, so only the direction matters), the solver runs on
//! annotation-seeded instances, and the vector with the best mean micro IoU
//! against the annotations is kept.

use super::seeds::AnnotationSeeds;
use super::{solve_floor, EnergyWeights, SolverConfig, SolverError};
use crate::evaluation::{iou, ClassMap};
use crate::geometry::io::FloorplanDoc;
use crate::geometry::{rasterize_layout, Frame, FreeRegion, Label};
use crate::rng;
use crate::topology::RoomGraph;
use rand::Rng;

pub struct TuneInstance {
    pub region: FreeRegion,
    pub graph: RoomGraph,
    /// Ground-truth vector layout; supplies both MA seeds and the IoU target.
    pub annotation: FloorplanDoc,
}

#[derive(Debug, Clone)]
pub struct TuneTrial {
    pub weights: EnergyWeights,
    pub mean_micro_iou: f64,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub best: EnergyWeights,
    pub trials: Vec<TuneTrial>,
}

pub fn tune_weights(
    instances: &[TuneInstance],
    cfg: &SolverConfig,
    n_trials: usize,
    rng_seed: u64,
) -> Result<TuneOutcome, SolverError> {
    let mut trials = Vec::with_capacity(n_trials);
    let mut best: Option<(f64, EnergyWeights)> = None;
    for trial in 0..n_trials {
        let mut stream = rng::stream(rng_seed, &["tune"], &[trial as u64]);
        let raw: Vec<f64> = (0..4).map(|_| -stream.random::<f64>().max(1e-12).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights = EnergyWeights {
            w_ratio: raw[0] / total,
            w_seed: raw[1] / total,
            w_corner: raw[2] / total,
            w_wall: raw[3] / total,
            epsilon: 1e-6,
        };
        let score = score_weights(instances, cfg, &weights)?;
        if best.as_ref().map(|(s, _)| score > *s).unwrap_or(true) {
            best = Some((score, weights));
        }
        trials.push(TuneTrial {
            weights,
            mean_micro_iou: score,
        });
    }
    Ok(TuneOutcome {
        best: best.expect("at least one trial").1,
        trials,
    })
}

fn score_weights(
    instances: &[TuneInstance],
    cfg: &SolverConfig,
    weights: &EnergyWeights,
) -> Result<f64, SolverError> {
    let mut total = 0.0;
    let mut n = 0.0;
    for inst in instances {
        let mut provider = AnnotationSeeds::from_floorplan(&inst.annotation)
            .map_err(SolverError::SeedProvider)?;
        let solved = match solve_floor(&inst.region, &inst.graph, &mut provider, cfg, weights) {
            Ok(s) => s,
            Err(SolverError::Infeasible { .. }) => {
                n += 1.0; // infeasible scores zero
                continue;
            }
            Err(e) => return Err(e),
        };
        let cleaned = crate::postprocess::cleanup(&solved.map, &Default::default()).map;

        // rasterize both onto the evaluation grid
        let bbox = inst.region.footprint().bounding_box();
        let frame = Frame::new(bbox.x0 as f64, bbox.y0 as f64, bbox.x1 as f64, bbox.y1 as f64);
        let gt_polys = inst.annotation.polygons().map_err(crate::geometry::io::FormatError::from)
            .map_err(|e| SolverError::SeedProvider(super::seeds::SeedError::Other(e.to_string())))?;
        let gt_rooms: Vec<(u32, crate::geometry::OrthoPolygon)> =
            gt_polys.iter().map(|(i, p, _)| (*i, p.clone())).collect();
        let resolution = 64;
        let gt_map = rasterize_layout(&gt_rooms, frame, (resolution, resolution))?;
        let mut gt_classes = ClassMap::default();
        for (i, _, cat) in &gt_polys {
            gt_classes.rooms.insert(*i, cat.clone());
        }

        let pred_rooms: Vec<(u32, crate::geometry::OrthoPolygon)> = solved
            .binding
            .room_names()
            .iter()
            .enumerate()
            .flat_map(|(i, _)| {
                crate::geometry::contour::trace_label_contours(&cleaned, Label::Room(i as u32))
                    .into_iter()
                    .max_by_key(|lp| lp.len())
                    .and_then(|lp| crate::geometry::OrthoPolygon::new(lp).ok())
                    .map(|poly| (i as u32, poly))
            })
            .collect();
        if pred_rooms.is_empty() {
            n += 1.0;
            continue;
        }
        let pred_map = rasterize_layout(&pred_rooms, frame, (resolution, resolution))?;
        let mut pred_classes = ClassMap::default();
        for (i, name) in solved.binding.room_names().iter().enumerate() {
            // categories match annotation room ids
            pred_classes.rooms.insert(i as u32, name.clone());
        }
        let report = iou(&pred_map, &gt_map, &pred_classes, &gt_classes)
            .map_err(|e| SolverError::SeedProvider(super::seeds::SeedError::Other(e.to_string())))?;
        total += report.micro_iou;
        n += 1.0;
    }
    Ok(if n == 0.0 { 0.0 } else { total / n })
}
