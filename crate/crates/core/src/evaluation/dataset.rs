//! Directory-level evaluation: paired prediction/ground-truth samples,
//! rasterized on a common grid, scored per sample and pooled.
//!
//! Samples are paired by file stem. Two input kinds are supported:
//! vector floorplan JSON (rooms with categories, rasterized against the
//! ground-truth frame) and pre-rasterized PNG label maps with a palette
//! manifest mapping hex colors to categories.

use super::{confusion_counts, ClassMap, ConfusionCounts, EvalError, IoUReport};
use crate::geometry::io::FloorplanDoc;
use crate::geometry::{rasterize_layout, GridLabelMap, Label};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalManifest {
    /// Applied to every category on both sides (e.g. dataset label to a
    /// standard category space).
    #[serde(default)]
    pub category_map: HashMap<String, String>,
    /// Allowed category vocabulary after mapping; when set, anything outside
    /// it is an error.
    #[serde(default)]
    pub vocabulary: Option<BTreeSet<String>>,
    /// Hex color (`#rrggbb`) to category, for PNG label maps.
    #[serde(default)]
    pub palette: HashMap<String, String>,
}

impl EvalManifest {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn map_category(&self, raw: &str) -> Result<String, EvalError> {
        let mapped = self
            .category_map
            .get(raw)
            .cloned()
            .unwrap_or_else(|| raw.to_string());
        if let Some(vocab) = &self.vocabulary {
            if !vocab.contains(&mapped) {
                return Err(EvalError::UnknownCategory(mapped));
            }
        }
        Ok(mapped)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleScore {
    pub sample: String,
    pub micro_iou: f64,
    pub macro_iou: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetReport {
    pub samples: Vec<SampleScore>,
    /// IoU from intersection/union counts pooled across all samples.
    pub pooled: IoUReport,
    /// Mean of per-sample micro IoU (pooling convention differences are
    /// surfaced by reporting both).
    pub mean_micro: f64,
    /// Mean of per-sample macro IoU.
    pub mean_macro: f64,
}

pub fn dataset_eval(
    pred_dir: &Path,
    gt_dir: &Path,
    resolution: u32,
    manifest: &EvalManifest,
) -> Result<DatasetReport, EvalError> {
    let gt_files = list_samples(gt_dir)?;
    if gt_files.is_empty() {
        return Err(EvalError::Other(format!(
            "no samples found in {}",
            gt_dir.display()
        )));
    }
    let mut samples = Vec::new();
    let mut pooled = ConfusionCounts::default();
    let mut micro_sum = 0.0;
    let mut macro_sum = 0.0;
    for (stem, gt_path) in &gt_files {
        let pred_path = matching_sample(pred_dir, stem)
            .ok_or_else(|| EvalError::UnpairedSample(stem.clone()))?;
        let (gt_map, gt_classes) = load_sample(gt_path, resolution, manifest, None)?;
        // predictions rasterize against the ground-truth frame so both sides
        // share the same scaling
        let gt_frame = frame_of(gt_path)?;
        let (pred_map, pred_classes) = load_sample(&pred_path, resolution, manifest, gt_frame)?;
        let counts = confusion_counts(&pred_map, &gt_map, &pred_classes, &gt_classes)?;
        let report = counts.report();
        micro_sum += report.micro_iou;
        macro_sum += report.macro_iou;
        samples.push(SampleScore {
            sample: stem.clone(),
            micro_iou: report.micro_iou,
            macro_iou: report.macro_iou,
        });
        pooled.merge(&counts);
    }
    let n = samples.len() as f64;
    Ok(DatasetReport {
        samples,
        pooled: pooled.report(),
        mean_micro: micro_sum / n,
        mean_macro: macro_sum / n,
    })
}

fn list_samples(dir: &Path) -> Result<Vec<(String, PathBuf)>, EvalError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(ext) = path.extension().and_then(|e| e.to_str()) else {
            continue;
        };
        if matches!(ext, "json" | "png") {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            out.push((stem, path));
        }
    }
    out.sort();
    Ok(out)
}

fn matching_sample(dir: &Path, stem: &str) -> Option<PathBuf> {
    for ext in ["json", "png"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.exists() {
            return Some(p);
        }
    }
    None
}

fn frame_of(path: &Path) -> Result<Option<crate::geometry::raster::Frame>, EvalError> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let doc = FloorplanDoc::from_json(&std::fs::read_to_string(path)?)?;
        Ok(Some(doc.frame()))
    } else {
        Ok(None)
    }
}

fn load_sample(
    path: &Path,
    resolution: u32,
    manifest: &EvalManifest,
    frame_override: Option<crate::geometry::raster::Frame>,
) -> Result<(GridLabelMap, ClassMap), EvalError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let doc = FloorplanDoc::from_json(&std::fs::read_to_string(path)?)?;
            let polys = doc.polygons()?;
            let rooms: Vec<(u32, crate::geometry::OrthoPolygon)> =
                polys.iter().map(|(i, p, _)| (*i, p.clone())).collect();
            let frame = frame_override.unwrap_or_else(|| doc.frame());
            let map = rasterize_layout(&rooms, frame, (resolution, resolution))?;
            let mut classes = ClassMap::default();
            for (i, _, cat) in polys {
                classes.rooms.insert(i, manifest.map_category(&cat)?);
            }
            Ok((map, classes))
        }
        Some("png") => load_png_sample(path, manifest),
        other => Err(EvalError::Other(format!(
            "unsupported sample type {:?} for {}",
            other,
            path.display()
        ))),
    }
}

fn load_png_sample(path: &Path, manifest: &EvalManifest) -> Result<(GridLabelMap, ClassMap), EvalError> {
    let img = image::open(path)
        .map_err(|e| EvalError::Other(format!("{}: {e}", path.display())))?
        .into_rgb8();
    let (w, h) = (img.width(), img.height());
    let mut color_to_room: BTreeMap<[u8; 3], u32> = BTreeMap::new();
    let mut classes = ClassMap::default();
    let mut map = GridLabelMap::filled(w, h, Label::Exterior);
    for y in 0..h {
        for x in 0..w {
            let px = img.get_pixel(x, y).0;
            let hex = format!("#{:02x}{:02x}{:02x}", px[0], px[1], px[2]);
            match manifest.palette.get(&hex) {
                Some(cat) => {
                    let next = color_to_room.len() as u32;
                    let room = *color_to_room.entry(px).or_insert(next);
                    classes
                        .rooms
                        .entry(room)
                        .or_insert(manifest.map_category(cat)?);
                    // PNG rows run top-down
                    map.set(x, h - 1 - y, Label::Room(room));
                }
                None => {
                    // background tones pass through; anything else is a
                    // palette gap
                    if px != [255, 255, 255] && px != [232, 232, 232] {
                        return Err(EvalError::UnknownCategory(hex));
                    }
                }
            }
        }
    }
    Ok((map, classes))
}

pub fn report_to_csv(report: &DatasetReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sample", "micro_iou", "macro_iou"]).unwrap();
    for s in &report.samples {
        w.write_record([
            s.sample.as_str(),
            &format!("{:.4}", s.micro_iou),
            &format!("{:.4}", s.macro_iou),
        ])
        .unwrap();
    }
    w.write_record([
        "POOLED",
        &format!("{:.4}", report.pooled.micro_iou),
        &format!("{:.4}", report.pooled.macro_iou),
    ])
    .unwrap();
    w.write_record([
        "MEAN_PER_SAMPLE",
        &format!("{:.4}", report.mean_micro),
        &format!("{:.4}", report.mean_macro),
    ])
    .unwrap();
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
