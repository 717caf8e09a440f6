//! Deterministic multi-floor floorplan synthesis and furnishing.
//!
//! The pipeline partitions building footprints into room layouts under hard
//! adjacency and vertical-core constraints (seed-guided constrained growth
//! ranked by an interpretable energy), cleans the resulting grids, populates
//! rooms with reachability-guaranteed object layouts, and scores results with
//! raster IoU and placement metrics. Every stage is model-optional: seed
//! guidance comes from annotations, Monte-Carlo sampling, or an external
//! proposer speaking a small JSON contract.

pub mod geometry;
pub mod topology;
pub mod solver;
pub mod postprocess;
pub mod orchestrator;
pub mod placement;
pub mod evaluation;
pub mod scenequery;
pub mod rng;

pub use geometry::{FreeRegion, GridLabelMap, Label, OrthoPolygon};
pub use topology::{CutRound, RoomGraph, RoomNode};
