//! Parking-space detection from per-frame car segmentation masks.
//!
//! The pipeline ingests one operation day of frames, each carrying binary
//! car masks. Masks are merged into per-region heat-map accumulators keyed
//! by bounding-box overlap; regions where cars sit still all day grow hot,
//! moving traffic stays cold. Each accumulator becomes a rotated-rectangle
//! detection scored by the fraction of the day its region was occupied,
//! duplicates are removed by rotated non-maximum suppression, and results
//! are evaluated against ground-truth annotations with rotated-IoU average
//! precision. A deterministic scenario simulator stands in for a live
//! camera and detector.

pub mod accumulate;
pub mod cli;
pub mod detect;
pub mod eval;
pub mod geometry;
pub mod mask;
pub mod render;
pub mod rng;
pub mod simulate;
