//! Heat-map accumulators: the per-region counters that turn a day of car
//! masks into occupancy heat maps.
//!
//! Each incoming mask either merges into the existing accumulator whose
//! support bounding box overlaps it best (box IoU at least `t_sum`), adding
//! one to every covered pixel, or it starts a new accumulator. Matching is
//! done on cached axis-aligned boxes, so an accumulator's box only ever
//! grows. Frame order is semantically significant: replaying the same file
//! reproduces the same state bit for bit, but permuting frames may partition
//! masks differently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{aabb_iou, Aabb, Point};
use crate::mask::{pixel_corner_points, FrameGrid, FrameObservation, Mask};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AccumulateError {
    #[error("mask grid {got_w}x{got_h} does not match accumulator grid {want_w}x{want_h}")]
    GridMismatch { want_w: u32, want_h: u32, got_w: u32, got_h: u32 },
}

/// Pipeline parameters. `t_sum` gates mask merging, `t_nms` gates duplicate
/// suppression, `min_posterior` drops low-occupancy detections before NMS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub t_sum: f64,
    pub t_nms: f64,
    pub min_posterior: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { t_sum: 0.5, t_nms: 0.4, min_posterior: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |field: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError { field, message: format!("{v} is outside [0, 1]") })
            }
        };
        unit("t_sum", self.t_sum)?;
        unit("t_nms", self.t_nms)?;
        unit("min_posterior", self.min_posterior)
    }
}

/// One heat-map region: sparse per-pixel counts plus a cached support box.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    grid: FrameGrid,
    counts: BTreeMap<u32, u32>,
    support_bbox: Aabb,
    merged_mask_count: u64,
}

impl Accumulator {
    fn from_mask(mask: &Mask) -> Self {
        let mut counts = BTreeMap::new();
        for i in mask.pixel_indices() {
            counts.insert(i, 1);
        }
        Self {
            grid: mask.grid(),
            counts,
            support_bbox: mask.bbox(),
            merged_mask_count: 1,
        }
    }

    fn absorb(&mut self, mask: &Mask) {
        for i in mask.pixel_indices() {
            *self.counts.entry(i).or_insert(0) += 1;
        }
        self.support_bbox = self.support_bbox.union(&mask.bbox());
        self.merged_mask_count += 1;
    }

    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    /// Box around the nonzero support, pixel-corner model.
    pub fn support_bbox(&self) -> Aabb {
        self.support_bbox
    }

    pub fn merged_mask_count(&self) -> u64 {
        self.merged_mask_count
    }

    /// Number of pixels ever covered.
    pub fn support_len(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Sum of all per-pixel counts.
    pub fn total_mass(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn counts(&self) -> &BTreeMap<u32, u32> {
        &self.counts
    }

    /// Support pixels as `(col, row)` pairs.
    pub fn support_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.grid.width;
        self.counts.keys().map(move |&i| (i % w, i / w))
    }

    /// Corner points of the support's boundary pixels, ready for rectangle
    /// fitting.
    pub fn support_corner_points(&self) -> Vec<Point> {
        let set = self.support_pixels().collect();
        pixel_corner_points(&set)
    }
}

/// The ordered set of accumulators for one operation day.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorSet {
    grid: FrameGrid,
    entries: Vec<Accumulator>,
    frames_ingested: u64,
}

impl AccumulatorSet {
    pub fn new(grid: FrameGrid) -> Self {
        Self { grid, entries: Vec::new(), frames_ingested: 0 }
    }

    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    pub fn entries(&self) -> &[Accumulator] {
        &self.entries
    }

    pub fn frames_ingested(&self) -> u64 {
        self.frames_ingested
    }

    /// Index and box IoU of the entry overlapping `mask` best. Ties go to
    /// the earliest-created entry; an empty set yields `(None, 0.0)`.
    pub fn best_match(&self, mask: &Mask) -> Result<(Option<usize>, f64), AccumulateError> {
        self.check_grid(mask)?;
        let mbox = mask.bbox();
        let mut best: Option<usize> = None;
        let mut best_iou = 0.0;
        for (i, entry) in self.entries.iter().enumerate() {
            let iou = aabb_iou(&mbox, &entry.support_bbox);
            if best.is_none() || iou > best_iou {
                best = Some(i);
                best_iou = iou;
            }
        }
        Ok((best, best_iou))
    }

    /// Merge one frame's masks in order, then count the frame (also when it
    /// carried no masks: the posterior denominator is the whole day).
    pub fn ingest_frame(
        &mut self,
        frame: &FrameObservation,
        t_sum: f64,
    ) -> Result<(), AccumulateError> {
        for mask in &frame.masks {
            let (idx, iou) = self.best_match(mask)?;
            match idx {
                Some(i) if iou >= t_sum => self.entries[i].absorb(mask),
                _ => self.entries.push(Accumulator::from_mask(mask)),
            }
        }
        self.frames_ingested += 1;
        Ok(())
    }

    /// Total mass across all entries; equals the summed area of every mask
    /// ever ingested.
    pub fn total_mass(&self) -> u64 {
        self.entries.iter().map(|e| e.total_mass()).sum()
    }

    fn check_grid(&self, mask: &Mask) -> Result<(), AccumulateError> {
        let g = mask.grid();
        if g != self.grid {
            return Err(AccumulateError::GridMismatch {
                want_w: self.grid.width,
                want_h: self.grid.height,
                got_w: g.width,
                got_h: g.height,
            });
        }
        Ok(())
    }
}

/// Ingest a whole day of frames in file order.
pub fn ingest_all(
    grid: FrameGrid,
    frames: &[FrameObservation],
    t_sum: f64,
) -> Result<AccumulatorSet, AccumulateError> {
    let mut set = AccumulatorSet::new(grid);
    for frame in frames {
        set.ingest_frame(frame, t_sum)?;
    }
    Ok(set)
}
