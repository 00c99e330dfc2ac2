//! From accumulators to parking-space detections: rectangle fitting,
//! occupancy posteriors, filtering and rotated non-maximum suppression.

use serde::Deserialize;
use thiserror::Error;

use crate::accumulate::{ingest_all, AccumulateError, AccumulatorSet, PipelineConfig};
use crate::geometry::{min_area_rect, rotated_iou, RotatedRect};
use crate::mask::{FrameGrid, FrameObservation};
use crate::numfmt::fmt_real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("no frames ingested: the posterior denominator is undefined")]
    EmptyDay,
    #[error(transparent)]
    Accumulate(#[from] AccumulateError),
    #[error("detections file: {0}")]
    BadFile(String),
}

/// One detected parking space: the fitted rectangle plus the fraction of the
/// day its region was occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub rect: RotatedRect,
    pub posterior: f64,
    pub source_pixels: u64,
    pub merged_mask_count: u64,
}

/// Final detections, sorted by posterior descending (ties: larger rectangle
/// first, then accumulator insertion order). After NMS every surviving pair
/// has rotated IoU below `config.t_nms`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSet {
    pub grid: FrameGrid,
    pub config: PipelineConfig,
    pub detections: Vec<Detection>,
}

/// Fit one detection per accumulator. The posterior is the mean count over
/// the support divided by the number of frames in the day, clamped to 1 in
/// case overlapping same-frame masks inflated the counts.
pub fn extract_detections(set: &AccumulatorSet) -> Result<Vec<Detection>, DetectError> {
    if set.frames_ingested() == 0 {
        return Err(DetectError::EmptyDay);
    }
    let frames = set.frames_ingested() as f64;
    Ok(set
        .entries()
        .iter()
        .map(|acc| {
            let rect = min_area_rect(&acc.support_corner_points())
                .expect("pixel corner sets are never collinear");
            let mean_count = acc.total_mass() as f64 / acc.support_len() as f64;
            Detection {
                rect,
                posterior: (mean_count / frames).min(1.0),
                source_pixels: acc.support_len(),
                merged_mask_count: acc.merged_mask_count(),
            }
        })
        .collect())
}

/// Canonical detection order: posterior descending, then rectangle area
/// descending; the stable sort keeps insertion order for full ties.
pub fn sort_detections(detections: &mut [Detection]) {
    detections.sort_by(|a, b| {
        b.posterior
            .partial_cmp(&a.posterior)
            .unwrap()
            .then(b.rect.area().partial_cmp(&a.rect.area()).unwrap())
    });
}

/// Greedy NMS over detections already in canonical order: keep a detection
/// iff its rotated IoU with every kept detection is below `t_nms`.
pub fn nms(detections: Vec<Detection>, t_nms: f64) -> Vec<Detection> {
    let polys: Vec<_> = detections.iter().map(|d| d.rect.to_polygon()).collect();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..detections.len() {
        if kept.iter().all(|&k| rotated_iou(&polys[i], &polys[k]) < t_nms) {
            kept.push(i);
        }
    }
    let keep_set: Vec<bool> = {
        let mut v = vec![false; detections.len()];
        for &k in &kept {
            v[k] = true;
        }
        v
    };
    detections
        .into_iter()
        .zip(keep_set)
        .filter_map(|(d, keep)| keep.then_some(d))
        .collect()
}

/// Extract, filter by `min_posterior`, order and suppress — everything after
/// the accumulators are built.
pub fn detect_from_accumulators(
    set: &AccumulatorSet,
    config: PipelineConfig,
) -> Result<DetectionSet, DetectError> {
    let mut detections = extract_detections(set)?;
    detections.retain(|d| d.posterior >= config.min_posterior);
    sort_detections(&mut detections);
    let detections = nms(detections, config.t_nms);
    Ok(DetectionSet { grid: set.grid(), config, detections })
}

/// The whole day in one call: ingest every frame in order, then detect.
pub fn run_pipeline(
    grid: FrameGrid,
    frames: &[FrameObservation],
    config: PipelineConfig,
) -> Result<DetectionSet, DetectError> {
    let set = ingest_all(grid, frames, config.t_sum)?;
    detect_from_accumulators(&set, config)
}

// --- detections file (JSON) --------------------------------------------------

/// Serialize with a fixed field order and six-decimal reals so identical
/// runs produce identical bytes.
pub fn detections_to_json(set: &DetectionSet) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"grid\":{{\"width\":{},\"height\":{}}},\"config\":{{\"t_sum\":{},\"t_nms\":{},\"min_posterior\":{}}},\"detections\":[",
        set.grid.width,
        set.grid.height,
        fmt_real(set.config.t_sum),
        fmt_real(set.config.t_nms),
        fmt_real(set.config.min_posterior),
    ));
    for (i, d) in set.detections.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"rect\":{{\"cx\":{},\"cy\":{},\"w\":{},\"h\":{},\"angle_deg\":{}}},\"posterior\":{},\"source_pixels\":{},\"merged_mask_count\":{}}}",
            fmt_real(d.rect.cx),
            fmt_real(d.rect.cy),
            fmt_real(d.rect.w),
            fmt_real(d.rect.h),
            fmt_real(d.rect.angle_deg),
            fmt_real(d.posterior),
            d.source_pixels,
            d.merged_mask_count,
        ));
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetections {
    grid: FrameGrid,
    config: PipelineConfig,
    detections: Vec<RawDetection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    rect: RawRect,
    posterior: f64,
    source_pixels: u64,
    merged_mask_count: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRect {
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
    angle_deg: f64,
}

/// Parse a detections file and restore the canonical ordering.
pub fn detections_from_json(text: &str) -> Result<DetectionSet, DetectError> {
    let raw: RawDetections =
        serde_json::from_str(text).map_err(|e| DetectError::BadFile(e.to_string()))?;
    let grid = FrameGrid::new(raw.grid.width, raw.grid.height)
        .map_err(|e| DetectError::BadFile(e.to_string()))?;
    raw.config.validate().map_err(|e| DetectError::BadFile(e.to_string()))?;
    let mut detections = Vec::with_capacity(raw.detections.len());
    for (i, d) in raw.detections.into_iter().enumerate() {
        if !(d.rect.w > 0.0 && d.rect.h > 0.0) {
            return Err(DetectError::BadFile(format!(
                "detections[{i}].rect has non-positive sides"
            )));
        }
        if !(0.0..=1.0).contains(&d.posterior) {
            return Err(DetectError::BadFile(format!(
                "detections[{i}].posterior is outside [0, 1]"
            )));
        }
        detections.push(Detection {
            rect: RotatedRect::new(d.rect.cx, d.rect.cy, d.rect.w, d.rect.h, d.rect.angle_deg),
            posterior: d.posterior,
            source_pixels: d.source_pixels,
            merged_mask_count: d.merged_mask_count,
        });
    }
    sort_detections(&mut detections);
    Ok(DetectionSet { grid, config: raw.config, detections })
}
