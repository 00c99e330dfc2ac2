//! Rotated-shape average-precision evaluation against ground-truth
//! parking-space annotations.
//!
//! Matching is greedy in detection score order: each detection takes the
//! unmatched ground-truth polygon with the highest rotated IoU and counts as
//! a true positive iff that IoU reaches the threshold. AP is the area under
//! the precision-recall curve with all-points interpolation (precision
//! replaced by its running maximum from the right). Nothing here ever counts
//! true negatives: outside the annotated polygons the whole image is
//! background, so metrics that depend on true negatives would be biased.

use serde::Deserialize;
use thiserror::Error;

use crate::detect::DetectionSet;
use crate::geometry::{rotated_iou, ConvexPolygon, Point};
use crate::mask::FrameGrid;
use crate::numfmt::fmt_real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no ground-truth spaces: AP is undefined")]
    ZeroGroundTruth,
    #[error("IoU threshold {0} is outside (0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("no IoU thresholds given")]
    NoThresholds,
    #[error("ground-truth file: {0}")]
    BadGroundTruth(String),
    #[error("report file: {0}")]
    BadReport(String),
    #[error("reports disagree on thresholds: {0}")]
    MismatchedReports(String),
}

/// One annotated parking space.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthSpace {
    pub id: String,
    pub shape: ConvexPolygon,
}

/// Outcome of matching one detection, in detection order.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub det_index: usize,
    pub is_tp: bool,
    pub matched_gt: Option<String>,
}

/// Greedy score-order matching at one IoU threshold. A ground truth is
/// consumed only by the detection that claims it as a true positive.
pub fn match_detections(
    dets: &DetectionSet,
    gts: &[GroundTruthSpace],
    iou_threshold: f64,
) -> Vec<MatchOutcome> {
    let det_polys: Vec<_> = dets.detections.iter().map(|d| d.rect.to_polygon()).collect();
    let mut taken = vec![false; gts.len()];
    let mut out = Vec::with_capacity(det_polys.len());
    for (di, poly) in det_polys.iter().enumerate() {
        let mut best: Option<usize> = None;
        let mut best_iou = 0.0;
        for (gi, gt) in gts.iter().enumerate() {
            if taken[gi] {
                continue;
            }
            let iou = rotated_iou(poly, &gt.shape);
            if best.is_none() || iou > best_iou {
                best = Some(gi);
                best_iou = iou;
            }
        }
        match best {
            Some(gi) if best_iou >= iou_threshold => {
                taken[gi] = true;
                out.push(MatchOutcome { det_index: di, is_tp: true, matched_gt: Some(gts[gi].id.clone()) });
            }
            _ => out.push(MatchOutcome { det_index: di, is_tp: false, matched_gt: None }),
        }
    }
    out
}

/// All-points interpolated average precision over a TP/FP sequence already
/// in descending score order.
pub fn average_precision(labels: &[bool], num_gt: usize) -> Result<f64, EvalError> {
    if num_gt == 0 {
        return Err(EvalError::ZeroGroundTruth);
    }
    let n = labels.len();
    let mut precisions = Vec::with_capacity(n);
    let mut recalls = Vec::with_capacity(n);
    let mut tp = 0usize;
    for (i, &is_tp) in labels.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        precisions.push(tp as f64 / (i + 1) as f64);
        recalls.push(tp as f64 / num_gt as f64);
    }
    // precision envelope: running max from the right
    for i in (0..n.saturating_sub(1)).rev() {
        precisions[i] = precisions[i].max(precisions[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for i in 0..n {
        if labels[i] {
            ap += (recalls[i] - prev_recall) * precisions[i];
            prev_recall = recalls[i];
        }
    }
    Ok(ap)
}

/// Per-threshold evaluation results.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRecord {
    pub iou_threshold: f64,
    pub ap: f64,
    pub tp: usize,
    pub fp: usize,
    pub false_negatives: usize,
    /// Raw (recall, precision) point after each detection in score order.
    pub pr_curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub num_gt: usize,
    pub thresholds: Vec<ThresholdRecord>,
}

pub const DEFAULT_THRESHOLDS: [f64; 2] = [0.25, 0.5];

/// Evaluate a detection set against ground truth at each threshold.
pub fn evaluate(
    dets: &DetectionSet,
    gts: &[GroundTruthSpace],
    thresholds: &[f64],
) -> Result<EvalReport, EvalError> {
    if thresholds.is_empty() {
        return Err(EvalError::NoThresholds);
    }
    for &t in thresholds {
        if !(t > 0.0 && t <= 1.0) {
            return Err(EvalError::ThresholdOutOfRange(t));
        }
    }
    if gts.is_empty() {
        return Err(EvalError::ZeroGroundTruth);
    }
    let mut records = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let outcomes = match_detections(dets, gts, t);
        let labels: Vec<bool> = outcomes.iter().map(|o| o.is_tp).collect();
        let ap = average_precision(&labels, gts.len())?;
        let tp = labels.iter().filter(|&&b| b).count();
        let mut curve = Vec::with_capacity(labels.len());
        let mut cum_tp = 0usize;
        for (i, &is_tp) in labels.iter().enumerate() {
            if is_tp {
                cum_tp += 1;
            }
            curve.push((cum_tp as f64 / gts.len() as f64, cum_tp as f64 / (i + 1) as f64));
        }
        records.push(ThresholdRecord {
            iou_threshold: t,
            ap,
            tp,
            fp: labels.len() - tp,
            false_negatives: gts.len() - tp,
            pr_curve: curve,
        });
    }
    Ok(EvalReport { num_gt: gts.len(), thresholds: records })
}

// --- ground-truth file (JSON) ------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroundTruth {
    width: u32,
    height: u32,
    spaces: Vec<RawSpace>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    id: String,
    polygon: Vec<[f64; 2]>,
}

/// Parse a ground-truth file. Polygons must be counter-clockwise, convex and
/// inside the grid.
pub fn parse_ground_truth(
    text: &str,
) -> Result<(FrameGrid, Vec<GroundTruthSpace>), EvalError> {
    let raw: RawGroundTruth =
        serde_json::from_str(text).map_err(|e| EvalError::BadGroundTruth(e.to_string()))?;
    let grid = FrameGrid::new(raw.width, raw.height)
        .map_err(|e| EvalError::BadGroundTruth(e.to_string()))?;
    let mut spaces = Vec::with_capacity(raw.spaces.len());
    for s in raw.spaces {
        let verts: Vec<Point> = s.polygon.iter().map(|&[x, y]| Point::new(x, y)).collect();
        for &[x, y] in &s.polygon {
            if !(0.0..=grid.width as f64).contains(&x) || !(0.0..=grid.height as f64).contains(&y)
            {
                return Err(EvalError::BadGroundTruth(format!(
                    "space {}: vertex ({x}, {y}) is outside the {}x{} grid",
                    s.id, grid.width, grid.height
                )));
            }
        }
        let shape = ConvexPolygon::try_new(verts)
            .map_err(|e| EvalError::BadGroundTruth(format!("space {}: {e}", s.id)))?;
        spaces.push(GroundTruthSpace { id: s.id, shape });
    }
    Ok((grid, spaces))
}

/// Serialize a ground-truth file, the inverse of [`parse_ground_truth`].
pub fn ground_truth_to_json(grid: FrameGrid, spaces: &[GroundTruthSpace]) -> String {
    let mut out = format!("{{\"width\":{},\"height\":{},\"spaces\":[", grid.width, grid.height);
    for (i, s) in spaces.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{{\"id\":{},\"polygon\":[", serde_json::to_string(&s.id).unwrap()));
        for (j, v) in s.shape.vertices().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", fmt_real(v.x), fmt_real(v.y)));
        }
        out.push_str("]}");
    }
    out.push_str("]}\n");
    out
}

// --- report file (JSON) ------------------------------------------------------

pub fn report_to_json(report: &EvalReport) -> String {
    let mut out = format!("{{\"num_gt\":{},\"thresholds\":[", report.num_gt);
    for (i, rec) in report.thresholds.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"iou_threshold\":{},\"ap\":{},\"tp\":{},\"fp\":{},\"fn\":{},\"pr_curve\":[",
            fmt_real(rec.iou_threshold),
            fmt_real(rec.ap),
            rec.tp,
            rec.fp,
            rec.false_negatives,
        ));
        for (j, &(r, p)) in rec.pr_curve.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", fmt_real(r), fmt_real(p)));
        }
        out.push_str("]}");
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    num_gt: usize,
    thresholds: Vec<RawThresholdRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholdRecord {
    iou_threshold: f64,
    ap: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    false_negatives: usize,
    pr_curve: Vec<(f64, f64)>,
}

pub fn report_from_json(text: &str) -> Result<EvalReport, EvalError> {
    let raw: RawReport =
        serde_json::from_str(text).map_err(|e| EvalError::BadReport(e.to_string()))?;
    Ok(EvalReport {
        num_gt: raw.num_gt,
        thresholds: raw
            .thresholds
            .into_iter()
            .map(|r| ThresholdRecord {
                iou_threshold: r.iou_threshold,
                ap: r.ap,
                tp: r.tp,
                fp: r.fp,
                false_negatives: r.false_negatives,
                pr_curve: r.pr_curve,
            })
            .collect(),
    })
}

// --- aggregation across per-day reports --------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub iou_threshold: f64,
    pub mean_ap: f64,
    pub std_ap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSummary {
    pub num_reports: usize,
    pub thresholds: Vec<AggregateRecord>,
}

/// Mean and sample standard deviation (n-1) of AP per threshold across
/// reports. A single report aggregates to a standard deviation of zero.
pub fn aggregate_reports(reports: &[EvalReport]) -> Result<AggregateSummary, EvalError> {
    let first = reports.first().ok_or(EvalError::MismatchedReports("no reports".into()))?;
    let expected: Vec<f64> = first.thresholds.iter().map(|t| t.iou_threshold).collect();
    for (i, r) in reports.iter().enumerate() {
        let got: Vec<f64> = r.thresholds.iter().map(|t| t.iou_threshold).collect();
        if got != expected {
            return Err(EvalError::MismatchedReports(format!(
                "report {i} has thresholds {got:?}, expected {expected:?}"
            )));
        }
    }
    let n = reports.len();
    let mut thresholds = Vec::with_capacity(expected.len());
    for (ti, &t) in expected.iter().enumerate() {
        let aps: Vec<f64> = reports.iter().map(|r| r.thresholds[ti].ap).collect();
        let mean = aps.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (aps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        thresholds.push(AggregateRecord { iou_threshold: t, mean_ap: mean, std_ap: std });
    }
    Ok(AggregateSummary { num_reports: n, thresholds })
}

pub fn aggregate_to_json(summary: &AggregateSummary) -> String {
    let mut out = format!("{{\"num_reports\":{},\"thresholds\":[", summary.num_reports);
    for (i, rec) in summary.thresholds.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"iou_threshold\":{},\"mean_ap\":{},\"std_ap\":{}}}",
            fmt_real(rec.iou_threshold),
            fmt_real(rec.mean_ap),
            fmt_real(rec.std_ap),
        ));
    }
    out.push_str("]}\n");
    out
}
