//! Run-length-encoded binary car masks and the frame-sequence file format.
//!
//! A mask covers at least one pixel of a fixed frame grid. Pixels are unit
//! squares: pixel `(col, row)` spans `[col, col+1] x [row, row+1]`, so even a
//! one-pixel mask has positive area and four distinct corner points. The RLE
//! is row-major over the whole frame, which gives every bitmap a single
//! canonical encoding.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameGrid {
    pub width: u32,
    pub height: u32,
}

impl FrameGrid {
    pub fn new(width: u32, height: u32) -> Result<Self, MaskError> {
        if width == 0 || height == 0 {
            return Err(MaskError::EmptyGrid);
        }
        width
            .checked_mul(height)
            .ok_or(MaskError::GridTooLarge { width, height })?;
        Ok(Self { width, height })
    }

    pub fn pixel_count(&self) -> u32 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaskError {
    #[error("grid dimensions must be at least 1x1")]
    EmptyGrid,
    #[error("grid {width}x{height} exceeds the addressable pixel range")]
    GridTooLarge { width: u32, height: u32 },
    #[error("mask must cover at least one pixel")]
    EmptyMask,
    #[error("run {index} has zero length")]
    ZeroLengthRun { index: usize },
    #[error("run {index} starts at {start}, before the end of the previous run")]
    UnorderedRuns { index: usize, start: u32 },
    #[error("run {index} covers pixel {end} beyond the {pixels}-pixel grid")]
    RunOutOfBounds { index: usize, end: u64, pixels: u32 },
}

/// A binary mask as sorted, non-overlapping `(start, length)` runs over the
/// row-major pixel index space of its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    grid: FrameGrid,
    runs: Vec<(u32, u32)>,
}

impl Mask {
    pub fn from_runs(grid: FrameGrid, runs: Vec<(u32, u32)>) -> Result<Self, MaskError> {
        if runs.is_empty() {
            return Err(MaskError::EmptyMask);
        }
        let pixels = grid.pixel_count();
        let mut next_free: u64 = 0;
        for (index, &(start, len)) in runs.iter().enumerate() {
            if len == 0 {
                return Err(MaskError::ZeroLengthRun { index });
            }
            if (start as u64) < next_free && index > 0 {
                return Err(MaskError::UnorderedRuns { index, start });
            }
            let end = start as u64 + len as u64;
            if end > pixels as u64 {
                return Err(MaskError::RunOutOfBounds { index, end, pixels });
            }
            next_free = end;
        }
        Ok(Self { grid, runs })
    }

    /// Canonical (maximal-run) encoding of a dense row-major bitmap.
    pub fn from_dense(grid: FrameGrid, bits: &[bool]) -> Result<Self, MaskError> {
        assert_eq!(bits.len(), grid.pixel_count() as usize, "bitmap/grid size mismatch");
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &b) in bits.iter().enumerate() {
            match (b, start) {
                (true, None) => start = Some(i as u32),
                (false, Some(s)) => {
                    runs.push((s, i as u32 - s));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, bits.len() as u32 - s));
        }
        if runs.is_empty() {
            return Err(MaskError::EmptyMask);
        }
        Ok(Self { grid, runs })
    }

    /// Canonical encoding of a sorted, duplicate-free pixel index list.
    pub fn from_sorted_indices(grid: FrameGrid, indices: &[u32]) -> Result<Self, MaskError> {
        if indices.is_empty() {
            return Err(MaskError::EmptyMask);
        }
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for &i in indices {
            match runs.last_mut() {
                Some((s, l)) if *s + *l == i => *l += 1,
                _ => runs.push((i, 1)),
            }
        }
        Mask::from_runs(grid, runs)
    }

    pub fn to_dense(&self) -> Vec<bool> {
        let mut bits = vec![false; self.grid.pixel_count() as usize];
        for &(start, len) in &self.runs {
            for i in start..start + len {
                bits[i as usize] = true;
            }
        }
        bits
    }

    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    pub fn runs(&self) -> &[(u32, u32)] {
        &self.runs
    }

    pub fn area(&self) -> u64 {
        self.runs.iter().map(|&(_, len)| len as u64).sum()
    }

    /// Row-major pixel indices, ascending.
    pub fn pixel_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs.iter().flat_map(|&(start, len)| start..start + len)
    }

    /// Set pixels as `(col, row)` pairs, ascending in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.grid.width;
        self.pixel_indices().map(move |i| (i % w, i / w))
    }

    /// Tight box over the set pixels using outer corners, so a single pixel
    /// at `(col, row)` yields `[col, col+1] x [row, row+1]`.
    pub fn bbox(&self) -> Aabb {
        let w = self.grid.width;
        let (mut min_c, mut max_c, mut min_r, mut max_r) = (u32::MAX, 0u32, u32::MAX, 0u32);
        for &(start, len) in &self.runs {
            // a run may wrap across rows; split it at row boundaries
            let mut idx = start;
            let mut remaining = len;
            while remaining > 0 {
                let row = idx / w;
                let col = idx % w;
                let span = remaining.min(w - col);
                min_c = min_c.min(col);
                max_c = max_c.max(col + span - 1);
                min_r = min_r.min(row);
                max_r = max_r.max(row);
                idx += span;
                remaining -= span;
            }
        }
        Aabb::new(min_c as f64, min_r as f64, (max_c + 1) as f64, (max_r + 1) as f64)
    }

    /// Outer corners of every boundary pixel's unit square, deduplicated.
    /// Never collinear: any nonempty mask yields at least one full pixel
    /// square, so downstream rectangle fitting is always well-posed.
    pub fn corner_points(&self) -> Vec<Point> {
        let set: BTreeSet<(u32, u32)> = self.pixels().collect();
        pixel_corner_points(&set)
    }
}

/// Corner points of the boundary pixels of an arbitrary pixel set. A pixel is
/// a boundary pixel when one of its 4-neighbours is absent; the convex hull
/// of these corners equals the hull of all pixel corners.
pub(crate) fn pixel_corner_points(set: &BTreeSet<(u32, u32)>) -> Vec<Point> {
    let mut corners: BTreeSet<(u32, u32)> = BTreeSet::new();
    for &(c, r) in set {
        let neighbours = [
            c.checked_sub(1).map(|cc| (cc, r)),
            Some((c + 1, r)),
            r.checked_sub(1).map(|rr| (c, rr)),
            Some((c, r + 1)),
        ];
        let interior = neighbours
            .iter()
            .all(|n| n.map_or(false, |key| set.contains(&key)));
        if !interior {
            corners.insert((c, r));
            corners.insert((c + 1, r));
            corners.insert((c + 1, r + 1));
            corners.insert((c, r + 1));
        }
    }
    corners
        .into_iter()
        .map(|(x, y)| Point::new(x as f64, y as f64))
        .collect()
}

/// One frame of detector output: masks in the exact order they were ingested.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameObservation {
    pub frame_id: String,
    pub timestamp: i64,
    pub masks: Vec<Mask>,
}

// --- frame-sequence file (JSON Lines) ---------------------------------------

#[derive(Debug, Clone, Error, PartialEq)]
#[error("line {line}, field {field}: {message}")]
pub struct FrameFileError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl FrameFileError {
    fn new(line: usize, field: &str, message: impl Into<String>) -> Self {
        Self { line, field: field.to_string(), message: message.into() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    frame_id: String,
    timestamp: i64,
    width: u32,
    height: u32,
    masks: Vec<RawMask>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMask {
    runs: Vec<u64>,
}

/// Parse a frame-sequence file: one JSON object per line, shared grid,
/// non-decreasing timestamps. Any violation is a hard error naming the line
/// and field.
pub fn parse_frames(text: &str) -> Result<(FrameGrid, Vec<FrameObservation>), FrameFileError> {
    let mut grid: Option<FrameGrid> = None;
    let mut frames: Vec<FrameObservation> = Vec::new();
    let mut last_timestamp: Option<i64> = None;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            return Err(FrameFileError::new(line_no, "line", "blank line in frame file"));
        }
        let raw: RawFrame = serde_json::from_str(line)
            .map_err(|e| FrameFileError::new(line_no, "json", e.to_string()))?;

        let frame_grid = FrameGrid::new(raw.width, raw.height)
            .map_err(|e| FrameFileError::new(line_no, "width", e.to_string()))?;
        match grid {
            None => grid = Some(frame_grid),
            Some(g) if g != frame_grid => {
                return Err(FrameFileError::new(
                    line_no,
                    "width",
                    format!(
                        "grid {}x{} differs from {}x{} on line 1",
                        raw.width, raw.height, g.width, g.height
                    ),
                ));
            }
            _ => {}
        }

        if let Some(prev) = last_timestamp {
            if raw.timestamp < prev {
                return Err(FrameFileError::new(
                    line_no,
                    "timestamp",
                    format!("timestamp {} decreases below {}", raw.timestamp, prev),
                ));
            }
        }
        last_timestamp = Some(raw.timestamp);

        let mut masks = Vec::with_capacity(raw.masks.len());
        for (mi, raw_mask) in raw.masks.iter().enumerate() {
            let field = format!("masks[{mi}].runs");
            if raw_mask.runs.len() % 2 != 0 {
                return Err(FrameFileError::new(line_no, &field, "odd number of run values"));
            }
            if raw_mask.runs.iter().any(|&v| v > u32::MAX as u64) {
                return Err(FrameFileError::new(line_no, &field, "run value out of range"));
            }
            let pairs: Vec<(u32, u32)> = raw_mask
                .runs
                .chunks(2)
                .map(|c| (c[0] as u32, c[1] as u32))
                .collect();
            let mask = Mask::from_runs(grid.unwrap(), pairs)
                .map_err(|e| FrameFileError::new(line_no, &field, e.to_string()))?;
            masks.push(mask);
        }
        frames.push(FrameObservation { frame_id: raw.frame_id, timestamp: raw.timestamp, masks });
    }

    match grid {
        Some(g) => Ok((g, frames)),
        None => Err(FrameFileError::new(0, "file", "frame file is empty")),
    }
}

/// Serialize frames as JSON Lines, the inverse of [`parse_frames`].
pub fn write_frames(grid: FrameGrid, frames: &[FrameObservation]) -> String {
    let mut out = String::new();
    for frame in frames {
        let raw = RawFrame {
            frame_id: frame.frame_id.clone(),
            timestamp: frame.timestamp,
            width: grid.width,
            height: grid.height,
            masks: frame
                .masks
                .iter()
                .map(|m| RawMask {
                    runs: m
                        .runs()
                        .iter()
                        .flat_map(|&(s, l)| [s as u64, l as u64])
                        .collect(),
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("frame serialization cannot fail"));
        out.push('\n');
    }
    out
}
