//! Patch-level spatial saliency and the spatial-salient event mask.
//!
//! The sensor is tiled into square patches and each patch is scored by the
//! raw number of events falling into it. For a mask rate `r` over `k`
//! patches the threshold is the density of the patch ranked `floor(k*r)`
//! (1-based); patches whose density strictly exceeds it are masked. Masking
//! zeroes frame cells (element-wise product with a 0/1 pixel mask) or, on
//! streams, drops the events inside masked patches.

use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor, CHANNELS};
use crate::integrator::SlicePlan;
use crate::saliency::{floor_fraction, SaliencyRanking};

pub const DEFAULT_PATCH_SIZE: u16 = 16;

/// Row-major tiling of a `width x height` sensor into square patches.
/// Patches on the right and bottom edges may be partial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGrid {
    width: u16,
    height: u16,
    patch_size: u16,
    cols: usize,
    rows: usize,
}

impl PatchGrid {
    pub fn new(width: u16, height: u16, patch_size: u16) -> Result<Self> {
        if patch_size == 0 {
            return Err(Error::Config("patch size must be at least 1".into()));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry {
                width: width.into(),
                height: height.into(),
            });
        }
        Ok(PatchGrid {
            width,
            height,
            patch_size,
            cols: usize::from(width).div_ceil(usize::from(patch_size)),
            rows: usize::from(height).div_ceil(usize::from(patch_size)),
        })
    }

    pub fn for_stream(stream: &EventStream, patch_size: u16) -> Result<Self> {
        Self::new(stream.width(), stream.height(), patch_size)
    }

    pub fn patch_size(&self) -> u16 {
        self.patch_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Total patch count `k`.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn patch_of(&self, x: u16, y: u16) -> usize {
        let ps = usize::from(self.patch_size);
        (usize::from(y) / ps) * self.cols + usize::from(x) / ps
    }

    /// `(row, col)` of a patch index.
    pub fn position(&self, patch: usize) -> (usize, usize) {
        (patch / self.cols, patch % self.cols)
    }

    fn check_stream(&self, stream: &EventStream) -> Result<()> {
        if (stream.width(), stream.height()) != (self.width, self.height) {
            return Err(Error::GeometryMismatch(format!(
                "grid is {}x{}, stream is {}x{}",
                self.width,
                self.height,
                stream.width(),
                stream.height()
            )));
        }
        Ok(())
    }

    fn check_frames(&self, frames: &FrameTensor) -> Result<()> {
        if (frames.width(), frames.height()) != (usize::from(self.width), usize::from(self.height))
        {
            return Err(Error::GeometryMismatch(format!(
                "mask is {}x{}, frames are {}x{}",
                self.width,
                self.height,
                frames.width(),
                frames.height()
            )));
        }
        Ok(())
    }
}

/// Event count per patch over the whole stream.
pub fn spatial_saliency(stream: &EventStream, grid: &PatchGrid) -> Result<SaliencyRanking> {
    grid.check_stream(stream)?;
    Ok(count_patches(stream, grid, 0..stream.len()))
}

/// One ranking per slice, for masks that follow the content of each frame.
pub fn spatial_saliency_per_slice(
    stream: &EventStream,
    plan: &SlicePlan,
    grid: &PatchGrid,
) -> Result<Vec<SaliencyRanking>> {
    grid.check_stream(stream)?;
    plan.check_against(stream)?;
    Ok(plan
        .boundaries()
        .iter()
        .map(|&(start, end)| count_patches(stream, grid, start..end))
        .collect())
}

fn count_patches(
    stream: &EventStream,
    grid: &PatchGrid,
    range: std::ops::Range<usize>,
) -> SaliencyRanking {
    let mut densities = vec![0u64; grid.len()];
    for e in &stream.events()[range] {
        densities[grid.patch_of(e.x, e.y)] += 1;
    }
    SaliencyRanking::from_densities(densities)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialMask {
    grid: PatchGrid,
    masked: Vec<bool>,
    /// `None` when the rate selects no rank, i.e. an infinite threshold.
    epsilon: Option<u64>,
}

impl SpatialMask {
    /// A mask over `grid` with the given patches selected.
    pub fn from_patches(grid: PatchGrid, masked: Vec<bool>) -> Result<Self> {
        if masked.len() != grid.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} mask entries for {} patches",
                masked.len(),
                grid.len()
            )));
        }
        Ok(SpatialMask {
            grid,
            masked,
            epsilon: None,
        })
    }

    pub fn grid(&self) -> &PatchGrid {
        &self.grid
    }

    pub fn masked(&self) -> &[bool] {
        &self.masked
    }

    pub fn epsilon(&self) -> Option<u64> {
        self.epsilon
    }

    pub fn masked_count(&self) -> usize {
        self.masked.iter().filter(|&&m| m).count()
    }

    #[inline]
    pub fn is_masked(&self, x: u16, y: u16) -> bool {
        self.masked[self.grid.patch_of(x, y)]
    }

    /// Pixel view, `[y][x]` flattened: 0 on masked patches, 1 elsewhere.
    pub fn pixel_mask(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(usize::from(self.grid.width) * usize::from(self.grid.height));
        for y in 0..self.grid.height {
            for x in 0..self.grid.width {
                out.push(u8::from(!self.is_masked(x, y)));
            }
        }
        out
    }
}

pub fn ssem_mask(grid: &PatchGrid, ranking: &SaliencyRanking, rate: f64) -> Result<SpatialMask> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidRate {
            name: "mask rate r",
            value: rate,
        });
    }
    if ranking.len() != grid.len() {
        return Err(Error::GeometryMismatch(format!(
            "ranking covers {} units, grid has {} patches",
            ranking.len(),
            grid.len()
        )));
    }
    let rank = floor_fraction(grid.len(), rate);
    let epsilon = (rank >= 1).then(|| ranking.densities()[ranking.order()[rank - 1]]);
    let masked = match epsilon {
        Some(eps) => ranking.densities().iter().map(|&d| d > eps).collect(),
        None => vec![false; grid.len()],
    };
    Ok(SpatialMask {
        grid: *grid,
        masked,
        epsilon,
    })
}

/// Zeroes every masked patch in every slice and channel.
pub fn apply_frame_mask(frames: &FrameTensor, mask: &SpatialMask) -> Result<FrameTensor> {
    mask.grid.check_frames(frames)?;
    let mut out = frames.clone();
    for slice in 0..frames.num_slices() {
        zero_patches(&mut out, slice, mask);
    }
    Ok(out)
}

/// Per-frame variant: slice `j` is masked with `masks[j]`.
pub fn apply_frame_masks_per_slice(frames: &FrameTensor, masks: &[SpatialMask]) -> Result<FrameTensor> {
    if masks.len() != frames.num_slices() {
        return Err(Error::GeometryMismatch(format!(
            "{} masks for {} slices",
            masks.len(),
            frames.num_slices()
        )));
    }
    let mut out = frames.clone();
    for (slice, mask) in masks.iter().enumerate() {
        mask.grid.check_frames(frames)?;
        zero_patches(&mut out, slice, mask);
    }
    Ok(out)
}

fn zero_patches(frames: &mut FrameTensor, slice: usize, mask: &SpatialMask) {
    let pixels = mask.pixel_mask();
    let (h, w) = (frames.height(), frames.width());
    for channel in 0..CHANNELS {
        let base = frames.index(slice, channel, 0, 0);
        let plane = &mut frames.counts_mut()[base..base + h * w];
        for (cell, &keep) in plane.iter_mut().zip(&pixels) {
            *cell *= u32::from(keep);
        }
    }
}

/// Drops every event inside a masked patch; survivors keep their order.
pub fn ssem_filter_events(stream: &EventStream, mask: &SpatialMask) -> Result<EventStream> {
    mask.grid.check_stream(stream)?;
    Ok(stream.retain_indices(|_, e| !mask.is_masked(e.x, e.y)))
}

/// Per-frame variant: events in slice `j` are filtered by `masks[j]`;
/// events outside every slice are kept.
pub fn ssem_filter_events_per_slice(
    stream: &EventStream,
    plan: &SlicePlan,
    masks: &[SpatialMask],
) -> Result<EventStream> {
    plan.check_against(stream)?;
    if masks.len() != plan.num_slices() {
        return Err(Error::GeometryMismatch(format!(
            "{} masks for {} slices",
            masks.len(),
            plan.num_slices()
        )));
    }
    for mask in masks {
        mask.grid.check_stream(stream)?;
    }
    let owner = plan.assignment(stream.len());
    Ok(stream.retain_indices(|i, e| match owner[i] {
        Some(j) => !masks[j].is_masked(e.x, e.y),
        None => true,
    }))
}
