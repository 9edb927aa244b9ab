//! Count-based slicing and frame integration, plus multi-scale variants.
//!
//! A stream of N events is cut into T slices of exactly `N / T` events
//! (integer division): slice j covers indices `[j*(N/T), (j+1)*(N/T))`. The
//! trailing `N mod T` events belong to no slice and never reach a frame.

use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor};

/// Half-open index ranges `[start, end)` into a stream's event array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicePlan {
    boundaries: Vec<(usize, usize)>,
}

impl SlicePlan {
    /// Accepts an arbitrary plan, e.g. one derived from timestamps. Ranges
    /// must be ordered and disjoint; gaps between them are allowed.
    pub fn from_boundaries(boundaries: Vec<(usize, usize)>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::ZeroSlices);
        }
        let mut prev_end = 0;
        for (j, &(start, end)) in boundaries.iter().enumerate() {
            if start > end || start < prev_end {
                return Err(Error::PlanMismatch(format!(
                    "slice {j} range [{start}, {end}) is inverted or overlaps its predecessor"
                )));
            }
            prev_end = end;
        }
        Ok(SlicePlan { boundaries })
    }

    pub fn num_slices(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundaries(&self) -> &[(usize, usize)] {
        &self.boundaries
    }

    /// One past the last assigned index.
    pub fn end(&self) -> usize {
        self.boundaries.last().map_or(0, |b| b.1)
    }

    pub(crate) fn check_against(&self, stream: &EventStream) -> Result<()> {
        if self.end() > stream.len() {
            return Err(Error::PlanMismatch(format!(
                "boundary {} exceeds event count {}",
                self.end(),
                stream.len()
            )));
        }
        Ok(())
    }

    /// Slice owning each event index, `None` for unassigned events.
    pub fn assignment(&self, len: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; len];
        for (j, &(start, end)) in self.boundaries.iter().enumerate() {
            for slot in &mut out[start.min(len)..end.min(len)] {
                *slot = Some(j);
            }
        }
        out
    }
}

pub fn slice_stream(stream: &EventStream, num_slices: usize) -> Result<SlicePlan> {
    let n = stream.len();
    if num_slices == 0 {
        return Err(Error::ZeroSlices);
    }
    if n > 0 && num_slices > n {
        return Err(Error::SlicesExceedEvents {
            slices: num_slices,
            events: n,
        });
    }
    let width = n / num_slices;
    let boundaries = (0..num_slices)
        .map(|j| (width * j, width * (j + 1)))
        .collect();
    Ok(SlicePlan { boundaries })
}

/// Counts events per (slice, polarity, y, x).
pub fn integrate(stream: &EventStream, plan: &SlicePlan) -> Result<FrameTensor> {
    plan.check_against(stream)?;
    let height = usize::from(stream.height());
    let width = usize::from(stream.width());
    let mut frames = FrameTensor::zeros(plan.num_slices(), height, width)?;
    let events = stream.events();
    for (j, &(start, end)) in plan.boundaries().iter().enumerate() {
        for e in &events[start..end] {
            let idx = frames.index(j, e.p.channel(), usize::from(e.y), usize::from(e.x));
            let cell = &mut frames.counts_mut()[idx];
            *cell = cell
                .checked_add(1)
                .ok_or(Error::CountOutOfRange(u64::from(u32::MAX) + 1))?;
        }
    }
    Ok(frames)
}

/// Base slice count and the short/long-term factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MstiSpec {
    base_slices: usize,
    short_factor: usize,
    long_factor: usize,
}

impl MstiSpec {
    pub const DEFAULT_FACTOR: usize = 2;

    pub fn new(base_slices: usize, short_factor: usize, long_factor: usize) -> Result<Self> {
        if short_factor == 0 || long_factor == 0 {
            return Err(Error::InvalidMsti(format!(
                "factors must be >= 1 (n = {short_factor}, m = {long_factor})"
            )));
        }
        if base_slices < long_factor {
            return Err(Error::InvalidMsti(format!(
                "base T = {base_slices} is smaller than m = {long_factor}"
            )));
        }
        Ok(MstiSpec {
            base_slices,
            short_factor,
            long_factor,
        })
    }

    pub fn with_default_factors(base_slices: usize) -> Result<Self> {
        Self::new(base_slices, Self::DEFAULT_FACTOR, Self::DEFAULT_FACTOR)
    }

    pub fn base_slices(&self) -> usize {
        self.base_slices
    }

    /// `n * T`: each frame integrates 1/n of the base window.
    pub fn short_slices(&self) -> usize {
        self.short_factor * self.base_slices
    }

    /// `ceil(T / m)`: each frame integrates m times the base window.
    pub fn long_slices(&self) -> usize {
        self.base_slices.div_ceil(self.long_factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    ShortTerm,
    Base,
    LongTerm,
}

impl Scale {
    pub const ALL: [Scale; 3] = [Scale::ShortTerm, Scale::Base, Scale::LongTerm];

    pub fn name(self) -> &'static str {
        match self {
            Scale::ShortTerm => "short",
            Scale::Base => "base",
            Scale::LongTerm => "long",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MstiVariants {
    pub short_term: FrameTensor,
    pub base: FrameTensor,
    pub long_term: FrameTensor,
}

impl MstiVariants {
    pub fn get(&self, scale: Scale) -> &FrameTensor {
        match scale {
            Scale::ShortTerm => &self.short_term,
            Scale::Base => &self.base,
            Scale::LongTerm => &self.long_term,
        }
    }
}

pub fn msti_variants(stream: &EventStream, spec: MstiSpec) -> Result<MstiVariants> {
    if spec.short_slices() > stream.len() {
        return Err(Error::SlicesExceedEvents {
            slices: spec.short_slices(),
            events: stream.len(),
        });
    }
    let at = |t| slice_stream(stream, t).and_then(|plan| integrate(stream, &plan));
    Ok(MstiVariants {
        short_term: at(spec.short_slices())?,
        base: at(spec.base_slices())?,
        long_term: at(spec.long_slices())?,
    })
}
