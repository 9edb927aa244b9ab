//! Event, stream and frame types.
//!
//! All three are immutable once constructed: constructors validate geometry
//! and ordering so downstream code never has to re-check them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of a brightness change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn from_i8(value: i8) -> Option<Self> {
        match value {
            -1 => Some(Polarity::Negative),
            1 => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Polarity::Negative => -1,
            Polarity::Positive => 1,
        }
    }

    /// Frame channel: 0 for negative, 1 for positive events.
    #[inline]
    pub fn channel(self) -> usize {
        match self {
            Polarity::Negative => 0,
            Polarity::Positive => 1,
        }
    }
}

/// How polarity is written in text inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarityEncoding {
    /// `-1` / `1`
    #[default]
    NegOneOne,
    /// `0` / `1`, with 0 read as a negative event
    ZeroOne,
}

impl PolarityEncoding {
    pub fn decode(self, raw: i64) -> Option<Polarity> {
        match (self, raw) {
            (PolarityEncoding::NegOneOne, -1) | (PolarityEncoding::ZeroOne, 0) => {
                Some(Polarity::Negative)
            }
            (_, 1) => Some(Polarity::Positive),
            _ => None,
        }
    }
}

impl std::str::FromStr for PolarityEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg-one-one" | "neg-one/one" | "-1/1" => Ok(PolarityEncoding::NegOneOne),
            "zero-one" | "zero/one" | "0/1" => Ok(PolarityEncoding::ZeroOne),
            other => Err(Error::Config(format!("unknown polarity encoding `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    /// Timestamp in microseconds.
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub p: Polarity,
}

impl Event {
    pub fn new(t: u64, x: u16, y: u16, p: Polarity) -> Self {
        Event { t, x, y, p }
    }
}

/// A timestamp-sorted event sequence with its sensor geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    width: u16,
    height: u16,
    events: Vec<Event>,
}

impl EventStream {
    /// Validates every event against the geometry and stable-sorts by
    /// timestamp, so equal timestamps keep their input order.
    pub fn new(width: u16, height: u16, mut events: Vec<Event>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry {
                width: width.into(),
                height: height.into(),
            });
        }
        if let Some(e) = events.iter().find(|e| e.x >= width || e.y >= height) {
            return Err(Error::CoordinateOutOfRange {
                x: e.x.into(),
                y: e.y.into(),
                width: width.into(),
                height: height.into(),
            });
        }
        if !events.windows(2).all(|w| w[0].t <= w[1].t) {
            events.sort_by_key(|e| e.t);
        }
        Ok(EventStream {
            width,
            height,
            events,
        })
    }

    pub fn empty(width: u16, height: u16) -> Result<Self> {
        Self::new(width, height, Vec::new())
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Keeps the events whose index satisfies `keep`, preserving order.
    /// Survivors of a sorted in-range stream are still sorted and in range.
    pub(crate) fn retain_indices(&self, mut keep: impl FnMut(usize, &Event) -> bool) -> Self {
        let events = self
            .events
            .iter()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .map(|(_, e)| *e)
            .collect();
        EventStream {
            width: self.width,
            height: self.height,
            events,
        }
    }
}

/// Number of polarity channels in a frame.
pub const CHANNELS: usize = 2;

/// Dense event counts indexed `[slice][channel][y][x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTensor {
    num_slices: usize,
    height: usize,
    width: usize,
    counts: Vec<u32>,
}

impl FrameTensor {
    pub fn zeros(num_slices: usize, height: usize, width: usize) -> Result<Self> {
        let len = Self::checked_len(num_slices, height, width)?;
        Ok(FrameTensor {
            num_slices,
            height,
            width,
            counts: vec![0; len],
        })
    }

    /// Builds a tensor from raw counts; any count above `u32::MAX` is rejected.
    pub fn from_counts(
        num_slices: usize,
        height: usize,
        width: usize,
        counts: Vec<u64>,
    ) -> Result<Self> {
        let len = Self::checked_len(num_slices, height, width)?;
        if counts.len() != len {
            return Err(Error::DimensionOverflow(format!(
                "expected {len} counts for {num_slices}x{CHANNELS}x{height}x{width}, got {}",
                counts.len()
            )));
        }
        let counts = counts
            .into_iter()
            .map(|c| u32::try_from(c).map_err(|_| Error::CountOutOfRange(c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FrameTensor {
            num_slices,
            height,
            width,
            counts,
        })
    }

    pub(crate) fn from_raw(num_slices: usize, height: usize, width: usize, counts: Vec<u32>) -> Self {
        debug_assert_eq!(counts.len(), num_slices * CHANNELS * height * width);
        FrameTensor {
            num_slices,
            height,
            width,
            counts,
        }
    }

    fn checked_len(num_slices: usize, height: usize, width: usize) -> Result<usize> {
        for (name, dim) in [("T", num_slices), ("H", height), ("W", width)] {
            if u32::try_from(dim).is_err() {
                return Err(Error::DimensionOverflow(format!("{name} = {dim} exceeds u32")));
            }
        }
        num_slices
            .checked_mul(CHANNELS)
            .and_then(|v| v.checked_mul(height))
            .and_then(|v| v.checked_mul(width))
            .ok_or_else(|| {
                Error::DimensionOverflow(format!(
                    "{num_slices}x{CHANNELS}x{height}x{width} elements"
                ))
            })
    }

    pub fn num_slices(&self) -> usize {
        self.num_slices
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Flat counts in slice, channel, row, column order.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.counts
    }

    #[inline]
    pub fn index(&self, slice: usize, channel: usize, y: usize, x: usize) -> usize {
        ((slice * CHANNELS + channel) * self.height + y) * self.width + x
    }

    pub fn get(&self, slice: usize, channel: usize, y: usize, x: usize) -> u32 {
        self.counts[self.index(slice, channel, y, x)]
    }

    pub fn slice_len(&self) -> usize {
        CHANNELS * self.height * self.width
    }

    /// Counts for one slice, both channels.
    pub fn slice(&self, slice: usize) -> &[u32] {
        let n = self.slice_len();
        &self.counts[slice * n..(slice + 1) * n]
    }

    pub fn slice_sum(&self, slice: usize) -> u64 {
        self.slice(slice).iter().map(|&c| u64::from(c)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: u64, x: u16, y: u16, p: i8) -> Event {
        Event::new(t, x, y, Polarity::from_i8(p).unwrap())
    }

    #[test]
    fn stable_sort_keeps_tie_order() {
        let s = EventStream::new(
            4,
            4,
            vec![ev(5, 0, 0, 1), ev(1, 1, 0, 1), ev(5, 2, 0, -1), ev(1, 3, 0, -1)],
        )
        .unwrap();
        let xs: Vec<u16> = s.events().iter().map(|e| e.x).collect();
        assert_eq!(xs, [1, 3, 0, 2]);
    }

    #[test]
    fn rejects_out_of_range_and_zero_geometry() {
        assert!(matches!(
            EventStream::new(2, 2, vec![ev(0, 2, 0, 1)]),
            Err(Error::CoordinateOutOfRange { x: 2, .. })
        ));
        assert!(matches!(
            EventStream::empty(0, 3),
            Err(Error::InvalidGeometry { .. })
        ));
    }

    #[test]
    fn count_range_boundary() {
        assert!(FrameTensor::from_counts(1, 1, 1, vec![u64::from(u32::MAX), 0]).is_ok());
        assert!(matches!(
            FrameTensor::from_counts(1, 1, 1, vec![1 << 32, 0]),
            Err(Error::CountOutOfRange(_))
        ));
    }

    #[test]
    fn polarity_encodings() {
        assert_eq!(PolarityEncoding::ZeroOne.decode(0), Some(Polarity::Negative));
        assert_eq!(PolarityEncoding::NegOneOne.decode(0), None);
        assert_eq!(PolarityEncoding::NegOneOne.decode(-1), Some(Polarity::Negative));
        assert_eq!(PolarityEncoding::ZeroOne.decode(-1), None);
        assert_eq!(Polarity::Positive.channel(), 1);
    }
}
