//! Random stream generation for benchmarks and tests.

use rand::Rng;

use crate::event::{Event, EventStream, Polarity};

/// `n` uniformly placed events with non-decreasing timestamps.
pub fn random_stream<R: Rng>(rng: &mut R, n: usize, width: u16, height: u16) -> EventStream {
    let mut t = 0u64;
    let events = (0..n)
        .map(|_| {
            t += rng.gen_range(0..4);
            let p = if rng.gen() { Polarity::Positive } else { Polarity::Negative };
            Event::new(t, rng.gen_range(0..width), rng.gen_range(0..height), p)
        })
        .collect();
    EventStream::new(width, height, events).expect("generated events are in range and sorted")
}

/// Like [`random_stream`] but with events concentrated around a moving
/// blob, so spatial saliency has structure to find.
pub fn blob_stream<R: Rng>(rng: &mut R, n: usize, width: u16, height: u16) -> EventStream {
    let mut t = 0u64;
    let events = (0..n)
        .map(|i| {
            t += rng.gen_range(0..4);
            let phase = i as f64 / n.max(1) as f64;
            let cx = (f64::from(width) * (0.2 + 0.6 * phase)) as i32;
            let cy = (f64::from(height) * 0.5) as i32;
            let spread = (i32::from(width.min(height)) / 6).max(1);
            let (x, y) = if rng.gen_bool(0.8) {
                (
                    (cx + rng.gen_range(-spread..=spread)).clamp(0, i32::from(width) - 1),
                    (cy + rng.gen_range(-spread..=spread)).clamp(0, i32::from(height) - 1),
                )
            } else {
                (
                    rng.gen_range(0..i32::from(width)),
                    rng.gen_range(0..i32::from(height)),
                )
            };
            let p = if rng.gen() { Polarity::Positive } else { Polarity::Negative };
            Event::new(t, x as u16, y as u16, p)
        })
        .collect();
    EventStream::new(width, height, events).expect("generated events are in range and sorted")
}
