//! Throughput harness behind the `bench` subcommand. Prints JSON lines:
//! one `input` record describing the stream, then one `op` record per op.

use std::time::Instant;

use eventaug::synth::blob_stream;
use eventaug::{
    build_drop_plan, integrate, msti_variants, parse_binary_stream, slice_stream,
    spatial_saliency, ssem_filter_events, ssem_mask, temporal_saliency, tsem_filter_events,
    write_binary_stream, DropScope, EventStream, MstiSpec, PatchGrid, DEFAULT_PATCH_SIZE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::{CliError, CliResult};

pub const OPS: [&str; 8] = [
    "parse",
    "write",
    "integrate",
    "msti",
    "spatial-saliency",
    "ssem",
    "temporal-saliency",
    "tsem",
];

/// DAVIS346 resolution.
const SYNTH_WIDTH: u16 = 346;
const SYNTH_HEIGHT: u16 = 260;

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Input {
        source: String,
        events: usize,
        width: u16,
        height: u16,
        slices: usize,
    },
    Op {
        op: String,
        events: usize,
        runs_s: Vec<f64>,
        median_s: f64,
        events_per_s: f64,
        peak_stream_events: usize,
    },
}

pub fn parse_ops(spec: &str) -> CliResult<Vec<&'static str>> {
    if spec.trim() == "all" {
        return Ok(OPS.to_vec());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            OPS.iter()
                .copied()
                .find(|op| *op == name)
                .ok_or_else(|| CliError::Usage(format!("unknown op `{name}`; known: all, {}", OPS.join(", "))))
        })
        .collect::<CliResult<Vec<_>>>()
        .and_then(|ops| {
            if ops.is_empty() {
                Err(CliError::Usage("--ops is empty".into()))
            } else {
                Ok(ops)
            }
        })
}

pub fn synthetic_stream(events: usize) -> EventStream {
    blob_stream(&mut ChaCha8Rng::seed_from_u64(0), events, SYNTH_WIDTH, SYNTH_HEIGHT)
}

fn median(runs: &[f64]) -> f64 {
    let mut sorted = runs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// Runs `op` on `stream` once; returns the largest stream it held.
fn run_op(op: &str, stream: &EventStream, slices: usize, encoded: &[u8]) -> eventaug::Result<usize> {
    let n = stream.len();
    let grid = || PatchGrid::for_stream(stream, DEFAULT_PATCH_SIZE);
    let peak = match op {
        "parse" => parse_binary_stream(encoded)?.len().max(n),
        "write" => {
            std::hint::black_box(write_binary_stream(stream));
            n
        }
        "integrate" => {
            std::hint::black_box(integrate(stream, &slice_stream(stream, slices)?)?);
            n
        }
        "msti" => {
            std::hint::black_box(msti_variants(stream, MstiSpec::with_default_factors(slices)?)?);
            n
        }
        "spatial-saliency" => {
            std::hint::black_box(spatial_saliency(stream, &grid()?)?);
            n
        }
        "ssem" => {
            let grid = grid()?;
            let mask = ssem_mask(&grid, &spatial_saliency(stream, &grid)?, 0.25)?;
            ssem_filter_events(stream, &mask)?.len().max(n)
        }
        "temporal-saliency" => {
            std::hint::black_box(temporal_saliency(stream, &slice_stream(stream, slices)?)?);
            n
        }
        "tsem" => {
            let plan = slice_stream(stream, slices)?;
            let drop_plan = build_drop_plan(&temporal_saliency(stream, &plan)?, 0.1, DropScope::AllSlices)?;
            tsem_filter_events(stream, &plan, &drop_plan, 42)?.len().max(n)
        }
        other => unreachable!("op {other} validated by parse_ops"),
    };
    Ok(peak)
}

pub fn run(
    stream: &EventStream,
    source: String,
    ops: &[&str],
    repeat: usize,
    slices: usize,
) -> CliResult<Vec<Record>> {
    let mut records = vec![Record::Input {
        source,
        events: stream.len(),
        width: stream.width(),
        height: stream.height(),
        slices,
    }];
    let encoded = write_binary_stream(stream);
    for &op in ops {
        let mut runs = Vec::with_capacity(repeat);
        let mut peak = 0;
        for _ in 0..repeat {
            let start = Instant::now();
            let p = run_op(op, stream, slices, &encoded).map_err(|e| CliError::Data(format!("{op}: {e}")))?;
            runs.push(start.elapsed().as_secs_f64());
            peak = peak.max(p);
        }
        let median_s = median(&runs);
        records.push(Record::Op {
            op: op.to_string(),
            events: stream.len(),
            events_per_s: if median_s > 0.0 { stream.len() as f64 / median_s } else { f64::INFINITY },
            runs_s: runs,
            median_s,
            peak_stream_events: peak,
        });
    }
    Ok(records)
}
